#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "trackx/interval.hpp"
#include "trackx/model.hpp"

namespace trackx {

// A metric value; nullopt marks an undefined ratio (0/0).
using Metric = std::optional<double>;

// Metric spatialized on the timeline: the filled part of the denominator is
// the numerator, blanks localize the mispredictions.
struct ContainerTrack {
  std::string metric_name;
  IntervalSet denominator;
  IntervalSet numerator;
  Metric value;

  // duration(numerator) / duration(denominator).
  Metric fill_fraction() const;
};

struct Report {
  Metric accuracy;
  Metric precision;
  Metric recall;
  Metric f1;
  // Durations in ticks, after clipping both tracks to the domain.
  Duration true_positive = 0;
  Duration false_positive = 0;
  Duration false_negative = 0;
  Duration true_negative = 0;
  // accuracy, precision, recall, f1 in that order.
  std::vector<ContainerTrack> containers;
};

struct RocPoint {
  double fpr = 0.0;
  double tpr = 0.0;
  // +inf for the origin, -inf for the (1, 1) closure when the classifier
  // never covers the whole domain.
  double threshold = 0.0;
};

struct RocCurve {
  std::vector<RocPoint> points;
  double auc = 0.0;
};

struct EventScore {
  std::size_t detected = 0;
  std::size_t total = 0;
  double score = 1.0;
};

// |a ∧ b| / |a ∨ b|; 1 when both are empty.
double jaccard(const IntervalSet& a, const IntervalSet& b);
double jaccard(const Track& a, const Track& b);

Report report(const IntervalSet& predicted, const IntervalSet& truth, const Interval& domain);
// `truth` must be a label or protocol track (TypeMismatch otherwise).
Report report(const Track& predicted, const Track& truth, const Interval& domain);

// Sweeps every distinct score as a threshold. Throws DegenerateTruth when the
// truth is empty or covers the whole domain, TypeMismatch on wrong kinds.
RocCurve roc(const Track& classifier, const Track& truth, const Interval& domain);

// Ground-truth events overlapped by at least one tick of `predicted`.
EventScore event_score(const IntervalSet& predicted, std::span<const Event> truth);
EventScore event_score(const Track& predicted, const Track& truth);

}  // namespace trackx
