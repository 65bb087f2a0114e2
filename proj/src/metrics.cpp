#include "trackx/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "trackx/algebra.hpp"
#include "trackx/error.hpp"

namespace trackx {

namespace {

Metric ratio(Duration num, Duration den) {
  if (den == 0) return std::nullopt;
  return static_cast<double>(num) / static_cast<double>(den);
}

void require_truth(const Track& truth) {
  if (!is_label_like(truth.kind)) {
    throw Error(ErrorCode::TypeMismatch,
                truth.id.canonical() + " is a " + std::string(to_string(truth.kind)) +
                    " track; ground truth must be a label track");
  }
}

}  // namespace

Metric ContainerTrack::fill_fraction() const {
  return ratio(numerator.duration(), denominator.duration());
}

double jaccard(const IntervalSet& a, const IntervalSet& b) {
  const Duration inter = intersect(a, b).duration();
  const Duration uni = a.duration() + b.duration() - inter;
  if (uni == 0) return 1.0;
  return static_cast<double>(inter) / static_cast<double>(uni);
}

double jaccard(const Track& a, const Track& b) {
  return jaccard(to_interval_set(a), to_interval_set(b));
}

Report report(const IntervalSet& predicted, const IntervalSet& truth, const Interval& domain) {
  if (!domain.valid()) throw Error(ErrorCode::InvalidInterval, "report domain is empty");
  const IntervalSet p = clip(predicted, domain);
  const IntervalSet g = clip(truth, domain);
  const IntervalSet hits = intersect(p, g);
  const IntervalSet agree = negate(errors(p, g), domain);

  Report r;
  r.true_positive = hits.duration();
  r.false_positive = p.duration() - r.true_positive;
  r.false_negative = g.duration() - r.true_positive;
  r.true_negative = domain.length() - r.true_positive - r.false_positive - r.false_negative;

  r.accuracy = ratio(agree.duration(), domain.length());
  r.precision = ratio(r.true_positive, p.duration());
  r.recall = ratio(r.true_positive, g.duration());
  // 2PR/(P+R) rewritten over durations; defined whenever P and R are, and 0
  // when both are 0.
  if (r.precision && r.recall) {
    r.f1 = ratio(2 * r.true_positive, 2 * r.true_positive + r.false_positive + r.false_negative);
  }

  r.containers.push_back({"accuracy", IntervalSet{domain}, agree, r.accuracy});
  r.containers.push_back({"precision", p, hits, r.precision});
  r.containers.push_back({"recall", g, hits, r.recall});
  // |P∨G| + |P∧G| = |P| + |G|, so F1 = 2n / (n + d) for this pair.
  r.containers.push_back({"f1", unite(p, g), hits, r.f1});
  return r;
}

Report report(const Track& predicted, const Track& truth, const Interval& domain) {
  require_truth(truth);
  return report(to_interval_set(predicted), coverage(truth.events), domain);
}

RocCurve roc(const Track& classifier, const Track& truth, const Interval& domain) {
  if (classifier.kind != TrackKind::classifier) {
    throw Error(ErrorCode::TypeMismatch, classifier.id.canonical() + " is not a classifier track");
  }
  require_truth(truth);
  const IntervalSet g = clip(coverage(truth.events), domain);
  const Duration positives = g.duration();
  const Duration negatives = domain.length() - positives;
  if (positives == 0 || negatives == 0) {
    throw Error(ErrorCode::DegenerateTruth,
                "ROC undefined: ground truth " + truth.id.canonical() +
                    (positives == 0 ? " is empty" : " covers the whole domain"));
  }

  struct Scored {
    double score;
    Duration tp;
    Duration fp;
  };
  std::vector<Scored> scored;
  scored.reserve(classifier.events.size());
  for (const auto& e : classifier.events) {
    const Interval iv{std::max(e.interval.start, domain.start), std::min(e.interval.end, domain.end)};
    if (!iv.valid() || !e.payload.score) continue;
    const Duration tp = g.overlap(iv);
    scored.push_back({*e.payload.score, tp, iv.length() - tp});
  }
  std::sort(scored.begin(), scored.end(),
            [](const Scored& a, const Scored& b) { return a.score > b.score; });

  RocCurve curve;
  constexpr double kInf = std::numeric_limits<double>::infinity();
  curve.points.push_back({0.0, 0.0, kInf});
  Duration tp = 0, fp = 0;
  for (std::size_t i = 0; i < scored.size();) {
    const double theta = scored[i].score;
    for (; i < scored.size() && scored[i].score == theta; ++i) {
      tp += scored[i].tp;
      fp += scored[i].fp;
    }
    curve.points.push_back({static_cast<double>(fp) / static_cast<double>(negatives),
                            static_cast<double>(tp) / static_cast<double>(positives), theta});
  }
  if (tp != positives || fp != negatives) curve.points.push_back({1.0, 1.0, -kInf});

  for (std::size_t i = 1; i < curve.points.size(); ++i) {
    const auto& a = curve.points[i - 1];
    const auto& b = curve.points[i];
    curve.auc += (b.fpr - a.fpr) * (a.tpr + b.tpr) / 2.0;
  }
  curve.auc = std::clamp(curve.auc, 0.0, 1.0);
  return curve;
}

EventScore event_score(const IntervalSet& predicted, std::span<const Event> truth) {
  EventScore s;
  s.total = truth.size();
  for (const auto& e : truth) {
    if (predicted.intersects(e.interval)) ++s.detected;
  }
  s.score = s.total == 0 ? 1.0 : static_cast<double>(s.detected) / static_cast<double>(s.total);
  return s;
}

EventScore event_score(const Track& predicted, const Track& truth) {
  return event_score(to_interval_set(predicted), truth.events);
}

}  // namespace trackx
