#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "trackx/model.hpp"

namespace trackx {

struct RawPrediction {
  Interval interval;
  double score = 0.0;
  AttrMap attrs;
};

struct CompressionConfig {
  // Largest gap between consecutive predictions of one run. nullopt picks
  // twice the median start-to-start spacing of the stream.
  std::optional<Duration> eps_t;
  // Largest |s_i - s_first| within a run.
  double eps_s = 0.05;
  // Per-attribute tolerance on |a_ij - a_first,j|; unlisted attributes must
  // match exactly.
  std::map<std::string, double> eps_a;
};

// Resolved gap tolerance for `stream` under `cfg`.
Duration effective_gap_tolerance(std::span<const RawPrediction> stream,
                                 const CompressionConfig& cfg);

// Greedy run formation: each prediction joins the current run while its gap,
// score and attributes stay within tolerance of the run's FIRST prediction.
// A run becomes one event over [run start, run end) with the mean score, mean
// numeric attributes and the first value of text attributes.
// Throws UnsortedStream / OverlappingPredictions / InvalidInterval.
std::vector<Event> compress(std::span<const RawPrediction> stream, const CompressionConfig& cfg);

// Decimal epoch seconds or ISO-8601 to ticks, rounding sub-microsecond digits
// half to even. nullopt when the text is neither.
std::optional<Tick> parse_timestamp(std::string_view text);
// Exact decimal seconds with six fractional digits, e.g. "12.500000".
std::string format_seconds(Tick ticks);

// Reads a track from CSV with mandatory header: start,end plus optional
// score, label and repeated attr:<name> columns. Classifier rows are
// compressed; label and protocol rows must not overlap.
Track import_csv(std::string_view bytes, TrackKind kind, TrackId id,
                 const CompressionConfig& cfg = {});

// Inverse of import_csv for any track (one row per event).
std::string export_csv(const Track& track);

}  // namespace trackx
