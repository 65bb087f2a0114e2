#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "trackx/interval.hpp"
#include "trackx/model.hpp"

namespace trackx {

// ---------------------------------------------------------------------------
// Interval-set algebra

IntervalSet unite(const IntervalSet& a, const IntervalSet& b);
IntervalSet intersect(const IntervalSet& a, const IntervalSet& b);
IntervalSet subtract(const IntervalSet& a, const IntervalSet& b);
// Symmetric difference; the regions where two tracks disagree.
IntervalSet errors(const IntervalSet& a, const IntervalSet& b);

// domain minus `a`. Throws OutOfDomain unless a lies within the domain.
IntervalSet negate(const IntervalSet& a, const Interval& domain);

IntervalSet clip(const IntervalSet& a, const Interval& window);

// Joins neighbours separated by a gap of at most `max_gap` ticks.
IntervalSet close_gaps(const IntervalSet& a, Duration max_gap);

// Whole events of `a` that share no tick with `b`; boundaries are never trimmed.
std::vector<Event> match_subtract(std::span<const Event> a, const IntervalSet& b);

// ---------------------------------------------------------------------------
// Track conversion

// Union of the intervals of events scoring at least `threshold`. Throws
// NotAClassifierTrack / InvalidArgument.
IntervalSet threshold_intervals(const Track& classifier, double threshold);

// The interval set a track contributes to the algebra: classifier tracks are
// thresholded at their current threshold, every other kind uses its events.
IntervalSet to_interval_set(const Track& track);

// Events a track contributes at event granularity: thresholded survivors for
// classifiers, all events otherwise.
std::vector<Event> positive_events(const Track& track);

struct DiffTrack {
  IntervalSet added;    // in new, not in old
  IntervalSet removed;  // in old, not in new
};

DiffTrack variation(const IntervalSet& newer, const IntervalSet& older);

// Diffs `newer` against `older`, or against its predecessor version in the
// session when `older` is null. Throws NoPredecessorVersion.
DiffTrack variation(const Session& session, const Track& newer, const Track* older = nullptr);

// ---------------------------------------------------------------------------
// Generated tracks. Results are label tracks whose events carry a `src`
// attribute listing the contributing track ids; labels are the labels of the
// contributing source events (class label for unlabeled classifier events).

enum class SetOp { unite, intersect, subtract, errors };

Track negate_track(const Track& t, const Interval& domain, TrackId out);
Track combine_tracks(SetOp op, const Track& a, const Track& b, TrackId out);
Track match_track(const Track& a, const Track& b, TrackId out);
// Events labeled "added" / "removed"; kind diff.
Track variation_track(const DiffTrack& diff, const Track& newer, const Track& older, TrackId out);
// Materializes the thresholded intervals of a classifier as a label track.
Track transform_track(const Track& classifier, TrackId out);

}  // namespace trackx
