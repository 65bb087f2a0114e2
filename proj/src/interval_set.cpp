#include "trackx/interval.hpp"

#include <string>

#include "trackx/error.hpp"

namespace trackx {

IntervalSet::IntervalSet(std::vector<Interval> intervals) {
  for (const auto& iv : intervals) {
    if (!iv.valid()) {
      throw Error(ErrorCode::InvalidInterval,
                  "interval [" + std::to_string(iv.start) + ", " +
                      std::to_string(iv.end) + ") has no extent");
    }
  }
  std::sort(intervals.begin(), intervals.end(),
            [](const Interval& a, const Interval& b) { return a.start < b.start; });
  for (const auto& iv : intervals) {
    if (!intervals_.empty() && iv.start <= intervals_.back().end) {
      intervals_.back().end = std::max(intervals_.back().end, iv.end);
    } else {
      intervals_.push_back(iv);
    }
  }
}

IntervalSet IntervalSet::from_canonical(std::vector<Interval> intervals) {
  IntervalSet out;
  out.intervals_ = std::move(intervals);
  return out;
}

Duration IntervalSet::duration() const {
  Duration total = 0;
  for (const auto& iv : intervals_) total += iv.length();
  return total;
}

namespace {

// First interval whose end is beyond t.
auto first_ending_after(const std::vector<Interval>& v, Tick t) {
  return std::upper_bound(v.begin(), v.end(), t,
                          [](Tick value, const Interval& iv) { return value < iv.end; });
}

}  // namespace

bool IntervalSet::contains(Tick t) const {
  auto it = first_ending_after(intervals_, t);
  return it != intervals_.end() && it->start <= t;
}

bool IntervalSet::covers(const Interval& iv) const {
  auto it = first_ending_after(intervals_, iv.start);
  return it != intervals_.end() && it->contains(iv);
}

bool IntervalSet::intersects(const Interval& iv) const {
  auto it = first_ending_after(intervals_, iv.start);
  return it != intervals_.end() && it->start < iv.end;
}

Duration IntervalSet::overlap(const Interval& iv) const {
  Duration total = 0;
  for (auto it = first_ending_after(intervals_, iv.start);
       it != intervals_.end() && it->start < iv.end; ++it) {
    total += it->overlap(iv);
  }
  return total;
}

bool IntervalSet::is_subset_of(const IntervalSet& other) const {
  return std::all_of(intervals_.begin(), intervals_.end(),
                     [&](const Interval& iv) { return other.covers(iv); });
}

}  // namespace trackx
