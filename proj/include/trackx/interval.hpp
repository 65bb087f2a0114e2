#pragma once

#include <algorithm>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <vector>

namespace trackx {

// Microseconds since the session epoch (Unix epoch for imported data).
using Tick = std::int64_t;
using Duration = std::int64_t;

inline constexpr Tick kTicksPerSecond = 1'000'000;

// Half-open [start, end).
struct Interval {
  Tick start = 0;
  Tick end = 0;

  constexpr Duration length() const { return end - start; }
  constexpr bool valid() const { return end > start; }
  constexpr bool contains(Tick t) const { return start <= t && t < end; }
  constexpr bool contains(const Interval& o) const {
    return start <= o.start && o.end <= end;
  }
  constexpr bool overlaps(const Interval& o) const {
    return start < o.end && o.start < end;
  }
  constexpr Duration overlap(const Interval& o) const {
    const Tick lo = std::max(start, o.start);
    const Tick hi = std::min(end, o.end);
    return hi > lo ? hi - lo : 0;
  }

  friend constexpr bool operator==(const Interval&, const Interval&) = default;
};

// Sorted, disjoint, non-touching intervals. Construction canonicalizes, so two
// sets covering the same points compare equal.
class IntervalSet {
 public:
  IntervalSet() = default;
  IntervalSet(std::initializer_list<Interval> intervals)
      : IntervalSet(std::vector<Interval>(intervals)) {}
  explicit IntervalSet(std::vector<Interval> intervals);

  // Caller guarantees `intervals` is already canonical.
  static IntervalSet from_canonical(std::vector<Interval> intervals);

  std::span<const Interval> intervals() const { return intervals_; }
  std::size_t size() const { return intervals_.size(); }
  bool empty() const { return intervals_.empty(); }
  auto begin() const { return intervals_.begin(); }
  auto end() const { return intervals_.end(); }
  const Interval& operator[](std::size_t i) const { return intervals_[i]; }

  Duration duration() const;
  bool contains(Tick t) const;
  bool covers(const Interval& iv) const;
  bool intersects(const Interval& iv) const;
  // Total overlap between `iv` and the set.
  Duration overlap(const Interval& iv) const;
  bool is_subset_of(const IntervalSet& other) const;
  // Smallest interval covering the set; only meaningful when non-empty.
  Interval hull() const { return {intervals_.front().start, intervals_.back().end}; }

  friend bool operator==(const IntervalSet&, const IntervalSet&) = default;

 private:
  std::vector<Interval> intervals_;
};

}  // namespace trackx
