#include <gtest/gtest.h>

#include "support.hpp"
#include "trackx/algebra.hpp"
#include "trackx/error.hpp"

using namespace trackx;
using namespace trackx::testing;

namespace {

IntervalSet random_set(Rng& rng, const Interval& domain, int max_events = 30) {
  return IntervalSet(random_intervals(rng, domain, max_events));
}

template <class Fn>
ErrorCode code_of(Fn fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::InvalidArgument;
}

}  // namespace

TEST(Algebra, WorkedExample) {
  const IntervalSet a{{0, 10}}, b{{5, 15}};
  EXPECT_EQ(intersect(a, b), (IntervalSet{{5, 10}}));
  EXPECT_EQ(unite(a, b), (IntervalSet{{0, 15}}));
  EXPECT_EQ(subtract(a, b), (IntervalSet{{0, 5}}));
  EXPECT_EQ(errors(a, b), (IntervalSet{{0, 5}, {10, 15}}));
  EXPECT_EQ(intersect(a, a), a);
  EXPECT_EQ(unite(a, IntervalSet{}), a);
}

TEST(Algebra, Negate) {
  EXPECT_EQ(negate({}, {0, 100}), (IntervalSet{{0, 100}}));
  EXPECT_EQ(negate({{10, 20}}, {0, 30}), (IntervalSet{{0, 10}, {20, 30}}));
  EXPECT_EQ(negate({{0, 30}}, {0, 30}), IntervalSet{});
  EXPECT_EQ(code_of([] { negate({{10, 40}}, {0, 30}); }), ErrorCode::OutOfDomain);
}

TEST(Algebra, ClipAndCloseGaps) {
  const IntervalSet s{{0, 10}, {12, 20}, {30, 40}};
  EXPECT_EQ(clip(s, {5, 35}), (IntervalSet{{5, 10}, {12, 20}, {30, 35}}));
  EXPECT_EQ(close_gaps(s, 2), (IntervalSet{{0, 20}, {30, 40}}));
  EXPECT_EQ(close_gaps(s, 1), s);
  EXPECT_EQ(close_gaps(s, 10), (IntervalSet{{0, 40}}));
}

TEST(MatchSubtract, WholeEvents) {
  std::vector<Event> a{ev(0, 10)};
  EXPECT_TRUE(match_subtract(a, {{9, 20}}).empty());
  std::vector<Event> two{ev(0, 10), ev(30, 40)};
  auto kept = match_subtract(two, {{5, 15}});
  ASSERT_EQ(kept.size(), 1u);
  EXPECT_EQ(kept[0].interval, (Interval{30, 40}));
  EXPECT_EQ(match_subtract(two, {}), two);
  // touching is not overlapping
  EXPECT_EQ(match_subtract(a, {{10, 12}}), a);
}

TEST(Variation, Examples) {
  auto same = variation(IntervalSet{{0, 10}}, IntervalSet{{0, 10}});
  EXPECT_TRUE(same.added.empty());
  EXPECT_TRUE(same.removed.empty());
  auto d = variation(IntervalSet{{0, 10}}, IntervalSet{{5, 15}});
  EXPECT_EQ(d.added, (IntervalSet{{0, 5}}));
  EXPECT_EQ(d.removed, (IntervalSet{{10, 15}}));
}

TEST(Variation, PredecessorLookup) {
  Session s;
  s.add(classifier_track("Tremor", {scored(0, 10, 0.9)}, "Ann", "1.1"));
  s.add(classifier_track("Tremor", {scored(5, 15, 0.9)}, "Ann", "1.2"));
  s.add(classifier_track("Tremor", {scored(0, 100, 0.9)}, "Bob", "1.0"));
  const Track& v12 = *s.find("TremorAnn1.2");
  auto d = variation(s, v12);
  EXPECT_EQ(d.added, (IntervalSet{{10, 15}}));
  EXPECT_EQ(d.removed, (IntervalSet{{0, 5}}));
  EXPECT_EQ(code_of([&] { variation(s, *s.find("TremorAnn1.1")); }), ErrorCode::NoPredecessorVersion);
}

TEST(Threshold, Examples) {
  Track c = classifier_track("X", {scored(0, 5, 0.4), scored(5, 9, 0.8)});
  EXPECT_EQ(threshold_intervals(c, 0.5), (IntervalSet{{5, 9}}));
  EXPECT_EQ(threshold_intervals(c, 0.0), (IntervalSet{{0, 9}}));
  EXPECT_EQ(threshold_intervals(c, 0.8), (IntervalSet{{5, 9}}));
  EXPECT_EQ(code_of([&] { threshold_intervals(c, 1.5); }), ErrorCode::InvalidArgument);
  Track l = label_track("X", {ev(0, 5)});
  EXPECT_EQ(code_of([&] { threshold_intervals(l, 0.5); }), ErrorCode::NotAClassifierTrack);
}

TEST(Threshold, Monotone) {
  Rng rng(8);
  std::uniform_real_distribution<double> u(0, 1);
  for (int round = 0; round < 500; ++round) {
    Track c = classifier_track("X", random_scored_events(rng, {0, 100000}, 40));
    double t1 = u(rng), t2 = u(rng);
    if (t1 > t2) std::swap(t1, t2);
    EXPECT_TRUE(threshold_intervals(c, t2).is_subset_of(threshold_intervals(c, t1)));
  }
}

TEST(Threshold, AutoConversionUsesTrackThreshold) {
  Track c = classifier_track("X", {scored(0, 5, 0.4), scored(5, 9, 0.8)});
  EXPECT_EQ(to_interval_set(c), (IntervalSet{{5, 9}}));
  c.meta.threshold = 0.3;
  EXPECT_EQ(to_interval_set(c), (IntervalSet{{0, 9}}));
  EXPECT_EQ(positive_events(c).size(), 2u);
}

// Every op against the one-tick boolean oracle on a small domain.
TEST(Algebra, MatchesTickOracle) {
  Rng rng(1234);
  std::uniform_int_distribution<Tick> len(1, 20000);
  for (int round = 0; round < 200; ++round) {
    const Interval domain{0, len(rng)};
    const auto ea = random_label_events(rng, domain, 50);
    const auto eb = random_label_events(rng, domain, 50);
    const IntervalSet a = coverage(ea), b = coverage(eb);
    const Bits ba = to_bits(a, domain), bb = to_bits(b, domain);
    EXPECT_TRUE(same(unite(a, b), combine(ba, bb, [](bool x, bool y) { return x || y; }), domain));
    EXPECT_TRUE(same(intersect(a, b), combine(ba, bb, [](bool x, bool y) { return x && y; }), domain));
    EXPECT_TRUE(same(subtract(a, b), combine(ba, bb, [](bool x, bool y) { return x && !y; }), domain));
    EXPECT_TRUE(same(errors(a, b), combine(ba, bb, [](bool x, bool y) { return x != y; }), domain));
    EXPECT_TRUE(same(negate(a, domain), combine(ba, ba, [](bool x, bool) { return !x; }), domain));
    auto d = variation(a, b);
    EXPECT_TRUE(same(d.added, combine(ba, bb, [](bool x, bool y) { return x && !y; }), domain));
    EXPECT_TRUE(same(d.removed, combine(ba, bb, [](bool x, bool y) { return !x && y; }), domain));

    // match_subtract: an event survives iff none of its ticks is in b.
    std::vector<Event> expected;
    for (const auto& e : ea) {
      bool hit = false;
      for (Tick t = e.interval.start; t < e.interval.end && !hit; ++t) hit = bb[t - domain.start];
      if (!hit) expected.push_back(e);
    }
    EXPECT_EQ(match_subtract(ea, b), expected);
  }
}

TEST(AlgebraLaws, HoldOnRandomSets) {
  Rng rng(99);
  const Interval domain{0, 1'000'000};
  for (int round = 0; round < 500; ++round) {
    const IntervalSet a = random_set(rng, domain), b = random_set(rng, domain), c = random_set(rng, domain);
    EXPECT_EQ(negate(unite(a, b), domain), intersect(negate(a, domain), negate(b, domain)));
    EXPECT_EQ(negate(intersect(a, b), domain), unite(negate(a, domain), negate(b, domain)));
    EXPECT_EQ(subtract(a, b), intersect(a, negate(b, domain)));
    EXPECT_EQ(errors(a, b), unite(subtract(a, b), subtract(b, a)));
    EXPECT_EQ(unite(a, a), a);
    EXPECT_EQ(intersect(a, a), a);
    EXPECT_EQ(unite(a, b), unite(b, a));
    EXPECT_EQ(intersect(a, b), intersect(b, a));
    EXPECT_EQ(unite(unite(a, b), c), unite(a, unite(b, c)));
    EXPECT_EQ(intersect(intersect(a, b), c), intersect(a, intersect(b, c)));
    EXPECT_EQ(negate(negate(a, domain), domain), a);
    auto d = variation(a, b);
    EXPECT_TRUE(intersect(d.added, d.removed).empty());
    EXPECT_EQ(unite(d.added, d.removed), errors(a, b));
  }
}

TEST(AlgebraLaws, SubtractUsesAnyCoveringDomain) {
  Rng rng(100);
  for (int round = 0; round < 200; ++round) {
    const IntervalSet a = random_set(rng, {100, 5000}), b = random_set(rng, {0, 4000});
    for (Interval d : {Interval{0, 5000}, Interval{-10, 9000}}) {
      EXPECT_EQ(subtract(a, b), intersect(a, negate(b, d)));
    }
  }
}

TEST(TrackBuilders, CombineAnnotatesSourcesAndLabels) {
  Track walk_c = classifier_track("Walk", {scored(0, 10, 0.9), scored(10, 20, 0.2)});
  Track walk_l = label_track("Walk", {labeled(5, 15, "walking")}, "Ann");
  Track u = combine_tracks(SetOp::unite, walk_c, walk_l, {"u", "user", "1.0"});
  EXPECT_EQ(u.kind, TrackKind::label);
  ASSERT_EQ(u.events.size(), 1u);
  EXPECT_EQ(u.events[0].interval, (Interval{0, 15}));
  EXPECT_EQ(u.events[0].payload.label, "Walk|walking");
  EXPECT_EQ(std::get<std::string>(u.events[0].payload.attrs.at("src")), "WalkBob1.0,WalkAnn1.0");

  Track fp = combine_tracks(SetOp::subtract, walk_c, walk_l, {"fp", "user", "1.0"});
  ASSERT_EQ(fp.events.size(), 1u);
  EXPECT_EQ(fp.events[0].interval, (Interval{0, 5}));
  EXPECT_EQ(std::get<std::string>(fp.events[0].payload.attrs.at("src")), "WalkBob1.0");
  EXPECT_NO_THROW(fp.validate());

  Track fn = combine_tracks(SetOp::subtract, walk_l, walk_c, {"fn", "user", "1.0"});
  EXPECT_EQ(to_interval_set(fn), (IntervalSet{{10, 15}}));
}

TEST(TrackBuilders, NegateMatchVariationTransform) {
  Track c = classifier_track("Walk", {scored(0, 10, 0.9), scored(30, 40, 0.7), scored(50, 60, 0.1)});
  Track l = label_track("Walk", {ev(8, 12)});

  Track n = negate_track(l, {0, 60}, {"n", "user", "1.0"});
  EXPECT_EQ(to_interval_set(n), (IntervalSet{{0, 8}, {12, 60}}));
  EXPECT_EQ(n.events[0].payload.label, "not Walk");

  Track m = match_track(c, l, {"m", "user", "1.0"});
  ASSERT_EQ(m.events.size(), 1u);
  EXPECT_EQ(m.events[0].interval, (Interval{30, 40}));
  EXPECT_FALSE(m.events[0].payload.score.has_value());
  EXPECT_NO_THROW(m.validate());

  Track t = transform_track(c, {"t", "user", "1.0"});
  EXPECT_EQ(t.kind, TrackKind::label);
  EXPECT_EQ(to_interval_set(t), (IntervalSet{{0, 10}, {30, 40}}));

  Track older = classifier_track("Walk", {scored(5, 35, 0.9)}, "Bob", "0.9");
  Track v = variation_track(variation(to_interval_set(c), to_interval_set(older)), c, older, {"v", "user", "1.0"});
  EXPECT_EQ(v.kind, TrackKind::diff);
  ASSERT_EQ(v.events.size(), 3u);
  EXPECT_EQ(v.events[0].payload.label, "added");
  EXPECT_EQ(v.events[1].payload.label, "removed");
  EXPECT_EQ(v.events[1].interval, (Interval{10, 30}));
  EXPECT_NO_THROW(v.validate());
}
