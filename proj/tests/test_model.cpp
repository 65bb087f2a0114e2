#include <gtest/gtest.h>

#include "support.hpp"
#include "trackx/error.hpp"
#include "trackx/model.hpp"

using namespace trackx;
using namespace trackx::testing;

namespace {

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::InvalidArgument;
}

}  // namespace

TEST(IntervalSet, TouchingIntervalsMerge) {
  IntervalSet s{{5, 9}, {0, 5}};
  ASSERT_EQ(s.size(), 1u);
  EXPECT_EQ(s[0], (Interval{0, 9}));
}

TEST(IntervalSet, OverlapsMergeAndSort) {
  IntervalSet s{{20, 30}, {0, 10}, {5, 12}};
  ASSERT_EQ(s.size(), 2u);
  EXPECT_EQ(s[0], (Interval{0, 12}));
  EXPECT_EQ(s[1], (Interval{20, 30}));
  EXPECT_EQ(s.duration(), 22);
}

TEST(IntervalSet, EmptyIntervalRejected) {
  EXPECT_EQ(code_of([] { IntervalSet s{{3, 3}}; }), ErrorCode::InvalidInterval);
}

TEST(IntervalSet, Queries) {
  IntervalSet s{{0, 10}, {20, 30}};
  EXPECT_TRUE(s.contains(0));
  EXPECT_FALSE(s.contains(10));
  EXPECT_TRUE(s.covers({22, 30}));
  EXPECT_FALSE(s.covers({5, 25}));
  EXPECT_TRUE(s.intersects({9, 11}));
  EXPECT_FALSE(s.intersects({10, 20}));
  EXPECT_EQ(s.overlap({5, 25}), 10);
  EXPECT_TRUE((IntervalSet{{1, 2}, {21, 29}}).is_subset_of(s));
  EXPECT_FALSE((IntervalSet{{9, 11}}).is_subset_of(s));
}

TEST(IntervalSet, CanonicalFormMatchesOracleRuns) {
  Rng rng(7);
  const Interval domain{0, 2000};
  for (int i = 0; i < 300; ++i) {
    // arbitrary overlapping input
    std::vector<Interval> raw;
    std::uniform_int_distribution<Tick> t(0, 1999);
    for (int k = 0; k < 20; ++k) {
      Tick a = t(rng), b = t(rng);
      if (a == b) continue;
      raw.push_back({std::min(a, b), std::max(a, b)});
    }
    Bits bits(2000, 0);
    for (auto iv : raw) {
      for (Tick x = iv.start; x < iv.end; ++x) bits[x] = 1;
    }
    EXPECT_TRUE(same(IntervalSet(raw), bits, domain));
  }
}

TEST(Normalize, CanonicalInputUnchanged) {
  std::vector<Event> in{ev(0, 10), ev(10, 20)};
  EXPECT_EQ(normalize(in, OverlapPolicy::reject), in);
}

TEST(Normalize, RejectReportsOverlap) {
  try {
    normalize({ev(0, 10), ev(5, 15)}, OverlapPolicy::reject);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::OverlapError);
    EXPECT_NE(std::string(e.what()).find("[0, 10)"), std::string::npos) << e.what();
  }
}

TEST(Normalize, EmptyIntervalRejected) {
  EXPECT_EQ(code_of([] { normalize({ev(4, 4)}, OverlapPolicy::merge_max_score); }), ErrorCode::InvalidInterval);
}

TEST(Normalize, MergeMaxScore) {
  auto out = normalize({scored(0, 10, 0.4), scored(5, 15, 0.9)}, OverlapPolicy::merge_max_score);
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(out[0].interval, (Interval{0, 15}));
  EXPECT_EQ(out[0].payload.score, 0.9);
}

TEST(Normalize, MergeKeepsFirstLabel) {
  auto out = normalize({labeled(5, 15, "b"), labeled(0, 10, "a")}, OverlapPolicy::merge_max_score);
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(out[0].payload.label, "a");
}

TEST(Normalize, ClipTruncatesAndDrops) {
  auto out = normalize({ev(0, 10), ev(5, 15), ev(2, 8)}, OverlapPolicy::clip);
  ASSERT_EQ(out.size(), 2u);
  EXPECT_EQ(out[0].interval, (Interval{0, 10}));
  EXPECT_EQ(out[1].interval, (Interval{10, 15}));
}

// Each covered tick of the merged output carries the max score of the input
// events covering it, compared run by run.
TEST(Normalize, MergeMaxScoreMatchesPerTickOracle) {
  Rng rng(11);
  std::uniform_int_distribution<Tick> t(0, 499);
  std::uniform_real_distribution<double> s(0, 1);
  for (int round = 0; round < 200; ++round) {
    std::vector<Event> in;
    for (int k = 0; k < 12; ++k) {
      Tick a = t(rng), b = t(rng);
      if (a == b) continue;
      in.push_back(scored(std::min(a, b), std::max(a, b), s(rng)));
    }
    std::vector<double> best(500, -1.0);
    for (const auto& e : in) {
      for (Tick x = e.interval.start; x < e.interval.end; ++x) best[x] = std::max(best[x], *e.payload.score);
    }
    auto out = normalize(in, OverlapPolicy::merge_max_score);
    Bits covered(500, 0);
    for (const auto& e : out) {
      double run_max = -1.0;
      for (Tick x = e.interval.start; x < e.interval.end; ++x) {
        covered[x] = 1;
        run_max = std::max(run_max, best[x]);
      }
      EXPECT_EQ(*e.payload.score, run_max);
    }
    for (std::size_t x = 0; x < 500; ++x) EXPECT_EQ(covered[x] != 0, best[x] >= 0.0);
  }
}

TEST(Normalize, Idempotent) {
  Rng rng(3);
  std::uniform_int_distribution<Tick> t(0, 999);
  for (auto policy : {OverlapPolicy::merge_max_score, OverlapPolicy::clip}) {
    for (int round = 0; round < 200; ++round) {
      std::vector<Event> in;
      for (int k = 0; k < 15; ++k) {
        Tick a = t(rng), b = t(rng);
        if (a != b) in.push_back(scored(std::min(a, b), std::max(a, b), 0.5));
      }
      auto once = normalize(in, policy);
      EXPECT_EQ(normalize(once, policy), once);
      EXPECT_EQ(normalize(once, OverlapPolicy::reject), once);
    }
  }
}

TEST(Duration, Basics) {
  EXPECT_EQ(duration(std::vector<Event>{}), 0);
  std::vector<Event> es{ev(0, 10), ev(20, 25)};
  EXPECT_EQ(duration(es), 15);
}

TEST(Duration, MatchesTickCountAndHullBound) {
  Rng rng(5);
  const Interval domain{0, 5000};
  for (int i = 0; i < 200; ++i) {
    auto es = random_label_events(rng, domain, 30);
    EXPECT_EQ(duration(es), count(to_bits(es, domain)));
    if (!es.empty()) EXPECT_LE(duration(es), es.back().interval.end - es.front().interval.start);
  }
}

TEST(TrackIdTest, CanonicalRoundTrip) {
  const std::vector<std::string> authors{"John", "Erhan", "Jo"};
  for (const TrackId& id : {TrackId{"Sleeping", "John", "1.0"}, TrackId{"Turning", "Erhan", "1.2"},
                            TrackId{"Walk", "Jo", "10.3.1"}}) {
    EXPECT_EQ(TrackId::parse(id.canonical(), authors), id);
  }
}

TEST(TrackIdTest, UnknownAuthorCannotSplit) {
  const std::vector<std::string> authors{"Ann"};
  EXPECT_EQ(code_of([&] { TrackId::parse("SleepingJohn1.0", authors); }), ErrorCode::BadTrackId);
}

TEST(Versions, NumericSegments) {
  EXPECT_LT(compare_versions("1.2", "1.10"), 0);
  EXPECT_EQ(compare_versions("1", "1.0"), 0);
  EXPECT_GT(compare_versions("2.0", "1.99"), 0);
  EXPECT_FALSE(is_version("1..2"));
  EXPECT_FALSE(is_version("v1"));
  EXPECT_EQ(code_of([] { parse_version("1.a"); }), ErrorCode::BadVersionString);
}

TEST(RgbTest, ParseAndHex) {
  EXPECT_EQ(Rgb::parse("#ff0080")->hex(), "#ff0080");
  EXPECT_EQ(Rgb::parse("00FF00")->hex(), "#00ff00");
  EXPECT_TRUE(Rgb::parse("Red").has_value());
  EXPECT_FALSE(Rgb::parse("#12345").has_value());
  EXPECT_FALSE(Rgb::parse("chartreuse").has_value());
}

TEST(TrackTest, KindInvariants) {
  Track c = classifier_track("Walk", {scored(0, 5, 0.3)});
  EXPECT_NO_THROW(c.validate());
  EXPECT_EQ(c.meta.threshold, kDefaultThreshold);

  Track missing_score = classifier_track("Walk", {ev(0, 5)});
  EXPECT_EQ(code_of([&] { missing_score.validate(); }), ErrorCode::InvariantViolation);

  Track l = label_track("Walk", {ev(0, 5)});
  l.meta.threshold = 0.5;
  EXPECT_EQ(code_of([&] { l.validate(); }), ErrorCode::InvariantViolation);

  Track overlapping = label_track("Walk", {ev(0, 5), ev(4, 8)});
  EXPECT_EQ(code_of([&] { overlapping.validate(); }), ErrorCode::InvariantViolation);

  Track protocol = make_track({"Proto", "Ann", "1"}, TrackKind::protocol,
                              {labeled(0, 5, "sit"), labeled(6, 8, "sit")});
  try {
    protocol.validate();
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("ProtoAnn1"), std::string::npos);
  }
}

TEST(SessionTest, DomainFollowsTracks) {
  Session s;
  s.add(label_track("A", {ev(100, 200)}));
  EXPECT_EQ(s.domain, (Interval{100, 200}));
  s.add(label_track("B", {ev(50, 120)}));
  EXPECT_EQ(s.domain, (Interval{50, 200}));
  EXPECT_NO_THROW(s.validate());
}

TEST(SessionTest, DuplicateRejected) {
  Session s;
  s.add(label_track("A", {ev(0, 1)}));
  EXPECT_EQ(code_of([&] { s.add(label_track("A", {ev(3, 4)})); }), ErrorCode::DuplicateTrack);
}

TEST(SessionTest, PredecessorIsHighestLowerVersion) {
  Session s;
  for (const char* v : {"1.1", "1.10", "1.2", "0.9"}) s.add(label_track("Tremor", {ev(0, 1)}, "Ann", v));
  s.add(label_track("Tremor", {ev(0, 1)}, "Bob", "1.5"));
  EXPECT_EQ(s.predecessor({"Tremor", "Ann", "1.10"})->id.version, "1.2");
  EXPECT_EQ(s.predecessor({"Tremor", "Ann", "1.2"})->id.version, "1.1");
  EXPECT_EQ(s.predecessor({"Tremor", "Ann", "0.9"}), nullptr);
}

TEST(SessionTest, ValidateCatchesOutOfDomainEvents) {
  Session s;
  s.add(label_track("A", {ev(0, 10)}));
  s.domain = {0, 5};
  EXPECT_EQ(code_of([&] { s.validate(); }), ErrorCode::InvariantViolation);
}

TEST(SessionTest, DeepEquality) {
  Session a;
  a.add(label_track("A", {ev(0, 10)}));
  Session b;
  b.add(label_track("A", {ev(0, 10)}));
  EXPECT_TRUE(a == b);
  b.cursor = 3;
  EXPECT_FALSE(a == b);
}

TEST(AttrKeys, AsciiIdentifiers) {
  EXPECT_TRUE(is_attr_key("angle"));
  EXPECT_TRUE(is_attr_key("_x1"));
  EXPECT_FALSE(is_attr_key(""));
  EXPECT_FALSE(is_attr_key("1x"));
  EXPECT_FALSE(is_attr_key("a-b"));
}
