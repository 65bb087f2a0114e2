#include <gtest/gtest.h>

#include <cmath>

#include "support.hpp"
#include "trackx/algebra.hpp"
#include "trackx/error.hpp"
#include "trackx/metrics.hpp"

using namespace trackx;
using namespace trackx::testing;

namespace {

struct Confusion {
  std::int64_t tp = 0, fp = 0, fn = 0, tn = 0;
};

Confusion confusion(const Bits& p, const Bits& g) {
  Confusion c;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] && g[i]) ++c.tp;
    else if (p[i]) ++c.fp;
    else if (g[i]) ++c.fn;
    else ++c.tn;
  }
  return c;
}

void expect_close(const Metric& got, std::optional<double> want) {
  ASSERT_EQ(got.has_value(), want.has_value());
  if (want) EXPECT_LE(std::abs(*got - *want), 1e-9 * std::max(1.0, std::abs(*want)));
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

TEST(Jaccard, Examples) {
  const IntervalSet a{{0, 10}}, b{{5, 15}};
  EXPECT_DOUBLE_EQ(jaccard(a, a), 1.0);
  EXPECT_DOUBLE_EQ(jaccard(a, b), 5.0 / 15.0);
  EXPECT_DOUBLE_EQ(jaccard(IntervalSet{}, IntervalSet{}), 1.0);
  EXPECT_DOUBLE_EQ(jaccard(a, IntervalSet{}), 0.0);
  // half of a single label event
  EXPECT_DOUBLE_EQ(jaccard(IntervalSet{{0, 5}}, IntervalSet{{0, 10}}), 0.5);
}

TEST(Jaccard, SymmetricAndMatchesIdentity) {
  Rng rng(71);
  for (int round = 0; round < 300; ++round) {
    const IntervalSet a(random_intervals(rng, {0, 100000}, 30)), b(random_intervals(rng, {0, 100000}, 30));
    EXPECT_EQ(jaccard(a, b), jaccard(b, a));
    const Duration inter = intersect(a, b).duration();
    const Duration den = a.duration() + b.duration() - inter;
    if (den > 0) EXPECT_EQ(jaccard(a, b), static_cast<double>(inter) / static_cast<double>(den));
  }
}

TEST(Report, PerfectMatch) {
  const IntervalSet g{{10, 20}, {40, 50}};
  Report r = report(g, g, {0, 100});
  EXPECT_EQ(r.precision, 1.0);
  EXPECT_EQ(r.recall, 1.0);
  EXPECT_EQ(r.f1, 1.0);
  EXPECT_EQ(r.accuracy, 1.0);
}

TEST(Report, WorkedExample) {
  Report r = report(IntervalSet{{0, 10}}, IntervalSet{{5, 15}}, {0, 20});
  EXPECT_EQ(r.precision, 0.5);
  EXPECT_EQ(r.recall, 0.5);
  EXPECT_EQ(r.f1, 0.5);
  EXPECT_EQ(r.accuracy, 0.5);
  EXPECT_EQ(r.true_positive, 5);
  EXPECT_EQ(r.false_positive, 5);
  EXPECT_EQ(r.false_negative, 5);
  EXPECT_EQ(r.true_negative, 5);
  ASSERT_EQ(r.containers.size(), 4u);
  EXPECT_EQ(r.containers[0].metric_name, "accuracy");
  EXPECT_EQ(r.containers[0].numerator, (IntervalSet{{5, 10}, {15, 20}}));
  EXPECT_EQ(r.containers[1].denominator, (IntervalSet{{0, 10}}));
  EXPECT_EQ(r.containers[1].numerator, (IntervalSet{{5, 10}}));
}

TEST(Report, UndefinedRatiosAreMarked) {
  Report r = report(IntervalSet{}, IntervalSet{{0, 10}}, {0, 20});
  EXPECT_FALSE(r.precision.has_value());
  EXPECT_EQ(r.recall, 0.0);
  EXPECT_FALSE(r.f1.has_value());
  EXPECT_EQ(r.accuracy, 0.5);
  EXPECT_FALSE(r.containers[1].value.has_value());
}

TEST(Report, LongQuiescentDomain) {
  // one correct block and one missed event in an hour
  const Tick s = kTicksPerSecond;
  const IntervalSet g{{100 * s, 105 * s}, {2000 * s, 2004 * s}};
  const IntervalSet p{{100 * s, 105 * s}};
  Report r = report(p, g, {0, 3600 * s});
  EXPECT_GT(*r.accuracy, 0.95);
  std::vector<Event> truth{ev(100 * s, 105 * s), ev(2000 * s, 2004 * s)};
  EXPECT_EQ(event_score(p, truth).score, 0.5);
}

TEST(Report, ClipsToDomain) {
  Report r = report(IntervalSet{{-10, 10}}, IntervalSet{{5, 30}}, {0, 20});
  EXPECT_EQ(r.true_positive, 5);
  EXPECT_EQ(r.false_positive, 5);
  EXPECT_EQ(r.false_negative, 10);
  EXPECT_EQ(r.true_negative, 0);
}

TEST(Report, MatchesConfusionOracle) {
  Rng rng(72);
  std::uniform_int_distribution<Tick> len(1, 50000);
  for (int round = 0; round < 200; ++round) {
    const Interval domain{0, len(rng)};
    const IntervalSet p(random_intervals(rng, domain, 40)), g(random_intervals(rng, domain, 40));
    const Confusion c = confusion(to_bits(p, domain), to_bits(g, domain));
    Report r = report(p, g, domain);
    auto q = [](std::int64_t n, std::int64_t d) -> std::optional<double> {
      if (d == 0) return std::nullopt;
      return static_cast<double>(n) / static_cast<double>(d);
    };
    EXPECT_EQ(r.true_positive, c.tp);
    EXPECT_EQ(r.false_positive, c.fp);
    EXPECT_EQ(r.false_negative, c.fn);
    EXPECT_EQ(r.true_negative, c.tn);
    expect_close(r.precision, q(c.tp, c.tp + c.fp));
    expect_close(r.recall, q(c.tp, c.tp + c.fn));
    expect_close(r.accuracy, q(c.tp + c.tn, domain.length()));
    std::optional<double> f1;
    if (c.tp + c.fp > 0 && c.tp + c.fn > 0) {
      const double pr = static_cast<double>(c.tp) / (c.tp + c.fp), rc = static_cast<double>(c.tp) / (c.tp + c.fn);
      f1 = pr + rc == 0 ? 0.0 : 2 * pr * rc / (pr + rc);
    }
    expect_close(r.f1, f1);

    // precision(P, G) = recall(G, P)
    EXPECT_EQ(r.precision, report(g, p, domain).recall);

    for (const auto& ct : r.containers) {
      EXPECT_TRUE(ct.numerator.is_subset_of(ct.denominator)) << ct.metric_name;
      if (ct.metric_name != "f1") {
        ASSERT_EQ(ct.fill_fraction().has_value(), ct.value.has_value());
        if (ct.value) EXPECT_LE(std::abs(*ct.fill_fraction() - *ct.value), 1e-12);
      }
    }
    ASSERT_EQ(r.containers[0].value.has_value(), r.accuracy.has_value());
    EXPECT_EQ(r.containers[0].value, r.accuracy);
    EXPECT_EQ(r.containers[1].value, r.precision);
    EXPECT_EQ(r.containers[2].value, r.recall);
    EXPECT_EQ(r.containers[3].value, r.f1);
  }
}

TEST(Report, TrackOverloadNeedsLabelTruth) {
  Track c = classifier_track("X", {scored(0, 10, 0.9)});
  Track l = label_track("X", {ev(0, 5)});
  EXPECT_EQ(code_of([&] { report(l, c, {0, 10}); }), ErrorCode::TypeMismatch);
  EXPECT_EQ(report(c, l, {0, 10}).precision, 0.5);
}

TEST(Roc, ConstantScoreCoveringTruth) {
  Track c = classifier_track("X", {scored(10, 20, 1.0)});
  Track g = label_track("X", {ev(10, 20)});
  RocCurve curve = roc(c, g, {0, 100});
  ASSERT_EQ(curve.points.size(), 3u);
  EXPECT_EQ(curve.points[0].fpr, 0.0);
  EXPECT_EQ(curve.points[0].tpr, 0.0);
  EXPECT_TRUE(std::isinf(curve.points[0].threshold));
  EXPECT_EQ(curve.points[1].fpr, 0.0);
  EXPECT_EQ(curve.points[1].tpr, 1.0);
  EXPECT_EQ(curve.points[1].threshold, 1.0);
  EXPECT_EQ(curve.points[2].fpr, 1.0);
  EXPECT_EQ(curve.points[2].tpr, 1.0);
  EXPECT_EQ(curve.auc, 1.0);
}

TEST(Roc, SeparableScores) {
  std::vector<Event> es;
  std::vector<Event> truth;
  for (int i = 0; i < 100; ++i) {
    const bool pos = i % 3 == 0;
    es.push_back(scored(i * 10, i * 10 + 10, pos ? 0.6 + i * 0.001 : 0.1 + i * 0.001));
    if (pos) truth.push_back(ev(i * 10, i * 10 + 10));
  }
  RocCurve curve = roc(classifier_track("X", es), label_track("X", truth), {0, 1000});
  EXPECT_EQ(curve.auc, 1.0);
  EXPECT_EQ(curve.points.back().fpr, 1.0);
  EXPECT_EQ(curve.points.back().tpr, 1.0);
}

// Each slot's contribution to the sweep, recomputed by thresholding the track
// at every distinct score.
TEST(Roc, MatchesThresholdSweep) {
  Rng rng(73);
  std::uniform_int_distribution<int> level(0, 9);
  for (int round = 0; round < 100; ++round) {
    const Interval domain{0, 20000};
    auto es = random_scored_events(rng, domain, 30);
    for (auto& e : es) e.payload.score = level(rng) / 9.0;
    auto truth = random_label_events(rng, domain, 20);
    if (truth.empty()) continue;
    Track c = classifier_track("X", es), g = label_track("X", truth);
    RocCurve curve = roc(c, g, domain);
    const IntervalSet gs = coverage(truth);
    const double pos = static_cast<double>(gs.duration());
    const double neg = static_cast<double>(domain.length()) - pos;
    for (std::size_t i = 1; i < curve.points.size(); ++i) {
      const auto& pt = curve.points[i];
      EXPECT_GE(pt.fpr, curve.points[i - 1].fpr);
      EXPECT_GE(pt.tpr, curve.points[i - 1].tpr);
      if (std::isinf(pt.threshold)) continue;
      const IntervalSet pt_set = threshold_intervals(c, pt.threshold);
      EXPECT_DOUBLE_EQ(pt.tpr, intersect(pt_set, gs).duration() / pos);
      EXPECT_DOUBLE_EQ(pt.fpr, subtract(pt_set, gs).duration() / neg);
    }
    EXPECT_GE(curve.auc, 0.0);
    EXPECT_LE(curve.auc, 1.0);
  }
}

TEST(Roc, RandomScoresNearChance) {
  Rng rng(74);
  std::uniform_real_distribution<double> u(0, 1);
  std::bernoulli_distribution coin(0.5);
  std::vector<Event> es, truth;
  for (int i = 0; i < 10000; ++i) {
    es.push_back(scored(i * 100, i * 100 + 100, u(rng)));
    if (coin(rng)) truth.push_back(ev(i * 100, i * 100 + 100));
  }
  RocCurve curve = roc(classifier_track("X", es), label_track("X", truth), {0, 1'000'000});
  EXPECT_GE(curve.auc, 0.45);
  EXPECT_LE(curve.auc, 0.55);
}

TEST(Roc, Errors) {
  Track c = classifier_track("X", {scored(0, 10, 0.9)});
  Track l = label_track("X", {ev(0, 5)});
  EXPECT_EQ(code_of([&] { roc(l, l, {0, 10}); }), ErrorCode::TypeMismatch);
  EXPECT_EQ(code_of([&] { roc(c, c, {0, 10}); }), ErrorCode::TypeMismatch);
  EXPECT_EQ(code_of([&] { roc(c, label_track("X", {}), {0, 10}); }), ErrorCode::DegenerateTruth);
  EXPECT_EQ(code_of([&] { roc(c, label_track("X", {ev(0, 10)}), {0, 10}); }), ErrorCode::DegenerateTruth);
}

TEST(EventScoreTest, Examples) {
  std::vector<Event> g{ev(0, 10), ev(20, 30), ev(40, 50), ev(60, 70)};
  EXPECT_EQ(event_score(IntervalSet{{5, 6}, {25, 45}}, g).score, 0.75);
  EXPECT_EQ(event_score(IntervalSet{}, g).score, 0.0);
  EXPECT_EQ(event_score(IntervalSet{}, std::vector<Event>{}).score, 1.0);
  // touching is not a detection
  EXPECT_EQ(event_score(IntervalSet{{10, 20}}, g).detected, 0u);
}

TEST(EventScoreTest, ShiftedPredictionsDetectEverything) {
  Rng rng(75);
  std::uniform_int_distribution<Tick> gap(1, 1000), width(50, 500);
  std::vector<Event> g;
  Tick t = 0;
  Duration min_len = 1 << 30;
  for (int i = 0; i < 50; ++i) {
    const Tick s = t + gap(rng);
    t = s + width(rng);
    g.push_back(ev(s, t));
    min_len = std::min(min_len, t - s);
  }
  std::uniform_int_distribution<Tick> shift(-(min_len - 1), min_len - 1);
  const Tick d = shift(rng);
  std::vector<Interval> moved;
  for (const auto& e : g) moved.push_back({e.interval.start + d, e.interval.end + d});
  EXPECT_EQ(event_score(IntervalSet(moved), g).score, 1.0);
}

TEST(EventScoreTest, InvariantUnderOverlapPreservingPerturbation) {
  Rng rng(76);
  for (int round = 0; round < 200; ++round) {
    const Interval domain{0, 10000};
    auto g = random_label_events(rng, domain, 10);
    const IntervalSet p(random_intervals(rng, domain, 10));
    // Shrink every predicted interval towards a tick it shares with some
    // truth event, or drop it when it shares none.
    std::vector<Interval> shrunk;
    for (const auto& iv : p) {
      for (const auto& e : g) {
        const Tick lo = std::max(iv.start, e.interval.start), hi = std::min(iv.end, e.interval.end);
        if (lo < hi) shrunk.push_back({lo, lo + 1});
      }
    }
    const EventScore a = event_score(p, g);
    const EventScore b = event_score(IntervalSet(shrunk), g);
    EXPECT_LE(b.detected, a.detected);
    // only the witness tick of each (interval, event) pair survives, so every
    // event detected before is still detected
    EXPECT_EQ(a.detected, b.detected);
  }
}
