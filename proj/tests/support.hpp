#pragma once

// Random generators and brute-force oracles shared by the unit tests and the
// acceptance binary. The oracles work one tick at a time and share no code
// with the sweep implementations they check.

#include <algorithm>
#include <array>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "trackx/model.hpp"

namespace trackx::testing {

using Rng = std::mt19937_64;

// One byte per tick of `domain`.
using Bits = std::vector<std::uint8_t>;

inline Bits to_bits(const IntervalSet& s, const Interval& domain) {
  Bits bits(static_cast<std::size_t>(domain.length()), 0);
  for (const auto& iv : s) {
    for (Tick t = iv.start; t < iv.end; ++t) bits[static_cast<std::size_t>(t - domain.start)] = 1;
  }
  return bits;
}

inline Bits to_bits(std::span<const Event> events, const Interval& domain) {
  Bits bits(static_cast<std::size_t>(domain.length()), 0);
  for (const auto& e : events) {
    for (Tick t = e.interval.start; t < e.interval.end; ++t) {
      bits[static_cast<std::size_t>(t - domain.start)] = 1;
    }
  }
  return bits;
}

// Maximal runs of set ticks, independent of IntervalSet canonicalization.
inline std::vector<Interval> runs(const Bits& bits, const Interval& domain) {
  std::vector<Interval> out;
  std::size_t i = 0;
  while (i < bits.size()) {
    if (!bits[i]) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < bits.size() && bits[j]) ++j;
    out.push_back({domain.start + static_cast<Tick>(i), domain.start + static_cast<Tick>(j)});
    i = j;
  }
  return out;
}

inline std::int64_t count(const Bits& bits) {
  std::int64_t n = 0;
  for (auto b : bits) n += b;
  return n;
}

template <class Fn>
Bits combine(const Bits& a, const Bits& b, Fn fn) {
  Bits out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = fn(a[i], b[i]) ? 1 : 0;
  return out;
}

inline bool same(const IntervalSet& s, const Bits& bits, const Interval& domain) {
  const auto expected = runs(bits, domain);
  return std::equal(s.begin(), s.end(), expected.begin(), expected.end());
}

// Up to `max_events` non-overlapping events inside `domain`; roughly one in
// four neighbours touch so canonical merging gets exercised.
inline std::vector<Interval> random_intervals(Rng& rng, const Interval& domain, int max_events) {
  std::uniform_int_distribution<int> n_dist(0, max_events);
  const int n = n_dist(rng);
  std::vector<Tick> cuts;
  std::uniform_int_distribution<Tick> tick(domain.start, domain.end);
  for (int i = 0; i < 2 * n; ++i) cuts.push_back(tick(rng));
  std::sort(cuts.begin(), cuts.end());
  std::vector<Interval> out;
  std::bernoulli_distribution touch(0.25);
  for (int i = 0; i + 1 < 2 * n; i += 2) {
    Tick s = cuts[i];
    const Tick e = cuts[i + 1];
    if (!out.empty() && touch(rng)) s = out.back().end;
    if (e > s && (out.empty() || s >= out.back().end)) out.push_back({s, e});
  }
  return out;
}

inline std::vector<Event> random_label_events(Rng& rng, const Interval& domain, int max_events,
                                              const std::string& label = "x") {
  std::vector<Event> out;
  for (const auto& iv : random_intervals(rng, domain, max_events)) out.push_back({iv, {std::nullopt, label, {}}});
  return out;
}

inline std::vector<Event> random_scored_events(Rng& rng, const Interval& domain, int max_events) {
  std::uniform_real_distribution<double> score(0.0, 1.0);
  std::vector<Event> out;
  for (const auto& iv : random_intervals(rng, domain, max_events)) out.push_back({iv, {score(rng), std::nullopt, {}}});
  return out;
}

inline Track label_track(std::string cls, std::vector<Event> events, std::string author = "Ann",
                         std::string version = "1.0") {
  for (auto& e : events) {
    if (!e.payload.label) e.payload.label = cls;
  }
  return make_track({std::move(cls), std::move(author), std::move(version)}, TrackKind::label, std::move(events));
}

inline Track classifier_track(std::string cls, std::vector<Event> events, std::string author = "Bob",
                              std::string version = "1.0") {
  return make_track({std::move(cls), std::move(author), std::move(version)}, TrackKind::classifier,
                    std::move(events));
}

// A valid session mixing every track kind, with attributes, model metadata,
// a video binding and unknown fields sprinkled in.
inline Session random_session(Rng& rng, int n_tracks, int max_events, Interval domain = {0, 1'000'000}) {
  static const std::vector<std::string> classes{"Walk", "Sleeping", "Turning", "Tremor", "Sit"};
  static const std::vector<std::string> authors{"Ann", "Bob", "John", "Erhan"};
  std::uniform_int_distribution<std::size_t> pick(0, 1000);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::bernoulli_distribution coin(0.5);
  Session s;
  s.domain = domain;
  for (int i = 0; i < n_tracks; ++i) {
    TrackId id{classes[pick(rng) % classes.size()], authors[pick(rng) % authors.size()],
               std::to_string(1 + i / 7) + "." + std::to_string(i)};
    const TrackKind kind = std::array{TrackKind::classifier, TrackKind::label, TrackKind::container,
                                      TrackKind::diff}[pick(rng) % 4];
    std::vector<Event> events;
    for (const auto& iv : random_intervals(rng, domain, max_events)) {
      Event e{iv, {}};
      if (kind == TrackKind::classifier || coin(rng)) e.payload.score = unit(rng);
      if (is_label_like(kind) || (kind != TrackKind::classifier && coin(rng))) e.payload.label = id.class_label;
      if (pick(rng) % 5 == 0) {
        e.payload.attrs["angle"] = unit(rng) * 360.0;
        e.payload.attrs["side"] = coin(rng) ? std::string("left") : std::string("right \"q\"");
      }
      events.push_back(std::move(e));
    }
    Track t = make_track(id, kind, std::move(events));
    t.meta.color = {static_cast<std::uint8_t>(pick(rng) % 256), static_cast<std::uint8_t>(pick(rng) % 256),
                    static_cast<std::uint8_t>(pick(rng) % 256)};
    t.meta.visible = coin(rng);
    t.meta.render_mode = coin(rng) ? RenderMode::area : RenderMode::blocks;
    if (kind == TrackKind::classifier) t.meta.threshold = unit(rng);
    if (pick(rng) % 3 == 0) {
      ModelMeta m;
      m.sensors = {"acc", "gyro"};
      m.window_seconds = 2.5;
      m.params = {{"depth", 4.0}, {"kernel", std::string("rbf")}};
      m.commit_hash = "9f1c2ab";
      m.commit_message = "tune window";
      m.committed_at = "2019-03-01T10:00:00Z";
      t.meta.model = m;
    }
    if (pick(rng) % 4 == 0) t.extra["x_note"] = R"({"by":"qa","n":[1,2]})";
    if (pick(rng) % 4 == 0) t.extra["meta/x_layer"] = "3";
    s.tracks.push_back(std::make_shared<const Track>(std::move(t)));
  }
  if (coin(rng)) s.cursor = domain.start + static_cast<Tick>(pick(rng));
  if (coin(rng)) s.video = VideoBinding{"file:///videos/p1.mp4", 10'000'000, std::nullopt};
  if (coin(rng)) s.extra["x_origin"] = R"("lab")";
  return s;
}

inline Event ev(Tick s, Tick e) { return {{s, e}, {}}; }
inline Event scored(Tick s, Tick e, double score) { return {{s, e}, {score, std::nullopt, {}}}; }
inline Event labeled(Tick s, Tick e, std::string label) { return {{s, e}, {std::nullopt, std::move(label), {}}}; }

}  // namespace trackx::testing
