#include "trackx/algebra.hpp"

#include <algorithm>
#include <set>

#include "trackx/error.hpp"

namespace trackx {

namespace {

struct Edge {
  Tick at;
  bool is_a;
  bool opens;
};

void push_edges(const IntervalSet& s, bool is_a, std::vector<Edge>& out) {
  for (const auto& iv : s) {
    out.push_back({iv.start, is_a, true});
    out.push_back({iv.end, is_a, false});
  }
}

// Sweeps the boundaries of both sets and keeps the points where
// keep(in_a, in_b) holds. Linear after the merge of two sorted edge lists.
template <class Keep>
IntervalSet sweep(const IntervalSet& a, const IntervalSet& b, Keep keep) {
  std::vector<Edge> ea, eb, edges;
  ea.reserve(a.size() * 2);
  eb.reserve(b.size() * 2);
  push_edges(a, true, ea);
  push_edges(b, false, eb);
  edges.reserve(ea.size() + eb.size());
  std::merge(ea.begin(), ea.end(), eb.begin(), eb.end(), std::back_inserter(edges),
             [](const Edge& x, const Edge& y) { return x.at < y.at; });

  std::vector<Interval> out;
  bool in_a = false, in_b = false, inside = false;
  Tick open_at = 0;
  for (std::size_t i = 0; i < edges.size();) {
    const Tick at = edges[i].at;
    for (; i < edges.size() && edges[i].at == at; ++i) {
      (edges[i].is_a ? in_a : in_b) = edges[i].opens;
    }
    const bool now = keep(in_a, in_b);
    if (now && !inside) {
      open_at = at;
    } else if (!now && inside) {
      out.push_back({open_at, at});
    }
    inside = now;
  }
  return IntervalSet::from_canonical(std::move(out));
}

}  // namespace

IntervalSet unite(const IntervalSet& a, const IntervalSet& b) {
  return sweep(a, b, [](bool x, bool y) { return x || y; });
}

IntervalSet intersect(const IntervalSet& a, const IntervalSet& b) {
  return sweep(a, b, [](bool x, bool y) { return x && y; });
}

IntervalSet subtract(const IntervalSet& a, const IntervalSet& b) {
  return sweep(a, b, [](bool x, bool y) { return x && !y; });
}

IntervalSet errors(const IntervalSet& a, const IntervalSet& b) {
  return sweep(a, b, [](bool x, bool y) { return x != y; });
}

IntervalSet negate(const IntervalSet& a, const Interval& domain) {
  if (!domain.valid()) throw Error(ErrorCode::InvalidInterval, "negation domain is empty");
  if (!a.empty() && !domain.contains(a.hull())) {
    throw Error(ErrorCode::OutOfDomain, "operand extends outside the negation domain");
  }
  return subtract(IntervalSet{domain}, a);
}

IntervalSet clip(const IntervalSet& a, const Interval& window) {
  if (!window.valid()) return {};
  return intersect(a, IntervalSet{window});
}

IntervalSet close_gaps(const IntervalSet& a, Duration max_gap) {
  std::vector<Interval> out;
  for (const auto& iv : a) {
    if (!out.empty() && iv.start - out.back().end <= max_gap) {
      out.back().end = iv.end;
    } else {
      out.push_back(iv);
    }
  }
  return IntervalSet::from_canonical(std::move(out));
}

std::vector<Event> match_subtract(std::span<const Event> a, const IntervalSet& b) {
  std::vector<Event> out;
  for (const auto& e : a) {
    if (!b.intersects(e.interval)) out.push_back(e);
  }
  return out;
}

// ---------------------------------------------------------------------------

IntervalSet threshold_intervals(const Track& classifier, double threshold) {
  if (classifier.kind != TrackKind::classifier) {
    throw Error(ErrorCode::NotAClassifierTrack,
                classifier.id.canonical() + " is not a classifier track");
  }
  if (!(threshold >= 0.0 && threshold <= 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "threshold must lie in [0, 1]");
  }
  std::vector<Interval> kept;
  for (const auto& e : classifier.events) {
    if (e.payload.score && *e.payload.score >= threshold) kept.push_back(e.interval);
  }
  return IntervalSet(std::move(kept));
}

IntervalSet to_interval_set(const Track& track) {
  if (track.kind == TrackKind::classifier) {
    return threshold_intervals(track, track.meta.threshold.value_or(kDefaultThreshold));
  }
  return coverage(track.events);
}

std::vector<Event> positive_events(const Track& track) {
  if (track.kind != TrackKind::classifier) return track.events;
  const double theta = track.meta.threshold.value_or(kDefaultThreshold);
  std::vector<Event> out;
  for (const auto& e : track.events) {
    if (e.payload.score && *e.payload.score >= theta) out.push_back(e);
  }
  return out;
}

DiffTrack variation(const IntervalSet& newer, const IntervalSet& older) {
  return {subtract(newer, older), subtract(older, newer)};
}

DiffTrack variation(const Session& session, const Track& newer, const Track* older) {
  if (!older) older = session.predecessor(newer.id);
  if (!older) {
    throw Error(ErrorCode::NoPredecessorVersion,
                "no earlier version of " + newer.id.class_label + newer.id.author + " in session");
  }
  return variation(to_interval_set(newer), to_interval_set(*older));
}

// ---------------------------------------------------------------------------

namespace {

struct Source {
  const Track* track;
  std::vector<Event> events;  // positive events, sorted and disjoint
};

Source make_source(const Track& t) { return {&t, positive_events(t)}; }

std::string event_label(const Source& s, const Event& e) {
  return e.payload.label ? *e.payload.label : s.track->id.class_label;
}

std::string join(const std::set<std::string>& items, std::string_view sep) {
  std::string out;
  for (const auto& item : items) {
    if (!out.empty()) out += sep;
    out += item;
  }
  return out;
}

// One event per result interval, labelled from the source events it overlaps.
std::vector<Event> annotate(const IntervalSet& result, std::span<const Source> sources) {
  std::vector<Event> out;
  out.reserve(result.size());
  for (const auto& iv : result) {
    std::set<std::string> labels;
    std::vector<std::string> ids;
    for (const auto& s : sources) {
      auto it = std::upper_bound(s.events.begin(), s.events.end(), iv.start,
                                 [](Tick t, const Event& e) { return t < e.interval.end; });
      bool contributed = false;
      for (; it != s.events.end() && it->interval.start < iv.end; ++it) {
        labels.insert(event_label(s, *it));
        contributed = true;
      }
      if (contributed) ids.push_back(s.track->id.canonical());
    }
    Event e{iv, {}};
    if (labels.empty()) {
      // Only reachable for regions no source covers; name the first operand.
      labels.insert(sources.front().track->id.class_label);
      ids.push_back(sources.front().track->id.canonical());
    }
    e.payload.label = join(labels, "|");
    std::string src;
    for (const auto& id : ids) {
      if (!src.empty()) src += ',';
      src += id;
    }
    e.payload.attrs["src"] = src;
    out.push_back(std::move(e));
  }
  return out;
}

}  // namespace

Track negate_track(const Track& t, const Interval& domain, TrackId out) {
  const IntervalSet result = negate(to_interval_set(t), domain);
  std::vector<Event> events;
  events.reserve(result.size());
  for (const auto& iv : result) {
    Event e{iv, {}};
    e.payload.label = "not " + t.id.class_label;
    e.payload.attrs["src"] = t.id.canonical();
    events.push_back(std::move(e));
  }
  return make_track(std::move(out), TrackKind::label, std::move(events));
}

Track combine_tracks(SetOp op, const Track& a, const Track& b, TrackId out) {
  const IntervalSet sa = to_interval_set(a);
  const IntervalSet sb = to_interval_set(b);
  IntervalSet result;
  switch (op) {
    case SetOp::unite: result = unite(sa, sb); break;
    case SetOp::intersect: result = intersect(sa, sb); break;
    case SetOp::subtract: result = subtract(sa, sb); break;
    case SetOp::errors: result = errors(sa, sb); break;
  }
  std::vector<Source> sources;
  sources.push_back(make_source(a));
  // Subtraction keeps only points of `a`, so `b` never contributes.
  if (op != SetOp::subtract) sources.push_back(make_source(b));
  return make_track(std::move(out), TrackKind::label, annotate(result, sources));
}

Track match_track(const Track& a, const Track& b, TrackId out) {
  // Classifier operands contribute their thresholded blocks as whole events.
  std::vector<Event> candidates;
  if (a.kind == TrackKind::classifier) {
    for (const auto& iv : to_interval_set(a)) candidates.push_back({iv, {}});
  } else {
    candidates = a.events;
  }
  std::vector<Event> kept = match_subtract(candidates, to_interval_set(b));
  const Source src = make_source(a);
  for (auto& e : kept) {
    if (!e.payload.label) {
      std::set<std::string> labels;
      auto it = std::upper_bound(src.events.begin(), src.events.end(), e.interval.start,
                                 [](Tick t, const Event& x) { return t < x.interval.end; });
      for (; it != src.events.end() && it->interval.start < e.interval.end; ++it) {
        labels.insert(event_label(src, *it));
      }
      e.payload.label = join(labels, "|");
    }
    e.payload.score.reset();
    e.payload.attrs["src"] = a.id.canonical();
  }
  return make_track(std::move(out), TrackKind::label, std::move(kept));
}

Track variation_track(const DiffTrack& diff, const Track& newer, const Track& older, TrackId out) {
  std::vector<Event> events;
  events.reserve(diff.added.size() + diff.removed.size());
  auto emit = [&](const IntervalSet& set, const char* label, const Track& from) {
    for (const auto& iv : set) {
      Event e{iv, {}};
      e.payload.label = label;
      e.payload.attrs["src"] = from.id.canonical();
      events.push_back(std::move(e));
    }
  };
  emit(diff.added, "added", newer);
  emit(diff.removed, "removed", older);
  std::sort(events.begin(), events.end(), [](const Event& x, const Event& y) {
    return x.interval.start < y.interval.start;
  });
  return make_track(std::move(out), TrackKind::diff, std::move(events));
}

Track transform_track(const Track& classifier, TrackId out) {
  const IntervalSet result = threshold_intervals(
      classifier, classifier.meta.threshold.value_or(kDefaultThreshold));
  std::vector<Event> events;
  events.reserve(result.size());
  for (const auto& iv : result) {
    Event e{iv, {}};
    e.payload.label = classifier.id.class_label;
    e.payload.attrs["src"] = classifier.id.canonical();
    events.push_back(std::move(e));
  }
  return make_track(std::move(out), TrackKind::label, std::move(events));
}

}  // namespace trackx
