#include <algorithm>
#include <cctype>
#include <cmath>
#include <set>

#include "trackx/algebra.hpp"
#include "trackx/command.hpp"
#include "trackx/error.hpp"

namespace trackx {

std::string_view to_string(Effect::Kind kind) {
  switch (kind) {
    case Effect::Kind::new_track: return "new_track";
    case Effect::Kind::metric_result: return "metric_result";
    case Effect::Kind::visibility_change: return "visibility_change";
    case Effect::Kind::playlist: return "playlist";
    case Effect::Kind::reorder: return "reorder";
    case Effect::Kind::info_payload: return "info_payload";
    case Effect::Kind::meta_change: return "meta_change";
  }
  return "meta_change";
}

TrackInfo track_info(const Session& session, const Track& track) {
  TrackInfo info;
  info.id = track.id;
  info.kind = track.kind;
  info.meta = track.meta;
  info.event_count = track.events.size();
  info.duration = duration(track);
  if (!track.events.empty()) {
    info.extent = Interval{track.events.front().interval.start, track.events.back().interval.end};
  }
  std::set<std::string> keys;
  for (const auto& e : track.events) {
    for (const auto& [key, value] : e.payload.attrs) keys.insert(key);
  }
  info.attr_keys.assign(keys.begin(), keys.end());
  if (const Track* prev = session.predecessor(track.id)) info.predecessor = prev->id.canonical();
  return info;
}

// ---------------------------------------------------------------------------
// Smart ordering

namespace {

// Overlap of the displayed (thresholded for classifiers) events with `window`.
Duration displayed_overlap(const Track& t, const Interval& window) {
  const double theta = t.meta.threshold.value_or(kDefaultThreshold);
  auto it = std::upper_bound(t.events.begin(), t.events.end(), window.start,
                             [](Tick x, const Event& e) { return x < e.interval.end; });
  Duration total = 0;
  for (; it != t.events.end() && it->interval.start < window.end; ++it) {
    if (t.kind == TrackKind::classifier && !(it->payload.score && *it->payload.score >= theta)) {
      continue;
    }
    total += it->interval.overlap(window);
  }
  return total;
}

}  // namespace

std::vector<std::string> smart_order(const Session& session, Tick t, Duration eps) {
  if (eps < 0) throw Error(ErrorCode::InvalidArgument, "ordering window must be non-negative");
  std::vector<std::string> order;
  if (eps == 0) {
    for (const auto& track : session.tracks) order.push_back(track->id.canonical());
    return order;
  }
  const Interval window{t - eps, t + eps};
  std::vector<std::pair<Duration, const Track*>> promoted;
  std::vector<const Track*> rest;
  for (const auto& track : session.tracks) {
    const Duration overlap = displayed_overlap(*track, window);
    if (overlap > 0) {
      promoted.emplace_back(overlap, track.get());
    } else {
      rest.push_back(track.get());
    }
  }
  std::stable_sort(promoted.begin(), promoted.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  for (const auto& [overlap, track] : promoted) order.push_back(track->id.canonical());
  for (const Track* track : rest) order.push_back(track->id.canonical());
  return order;
}

std::vector<std::string> smart_order(const Session& session, Duration eps) {
  if (!session.cursor) throw Error(ErrorCode::NoCursor, "no cursor set on the timeline");
  return smart_order(session, *session.cursor, eps);
}

// ---------------------------------------------------------------------------
// Execution

namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

void apply_order(Session& session, const std::vector<std::string>& order) {
  std::vector<TrackPtr> reordered;
  reordered.reserve(session.tracks.size());
  for (const auto& id : order) reordered.push_back(session.tracks[*session.index_of(id)]);
  session.tracks = std::move(reordered);
}

std::vector<std::string> current_order(const Session& session) {
  std::vector<std::string> out;
  for (const auto& t : session.tracks) out.push_back(t->id.canonical());
  return out;
}

TrackId generated_id(const Session& session, std::string class_label, const std::string& user) {
  TrackId id{std::move(class_label), user, "1.0"};
  for (int minor = 1; session.find(id); ++minor) id.version = "1." + std::to_string(minor);
  return id;
}

std::string describe(Op op, const std::vector<const Track*>& operands, const std::string& extra = {}) {
  std::string label = std::string(op_name(op)) + "(";
  for (std::size_t i = 0; i < operands.size(); ++i) {
    if (i) label += ',';
    label += operands[i]->id.canonical();
  }
  if (!extra.empty()) label += "," + extra;
  return label + ")";
}

class Executor {
 public:
  Executor(Session& session, const CommandAST& ast, const ExecContext& ctx)
      : session_(session), ast_(ast), ctx_(ctx) {
    effect_.op = ast.op;
  }

  Effect run();

 private:
  TrackPtr track(std::size_t i) const {
    const auto& ref = std::get<TrackRef>(ast_.args.at(i));
    return session_.tracks[*session_.index_of(ref.ids.front())];
  }
  bool has_arg(std::size_t i) const { return ast_.args.size() > i; }

  void add_generated(Track t) {
    t.validate();
    effect_.kind = Effect::Kind::new_track;
    effect_.new_track = t.id.canonical();
    session_.add(std::move(t));
  }

  template <class Fn>
  void update_meta(const Track& t, Fn fn) {
    Track copy = t;
    fn(copy.meta);
    copy.validate();
    session_.replace(*session_.index_of(t.id.canonical()), std::move(copy));
    effect_.changed.push_back(t.id.canonical());
  }

  void metric(std::variant<std::monostate, double, Report, RocCurve, EventScore> value) {
    effect_.kind = Effect::Kind::metric_result;
    effect_.metric = std::move(value);
  }

  const Track& ground_truth_for(const Track& t) const;

  Session& session_;
  const CommandAST& ast_;
  const ExecContext& ctx_;
  Effect effect_;
};

const Track& Executor::ground_truth_for(const Track& t) const {
  std::vector<const Track*> found;
  for (const auto& other : session_.tracks) {
    if (other.get() != &t && is_label_like(other->kind) &&
        other->id.class_label == t.id.class_label) {
      found.push_back(other.get());
    }
  }
  if (found.empty()) {
    throw Error(ErrorCode::NoMatch, "no label track with class '" + t.id.class_label + "' to score against");
  }
  if (found.size() > 1) {
    std::vector<std::string> ids;
    for (const Track* f : found) ids.push_back(f->id.canonical());
    throw AmbiguousRefError(t.id.class_label, std::move(ids));
  }
  return *found.front();
}

Effect Executor::run() {
  const Op op = ast_.op;
  switch (op) {
    case Op::negate: {
      auto a = track(0);
      add_generated(negate_track(*a, session_.domain,
                                 generated_id(session_, describe(op, {a.get()}), ctx_.user)));
      break;
    }
    case Op::unite:
    case Op::intersection:
    case Op::errors:
    case Op::subtract: {
      auto a = track(0);
      auto b = track(1);
      const SetOp set_op = op == Op::unite          ? SetOp::unite
                           : op == Op::intersection ? SetOp::intersect
                           : op == Op::errors       ? SetOp::errors
                                                    : SetOp::subtract;
      add_generated(combine_tracks(set_op, *a, *b,
                                   generated_id(session_, describe(op, {a.get(), b.get()}), ctx_.user)));
      break;
    }
    case Op::match: {
      auto a = track(0);
      auto b = track(1);
      add_generated(match_track(*a, *b, generated_id(session_, describe(op, {a.get(), b.get()}), ctx_.user)));
      break;
    }
    case Op::variation: {
      auto newer = track(0);
      TrackPtr older = has_arg(1) ? track(1) : nullptr;
      const DiffTrack diff = variation(session_, *newer, older.get());
      const Track* old_ptr = older ? older.get() : session_.predecessor(newer->id);
      add_generated(variation_track(
          diff, *newer, *old_ptr,
          generated_id(session_, describe(op, {newer.get(), old_ptr}), ctx_.user)));
      break;
    }
    case Op::play: {
      effect_.kind = Effect::Kind::playlist;
      effect_.playlist = playlist(*track(0), session_);
      break;
    }
    case Op::threshold: {
      auto c = track(0);
      if (c->kind != TrackKind::classifier) {
        throw Error(ErrorCode::TypeMismatch, c->id.canonical() + " is not a classifier track");
      }
      const double theta = std::get<double>(ast_.args.at(1));
      if (!(theta >= 0.0 && theta <= 1.0)) {
        throw Error(ErrorCode::InvalidArgument, "threshold must lie in [0, 1]");
      }
      effect_.kind = Effect::Kind::meta_change;
      update_meta(*c, [&](TrackMeta& m) { m.threshold = theta; });
      break;
    }
    case Op::show:
    case Op::hide: {
      const bool visible = op == Op::show;
      effect_.kind = Effect::Kind::visibility_change;
      for (const auto& id : std::get<TrackRef>(ast_.args.at(0)).ids) {
        update_meta(*session_.find(id), [&](TrackMeta& m) { m.visible = visible; });
        (visible ? effect_.shown : effect_.hidden).push_back(id);
      }
      effect_.changed.clear();
      break;
    }
    case Op::transform: {
      auto c = track(0);
      if (c->kind != TrackKind::classifier) {
        throw Error(ErrorCode::TypeMismatch, c->id.canonical() + " is not a classifier track");
      }
      add_generated(transform_track(*c, generated_id(session_, describe(op, {c.get()}), ctx_.user)));
      break;
    }
    case Op::rename: {
      const std::string name = std::get<std::string>(ast_.args.at(1));
      effect_.kind = Effect::Kind::meta_change;
      update_meta(*track(0), [&](TrackMeta& m) { m.display_name = name; });
      break;
    }
    case Op::color: {
      const Rgb color = std::get<Rgb>(ast_.args.at(1));
      effect_.kind = Effect::Kind::meta_change;
      update_meta(*track(0), [&](TrackMeta& m) { m.color = color; });
      break;
    }
    case Op::author: {
      const std::string who = lower(std::get<std::string>(ast_.args.at(0)));
      std::vector<std::string> mine, others;
      for (const auto& t : session_.tracks) {
        (lower(t->id.author) == who ? mine : others).push_back(t->id.canonical());
      }
      if (mine.empty()) throw Error(ErrorCode::NoMatch, "no tracks by author '" + who + "'");
      effect_.kind = Effect::Kind::visibility_change;
      for (const auto& id : mine) {
        const Track* t = session_.find(id);
        if (!t->meta.visible) update_meta(*t, [](TrackMeta& m) { m.visible = true; });
        effect_.shown.push_back(id);
      }
      effect_.changed.clear();
      mine.insert(mine.end(), others.begin(), others.end());
      apply_order(session_, mine);
      effect_.order = std::move(mine);
      break;
    }
    case Op::filter: {
      auto t = track(0);
      const auto& expr = std::get<FilterExpr>(ast_.args.at(1));
      Track out = make_track(generated_id(session_, describe(op, {t.get()}, expr.str()), ctx_.user),
                             t->kind, {});
      for (const auto& e : t->events) {
        if (expr.matches(e)) out.events.push_back(e);
      }
      if (t->kind == TrackKind::classifier) out.meta.threshold = t->meta.threshold;
      add_generated(std::move(out));
      break;
    }
    case Op::order: {
      Duration eps = ctx_.order_window;
      if (has_arg(0)) {
        const double seconds = std::get<double>(ast_.args.at(0));
        if (!(seconds >= 0.0)) throw Error(ErrorCode::InvalidArgument, "ordering window must be non-negative");
        eps = static_cast<Duration>(std::llround(seconds * kTicksPerSecond));
      }
      auto order = smart_order(session_, eps);
      apply_order(session_, order);
      effect_.kind = Effect::Kind::reorder;
      effect_.order = std::move(order);
      break;
    }
    case Op::info: {
      effect_.kind = Effect::Kind::info_payload;
      effect_.info = track_info(session_, *track(0));
      break;
    }
    case Op::jaccard:
      metric(jaccard(*track(0), *track(1)));
      break;
    case Op::roc:
      metric(roc(*track(0), *track(1), session_.domain));
      break;
    case Op::report:
      metric(report(*track(0), *track(1), session_.domain));
      break;
    case Op::score: {
      auto p = track(0);
      const Track& g = has_arg(1) ? *track(1) : ground_truth_for(*p);
      if (!is_label_like(g.kind)) {
        throw Error(ErrorCode::TypeMismatch, g.id.canonical() + " is not a label track");
      }
      metric(event_score(*p, g));
      break;
    }
  }
  if (effect_.kind != Effect::Kind::reorder && effect_.order.empty()) {
    effect_.order = current_order(session_);
  }
  return effect_;
}

}  // namespace

Effect execute(Session& session, CommandAST ast, const ExecContext& ctx) {
  resolve_all(session, ast);
  // Work on a copy so a failing command leaves the session untouched.
  Session scratch = session;
  Effect effect = Executor(scratch, ast, ctx).run();
  session = std::move(scratch);
  return effect;
}

Effect execute(Session& session, std::string_view text, const ExecContext& ctx) {
  return execute(session, parse(text), ctx);
}

}  // namespace trackx
