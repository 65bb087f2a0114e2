#include "trackx/service.hpp"

#include <charconv>
#include <random>

#include "trackx/bsx.hpp"
#include "trackx/error.hpp"
#include "trackx/ingest.hpp"
#include "trackx/json_codec.hpp"

namespace trackx {

using nlohmann::json;

// ---------------------------------------------------------------------------
// SessionStore

namespace {

std::string random_id() {
  static std::mutex mu;
  static std::mt19937_64 rng{std::random_device{}()};
  std::lock_guard lock(mu);
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(rng()));
  return buf;
}

}  // namespace

std::string SessionStore::create(Session session) {
  session.validate();
  auto slot = std::make_unique<Slot>();
  slot->current = std::make_shared<const Session>(std::move(session));
  std::unique_lock lock(mutex_);
  std::string id;
  do {
    id = random_id();
  } while (slots_.count(id));
  slots_.emplace(id, std::move(slot));
  return id;
}

bool SessionStore::erase(const std::string& id) {
  std::unique_lock lock(mutex_);
  return slots_.erase(id) > 0;
}

std::vector<std::string> SessionStore::ids() const {
  std::shared_lock lock(mutex_);
  std::vector<std::string> out;
  for (const auto& [id, slot] : slots_) out.push_back(id);
  return out;
}

SessionStore::Slot& SessionStore::find_slot(const std::string& id) const {
  std::shared_lock lock(mutex_);
  auto it = slots_.find(id);
  if (it == slots_.end()) throw Error(ErrorCode::UnknownSession, "no session '" + id + "'");
  return *it->second;
}

std::shared_ptr<const Session> SessionStore::load(const Slot& slot) {
  std::lock_guard lock(slot.pointer);
  return slot.current;
}

void SessionStore::publish(Slot& slot, std::shared_ptr<const Session> next) {
  std::lock_guard lock(slot.pointer);
  slot.current = std::move(next);
}

std::shared_ptr<const Session> SessionStore::snapshot(const std::string& id) const {
  return load(find_slot(id));
}

// ---------------------------------------------------------------------------
// Api

namespace {

Api::Response json_response(int status, const json& body) {
  return {status, body.dump(), "application/json"};
}

int http_status(ErrorCode code) {
  switch (code) {
    case ErrorCode::UnknownSession:
    case ErrorCode::UnknownTrack:
    case ErrorCode::NoMatch:
      return 404;
    case ErrorCode::DuplicateTrack:
      return 409;
    default:
      return 400;
  }
}

std::vector<std::string> split_path(const std::string& path) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < path.size()) {
    if (path[i] == '/') {
      ++i;
      continue;
    }
    const std::size_t j = path.find('/', i);
    out.push_back(path.substr(i, j == std::string::npos ? std::string::npos : j - i));
    if (j == std::string::npos) break;
    i = j;
  }
  return out;
}

std::optional<std::string> query(const Api::Request& req, const std::string& key) {
  auto it = req.query.find(key);
  if (it == req.query.end()) return std::nullopt;
  return it->second;
}

std::string required_query(const Api::Request& req, const std::string& key) {
  auto v = query(req, key);
  if (!v || v->empty()) throw Error(ErrorCode::InvalidArgument, "missing query parameter '" + key + "'");
  return *v;
}

template <class T>
std::optional<T> number_query(const Api::Request& req, const std::string& key) {
  auto v = query(req, key);
  if (!v) return std::nullopt;
  T out{};
  auto [ptr, ec] = std::from_chars(v->data(), v->data() + v->size(), out);
  if (v->empty() || ec != std::errc() || ptr != v->data() + v->size()) {
    throw Error(ErrorCode::InvalidArgument, "query parameter '" + key + "' must be numeric");
  }
  return out;
}

const Track& lookup(const Session& s, const std::string& ref, Op op, std::size_t slot) {
  const TrackRef r = resolve(s, TrackRef{ref}, op, slot);
  return *s.find(r.ids.front());
}

json parse_body(const Api::Request& req) {
  try {
    return json::parse(req.body);
  } catch (const json::parse_error&) {
    throw Error(ErrorCode::InvalidArgument, "request body must be JSON");
  }
}

Interval window_from(const Api::Request& req, const Session& s) {
  return {number_query<Tick>(req, "from").value_or(s.domain.start),
          number_query<Tick>(req, "to").value_or(s.domain.end)};
}

const Api::Part* find_part(const std::vector<Api::Part>& parts, const std::string& name) {
  for (const auto& p : parts) {
    if (p.name == name) return &p;
  }
  return nullptr;
}

json session_summary(const std::string& id, const Session& s) {
  json tracks = json::array();
  for (const auto& t : s.tracks) tracks.push_back(t->id.canonical());
  json j = {{"id", id},
            {"domain", codec::interval(s.domain)},
            {"cursor", s.cursor ? json(*s.cursor) : json(nullptr)},
            {"track_count", s.tracks.size()},
            {"tracks", tracks}};
  if (s.video) {
    j["video"] = {{"uri", s.video->uri}, {"offset", s.video->offset}};
    if (s.video->length) j["video"]["length"] = *s.video->length;
  } else {
    j["video"] = nullptr;
  }
  return j;
}

}  // namespace

std::pair<Session, std::vector<std::string>> Api::session_from_parts(const std::vector<Part>& parts) {
  Session session;
  std::vector<std::string> warnings;

  if (const Part* bsx = find_part(parts, "bsx")) {
    session = bsx_read(bsx->content);
  } else if (const Part* tracks = find_part(parts, "tracks")) {
    json descriptors;
    try {
      descriptors = json::parse(tracks->content);
    } catch (const json::parse_error&) {
      throw Error(ErrorCode::SchemaError, "'tracks' part must be a JSON array");
    }
    if (!descriptors.is_array()) throw Error(ErrorCode::SchemaError, "'tracks' part must be a JSON array");
    for (const auto& d : descriptors) {
      if (!d.is_object() || !d.contains("part") || !d.contains("kind")) {
        throw Error(ErrorCode::SchemaError, "track descriptor needs part, kind, class_label, author, version");
      }
      const std::string part_name = d["part"].get<std::string>();
      const Part* csv = find_part(parts, part_name);
      if (!csv) throw Error(ErrorCode::SchemaError, "no upload part named '" + part_name + "'");
      auto kind = parse_track_kind(d["kind"].get<std::string>());
      if (!kind) throw Error(ErrorCode::SchemaError, "unknown track kind in descriptor");
      CompressionConfig cfg;
      if (d.contains("eps_t")) cfg.eps_t = d["eps_t"].get<Duration>();
      if (d.contains("eps_s")) cfg.eps_s = d["eps_s"].get<double>();
      session.add(import_csv(csv->content, *kind, codec::track_id_from(d), cfg));
    }
  } else {
    throw Error(ErrorCode::SchemaError, "upload needs a 'bsx' part or a 'tracks' descriptor part");
  }

  if (const Part* extra = find_part(parts, "session")) {
    json j;
    try {
      j = json::parse(extra->content);
    } catch (const json::parse_error&) {
      throw Error(ErrorCode::SchemaError, "'session' part must be JSON");
    }
    if (j.contains("domain")) session.domain = codec::interval_from(j["domain"]);
    if (j.contains("cursor") && !j["cursor"].is_null()) session.cursor = j["cursor"].get<Tick>();
    if (j.contains("video") && !j["video"].is_null()) {
      const json& v = j["video"];
      VideoBinding video{v.at("uri").get<std::string>(), v.value("offset", Tick{0}), std::nullopt};
      if (v.contains("length") && !v["length"].is_null()) video.length = v["length"].get<Duration>();
      session.video = video;
    }
  }
  if (const Part* manifest = find_part(parts, "manifest")) {
    warnings = apply_manifest(session, load_manifest(manifest->content));
  }
  session.validate();
  return {std::move(session), std::move(warnings)};
}

Api::Response Api::handle(const Request& req) {
  try {
    const auto seg = split_path(req.path);
    if (seg.empty() || seg[0] != "sessions") {
      return json_response(404, codec::error(Error(ErrorCode::InvalidArgument, "unknown path " + req.path)));
    }

    if (seg.size() == 1) {
      if (req.method != "POST") return json_response(405, {{"error", {{"code", "MethodNotAllowed"}}}});
      std::vector<Part> parts = req.parts;
      if (parts.empty()) parts.push_back({"bsx", "", req.content_type, req.body});
      auto [session, warnings] = session_from_parts(parts);
      const std::string id = store_.create(std::move(session));
      json body = session_summary(id, *store_.snapshot(id));
      body["warnings"] = warnings;
      return json_response(201, body);
    }

    const std::string& sid = seg[1];
    const bool get = req.method == "GET";
    const bool post = req.method == "POST";

    if (seg.size() == 2 && get) return json_response(200, session_summary(sid, *store_.snapshot(sid)));

    if (seg.size() == 3 && seg[2] == "tracks" && get) {
      auto s = store_.snapshot(sid);
      json out = json::array();
      for (const auto& t : s->tracks) out.push_back(codec::track_summary(*t));
      return json_response(200, out);
    }

    if (seg.size() == 5 && seg[2] == "tracks" && seg[4] == "render" && get) {
      auto s = store_.snapshot(sid);
      const Track& t = lookup(*s, seg[3], Op::info, 0);
      const auto bins = number_query<std::size_t>(req, "bins").value_or(1000);
      return json_response(200, codec::render_buffer(bin_events(t, window_from(req, *s), bins, s->domain)));
    }

    if (seg.size() == 5 && seg[2] == "tracks" && seg[4] == "events" && get) {
      auto s = store_.snapshot(sid);
      const Track& t = lookup(*s, seg[3], Op::info, 0);
      const Interval window = window_from(req, *s);
      json events = json::array();
      for (const auto& e : t.events) {
        if (e.interval.overlaps(window)) events.push_back(codec::event(e));
      }
      json body = codec::track_summary(t);
      body["events"] = std::move(events);
      return json_response(200, body);
    }

    if (seg.size() == 5 && seg[2] == "tracks" && seg[4] == "threshold" && post) {
      const json body = parse_body(req);
      if (!body.contains("value") || !body["value"].is_number()) {
        throw Error(ErrorCode::InvalidArgument, "threshold body must be {\"value\": number}");
      }
      CommandAST ast{Op::threshold, {TrackRef{seg[3]}, body["value"].get<double>()}};
      json out = store_.mutate(sid, [&](Session& s) {
        Effect effect = execute(s, ast, defaults_);
        json j = codec::effect(effect);
        j["track"] = codec::track_summary(*s.find(effect.changed.front()));
        return j;
      });
      return json_response(200, out);
    }

    if (seg.size() == 3 && seg[2] == "command" && post) {
      std::string text;
      ExecContext ctx = defaults_;
      if (req.content_type.rfind("text/plain", 0) == 0) {
        text = req.body;
      } else {
        const json body = parse_body(req);
        if (!body.contains("text") || !body["text"].is_string()) {
          throw Error(ErrorCode::InvalidArgument, "command body must be {\"text\": string}");
        }
        text = body["text"].get<std::string>();
        if (body.contains("user") && body["user"].is_string()) ctx.user = body["user"].get<std::string>();
      }
      const CommandAST ast = parse(text);
      json out = store_.mutate(sid, [&](Session& s) {
        Effect effect = execute(s, ast, ctx);
        json j = codec::effect(effect);
        if (effect.new_track) j["track"] = codec::track_summary(*s.find(*effect.new_track));
        return j;
      });
      return json_response(200, out);
    }

    if (seg.size() == 3 && seg[2] == "complete" && get) {
      auto s = store_.snapshot(sid);
      return json_response(200, {{"suggestions", autocomplete(*s, query(req, "text").value_or(""))}});
    }

    if (seg.size() == 4 && seg[2] == "metrics" && get) {
      auto s = store_.snapshot(sid);
      if (seg[3] == "roc") {
        const Track& c = lookup(*s, required_query(req, "c"), Op::roc, 0);
        const Track& g = lookup(*s, required_query(req, "g"), Op::roc, 1);
        return json_response(200, codec::roc_curve(roc(c, g, window_from(req, *s))));
      }
      if (seg[3] == "report") {
        const Track& p = lookup(*s, required_query(req, "p"), Op::report, 0);
        const Track& g = lookup(*s, required_query(req, "g"), Op::report, 1);
        return json_response(200, codec::report(report(p, g, window_from(req, *s))));
      }
      if (seg[3] == "score") {
        const Track& p = lookup(*s, required_query(req, "p"), Op::score, 0);
        const Track& g = lookup(*s, required_query(req, "g"), Op::score, 1);
        return json_response(200, codec::event_score(event_score(p, g)));
      }
    }

    if (seg.size() == 3 && seg[2] == "playlist" && get) {
      auto s = store_.snapshot(sid);
      const Track& t = lookup(*s, required_query(req, "t"), Op::play, 0);
      return json_response(200, codec::playlist(playlist(t, *s)));
    }

    return json_response(404, codec::error(Error(ErrorCode::InvalidArgument,
                                                 "no route for " + req.method + " " + req.path)));
  } catch (const Error& e) {
    return json_response(http_status(e.code()), codec::error(e));
  } catch (const json::exception& e) {
    return json_response(400, codec::error(Error(ErrorCode::SchemaError, e.what())));
  } catch (const std::exception& e) {
    return json_response(500, {{"error", {{"code", "Internal"}, {"message", e.what()}}}});
  }
}

}  // namespace trackx
