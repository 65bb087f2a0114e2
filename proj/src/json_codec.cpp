#include "trackx/json_codec.hpp"

#include <cmath>

namespace trackx::codec {

namespace {

[[noreturn]] void schema(const std::string& what) { throw Error(ErrorCode::SchemaError, what); }

const json& field(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end()) schema(std::string("missing field '") + key + "'");
  return *it;
}

std::string string_field(const json& j, const char* key) {
  const json& v = field(j, key);
  if (!v.is_string()) schema(std::string("field '") + key + "' must be a string");
  return v.get<std::string>();
}

}  // namespace

json attr_value(const AttrValue& v) {
  if (const double* d = std::get_if<double>(&v)) return *d;
  return std::get<std::string>(v);
}

AttrValue attr_value_from(const json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) return j.get<std::string>();
  schema("attribute values must be numbers or strings");
}

json interval(const Interval& iv) { return json::array({iv.start, iv.end}); }

Interval interval_from(const json& j) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number_integer() || !j[1].is_number_integer()) {
    schema("interval must be [start, end] integers");
  }
  return {j[0].get<Tick>(), j[1].get<Tick>()};
}

json track_id(const TrackId& id) {
  return {{"class_label", id.class_label}, {"author", id.author}, {"version", id.version}};
}

TrackId track_id_from(const json& j) {
  if (!j.is_object()) schema("track id must be an object");
  return {string_field(j, "class_label"), string_field(j, "author"), string_field(j, "version")};
}

json model_meta(const ModelMeta& m) {
  json params = json::object();
  for (const auto& [k, v] : m.params) params[k] = attr_value(v);
  return {{"sensors", m.sensors},
          {"window_seconds", m.window_seconds},
          {"params", params},
          {"commit_hash", m.commit_hash},
          {"commit_message", m.commit_message},
          {"committed_at", m.committed_at}};
}

ModelMeta model_meta_from(const json& j) {
  if (!j.is_object()) schema("model metadata must be an object");
  ModelMeta m;
  if (auto it = j.find("sensors"); it != j.end()) {
    if (!it->is_array()) schema("sensors must be an array");
    for (const auto& s : *it) {
      if (!s.is_string()) schema("sensors must be strings");
      m.sensors.push_back(s.get<std::string>());
    }
  }
  if (auto it = j.find("window_seconds"); it != j.end()) {
    if (!it->is_number()) schema("window_seconds must be a number");
    m.window_seconds = it->get<double>();
  }
  if (auto it = j.find("params"); it != j.end()) {
    if (!it->is_object()) schema("params must be an object");
    for (const auto& [k, v] : it->items()) m.params[k] = attr_value_from(v);
  }
  for (auto [key, dest] : {std::pair{"commit_hash", &m.commit_hash},
                           std::pair{"commit_message", &m.commit_message},
                           std::pair{"committed_at", &m.committed_at}}) {
    if (auto it = j.find(key); it != j.end()) {
      if (!it->is_string()) schema(std::string(key) + " must be a string");
      *dest = it->get<std::string>();
    }
  }
  return m;
}

json extra_value(const std::string& text) { return json::parse(text); }

json track_meta(const TrackMeta& m, const ExtraFields& extra) {
  json j = {{"display_name", m.display_name},
            {"color", m.color.hex()},
            {"visible", m.visible},
            {"render_mode", std::string(to_string(m.render_mode))}};
  if (m.threshold) j["threshold"] = *m.threshold;
  if (m.model) j["model"] = model_meta(*m.model);
  for (const auto& [k, v] : extra) j[k] = extra_value(v);
  return j;
}

TrackMeta track_meta_from(const json& j, ExtraFields* extra) {
  if (!j.is_object()) schema("meta must be an object");
  TrackMeta m;
  for (const auto& [key, value] : j.items()) {
    if (key == "display_name") {
      if (!value.is_string()) schema("display_name must be a string");
      m.display_name = value.get<std::string>();
    } else if (key == "color") {
      auto c = value.is_string() ? Rgb::parse(value.get<std::string>()) : std::nullopt;
      if (!c) schema("color must be #rrggbb");
      m.color = *c;
    } else if (key == "visible") {
      if (!value.is_boolean()) schema("visible must be a boolean");
      m.visible = value.get<bool>();
    } else if (key == "render_mode") {
      auto mode = value.is_string() ? parse_render_mode(value.get<std::string>()) : std::nullopt;
      if (!mode) schema("render_mode must be blocks or area");
      m.render_mode = *mode;
    } else if (key == "threshold") {
      if (!value.is_null()) {
        if (!value.is_number()) schema("threshold must be a number");
        m.threshold = value.get<double>();
      }
    } else if (key == "model") {
      if (!value.is_null()) m.model = model_meta_from(value);
    } else if (extra) {
      (*extra)[key] = value.dump();
    }
  }
  return m;
}

json metric(const Metric& m) { return m ? json(*m) : json(nullptr); }

json threshold_value(double theta) {
  if (std::isinf(theta)) return theta > 0 ? "+inf" : "-inf";
  return theta;
}

namespace {

json container(const ContainerTrack& c) {
  json den = json::array(), num = json::array();
  for (const auto& iv : c.denominator) den.push_back(interval(iv));
  for (const auto& iv : c.numerator) num.push_back(interval(iv));
  return {{"metric_name", c.metric_name}, {"value", metric(c.value)},
          {"denominator", den},           {"numerator", num},
          {"denominator_duration", c.denominator.duration()},
          {"numerator_duration", c.numerator.duration()}};
}

}  // namespace

json report(const Report& r) {
  json containers = json::array();
  for (const auto& c : r.containers) containers.push_back(container(c));
  return {{"accuracy", metric(r.accuracy)},
          {"precision", metric(r.precision)},
          {"recall", metric(r.recall)},
          {"f1", metric(r.f1)},
          {"durations",
           {{"true_positive", r.true_positive},
            {"false_positive", r.false_positive},
            {"false_negative", r.false_negative},
            {"true_negative", r.true_negative}}},
          {"containers", containers}};
}

json roc_curve(const RocCurve& c) {
  json points = json::array();
  for (const auto& p : c.points) {
    points.push_back({{"fpr", p.fpr}, {"tpr", p.tpr}, {"threshold", threshold_value(p.threshold)}});
  }
  return {{"points", points}, {"auc", c.auc}};
}

json event_score(const EventScore& s) {
  return {{"detected", s.detected}, {"total", s.total}, {"score", s.score}};
}

json playlist(const Playlist& p) {
  json segs = json::array();
  for (const auto& s : p.segments) {
    segs.push_back({{"video_uri", s.video_uri}, {"start_seconds", s.start_seconds},
                    {"end_seconds", s.end_seconds}});
  }
  return {{"segments", segs}, {"dropped", p.dropped}};
}

json render_buffer(const RenderBuffer& b) {
  json bins = json::array();
  for (const auto& bin : b.bins) {
    bins.push_back({{"span", interval(bin.span)},
                    {"covered", bin.covered},
                    {"coverage", bin.coverage},
                    {"max_score", bin.max_score ? json(*bin.max_score) : json(nullptr)}});
  }
  return {{"window", interval(b.window)}, {"bins", bins}};
}

json track_summary(const Track& t) {
  json j = {{"id", t.id.canonical()},
            {"class_label", t.id.class_label},
            {"author", t.id.author},
            {"version", t.id.version},
            {"kind", std::string(to_string(t.kind))},
            {"meta", track_meta(t.meta)},
            {"event_count", t.events.size()},
            {"duration", duration(t)}};
  if (!t.events.empty()) {
    j["extent"] = interval({t.events.front().interval.start, t.events.back().interval.end});
  }
  return j;
}

json track_info(const TrackInfo& info) {
  json j = {{"id", info.id.canonical()},
            {"class_label", info.id.class_label},
            {"author", info.id.author},
            {"version", info.id.version},
            {"kind", std::string(to_string(info.kind))},
            {"meta", track_meta(info.meta)},
            {"event_count", info.event_count},
            {"duration", info.duration},
            {"attr_keys", info.attr_keys},
            {"predecessor", info.predecessor ? json(*info.predecessor) : json(nullptr)}};
  j["extent"] = info.extent ? interval(*info.extent) : json(nullptr);
  return j;
}

json event(const Event& e) {
  json j = {{"start", e.interval.start}, {"end", e.interval.end}};
  if (e.payload.score) j["score"] = *e.payload.score;
  if (e.payload.label) j["label"] = *e.payload.label;
  if (!e.payload.attrs.empty()) {
    json attrs = json::object();
    for (const auto& [k, v] : e.payload.attrs) attrs[k] = attr_value(v);
    j["attrs"] = attrs;
  }
  return j;
}

json effect(const Effect& e) {
  json j = {{"kind", std::string(to_string(e.kind))}, {"op", std::string(op_name(e.op))}};
  if (e.new_track) j["new_track"] = *e.new_track;
  std::visit(
      [&](const auto& m) {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, double>) {
          j["metric"] = {{"jaccard", m}};
        } else if constexpr (std::is_same_v<T, Report>) {
          j["metric"] = report(m);
        } else if constexpr (std::is_same_v<T, RocCurve>) {
          j["metric"] = roc_curve(m);
        } else if constexpr (std::is_same_v<T, EventScore>) {
          j["metric"] = event_score(m);
        }
      },
      e.metric);
  if (!e.shown.empty()) j["shown"] = e.shown;
  if (!e.hidden.empty()) j["hidden"] = e.hidden;
  if (e.playlist) j["playlist"] = playlist(*e.playlist);
  if (!e.order.empty()) j["order"] = e.order;
  if (!e.changed.empty()) j["changed"] = e.changed;
  if (e.info) j["info"] = track_info(*e.info);
  return j;
}

json error(const Error& e) {
  json j = {{"code", std::string(code_name(e.code()))}, {"message", e.what()}};
  if (const auto* amb = dynamic_cast<const AmbiguousRefError*>(&e)) j["candidates"] = amb->candidates();
  if (const auto* fs = dynamic_cast<const FilterSyntaxError*>(&e)) j["position"] = fs->position();
  if (const auto* bt = dynamic_cast<const BadTimestampError*>(&e)) j["row"] = bt->row();
  return {{"error", j}};
}

}  // namespace trackx::codec
