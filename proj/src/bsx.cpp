#include "trackx/bsx.hpp"

#include <algorithm>
#include <cctype>

#include "trackx/error.hpp"
#include "trackx/json_codec.hpp"

namespace trackx {

using nlohmann::json;

namespace {

// Unknown keys inside a track's meta object are kept in Track::extra under
// this prefix; unknown keys of the track object itself are kept verbatim.
constexpr std::string_view kMetaPrefix = "meta/";

[[noreturn]] void schema(const std::string& what) { throw Error(ErrorCode::SchemaError, what); }

json encode_event(const Event& e) {
  json a = json::array({e.interval.start, e.interval.end});
  const bool has_attrs = !e.payload.attrs.empty();
  const bool has_label = e.payload.label.has_value();
  if (e.payload.score || has_label || has_attrs) {
    a.push_back(e.payload.score ? json(*e.payload.score) : json(nullptr));
  }
  if (has_label || has_attrs) a.push_back(has_label ? json(*e.payload.label) : json(nullptr));
  if (has_attrs) {
    json attrs = json::object();
    for (const auto& [k, v] : e.payload.attrs) attrs[k] = codec::attr_value(v);
    a.push_back(attrs);
  }
  return a;
}

Event decode_event(const json& a) {
  if (!a.is_array() || a.size() < 2 || a.size() > 5) schema("event must be [start,end,score?,label?,attrs?]");
  if (!a[0].is_number_integer() || !a[1].is_number_integer()) schema("event bounds must be integers");
  Event e{{a[0].get<Tick>(), a[1].get<Tick>()}, {}};
  if (a.size() > 2 && !a[2].is_null()) {
    if (!a[2].is_number()) schema("event score must be a number");
    e.payload.score = a[2].get<double>();
  }
  if (a.size() > 3 && !a[3].is_null()) {
    if (!a[3].is_string()) schema("event label must be a string");
    e.payload.label = a[3].get<std::string>();
  }
  if (a.size() > 4) {
    if (!a[4].is_object()) schema("event attrs must be an object");
    for (const auto& [k, v] : a[4].items()) e.payload.attrs[k] = codec::attr_value_from(v);
  }
  return e;
}

json encode_track(const Track& t) {
  ExtraFields meta_extra;
  json j = json::object();
  for (const auto& [key, value] : t.extra) {
    if (key.rfind(kMetaPrefix, 0) == 0) {
      meta_extra[key.substr(kMetaPrefix.size())] = value;
    } else {
      j[key] = json::parse(value);
    }
  }
  j["id"] = codec::track_id(t.id);
  j["kind"] = std::string(to_string(t.kind));
  j["meta"] = codec::track_meta(t.meta, meta_extra);
  json events = json::array();
  for (const auto& e : t.events) events.push_back(encode_event(e));
  j["events"] = std::move(events);
  return j;
}

Track decode_track(const json& j) {
  if (!j.is_object()) schema("track must be an object");
  Track t;
  bool have_id = false, have_kind = false;
  for (const auto& [key, value] : j.items()) {
    if (key == "id") {
      t.id = codec::track_id_from(value);
      have_id = true;
    } else if (key == "kind") {
      auto kind = value.is_string() ? parse_track_kind(value.get<std::string>()) : std::nullopt;
      if (!kind) schema("unknown track kind " + value.dump());
      t.kind = *kind;
      have_kind = true;
    } else if (key == "meta") {
      ExtraFields meta_extra;
      t.meta = codec::track_meta_from(value, &meta_extra);
      for (auto& [k, v] : meta_extra) t.extra[std::string(kMetaPrefix) + k] = std::move(v);
    } else if (key == "events") {
      if (!value.is_array()) schema("events must be an array");
      t.events.reserve(value.size());
      for (const auto& e : value) t.events.push_back(decode_event(e));
    } else {
      t.extra[key] = value.dump();
    }
  }
  if (!have_id || !have_kind) schema("track requires id and kind");
  return t;
}

json encode_session(const Session& s) {
  json j = json::object();
  for (const auto& [key, value] : s.extra) j[key] = json::parse(value);
  j["domain"] = codec::interval(s.domain);
  if (s.video) {
    json v = {{"uri", s.video->uri}, {"offset", s.video->offset}};
    if (s.video->length) v["length"] = *s.video->length;
    j["video"] = v;
  } else {
    j["video"] = nullptr;
  }
  j["cursor"] = s.cursor ? json(*s.cursor) : json(nullptr);
  return j;
}

void decode_session(const json& j, Session& s) {
  if (!j.is_object()) schema("session must be an object");
  for (const auto& [key, value] : j.items()) {
    if (key == "domain") {
      s.domain = codec::interval_from(value);
    } else if (key == "video") {
      if (value.is_null()) continue;
      if (!value.is_object()) schema("video must be an object");
      VideoBinding v;
      if (!value.contains("uri") || !value["uri"].is_string()) schema("video.uri must be a string");
      v.uri = value["uri"].get<std::string>();
      if (auto it = value.find("offset"); it != value.end()) {
        if (!it->is_number_integer()) schema("video.offset must be an integer");
        v.offset = it->get<Tick>();
      }
      if (auto it = value.find("length"); it != value.end() && !it->is_null()) {
        if (!it->is_number_integer()) schema("video.length must be an integer");
        v.length = it->get<Duration>();
      }
      s.video = v;
    } else if (key == "cursor") {
      if (value.is_null()) continue;
      if (!value.is_number_integer()) schema("cursor must be an integer");
      s.cursor = value.get<Tick>();
    } else {
      s.extra[key] = value.dump();
    }
  }
  if (!j.contains("domain")) schema("session requires a domain");
}

}  // namespace

std::string bsx_write(const BsxDocument& doc, bool compress) {
  json j = json::object();
  for (const auto& [key, value] : doc.extra) j[key] = json::parse(value);
  j["format_version"] = doc.format_version;
  j["session"] = encode_session(doc.session);
  json tracks = json::array();
  for (const auto& t : doc.session.tracks) tracks.push_back(encode_track(*t));
  j["tracks"] = std::move(tracks);
  std::string text = j.dump();
  return compress ? gzip::compress(text) : text;
}

std::string bsx_write(const Session& session, bool compress) {
  BsxDocument doc;
  doc.session = session;
  return bsx_write(doc, compress);
}

BsxDocument bsx_read_document(std::string_view bytes) {
  std::string inflated;
  std::string_view text = bytes;
  if (gzip::has_magic(bytes)) {
    inflated = gzip::decompress(bytes);
    text = inflated;
  } else {
    const auto first = std::find_if(text.begin(), text.end(),
                                    [](char c) { return !std::isspace(static_cast<unsigned char>(c)); });
    if (first == text.end() || *first != '{') {
      throw Error(ErrorCode::BadMagic, "not a BSX file (neither gzip nor a JSON document)");
    }
  }

  json j;
  try {
    j = json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::DecodeError, std::string("malformed BSX document: ") + e.what());
  }
  if (!j.is_object()) schema("BSX document must be an object");

  BsxDocument doc;
  auto version = j.find("format_version");
  if (version == j.end() || !version->is_number_integer()) schema("format_version missing");
  doc.format_version = version->get<int>();
  if (doc.format_version != kBsxFormatVersion) {
    throw Error(ErrorCode::SchemaVersionUnsupported,
                "BSX format version " + std::to_string(doc.format_version) + " is not supported");
  }
  auto session = j.find("session");
  if (session == j.end()) schema("session missing");
  decode_session(*session, doc.session);
  auto tracks = j.find("tracks");
  if (tracks == j.end() || !tracks->is_array()) schema("tracks array missing");
  for (const auto& t : *tracks) doc.session.tracks.push_back(std::make_shared<const Track>(decode_track(t)));
  for (const auto& [key, value] : j.items()) {
    if (key != "format_version" && key != "session" && key != "tracks") doc.extra[key] = value.dump();
  }
  doc.session.validate();
  return doc;
}

Session bsx_read(std::string_view bytes) { return bsx_read_document(bytes).session; }

// ---------------------------------------------------------------------------
// Manifests

std::vector<ManifestEntry> load_manifest(std::string_view bytes) {
  json j;
  try {
    j = json::parse(bytes);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::DecodeError, std::string("malformed manifest: ") + e.what());
  }
  const json* list = &j;
  if (j.is_object()) {
    auto it = j.find("entries");
    if (it == j.end()) schema("manifest requires an 'entries' array");
    list = &*it;
  }
  if (!list->is_array()) schema("manifest entries must be an array");

  std::vector<ManifestEntry> out;
  for (const auto& entry : *list) {
    if (!entry.is_object()) schema("manifest entry must be an object");
    auto version = entry.find("version");
    if (version == entry.end() || !version->is_string() || !is_version(version->get<std::string>())) {
      throw Error(ErrorCode::BadVersionString,
                  "manifest entry has bad version " + (version == entry.end() ? std::string("(missing)") : version->dump()));
    }
    ManifestEntry e;
    e.id = codec::track_id_from(entry);
    e.model = codec::model_meta_from(entry);
    if (!std::all_of(e.model.commit_hash.begin(), e.model.commit_hash.end(),
                     [](char c) { return std::isxdigit(static_cast<unsigned char>(c)); })) {
      schema("commit_hash of " + e.id.canonical() + " is not hexadecimal");
    }
    out.push_back(std::move(e));
  }
  std::stable_sort(out.begin(), out.end(), [](const ManifestEntry& a, const ManifestEntry& b) {
    if (a.id.class_label != b.id.class_label) return a.id.class_label < b.id.class_label;
    if (a.id.author != b.id.author) return a.id.author < b.id.author;
    return compare_versions(a.id.version, b.id.version) < 0;
  });
  return out;
}

std::vector<std::string> apply_manifest(Session& session, const std::vector<ManifestEntry>& entries) {
  std::vector<std::string> warnings;
  for (const auto& entry : entries) {
    auto idx = session.index_of(entry.id.canonical());
    if (!idx) {
      warnings.push_back("UnknownTrack: manifest entry " + entry.id.canonical() + " matches no track");
      continue;
    }
    const Track& current = *session.tracks[*idx];
    if (current.meta.model == entry.model) continue;
    Track updated = current;
    updated.meta.model = entry.model;
    session.replace(*idx, std::move(updated));
  }
  return warnings;
}

}  // namespace trackx
