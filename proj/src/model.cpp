#include "trackx/model.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <set>

#include "trackx/error.hpp"

namespace trackx {

bool is_attr_key(std::string_view key) {
  if (key.empty()) return false;
  const auto head = static_cast<unsigned char>(key.front());
  if (!(std::isalpha(head) || head == '_')) return false;
  return std::all_of(key.begin(), key.end(), [](char c) {
    const auto u = static_cast<unsigned char>(c);
    return u < 0x80 && (std::isalnum(u) || u == '_');
  });
}

std::string_view to_string(TrackKind kind) {
  switch (kind) {
    case TrackKind::classifier: return "classifier";
    case TrackKind::label: return "label";
    case TrackKind::protocol: return "protocol";
    case TrackKind::container: return "container";
    case TrackKind::diff: return "diff";
  }
  return "label";
}

std::optional<TrackKind> parse_track_kind(std::string_view text) {
  for (auto k : {TrackKind::classifier, TrackKind::label, TrackKind::protocol,
                 TrackKind::container, TrackKind::diff}) {
    if (to_string(k) == text) return k;
  }
  return std::nullopt;
}

std::string_view to_string(RenderMode mode) {
  return mode == RenderMode::area ? "area" : "blocks";
}

std::optional<RenderMode> parse_render_mode(std::string_view text) {
  if (text == "blocks") return RenderMode::blocks;
  if (text == "area") return RenderMode::area;
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Versions and ids

std::vector<std::uint64_t> parse_version(std::string_view version) {
  std::vector<std::uint64_t> parts;
  std::size_t pos = 0;
  while (true) {
    const std::size_t dot = version.find('.', pos);
    const auto segment = version.substr(pos, dot == std::string_view::npos ? dot : dot - pos);
    std::uint64_t value = 0;
    auto [ptr, ec] = std::from_chars(segment.data(), segment.data() + segment.size(), value);
    if (segment.empty() || ec != std::errc() || ptr != segment.data() + segment.size()) {
      throw Error(ErrorCode::BadVersionString,
                  "bad version string '" + std::string(version) + "'");
    }
    parts.push_back(value);
    if (dot == std::string_view::npos) break;
    pos = dot + 1;
  }
  return parts;
}

bool is_version(std::string_view version) {
  if (version.empty()) return false;
  bool digit_run = false;
  for (char c : version) {
    if (c >= '0' && c <= '9') {
      digit_run = true;
    } else if (c == '.' && digit_run) {
      digit_run = false;
    } else {
      return false;
    }
  }
  return digit_run;
}

int compare_versions(std::string_view a, std::string_view b) {
  const auto va = parse_version(a);
  const auto vb = parse_version(b);
  const std::size_t n = std::max(va.size(), vb.size());
  for (std::size_t i = 0; i < n; ++i) {
    const std::uint64_t x = i < va.size() ? va[i] : 0;
    const std::uint64_t y = i < vb.size() ? vb[i] : 0;
    if (x != y) return x < y ? -1 : 1;
  }
  return 0;
}

TrackId TrackId::parse(std::string_view canonical, std::span<const std::string> authors) {
  std::vector<TrackId> found;
  for (const auto& author : authors) {
    if (author.empty()) continue;
    for (std::size_t pos = canonical.find(author, 1); pos != std::string_view::npos;
         pos = canonical.find(author, pos + 1)) {
      const auto version = canonical.substr(pos + author.size());
      if (!is_version(version)) continue;
      TrackId id{std::string(canonical.substr(0, pos)), author, std::string(version)};
      if (std::find(found.begin(), found.end(), id) == found.end()) found.push_back(id);
    }
  }
  if (found.size() != 1) {
    throw Error(ErrorCode::BadTrackId,
                std::string(found.empty() ? "cannot split" : "ambiguous") + " track id '" +
                    std::string(canonical) + "'");
  }
  return found.front();
}

// ---------------------------------------------------------------------------
// Colors

std::string Rgb::hex() const {
  char buf[8];
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x", r, g, b);
  return buf;
}

std::optional<Rgb> Rgb::parse(std::string_view text) {
  struct Named {
    std::string_view name;
    Rgb rgb;
  };
  static constexpr std::array<Named, 12> kNamed{{
      {"red", {0xd6, 0x27, 0x28}},    {"green", {0x2c, 0xa0, 0x2c}},
      {"blue", {0x1f, 0x77, 0xb4}},   {"orange", {0xff, 0x7f, 0x0e}},
      {"purple", {0x94, 0x67, 0xbd}}, {"brown", {0x8c, 0x56, 0x4b}},
      {"pink", {0xe3, 0x77, 0xc2}},   {"gray", {0x7f, 0x7f, 0x7f}},
      {"grey", {0x7f, 0x7f, 0x7f}},   {"yellow", {0xbc, 0xbd, 0x22}},
      {"cyan", {0x17, 0xbe, 0xcf}},   {"black", {0x00, 0x00, 0x00}},
  }};
  std::string lower;
  for (char c : text) lower += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  for (const auto& n : kNamed) {
    if (n.name == lower) return n.rgb;
  }
  std::string_view hex = lower;
  if (!hex.empty() && hex.front() == '#') hex.remove_prefix(1);
  if (hex.size() != 6) return std::nullopt;
  unsigned value = 0;
  auto [ptr, ec] = std::from_chars(hex.data(), hex.data() + hex.size(), value, 16);
  if (ec != std::errc() || ptr != hex.data() + hex.size()) return std::nullopt;
  return Rgb{static_cast<std::uint8_t>(value >> 16), static_cast<std::uint8_t>(value >> 8),
             static_cast<std::uint8_t>(value)};
}

// ---------------------------------------------------------------------------
// Tracks

namespace {

[[noreturn]] void violation(const Track& t, const std::string& what) {
  throw Error(ErrorCode::InvariantViolation, "track " + t.id.canonical() + ": " + what);
}

bool is_hex(std::string_view s) {
  return std::all_of(s.begin(), s.end(),
                     [](char c) { return std::isxdigit(static_cast<unsigned char>(c)); });
}

bool in_unit_range(double v) { return v >= 0.0 && v <= 1.0; }

}  // namespace

void Track::validate() const {
  if (id.class_label.empty()) violation(*this, "empty class label");
  if (!is_version(id.version)) violation(*this, "bad version '" + id.version + "'");
  if ((kind == TrackKind::classifier) != meta.threshold.has_value()) {
    violation(*this, "threshold must be present exactly for classifier tracks");
  }
  if (meta.threshold && !in_unit_range(*meta.threshold)) violation(*this, "threshold outside [0,1]");
  if (meta.model && !is_hex(meta.model->commit_hash)) violation(*this, "commit hash is not hex");

  std::set<std::string_view> labels;
  for (std::size_t i = 0; i < events.size(); ++i) {
    const Event& e = events[i];
    if (!e.interval.valid()) violation(*this, "event " + std::to_string(i) + " has no extent");
    if (i > 0 && events[i - 1].interval.end > e.interval.start) {
      violation(*this, "events " + std::to_string(i - 1) + " and " + std::to_string(i) +
                           " overlap or are unsorted");
    }
    if (e.payload.score && !in_unit_range(*e.payload.score)) {
      violation(*this, "event " + std::to_string(i) + " score outside [0,1]");
    }
    if (kind == TrackKind::classifier && !e.payload.score) {
      violation(*this, "classifier event " + std::to_string(i) + " lacks a score");
    }
    if (is_label_like(kind) && !e.payload.label) {
      violation(*this, "label event " + std::to_string(i) + " lacks a label");
    }
    if (kind == TrackKind::protocol && !labels.insert(*e.payload.label).second) {
      violation(*this, "protocol label '" + *e.payload.label + "' repeats");
    }
    for (const auto& [key, value] : e.payload.attrs) {
      if (!is_attr_key(key)) violation(*this, "bad attribute key '" + key + "'");
    }
  }
}

Track make_track(TrackId id, TrackKind kind, std::vector<Event> events) {
  Track t;
  t.meta.display_name = id.canonical();
  t.id = std::move(id);
  t.kind = kind;
  t.events = std::move(events);
  if (kind == TrackKind::classifier) t.meta.threshold = kDefaultThreshold;
  return t;
}

// ---------------------------------------------------------------------------
// Sessions

const Track* Session::find(const TrackId& id) const { return find(id.canonical()); }

const Track* Session::find(std::string_view canonical) const {
  auto idx = index_of(canonical);
  return idx ? tracks[*idx].get() : nullptr;
}

std::optional<std::size_t> Session::index_of(std::string_view canonical) const {
  for (std::size_t i = 0; i < tracks.size(); ++i) {
    if (tracks[i]->id.canonical() == canonical) return i;
  }
  return std::nullopt;
}

std::vector<std::string> Session::authors() const {
  std::vector<std::string> out;
  for (const auto& t : tracks) {
    if (std::find(out.begin(), out.end(), t->id.author) == out.end()) out.push_back(t->id.author);
  }
  return out;
}

void Session::add(Track track) {
  track.validate();
  if (find(track.id)) {
    throw Error(ErrorCode::DuplicateTrack, "track " + track.id.canonical() + " already exists");
  }
  if (!track.events.empty()) {
    const Interval hull{track.events.front().interval.start, track.events.back().interval.end};
    const bool has_events = std::any_of(tracks.begin(), tracks.end(),
                                        [](const TrackPtr& t) { return !t->events.empty(); });
    domain = has_events ? Interval{std::min(domain.start, hull.start),
                                   std::max(domain.end, hull.end)}
                        : hull;
  }
  tracks.push_back(std::make_shared<const Track>(std::move(track)));
}

void Session::replace(std::size_t index, Track track) {
  tracks.at(index) = std::make_shared<const Track>(std::move(track));
}

const Track* Session::predecessor(const TrackId& id) const {
  const Track* best = nullptr;
  for (const auto& t : tracks) {
    if (t->id.class_label != id.class_label || t->id.author != id.author) continue;
    if (compare_versions(t->id.version, id.version) >= 0) continue;
    if (!best || compare_versions(t->id.version, best->id.version) > 0) best = t.get();
  }
  return best;
}

void Session::validate() const {
  if (!domain.valid()) throw Error(ErrorCode::InvariantViolation, "session domain is empty");
  std::set<std::string> seen;
  for (const auto& t : tracks) {
    t->validate();
    if (!seen.insert(t->id.canonical()).second) {
      throw Error(ErrorCode::InvariantViolation, "track " + t->id.canonical() + ": duplicate id");
    }
    if (!t->events.empty()) {
      const Interval hull{t->events.front().interval.start, t->events.back().interval.end};
      if (!domain.contains(hull)) {
        throw Error(ErrorCode::InvariantViolation,
                    "track " + t->id.canonical() + ": events outside session domain");
      }
    }
  }
}

bool operator==(const Session& a, const Session& b) {
  if (!(a.domain == b.domain && a.cursor == b.cursor && a.video == b.video &&
        a.extra == b.extra && a.tracks.size() == b.tracks.size())) {
    return false;
  }
  for (std::size_t i = 0; i < a.tracks.size(); ++i) {
    if (!(*a.tracks[i] == *b.tracks[i])) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Canonicalization

std::vector<Event> normalize(std::vector<Event> events, OverlapPolicy policy) {
  for (const auto& e : events) {
    if (!e.interval.valid()) {
      throw Error(ErrorCode::InvalidInterval,
                  "event [" + std::to_string(e.interval.start) + ", " +
                      std::to_string(e.interval.end) + ") has no extent");
    }
  }
  std::stable_sort(events.begin(), events.end(), [](const Event& a, const Event& b) {
    return a.interval.start < b.interval.start ||
           (a.interval.start == b.interval.start && a.interval.end < b.interval.end);
  });

  std::vector<Event> out;
  out.reserve(events.size());
  for (auto& e : events) {
    if (out.empty() || out.back().interval.end <= e.interval.start) {
      out.push_back(std::move(e));
      continue;
    }
    Event& prev = out.back();
    switch (policy) {
      case OverlapPolicy::reject:
        throw Error(ErrorCode::OverlapError,
                    "events [" + std::to_string(prev.interval.start) + ", " +
                        std::to_string(prev.interval.end) + ") and [" +
                        std::to_string(e.interval.start) + ", " +
                        std::to_string(e.interval.end) + ") overlap");
      case OverlapPolicy::merge_max_score:
        prev.interval.end = std::max(prev.interval.end, e.interval.end);
        if (e.payload.score && (!prev.payload.score || *e.payload.score > *prev.payload.score)) {
          prev.payload.score = e.payload.score;
        }
        if (!prev.payload.label) prev.payload.label = std::move(e.payload.label);
        break;
      case OverlapPolicy::clip:
        if (e.interval.end > prev.interval.end) {
          e.interval.start = prev.interval.end;
          out.push_back(std::move(e));
        }
        break;
    }
  }
  return out;
}

Duration duration(std::span<const Event> events) {
  Duration total = 0;
  for (const auto& e : events) total += e.interval.length();
  return total;
}

IntervalSet coverage(std::span<const Event> events) {
  std::vector<Interval> v;
  v.reserve(events.size());
  for (const auto& e : events) v.push_back(e.interval);
  return IntervalSet(std::move(v));
}

}  // namespace trackx
