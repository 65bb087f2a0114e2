#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "trackx/interval.hpp"

namespace trackx {

using AttrValue = std::variant<double, std::string>;
using AttrMap = std::map<std::string, AttrValue>;

// Attribute keys are non-empty ASCII identifiers.
bool is_attr_key(std::string_view key);

struct EventPayload {
  std::optional<double> score;
  std::optional<std::string> label;
  AttrMap attrs;

  friend bool operator==(const EventPayload&, const EventPayload&) = default;
};

struct Event {
  Interval interval;
  EventPayload payload;

  friend bool operator==(const Event&, const Event&) = default;
};

enum class TrackKind { classifier, label, protocol, container, diff };

std::string_view to_string(TrackKind kind);
std::optional<TrackKind> parse_track_kind(std::string_view text);

// Label-like tracks are usable as ground truth.
inline bool is_label_like(TrackKind k) {
  return k == TrackKind::label || k == TrackKind::protocol;
}

struct TrackId {
  std::string class_label;
  std::string author;
  std::string version;

  // "SleepingJohn1.0"
  std::string canonical() const { return class_label + author + version; }

  // Splits a canonical string using the known authors; the concatenated form
  // is ambiguous otherwise. Throws BadTrackId when no unique split exists.
  static TrackId parse(std::string_view canonical, std::span<const std::string> authors);

  friend bool operator==(const TrackId&, const TrackId&) = default;
};

// Dotted numeric version ("1", "1.2", "1.10"). Throws BadVersionString.
std::vector<std::uint64_t> parse_version(std::string_view version);
bool is_version(std::string_view version);
// Negative, zero or positive as a <, ==, > b. Missing segments count as zero.
int compare_versions(std::string_view a, std::string_view b);

struct Rgb {
  std::uint8_t r = 0;
  std::uint8_t g = 0;
  std::uint8_t b = 0;

  std::string hex() const;
  // "#rrggbb", "rrggbb" or a basic color name.
  static std::optional<Rgb> parse(std::string_view text);

  friend bool operator==(const Rgb&, const Rgb&) = default;
};

enum class RenderMode { blocks, area };

std::string_view to_string(RenderMode mode);
std::optional<RenderMode> parse_render_mode(std::string_view text);

struct ModelMeta {
  std::vector<std::string> sensors;
  double window_seconds = 0.0;
  std::map<std::string, AttrValue> params;
  std::string commit_hash;
  std::string commit_message;
  std::string committed_at;  // ISO-8601 as supplied

  friend bool operator==(const ModelMeta&, const ModelMeta&) = default;
};

struct TrackMeta {
  std::string display_name;
  Rgb color{0x44, 0x77, 0xaa};
  bool visible = true;
  RenderMode render_mode = RenderMode::blocks;
  std::optional<double> threshold;
  std::optional<ModelMeta> model;

  friend bool operator==(const TrackMeta&, const TrackMeta&) = default;
};

// Keys this build does not understand, kept as serialized JSON text so they
// survive a load/save cycle.
using ExtraFields = std::map<std::string, std::string>;

inline constexpr double kDefaultThreshold = 0.5;

struct Track {
  TrackId id;
  TrackKind kind = TrackKind::label;
  std::vector<Event> events;
  TrackMeta meta;
  ExtraFields extra;

  // Throws InvariantViolation naming the track on the first broken rule.
  void validate() const;

  friend bool operator==(const Track&, const Track&) = default;
};

// Builds a track with kind-appropriate metadata defaults.
Track make_track(TrackId id, TrackKind kind, std::vector<Event> events);

using TrackPtr = std::shared_ptr<const Track>;

struct VideoBinding {
  std::string uri;
  Tick offset = 0;                  // session tick at video time 0
  std::optional<Duration> length;   // unknown means open-ended

  friend bool operator==(const VideoBinding&, const VideoBinding&) = default;
};

// Tracks are shared immutable values; the vector order is the display order.
struct Session {
  Interval domain{0, 1};
  std::vector<TrackPtr> tracks;
  std::optional<Tick> cursor;
  std::optional<VideoBinding> video;
  ExtraFields extra;

  const Track* find(const TrackId& id) const;
  const Track* find(std::string_view canonical) const;
  std::optional<std::size_t> index_of(std::string_view canonical) const;
  std::vector<std::string> authors() const;

  // Appends a track; rejects canonical-id collisions. The first events added
  // define the domain, later ones widen it.
  void add(Track track);
  void replace(std::size_t index, Track track);

  // Highest version below `id.version` with the same class label and author.
  const Track* predecessor(const TrackId& id) const;

  void validate() const;
};

bool operator==(const Session& a, const Session& b);

enum class OverlapPolicy { reject, merge_max_score, clip };

// Sorts events and removes overlaps per `policy`. Throws InvalidInterval on an
// empty interval and OverlapError (policy=reject) naming the first bad pair.
std::vector<Event> normalize(std::vector<Event> events, OverlapPolicy policy);

Duration duration(std::span<const Event> events);
inline Duration duration(const IntervalSet& set) { return set.duration(); }
inline Duration duration(const Track& track) { return duration(track.events); }

// Interval of each event, canonicalized (touching events merge).
IntervalSet coverage(std::span<const Event> events);

}  // namespace trackx
