#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "trackx/metrics.hpp"
#include "trackx/model.hpp"
#include "trackx/render.hpp"

namespace trackx {

enum class Op {
  negate,
  unite,  // "union" / "add"
  intersection,
  errors,
  subtract,
  match,
  variation,
  play,
  threshold,
  show,
  hide,
  transform,
  rename,
  color,
  author,
  filter,
  order,
  info,
  jaccard,
  roc,
  report,
  score,
};

// Canonical command word ("union" for Op::unite).
std::string_view op_name(Op op);
// Accepts every command word including the "add" alias.
std::optional<Op> parse_op(std::string_view word);
// Command words in table order, aliases included.
const std::vector<std::string_view>& command_words();

enum class Cmp { lt, le, gt, ge, eq, ne };

struct Conjunct {
  std::string attr;  // "duration" (seconds) and "score" are built in
  Cmp cmp = Cmp::gt;
  double rhs = 0.0;

  friend bool operator==(const Conjunct&, const Conjunct&) = default;
};

struct FilterExpr {
  std::vector<Conjunct> conjuncts;

  bool matches(const Event& e) const;
  std::string str() const;

  friend bool operator==(const FilterExpr&, const FilterExpr&) = default;
};

// `offset` is added to error positions so they point into the full command.
FilterExpr parse_filter(std::string_view text, std::size_t offset = 0);

enum class Resolution { unresolved, exact_id, positional, wildcard_set, prefix_suggestion };

struct TrackRef {
  std::string raw;
  Resolution resolution = Resolution::unresolved;
  std::vector<std::string> ids;  // canonical ids once resolved

  friend bool operator==(const TrackRef&, const TrackRef&) = default;
};

using Arg = std::variant<TrackRef, double, Rgb, std::string, FilterExpr>;

struct CommandAST {
  Op op = Op::info;
  std::vector<Arg> args;
};

// Throws UnknownOperator, ArityError, FilterSyntaxError, InvalidArgument.
CommandAST parse(std::string_view text);

// What a track operand slot accepts. Preference narrows prefix matches.
enum class OperandType { any, classifier, label };

struct SlotInfo {
  OperandType type = OperandType::any;
  bool multi = false;  // wildcard sets allowed (show / hide)
};

// Slot description for the `slot`-th argument of `op`; nullopt when that
// argument is not a track reference.
std::optional<SlotInfo> track_slot(Op op, std::size_t slot);

// Resolution order: exact canonical id, 1-based position among visible
// tracks, "%" case-insensitive substring of the class label, then unique
// case-insensitive prefix narrowed to the slot's operand type. Throws NoMatch
// or AmbiguousRef.
TrackRef resolve(const Session& session, const TrackRef& ref, Op op, std::size_t slot);

// Resolves every track reference of `ast` in place.
void resolve_all(const Session& session, CommandAST& ast);

struct TrackInfo {
  TrackId id;
  TrackKind kind = TrackKind::label;
  TrackMeta meta;
  std::size_t event_count = 0;
  Duration duration = 0;
  std::optional<Interval> extent;
  std::vector<std::string> attr_keys;
  std::optional<std::string> predecessor;  // canonical id of the previous version
};

TrackInfo track_info(const Session& session, const Track& track);

struct Effect {
  enum class Kind { new_track, metric_result, visibility_change, playlist, reorder, info_payload, meta_change };

  Kind kind = Kind::meta_change;
  Op op = Op::info;
  std::optional<std::string> new_track;  // canonical id
  std::variant<std::monostate, double, Report, RocCurve, EventScore> metric;
  std::vector<std::string> shown;
  std::vector<std::string> hidden;
  std::optional<Playlist> playlist;
  std::vector<std::string> order;    // full display order after reorder
  std::vector<std::string> changed;  // ids whose metadata changed
  std::optional<TrackInfo> info;
};

std::string_view to_string(Effect::Kind kind);

struct ExecContext {
  std::string user = "user";
  Duration order_window = 2 * kTicksPerSecond;
};

// Runs one command. Existing tracks' events are never modified; generated
// tracks are appended with id "<op>(<operand ids>)" by the invoking user.
Effect execute(Session& session, CommandAST ast, const ExecContext& ctx = {});
Effect execute(Session& session, std::string_view text, const ExecContext& ctx = {});

// Completions for a partially typed command, best first. Each suggestion is
// the whole command line.
std::vector<std::string> autocomplete(const Session& session, std::string_view partial);

// Display order (canonical ids) after promoting tracks with an event
// overlapping [t - eps, t + eps) by descending overlap. Ties and all other
// tracks keep their previous relative order.
std::vector<std::string> smart_order(const Session& session, Tick t, Duration eps);
// Uses the session cursor; throws NoCursor.
std::vector<std::string> smart_order(const Session& session, Duration eps);

}  // namespace trackx
