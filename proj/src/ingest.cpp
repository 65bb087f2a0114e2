#include "trackx/ingest.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <chrono>
#include <cmath>
#include <limits>
#include <set>

#include "trackx/csv.hpp"
#include "trackx/error.hpp"

namespace trackx {

// ---------------------------------------------------------------------------
// Compression

Duration effective_gap_tolerance(std::span<const RawPrediction> stream,
                                 const CompressionConfig& cfg) {
  if (cfg.eps_t) {
    if (*cfg.eps_t < 0) throw Error(ErrorCode::InvalidArgument, "eps_t must be non-negative");
    return *cfg.eps_t;
  }
  if (stream.size() < 2) return 0;
  std::vector<Duration> spacing;
  spacing.reserve(stream.size() - 1);
  for (std::size_t i = 1; i < stream.size(); ++i) {
    spacing.push_back(stream[i].interval.start - stream[i - 1].interval.start);
  }
  auto mid = spacing.begin() + static_cast<std::ptrdiff_t>(spacing.size() / 2);
  std::nth_element(spacing.begin(), mid, spacing.end());
  return 2 * *mid;
}

namespace {

bool attrs_within(const AttrMap& first, const AttrMap& candidate,
                  const std::map<std::string, double>& eps_a) {
  if (first.size() != candidate.size()) return false;
  auto it = candidate.begin();
  for (const auto& [key, value] : first) {
    if (it->first != key || it->second.index() != value.index()) return false;
    if (const double* a = std::get_if<double>(&value)) {
      const auto tol = eps_a.find(key);
      const double eps = tol == eps_a.end() ? 0.0 : tol->second;
      if (!(std::abs(std::get<double>(it->second) - *a) <= eps)) return false;
    } else if (std::get<std::string>(value) != std::get<std::string>(it->second)) {
      return false;
    }
    ++it;
  }
  return true;
}

// Accumulates one run. Means are first value plus mean deviation, so a run of
// identical values reproduces the value bit-for-bit.
class Run {
 public:
  explicit Run(const RawPrediction& first) : first_(&first), end_(first.interval.end) {
    for (const auto& [key, value] : first.attrs) {
      if (std::holds_alternative<double>(value)) attr_deltas_[key] = 0.0;
    }
  }

  const RawPrediction& first() const { return *first_; }

  void add(const RawPrediction& p) {
    ++count_;
    end_ = p.interval.end;
    score_delta_ += p.score - first_->score;
    for (auto& [key, delta] : attr_deltas_) {
      delta += std::get<double>(p.attrs.at(key)) - std::get<double>(first_->attrs.at(key));
    }
  }

  Event finish() const {
    const double n = static_cast<double>(count_);
    Event e{{first_->interval.start, end_}, {}};
    e.payload.score = std::clamp(first_->score + score_delta_ / n, 0.0, 1.0);
    e.payload.attrs = first_->attrs;
    for (const auto& [key, delta] : attr_deltas_) {
      e.payload.attrs[key] = std::get<double>(first_->attrs.at(key)) + delta / n;
    }
    return e;
  }

 private:
  const RawPrediction* first_;
  Tick end_;
  std::size_t count_ = 1;
  double score_delta_ = 0.0;
  std::map<std::string, double> attr_deltas_;
};

}  // namespace

std::vector<Event> compress(std::span<const RawPrediction> stream, const CompressionConfig& cfg) {
  if (cfg.eps_s < 0) throw Error(ErrorCode::InvalidArgument, "eps_s must be non-negative");
  for (const auto& [key, eps] : cfg.eps_a) {
    if (eps < 0) throw Error(ErrorCode::InvalidArgument, "eps_a[" + key + "] must be non-negative");
  }
  for (std::size_t i = 0; i < stream.size(); ++i) {
    const Interval& iv = stream[i].interval;
    if (!iv.valid()) {
      throw Error(ErrorCode::InvalidInterval, "prediction " + std::to_string(i) + " has no extent");
    }
    if (i == 0) continue;
    const Interval& prev = stream[i - 1].interval;
    if (iv.start < prev.start) {
      throw Error(ErrorCode::UnsortedStream, "prediction " + std::to_string(i) + " starts before its predecessor");
    }
    if (iv.start < prev.end) {
      throw Error(ErrorCode::OverlappingPredictions,
                  "predictions " + std::to_string(i - 1) + " and " + std::to_string(i) + " overlap");
    }
  }

  const Duration max_gap = effective_gap_tolerance(stream, cfg);
  std::vector<Event> out;
  if (stream.empty()) return out;

  Run run(stream.front());
  for (std::size_t i = 1; i < stream.size(); ++i) {
    const RawPrediction& p = stream[i];
    const Duration gap = p.interval.start - stream[i - 1].interval.end;
    const bool extends = gap <= max_gap &&
                         std::abs(p.score - run.first().score) <= cfg.eps_s &&
                         attrs_within(run.first().attrs, p.attrs, cfg.eps_a);
    if (extends) {
      run.add(p);
    } else {
      out.push_back(run.finish());
      run = Run(p);
    }
  }
  out.push_back(run.finish());
  return out;
}

// ---------------------------------------------------------------------------
// Timestamps

namespace {

bool all_digits(std::string_view s) {
  return std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
}

// Rounds `micros` (already holding the first six fractional digits) using the
// remaining digits, half to even.
std::optional<std::int64_t> round_rest(std::int64_t micros, std::string_view rest) {
  if (rest.empty()) return micros;
  const char lead = rest.front();
  const bool tail_nonzero = rest.substr(1).find_first_not_of('0') != std::string_view::npos;
  const bool up = lead > '5' || (lead == '5' && (tail_nonzero || (micros % 2 != 0)));
  return up ? micros + 1 : micros;
}

std::optional<std::int64_t> parse_int(std::string_view s) {
  std::int64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

std::optional<Tick> parse_epoch(std::string_view text) {
  bool negative = false;
  if (!text.empty() && (text.front() == '-' || text.front() == '+')) {
    negative = text.front() == '-';
    text.remove_prefix(1);
  }
  const std::size_t dot = text.find('.');
  const std::string_view whole = text.substr(0, dot);
  const std::string_view frac = dot == std::string_view::npos ? std::string_view{} : text.substr(dot + 1);
  if (whole.empty() && frac.empty()) return std::nullopt;
  if (!all_digits(whole) || !all_digits(frac)) return std::nullopt;

  std::int64_t seconds = 0;
  if (!whole.empty()) {
    auto parsed = parse_int(whole);
    if (!parsed || *parsed > std::numeric_limits<std::int64_t>::max() / kTicksPerSecond - 1) {
      return std::nullopt;
    }
    seconds = *parsed;
  }
  std::string micro_digits(frac.substr(0, 6));
  micro_digits.resize(6, '0');
  const std::int64_t micros = seconds * kTicksPerSecond + *parse_int(micro_digits);
  auto rounded = round_rest(micros, frac.size() > 6 ? frac.substr(6) : std::string_view{});
  if (!rounded) return std::nullopt;
  return negative ? -*rounded : *rounded;
}

// YYYY-MM-DD[(T| )hh:mm[:ss[.f+]]][Z|(+|-)hh[:]mm]
std::optional<Tick> parse_iso8601(std::string_view text) {
  if (text.size() < 10 || text[4] != '-' || text[7] != '-') return std::nullopt;
  auto year = parse_int(text.substr(0, 4));
  auto month = parse_int(text.substr(5, 2));
  auto day = parse_int(text.substr(8, 2));
  if (!year || !month || !day || !all_digits(text.substr(0, 4))) return std::nullopt;
  const std::chrono::year_month_day ymd{std::chrono::year{static_cast<int>(*year)},
                                        std::chrono::month{static_cast<unsigned>(*month)},
                                        std::chrono::day{static_cast<unsigned>(*day)}};
  if (!ymd.ok()) return std::nullopt;
  const std::int64_t days = std::chrono::sys_days{ymd}.time_since_epoch().count();

  std::int64_t seconds = days * 86400;
  std::int64_t micros = 0;
  std::string_view rest = text.substr(10);
  std::string_view extra_digits;

  if (!rest.empty() && (rest.front() == 'T' || rest.front() == ' ')) {
    rest.remove_prefix(1);
    if (rest.size() < 5 || rest[2] != ':') return std::nullopt;
    auto hh = parse_int(rest.substr(0, 2));
    auto mm = parse_int(rest.substr(3, 2));
    if (!hh || !mm || *hh > 23 || *mm > 59 || !all_digits(rest.substr(0, 2)) ||
        !all_digits(rest.substr(3, 2))) {
      return std::nullopt;
    }
    seconds += *hh * 3600 + *mm * 60;
    rest.remove_prefix(5);
    if (!rest.empty() && rest.front() == ':') {
      if (rest.size() < 3 || !all_digits(rest.substr(1, 2))) return std::nullopt;
      auto ss = parse_int(rest.substr(1, 2));
      if (*ss > 60) return std::nullopt;
      seconds += *ss;
      rest.remove_prefix(3);
      if (!rest.empty() && (rest.front() == '.' || rest.front() == ',')) {
        rest.remove_prefix(1);
        std::size_t n = 0;
        while (n < rest.size() && rest[n] >= '0' && rest[n] <= '9') ++n;
        if (n == 0) return std::nullopt;
        std::string digits(rest.substr(0, std::min<std::size_t>(n, 6)));
        digits.resize(6, '0');
        micros = *parse_int(digits);
        if (n > 6) extra_digits = rest.substr(6, n - 6);
        rest.remove_prefix(n);
      }
    }
    if (!rest.empty()) {
      if (rest == "Z" || rest == "z") {
        rest = {};
      } else if (rest.front() == '+' || rest.front() == '-') {
        const int sign = rest.front() == '-' ? -1 : 1;
        std::string digits;
        for (char c : rest.substr(1)) {
          if (c != ':') digits += c;
        }
        if (digits.size() != 4 || !all_digits(digits)) return std::nullopt;
        const std::int64_t offset = *parse_int(digits.substr(0, 2)) * 3600 + *parse_int(digits.substr(2)) * 60;
        seconds -= sign * offset;
        rest = {};
      } else {
        return std::nullopt;
      }
    }
  }
  if (!rest.empty()) return std::nullopt;
  return round_rest(seconds * kTicksPerSecond + micros, extra_digits);
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

}  // namespace

std::optional<Tick> parse_timestamp(std::string_view text) {
  text = trim(text);
  if (text.empty()) return std::nullopt;
  if (auto t = parse_epoch(text)) return t;
  return parse_iso8601(text);
}

std::string format_seconds(Tick ticks) {
  const bool negative = ticks < 0;
  // Magnitude via unsigned arithmetic so INT64_MIN stays defined.
  const std::uint64_t mag = negative ? 0 - static_cast<std::uint64_t>(ticks) : static_cast<std::uint64_t>(ticks);
  std::string frac = std::to_string(mag % kTicksPerSecond);
  frac.insert(0, 6 - frac.size(), '0');
  return (negative ? "-" : "") + std::to_string(mag / kTicksPerSecond) + "." + frac;
}

// ---------------------------------------------------------------------------
// CSV

namespace {

std::optional<double> parse_double(std::string_view s) {
  s = trim(s);
  double v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) {
    return std::nullopt;
  }
  return v;
}

std::string shortest(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

struct Columns {
  std::size_t count = 0;
  std::optional<std::size_t> start, end, score, label;
  std::vector<std::pair<std::string, std::size_t>> attrs;
};

Columns read_header(const csv::Row& header, TrackKind kind) {
  Columns cols;
  cols.count = header.size();
  std::set<std::string> seen;
  for (std::size_t i = 0; i < header.size(); ++i) {
    const std::string name(trim(header[i]));
    if (!seen.insert(name).second) {
      throw Error(ErrorCode::SchemaError, "duplicate CSV column '" + name + "'");
    }
    if (name == "start") {
      cols.start = i;
    } else if (name == "end") {
      cols.end = i;
    } else if (name == "score") {
      cols.score = i;
    } else if (name == "label" && kind != TrackKind::classifier) {
      cols.label = i;
    } else if (name.rfind("attr:", 0) == 0 && is_attr_key(name.substr(5))) {
      cols.attrs.emplace_back(name.substr(5), i);
    } else {
      throw Error(ErrorCode::UnexpectedColumn, "unexpected CSV column '" + name + "'");
    }
  }
  auto require = [](const std::optional<std::size_t>& col, const char* name) {
    if (!col) throw Error(ErrorCode::MissingColumn, std::string("missing CSV column '") + name + "'");
  };
  require(cols.start, "start");
  require(cols.end, "end");
  if (kind == TrackKind::classifier) require(cols.score, "score");
  if (is_label_like(kind)) require(cols.label, "label");
  return cols;
}

}  // namespace

Track import_csv(std::string_view bytes, TrackKind kind, TrackId id, const CompressionConfig& cfg) {
  if (kind != TrackKind::classifier && !is_label_like(kind)) {
    throw Error(ErrorCode::InvalidArgument,
                "CSV import supports classifier, label and protocol tracks only");
  }
  const auto rows = csv::parse(bytes);
  if (rows.empty()) throw Error(ErrorCode::MissingColumn, "CSV header row is missing");
  const Columns cols = read_header(rows.front(), kind);

  std::vector<RawPrediction> predictions;
  std::vector<Event> events;
  // Rows are numbered from 1 with the header as row 1.
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const csv::Row& row = rows[r];
    const std::size_t row_no = r + 1;
    if (row.size() != cols.count) {
      throw Error(ErrorCode::SchemaError, "row " + std::to_string(row_no) + " has " +
                                              std::to_string(row.size()) + " fields, expected " +
                                              std::to_string(cols.count));
    }
    auto start = parse_timestamp(row[*cols.start]);
    if (!start) throw BadTimestampError(row_no, row[*cols.start]);
    auto end = parse_timestamp(row[*cols.end]);
    if (!end) throw BadTimestampError(row_no, row[*cols.end]);
    const Interval iv{*start, *end};
    if (!iv.valid()) {
      throw Error(ErrorCode::InvalidInterval, "row " + std::to_string(row_no) + " ends before it starts");
    }

    std::optional<double> score;
    if (cols.score && !trim(row[*cols.score]).empty()) {
      score = parse_double(row[*cols.score]);
      if (!score || *score < 0.0 || *score > 1.0) {
        throw Error(ErrorCode::BadValue,
                    "row " + std::to_string(row_no) + ": score '" + row[*cols.score] + "' not in [0,1]");
      }
    }
    AttrMap attrs;
    for (const auto& [name, col] : cols.attrs) {
      const std::string_view cell = trim(row[col]);
      if (cell.empty()) continue;
      if (auto number = parse_double(cell)) {
        attrs[name] = *number;
      } else {
        attrs[name] = std::string(cell);
      }
    }

    if (kind == TrackKind::classifier) {
      if (!score) {
        throw Error(ErrorCode::BadValue, "row " + std::to_string(row_no) + ": missing score");
      }
      predictions.push_back({iv, *score, std::move(attrs)});
    } else {
      std::string label(trim(row[*cols.label]));
      if (label.empty()) {
        throw Error(ErrorCode::BadValue, "row " + std::to_string(row_no) + ": missing label");
      }
      events.push_back({iv, {score, std::move(label), std::move(attrs)}});
    }
  }

  if (kind == TrackKind::classifier) {
    events = compress(predictions, cfg);
  } else {
    events = normalize(std::move(events), OverlapPolicy::reject);
    if (kind == TrackKind::protocol) {
      std::set<std::string> labels;
      for (const auto& e : events) {
        if (!labels.insert(*e.payload.label).second) {
          throw Error(ErrorCode::ProtocolDuplicateLabel,
                      "protocol label '" + *e.payload.label + "' appears more than once");
        }
      }
    }
  }
  Track track = make_track(std::move(id), kind, std::move(events));
  track.validate();
  return track;
}

std::string export_csv(const Track& track) {
  bool any_score = false, any_label = false;
  std::set<std::string> attr_keys;
  for (const auto& e : track.events) {
    any_score = any_score || e.payload.score.has_value();
    any_label = any_label || e.payload.label.has_value();
    for (const auto& [key, value] : e.payload.attrs) attr_keys.insert(key);
  }
  // Keep the columns import requires for this kind even when no event has them.
  if (track.kind == TrackKind::classifier) {
    any_score = true;
    any_label = false;
  }
  if (is_label_like(track.kind)) any_label = true;

  std::string out = "start,end";
  if (any_score) out += ",score";
  if (any_label) out += ",label";
  for (const auto& key : attr_keys) out += ",attr:" + key;
  out += '\n';

  for (const auto& e : track.events) {
    out += format_seconds(e.interval.start) + ',' + format_seconds(e.interval.end);
    if (any_score) out += ',' + (e.payload.score ? shortest(*e.payload.score) : std::string());
    if (any_label) out += ',' + csv::quote(e.payload.label.value_or(""));
    for (const auto& key : attr_keys) {
      out += ',';
      auto it = e.payload.attrs.find(key);
      if (it == e.payload.attrs.end()) continue;
      if (const double* d = std::get_if<double>(&it->second)) {
        out += shortest(*d);
      } else {
        out += csv::quote(std::get<std::string>(it->second));
      }
    }
    out += '\n';
  }
  return out;
}

}  // namespace trackx
