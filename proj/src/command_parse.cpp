#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cmath>

#include "trackx/command.hpp"
#include "trackx/error.hpp"

namespace trackx {

namespace {

struct OpWord {
  std::string_view word;
  Op op;
};

// Command table order; "add" aliases "union".
constexpr std::array<OpWord, 23> kOpWords{{
    {"negate", Op::negate},       {"add", Op::unite},
    {"union", Op::unite},         {"intersection", Op::intersection},
    {"errors", Op::errors},       {"subtract", Op::subtract},
    {"match", Op::match},         {"variation", Op::variation},
    {"play", Op::play},           {"threshold", Op::threshold},
    {"show", Op::show},           {"hide", Op::hide},
    {"transform", Op::transform}, {"rename", Op::rename},
    {"color", Op::color},         {"author", Op::author},
    {"filter", Op::filter},       {"order", Op::order},
    {"info", Op::info},           {"jaccard", Op::jaccard},
    {"roc", Op::roc},             {"report", Op::report},
    {"score", Op::score},
}};

enum class ArgKind { track, number, color, word, text_rest, filter_rest };

struct Signature {
  std::vector<ArgKind> required;
  std::vector<ArgKind> optional;
};

const Signature& signature(Op op) {
  using K = ArgKind;
  static const Signature one_track{{K::track}, {}};
  static const Signature two_tracks{{K::track, K::track}, {}};
  static const Signature track_opt_track{{K::track}, {K::track}};
  static const Signature threshold{{K::track, K::number}, {}};
  static const Signature rename{{K::track, K::text_rest}, {}};
  static const Signature color{{K::track, K::color}, {}};
  static const Signature author{{K::word}, {}};
  static const Signature filter{{K::track, K::filter_rest}, {}};
  static const Signature order{{}, {K::number}};
  switch (op) {
    case Op::negate:
    case Op::play:
    case Op::show:
    case Op::hide:
    case Op::transform:
    case Op::info:
      return one_track;
    case Op::unite:
    case Op::intersection:
    case Op::errors:
    case Op::subtract:
    case Op::match:
    case Op::jaccard:
    case Op::roc:
    case Op::report:
      return two_tracks;
    case Op::variation:
    case Op::score:
      return track_opt_track;
    case Op::threshold: return threshold;
    case Op::rename: return rename;
    case Op::color: return color;
    case Op::author: return author;
    case Op::filter: return filter;
    case Op::order: return order;
  }
  return one_track;
}

struct Token {
  std::string_view text;
  std::size_t pos;
};

std::vector<Token> tokenize(std::string_view text) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    const std::size_t start = i;
    while (i < text.size() && !std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    if (i > start) out.push_back({text.substr(start, i - start), start});
  }
  return out;
}

std::string lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::string_view rtrim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::optional<double> to_number(std::string_view s) {
  double v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) {
    return std::nullopt;
  }
  return v;
}

bool is_ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}

}  // namespace

std::string_view op_name(Op op) {
  if (op == Op::unite) return "union";
  for (const auto& w : kOpWords) {
    if (w.op == op) return w.word;
  }
  return "info";
}

std::optional<Op> parse_op(std::string_view word) {
  const std::string w = lower(word);
  for (const auto& entry : kOpWords) {
    if (entry.word == w) return entry.op;
  }
  if (w == "intersect") return Op::intersection;
  return std::nullopt;
}

const std::vector<std::string_view>& command_words() {
  static const std::vector<std::string_view> words = [] {
    std::vector<std::string_view> v;
    for (const auto& w : kOpWords) v.push_back(w.word);
    return v;
  }();
  return words;
}

// ---------------------------------------------------------------------------
// Filters

bool FilterExpr::matches(const Event& e) const {
  for (const auto& c : conjuncts) {
    double lhs = 0.0;
    if (c.attr == "duration") {
      lhs = static_cast<double>(e.interval.length()) / kTicksPerSecond;
    } else if (c.attr == "score") {
      if (!e.payload.score) return false;
      lhs = *e.payload.score;
    } else {
      auto it = e.payload.attrs.find(c.attr);
      if (it == e.payload.attrs.end()) return false;
      const double* v = std::get_if<double>(&it->second);
      if (!v) return false;
      lhs = *v;
    }
    bool ok = false;
    switch (c.cmp) {
      case Cmp::lt: ok = lhs < c.rhs; break;
      case Cmp::le: ok = lhs <= c.rhs; break;
      case Cmp::gt: ok = lhs > c.rhs; break;
      case Cmp::ge: ok = lhs >= c.rhs; break;
      case Cmp::eq: ok = lhs == c.rhs; break;
      case Cmp::ne: ok = lhs != c.rhs; break;
    }
    if (!ok) return false;
  }
  return true;
}

std::string FilterExpr::str() const {
  static constexpr std::array<std::string_view, 6> kSymbols{"<", "<=", ">", ">=", "==", "!="};
  std::string out;
  for (const auto& c : conjuncts) {
    if (!out.empty()) out += '&';
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, c.rhs);
    out += c.attr;
    out += kSymbols[static_cast<std::size_t>(c.cmp)];
    out.append(buf, ptr);
  }
  return out;
}

FilterExpr parse_filter(std::string_view text, std::size_t offset) {
  FilterExpr expr;
  std::size_t i = 0;
  auto skip_ws = [&] {
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
  };
  auto fail = [&](const std::string& what) -> FilterSyntaxError {
    return FilterSyntaxError(offset + i, what);
  };

  while (true) {
    skip_ws();
    const std::size_t attr_start = i;
    while (i < text.size() && is_ident_char(text[i])) ++i;
    if (i == attr_start) throw fail("expected attribute name");
    const std::string attr(text.substr(attr_start, i - attr_start));
    if (!is_attr_key(attr)) {
      i = attr_start;
      throw fail("bad attribute name '" + attr + "'");
    }
    skip_ws();

    Cmp cmp{};
    auto two = text.substr(i, 2);
    if (two == "<=") {
      cmp = Cmp::le;
      i += 2;
    } else if (two == ">=") {
      cmp = Cmp::ge;
      i += 2;
    } else if (two == "==") {
      cmp = Cmp::eq;
      i += 2;
    } else if (two == "!=") {
      cmp = Cmp::ne;
      i += 2;
    } else if (i < text.size() && text[i] == '<') {
      cmp = Cmp::lt;
      ++i;
    } else if (i < text.size() && text[i] == '>') {
      cmp = Cmp::gt;
      ++i;
    } else if (i < text.size() && text[i] == '=') {
      cmp = Cmp::eq;
      ++i;
    } else {
      throw fail("expected comparison operator");
    }
    skip_ws();

    const std::size_t num_start = i;
    while (i < text.size() && text[i] != '&' && !std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    auto rhs = to_number(text.substr(num_start, i - num_start));
    if (!rhs) {
      i = num_start;
      throw fail("expected number");
    }
    expr.conjuncts.push_back({attr, cmp, *rhs});
    skip_ws();
    if (i == text.size()) break;
    if (text[i] != '&') throw fail("expected '&'");
    ++i;
  }
  return expr;
}

// ---------------------------------------------------------------------------
// Parsing

CommandAST parse(std::string_view text) {
  const auto tokens = tokenize(text);
  if (tokens.empty()) throw Error(ErrorCode::ArityError, "empty command");
  auto op = parse_op(tokens.front().text);
  if (!op) {
    throw Error(ErrorCode::UnknownOperator, "unknown command '" + std::string(tokens.front().text) + "'");
  }
  CommandAST ast;
  ast.op = *op;
  const Signature& sig = signature(*op);
  const std::string name(op_name(*op));

  std::size_t next = 1;
  auto take = [&](ArgKind kind) {
    const Token& tok = tokens[next];
    switch (kind) {
      case ArgKind::track:
        ast.args.emplace_back(TrackRef{std::string(tok.text)});
        ++next;
        break;
      case ArgKind::number: {
        auto v = to_number(tok.text);
        if (!v) throw Error(ErrorCode::InvalidArgument, name + ": expected a number, got '" + std::string(tok.text) + "'");
        ast.args.emplace_back(*v);
        ++next;
        break;
      }
      case ArgKind::color: {
        auto c = Rgb::parse(tok.text);
        if (!c) throw Error(ErrorCode::InvalidArgument, name + ": unknown color '" + std::string(tok.text) + "'");
        ast.args.emplace_back(*c);
        ++next;
        break;
      }
      case ArgKind::word:
        ast.args.emplace_back(std::string(tok.text));
        ++next;
        break;
      case ArgKind::text_rest:
        ast.args.emplace_back(std::string(rtrim(text.substr(tok.pos))));
        next = tokens.size();
        break;
      case ArgKind::filter_rest:
        ast.args.emplace_back(parse_filter(rtrim(text.substr(tok.pos)), tok.pos));
        next = tokens.size();
        break;
    }
  };

  for (ArgKind kind : sig.required) {
    if (next >= tokens.size()) {
      throw Error(ErrorCode::ArityError,
                  name + " expects " + std::to_string(sig.required.size()) +
                      (sig.optional.empty() ? "" : "-" + std::to_string(sig.required.size() + sig.optional.size())) +
                      " operands");
    }
    take(kind);
  }
  for (ArgKind kind : sig.optional) {
    if (next >= tokens.size()) break;
    take(kind);
  }
  if (next < tokens.size()) {
    throw Error(ErrorCode::ArityError, name + ": unexpected operand '" + std::string(tokens[next].text) + "'");
  }
  return ast;
}

// ---------------------------------------------------------------------------
// Resolution

std::optional<SlotInfo> track_slot(Op op, std::size_t slot) {
  const Signature& sig = signature(op);
  const std::size_t total = sig.required.size() + sig.optional.size();
  if (slot >= total) return std::nullopt;
  const ArgKind kind = slot < sig.required.size() ? sig.required[slot]
                                                  : sig.optional[slot - sig.required.size()];
  if (kind != ArgKind::track) return std::nullopt;

  SlotInfo info;
  switch (op) {
    case Op::threshold:
    case Op::transform:
      info.type = OperandType::classifier;
      break;
    case Op::roc:
      info.type = slot == 0 ? OperandType::classifier : OperandType::label;
      break;
    case Op::report:
    case Op::score:
      if (slot == 1) info.type = OperandType::label;
      break;
    case Op::show:
    case Op::hide:
      info.multi = true;
      break;
    default:
      break;
  }
  return info;
}

namespace {

bool fits(const Track& t, OperandType type) {
  switch (type) {
    case OperandType::any: return true;
    case OperandType::classifier: return t.kind == TrackKind::classifier;
    case OperandType::label: return is_label_like(t.kind);
  }
  return true;
}

std::vector<const Track*> narrow(std::vector<const Track*> found, OperandType type) {
  std::vector<const Track*> typed;
  for (const Track* t : found) {
    if (fits(*t, type)) typed.push_back(t);
  }
  return typed.empty() ? found : typed;
}

std::vector<std::string> ids_of(const std::vector<const Track*>& tracks) {
  std::vector<std::string> out;
  out.reserve(tracks.size());
  for (const Track* t : tracks) out.push_back(t->id.canonical());
  return out;
}

bool all_digits(std::string_view s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
}

std::vector<const Track*> wildcard_matches(const Session& session, std::string_view needle) {
  const std::string n = lower(needle);
  std::vector<const Track*> out;
  for (const auto& t : session.tracks) {
    if (lower(t->id.class_label).find(n) != std::string::npos) out.push_back(t.get());
  }
  return out;
}

std::vector<const Track*> prefix_matches(const Session& session, std::string_view prefix) {
  const std::string p = lower(prefix);
  std::vector<const Track*> out;
  for (const auto& t : session.tracks) {
    if (lower(t->id.class_label).rfind(p, 0) == 0 || lower(t->id.canonical()).rfind(p, 0) == 0) {
      out.push_back(t.get());
    }
  }
  return out;
}

}  // namespace

TrackRef resolve(const Session& session, const TrackRef& ref, Op op, std::size_t slot) {
  const SlotInfo info = track_slot(op, slot).value_or(SlotInfo{});
  TrackRef out{ref.raw};

  if (const Track* t = session.find(ref.raw)) {
    out.resolution = Resolution::exact_id;
    out.ids = {t->id.canonical()};
    return out;
  }

  if (all_digits(ref.raw)) {
    std::vector<const Track*> visible;
    for (const auto& t : session.tracks) {
      if (t->meta.visible) visible.push_back(t.get());
    }
    std::size_t pos = 0;
    std::from_chars(ref.raw.data(), ref.raw.data() + ref.raw.size(), pos);
    if (pos < 1 || pos > visible.size()) {
      throw Error(ErrorCode::NoMatch, "no displayed track at position " + ref.raw);
    }
    out.resolution = Resolution::positional;
    out.ids = {visible[pos - 1]->id.canonical()};
    return out;
  }

  std::vector<const Track*> found;
  if (!ref.raw.empty() && ref.raw.front() == '%') {
    found = wildcard_matches(session, std::string_view(ref.raw).substr(1));
    out.resolution = Resolution::wildcard_set;
  } else {
    found = prefix_matches(session, ref.raw);
    out.resolution = Resolution::prefix_suggestion;
  }
  if (found.empty()) throw Error(ErrorCode::NoMatch, "no track matches '" + ref.raw + "'");
  if (!info.multi) {
    found = narrow(std::move(found), info.type);
    if (found.size() > 1) throw AmbiguousRefError(ref.raw, ids_of(found));
  }
  out.ids = ids_of(found);
  return out;
}

void resolve_all(const Session& session, CommandAST& ast) {
  for (std::size_t i = 0; i < ast.args.size(); ++i) {
    if (auto* ref = std::get_if<TrackRef>(&ast.args[i])) {
      if (ref->resolution == Resolution::unresolved) *ref = resolve(session, *ref, ast.op, i);
    }
  }
}

// ---------------------------------------------------------------------------
// Autocomplete

std::vector<std::string> autocomplete(const Session& session, std::string_view partial) {
  const auto tokens = tokenize(partial);
  const bool trailing_space =
      !partial.empty() && std::isspace(static_cast<unsigned char>(partial.back()));

  std::vector<std::string> out;
  if (tokens.empty() || (tokens.size() == 1 && !trailing_space)) {
    const std::string p = tokens.empty() ? std::string() : lower(tokens.front().text);
    for (auto word : command_words()) {
      if (word.rfind(p, 0) == 0) out.emplace_back(word);
    }
    return out;
  }

  auto op = parse_op(tokens.front().text);
  if (!op) return out;

  const std::size_t completed = tokens.size() - 1 - (trailing_space ? 0 : 1);
  std::string head(op_name(*op));
  // Rebuild the line so suggestions use the canonical command word.
  if (lower(tokens.front().text) == "add") head = "add";
  auto line_with = [&](std::size_t upto) {
    std::string line = head;
    for (std::size_t i = 1; i <= upto; ++i) {
      line += ' ';
      line += tokens[i].text;
    }
    return line;
  };

  // A finished single-track operand that is still ambiguous expands into its
  // concrete candidates.
  if (trailing_space && completed > 0) {
    const std::size_t slot = completed - 1;
    auto info = track_slot(*op, slot);
    if (info && !info->multi) {
      const std::string_view raw = tokens[completed].text;
      std::vector<const Track*> found;
      if (!session.find(raw) && !all_digits(raw)) {
        found = raw.front() == '%' ? wildcard_matches(session, raw.substr(1))
                                   : prefix_matches(session, raw);
        found = narrow(std::move(found), info->type);
      }
      if (found.size() > 1) {
        const std::string base = line_with(completed - 1);
        for (const Track* t : found) out.push_back(base + ' ' + t->id.canonical());
        return out;
      }
    }
  }

  auto info = track_slot(*op, completed);
  if (!info) return out;
  const std::string stem = trailing_space ? std::string() : std::string(tokens.back().text);

  // Rank: canonical-id prefix, then class-label prefix, then substring.
  std::vector<std::pair<int, const Track*>> ranked;
  const std::string needle = lower(!stem.empty() && stem.front() == '%' ? stem.substr(1) : stem);
  const bool wildcard = !stem.empty() && stem.front() == '%';
  for (const auto& t : session.tracks) {
    const std::string id = lower(t->id.canonical());
    const std::string label = lower(t->id.class_label);
    int rank = -1;
    if (wildcard) {
      if (label.find(needle) != std::string::npos) rank = 2;
    } else if (id.rfind(needle, 0) == 0) {
      rank = 0;
    } else if (label.rfind(needle, 0) == 0) {
      rank = 1;
    } else if (!needle.empty() && id.find(needle) != std::string::npos) {
      rank = 2;
    }
    if (rank >= 0) ranked.emplace_back(rank, t.get());
  }
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });
  std::vector<const Track*> found;
  for (const auto& [rank, t] : ranked) found.push_back(t);
  found = narrow(std::move(found), info->type);

  const std::string base = line_with(completed);
  for (const Track* t : found) out.push_back(base + ' ' + t->id.canonical());
  return out;
}

}  // namespace trackx
