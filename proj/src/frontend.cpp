#include "isl/frontend.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <set>

#include <json.hpp>

namespace isl {

namespace {

using ordered_json = nlohmann::ordered_json;

bool printable_ascii(const std::string& s) {
  return std::all_of(s.begin(), s.end(), [](unsigned char c) { return c >= 0x20 && c <= 0x7e; });
}

// ---------------------------------------------------------------------------
// Tag-format lexer

struct Tag {
  std::string name;
  bool closing = false;
  int line = 0;
  int col = 0;
};

class Lexer {
 public:
  explicit Lexer(std::string_view text) : text_(text) {}

  bool at_end() const { return pos_ >= text_.size(); }
  int line() const { return line_; }
  int col() const { return col_; }

  void skip_ws() {
    while (!at_end() && std::isspace(static_cast<unsigned char>(text_[pos_]))) bump();
  }

  char peek() const { return at_end() ? '\0' : text_[pos_]; }

  // Reads "<name>" or "</name>". Returns nullopt on malformed syntax without
  // consuming past the offending character.
  std::optional<Tag> read_tag() {
    skip_ws();
    if (at_end() || peek() != '<') return std::nullopt;
    Tag tag;
    tag.line = line_;
    tag.col = col_;
    bump();  // '<'
    if (peek() == '/') {
      tag.closing = true;
      bump();
    }
    while (!at_end() && (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_')) {
      tag.name.push_back(peek());
      bump();
    }
    if (tag.name.empty() || peek() != '>') return std::nullopt;
    bump();  // '>'
    return tag;
  }

  // Raw text up to the next '<' (verbatim, no trimming).
  std::string read_text() {
    std::string out;
    while (!at_end() && peek() != '<') {
      out.push_back(peek());
      bump();
    }
    return out;
  }

 private:
  void bump() {
    if (text_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
};

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

// ---------------------------------------------------------------------------
// Literal sub-parsers for charCheck / regCheck / move bodies

struct LitCursor {
  const std::string& s;
  std::size_t i = 0;

  void skip_ws() {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
  }
  bool eat(char c) {
    skip_ws();
    if (i < s.size() && s[i] == c) {
      ++i;
      return true;
    }
    return false;
  }
  bool done() {
    skip_ws();
    return i >= s.size();
  }
};

std::optional<std::int64_t> parse_int(LitCursor& c) {
  c.skip_ws();
  std::size_t start = c.i;
  if (c.i < c.s.size() && (c.s[c.i] == '-' || c.s[c.i] == '+')) ++c.i;
  while (c.i < c.s.size() && std::isdigit(static_cast<unsigned char>(c.s[c.i]))) ++c.i;
  if (c.i == start) return std::nullopt;
  std::int64_t value = 0;
  auto [p, ec] = std::from_chars(c.s.data() + start, c.s.data() + c.i, value);
  if (ec != std::errc() || p != c.s.data() + c.i) return std::nullopt;
  return value;
}

std::optional<std::uint8_t> parse_escape(char e) {
  switch (e) {
    case 'n': return std::uint8_t{'\n'};
    case 't': return std::uint8_t{'\t'};
    case 'r': return std::uint8_t{'\r'};
    case '0': return std::uint8_t{'\0'};
    case '\\': return std::uint8_t{'\\'};
    case '\'': return std::uint8_t{'\''};
    case '"': return std::uint8_t{'"'};
    default: return std::nullopt;
  }
}

// One character-check bound: 'c', "c", or a decimal code in 0..255.
std::optional<std::uint8_t> parse_char_bound(LitCursor& c) {
  c.skip_ws();
  if (c.i >= c.s.size()) return std::nullopt;
  char q = c.s[c.i];
  if (q == '\'' || q == '"') {
    ++c.i;
    if (c.i >= c.s.size()) return std::nullopt;
    std::uint8_t value;
    if (c.s[c.i] == '\\') {
      ++c.i;
      if (c.i >= c.s.size()) return std::nullopt;
      auto esc = parse_escape(c.s[c.i]);
      if (!esc) return std::nullopt;
      value = *esc;
      ++c.i;
    } else {
      value = static_cast<std::uint8_t>(c.s[c.i]);
      ++c.i;
    }
    if (c.i >= c.s.size() || c.s[c.i] != q) return std::nullopt;
    ++c.i;
    return value;
  }
  auto num = parse_int(c);
  if (!num || *num < 0 || *num > 255) return std::nullopt;
  return static_cast<std::uint8_t>(*num);
}

struct CharCheckEntry {
  Polarity polarity;
  CharRange range;
};

std::optional<CharCheckEntry> parse_char_check(const std::string& body) {
  LitCursor c{body};
  CharCheckEntry entry;
  entry.polarity = c.eat('^') ? Polarity::Exclusive : Polarity::Inclusive;
  if (!c.eat('[')) return std::nullopt;
  auto lo = parse_char_bound(c);
  if (!lo || !c.eat(',')) return std::nullopt;
  auto hi = parse_char_bound(c);
  if (!hi || !c.eat(']') || !c.done()) return std::nullopt;
  entry.range = CharRange{*lo, *hi};
  return entry;
}

// regCheck bodies: [r1,r2], [r1,@k], and ^-prefixed negations.
std::optional<RegComparison> parse_reg_check(const std::string& body) {
  LitCursor c{body};
  CmpOp op = c.eat('^') ? CmpOp::Ne : CmpOp::Eq;
  if (!c.eat('[')) return std::nullopt;
  auto lhs = parse_int(c);
  if (!lhs || *lhs < 0 || !c.eat(',')) return std::nullopt;
  bool is_const = c.eat('@');
  auto rhs = parse_int(c);
  if (!rhs || !c.eat(']') || !c.done()) return std::nullopt;
  if (is_const) return RegComparison::with_const(static_cast<int>(*lhs), op, *rhs);
  if (*rhs < 0) return std::nullopt;
  return RegComparison::with_reg(static_cast<int>(*lhs), op, static_cast<int>(*rhs));
}

// ---------------------------------------------------------------------------
// Tag-format parser

class HlParser {
 public:
  HlParser(std::string_view text, const MachineConfig& config) : lex_(text), config_(config) {}

  HlParseResult run() {
    automaton_.config = config_;
    automaton_.accept = "ACCEPT";

    auto root = lex_.read_tag();
    if (!root || root->closing || root->name != "FSA") {
      error(root ? root->line : lex_.line(), root ? root->col : lex_.col(), "missing-fsa",
            "document must start with <FSA>");
      return finish();
    }
    bool closed = false;
    while (!closed) {
      lex_.skip_ws();
      if (lex_.at_end()) {
        error(lex_.line(), lex_.col(), "unclosed-tag", "missing </FSA>");
        return finish();
      }
      auto tag = lex_.read_tag();
      if (!tag) {
        error(lex_.line(), lex_.col(), "bad-syntax", "expected a tag");
        return finish();
      }
      if (tag->closing && tag->name == "FSA") {
        closed = true;
      } else if (!tag->closing && tag->name == "node") {
        if (!parse_node(*tag)) return finish();
      } else if (!tag->closing && tag->name == "edge") {
        if (!parse_edge(*tag)) return finish();
      } else {
        error(tag->line, tag->col, "unexpected-tag",
              "expected <node>, <edge> or </FSA>, got <" + std::string(tag->closing ? "/" : "") +
                  tag->name + ">");
        return finish();
      }
    }
    lex_.skip_ws();
    if (!lex_.at_end()) {
      error(lex_.line(), lex_.col(), "trailing-content", "content after </FSA>");
    }
    return finish();
  }

 private:
  HlParseResult finish() {
    HlParseResult result;
    result.errors = std::move(errors_);
    if (!result.errors.empty()) return result;
    if (automaton_.start.empty()) {
      result.errors.push_back({"no-nodes", "document declares no nodes", 1, 1});
      return result;
    }
    if (referenced_accept_) {
      automaton_.states.push_back(automaton_.accept);
    }
    result.automaton = std::move(automaton_);
    return result;
  }

  void error(int line, int col, std::string code, std::string msg) {
    if (errors_.size() < 64) {
      errors_.push_back({std::move(code), std::move(msg), line, col});
    }
  }

  // Expects the body of one simple element: text plus the matching close tag.
  std::optional<std::string> read_element_body(const Tag& open) {
    std::string text = lex_.read_text();
    auto close = lex_.read_tag();
    if (!close || !close->closing || close->name != open.name) {
      error(open.line, open.col, "unclosed-tag", "<" + open.name + "> is not closed");
      return std::nullopt;
    }
    return text;
  }

  bool parse_node(const Tag& open) {
    std::optional<std::string> name;
    while (true) {
      auto tag = lex_.read_tag();
      if (!tag) {
        error(lex_.line(), lex_.col(), "bad-syntax", "expected a tag inside <node>");
        return false;
      }
      if (tag->closing && tag->name == "node") break;
      if (!tag->closing && tag->name == "name") {
        auto body = read_element_body(*tag);
        if (!body) return false;
        name = trim(*body);
      } else {
        error(tag->line, tag->col, "unexpected-tag", "unexpected tag inside <node>");
        return false;
      }
    }
    if (!name || name->empty()) {
      error(open.line, open.col, "missing-name", "<node> lacks a <name>");
      return true;
    }
    if (is_reserved_state_name(*name)) {
      error(open.line, open.col, "reserved-name", "node name '" + *name + "' is reserved");
      return true;
    }
    if (declared_.count(*name)) {
      error(open.line, open.col, "duplicate-node", "node '" + *name + "' declared twice");
      return true;
    }
    declared_.insert(*name);
    automaton_.states.push_back(*name);
    if (automaton_.start.empty()) automaton_.start = *name;  // first node starts the machine
    return true;
  }

  bool parse_edge(const Tag& open) {
    std::vector<std::string> starts, ends;
    std::vector<CharCheckEntry> char_checks;
    std::vector<RegComparison> reg_checks;
    std::vector<std::string> string_checks;
    std::vector<Command> functions;
    std::vector<std::int64_t> moves;

    while (true) {
      auto tag = lex_.read_tag();
      if (!tag) {
        error(lex_.line(), lex_.col(), "bad-syntax", "expected a tag inside <edge>");
        return false;
      }
      if (tag->closing && tag->name == "edge") break;
      if (tag->closing) {
        error(tag->line, tag->col, "unexpected-tag", "unexpected closing tag inside <edge>");
        return false;
      }
      if (tag->name == "start" || tag->name == "end") {
        auto body = read_element_body(*tag);
        if (!body) return false;
        (tag->name == "start" ? starts : ends).push_back(trim(*body));
      } else if (tag->name == "charCheck") {
        auto body = read_element_body(*tag);
        if (!body) return false;
        auto entry = parse_char_check(trim(*body));
        if (!entry) {
          error(tag->line, tag->col, "malformed-range", "cannot parse charCheck '" + trim(*body) + "'");
        } else if (entry->range.lo > entry->range.hi) {
          error(tag->line, tag->col, "malformed-range", "charCheck bounds are out of order");
        } else {
          char_checks.push_back(*entry);
        }
      } else if (tag->name == "regCheck") {
        auto body = read_element_body(*tag);
        if (!body) return false;
        auto rc = parse_reg_check(trim(*body));
        if (!rc) {
          error(tag->line, tag->col, "malformed-reg-check",
                "cannot parse regCheck '" + trim(*body) + "'");
        } else {
          reg_checks.push_back(*rc);
        }
      } else if (tag->name == "stringCheck") {
        auto body = read_element_body(*tag);
        if (!body) return false;
        if (body->empty()) {
          error(tag->line, tag->col, "empty-string", "stringCheck is empty");
        } else {
          string_checks.push_back(*body);  // verbatim, spaces kept
        }
      } else if (tag->name == "move") {
        auto body = read_element_body(*tag);
        if (!body) return false;
        LitCursor c{*body};
        auto n = parse_int(c);
        if (!n || *n < 0 || !c.done()) {
          error(tag->line, tag->col, "malformed-move", "move must be a non-negative integer");
        } else {
          moves.push_back(*n);
        }
      } else if (tag->name == "function") {
        auto cmd = parse_function(*tag);
        if (!cmd.has_value()) return false;
        if (cmd->first) functions.push_back(*cmd->first);
      } else {
        error(tag->line, tag->col, "unexpected-tag", "unexpected <" + tag->name + "> inside <edge>");
        return false;
      }
    }

    if (starts.empty()) error(open.line, open.col, "missing-start", "<edge> lacks <start>");
    if (starts.size() > 1) error(open.line, open.col, "multiple-start", "<edge> has several <start> tags");
    if (ends.empty()) error(open.line, open.col, "missing-end", "<edge> lacks <end>");
    if (ends.size() > 1) error(open.line, open.col, "multiple-end", "<edge> has several <end> tags");
    if (moves.size() > 1) error(open.line, open.col, "multiple-move", "<edge> has several <move> tags");
    if (!char_checks.empty() && !string_checks.empty()) {
      error(open.line, open.col, "mixed-theta", "<edge> mixes charCheck and stringCheck");
    }
    for (std::size_t i = 1; i < char_checks.size(); ++i) {
      if (char_checks[i].polarity != char_checks[0].polarity) {
        error(open.line, open.col, "mixed-polarity",
              "charCheck entries on one edge must share polarity");
        break;
      }
    }
    {
      std::set<std::string> seen;
      for (const auto& s : string_checks) {
        if (!seen.insert(s).second) {
          error(open.line, open.col, "duplicate-string", "stringCheck entries repeat a string");
        }
      }
    }

    HlTransition t;
    for (const auto& endpoint : {std::pair{&starts, &t.src}, std::pair{&ends, &t.dst}}) {
      if (endpoint.first->size() == 1) {
        const std::string& name = endpoint.first->front();
        if (name == "ACCEPT") {
          referenced_accept_ = true;
          *endpoint.second = name;
        } else if (!declared_.count(name)) {
          error(open.line, open.col, "unknown-node", "edge references undeclared node '" + name + "'");
        } else {
          *endpoint.second = name;
        }
      }
    }
    t.gamma = std::move(reg_checks);
    if (!char_checks.empty()) {
      std::vector<CharRange> ranges;
      ranges.reserve(char_checks.size());
      for (const auto& e : char_checks) ranges.push_back(e.range);
      t.theta = HlTheta::of_ranges(char_checks[0].polarity, std::move(ranges));
    } else if (!string_checks.empty()) {
      t.theta = HlTheta::of_strings(std::move(string_checks));
    }
    t.phi = std::move(functions);
    t.move = moves.empty() ? 0 : moves[0];
    automaton_.transitions.push_back(std::move(t));
    return true;
  }

  // Returns nullopt on hard syntax failure; {nullptr} when the function tag
  // was malformed but parsing can continue.
  std::optional<std::pair<std::optional<Command>, bool>> parse_function(const Tag&) {
    std::optional<Command> command;
    while (true) {
      auto tag = lex_.read_tag();
      if (!tag) {
        error(lex_.line(), lex_.col(), "bad-syntax", "expected a tag inside <function>");
        return std::nullopt;
      }
      if (tag->closing && tag->name == "function") break;
      if (tag->closing) {
        error(tag->line, tag->col, "unexpected-tag", "unexpected closing tag inside <function>");
        return std::nullopt;
      }
      auto op = op_from_name(tag->name);
      if (!op) {
        error(tag->line, tag->col, "unknown-function", "unknown command <" + tag->name + ">");
        // Skip the unknown element body.
        if (!read_element_body(*tag)) return std::nullopt;
        continue;
      }
      auto cmd = parse_command_body(*tag, *op);
      if (!cmd.has_value()) return std::nullopt;
      if (cmd->has_value()) {
        if (command) {
          error(tag->line, tag->col, "multiple-commands", "<function> holds more than one command");
        } else {
          command = **cmd;
        }
      }
    }
    return std::make_pair(command, true);
  }

  std::optional<std::optional<Command>> parse_command_body(const Tag& open, Op op) {
    std::optional<std::int64_t> res, reg1, reg2, val;
    std::optional<std::string> name;
    while (true) {
      auto tag = lex_.read_tag();
      if (!tag) {
        error(lex_.line(), lex_.col(), "bad-syntax", "expected a tag inside <" + open.name + ">");
        return std::nullopt;
      }
      if (tag->closing && tag->name == open.name) break;
      if (tag->closing) {
        error(tag->line, tag->col, "unexpected-tag", "mismatched closing tag in <" + open.name + ">");
        return std::nullopt;
      }
      auto body = read_element_body(*tag);
      if (!body) return std::nullopt;
      std::string text = trim(*body);
      if (tag->name == "name") {
        name = text;
        continue;
      }
      LitCursor c{text};
      auto n = parse_int(c);
      if (!n || !c.done()) {
        error(tag->line, tag->col, "malformed-argument",
              "<" + tag->name + "> must hold an integer");
        continue;
      }
      if (tag->name == "res") res = *n;
      else if (tag->name == "reg1") reg1 = *n;
      else if (tag->name == "reg2") reg2 = *n;
      else if (tag->name == "val") val = *n;
      else error(tag->line, tag->col, "unexpected-tag", "unexpected <" + tag->name + "> argument");
    }

    // Slot -1 marks an unused argument.
    auto used = [](std::optional<std::int64_t> v) { return v && *v != -1; };
    Command cmd;
    cmd.op = op;
    auto need = [&](std::optional<std::int64_t> v, const char* slot) -> bool {
      if (!used(v)) {
        error(open.line, open.col, "missing-argument",
              std::string("<") + open.name + "> lacks <" + slot + ">");
        return false;
      }
      return true;
    };
    bool ok = true;
    switch (op) {
      case Op::StoreVal:
        ok = need(res, "res");
        if (!val) {
          error(open.line, open.col, "missing-argument", "<storeVal> lacks <val>");
          ok = false;
        }
        if (ok) { cmd.res = static_cast<int>(*res); cmd.val = *val; }
        break;
      case Op::StoreCur:
      case Op::Increment:
      case Op::Decrement:
        ok = need(res, "res");
        if (ok) cmd.res = static_cast<int>(*res);
        break;
      case Op::StoreAcc:
      case Op::Assign:
        ok = need(res, "res") && need(reg1, "reg1");
        if (ok) { cmd.res = static_cast<int>(*res); cmd.r1 = static_cast<int>(*reg1); }
        break;
      case Op::Add:
      case Op::Sub:
      case Op::Mult:
      case Op::Div:
      case Op::Mod:
        ok = need(res, "res") && need(reg1, "reg1") && need(reg2, "reg2");
        if (ok) {
          cmd.res = static_cast<int>(*res);
          cmd.r1 = static_cast<int>(*reg1);
          cmd.r2 = static_cast<int>(*reg2);
        }
        break;
      case Op::AddI:
      case Op::MultI:
        ok = need(res, "res") && need(reg1, "reg1");
        if (!val) {
          error(open.line, open.col, "missing-argument",
                std::string("<") + open.name + "> lacks <val>");
          ok = false;
        }
        if (ok) {
          cmd.res = static_cast<int>(*res);
          cmd.r1 = static_cast<int>(*reg1);
          cmd.val = *val;
        }
        break;
      case Op::Nop:
        break;
      case Op::Hook:
        if (!name || name->empty()) {
          error(open.line, open.col, "missing-argument", "<hook> lacks <name>");
          ok = false;
        } else {
          cmd.hook = *name;
        }
        break;
    }
    if (!ok) return std::optional<Command>{};
    return std::optional<Command>{cmd};
  }

  Lexer lex_;
  MachineConfig config_;
  HlAutomaton automaton_;
  std::set<std::string> declared_;
  bool referenced_accept_ = false;
  std::vector<ParseError> errors_;
};

// ---------------------------------------------------------------------------
// Canonical JSON

ordered_json config_to_json(const MachineConfig& c) {
  return ordered_json{{"max_reg", c.max_reg}, {"max_int", c.max_int}, {"step_limit", c.step_limit}};
}

ordered_json comparison_to_json(const RegComparison& rc) {
  ordered_json rhs;
  if (rc.kind == RegComparison::Rhs::Const) {
    rhs = ordered_json{{"kind", "const"}, {"value", rc.constant}};
  } else {
    rhs = ordered_json{{"kind", "reg"}, {"reg", rc.reg}};
  }
  return ordered_json{{"lhs", rc.lhs}, {"op", cmp_op_name(rc.op)}, {"rhs", rhs}};
}

ordered_json ranges_to_json(const std::vector<CharRange>& ranges) {
  ordered_json arr = ordered_json::array();
  for (const CharRange& r : ranges) arr.push_back(ordered_json::array({r.lo, r.hi}));
  return arr;
}

ordered_json char_check_to_json(const CharCheck& cc) {
  return ordered_json{{"polarity", cc.polarity == Polarity::Inclusive ? "in" : "not_in"},
                      {"ranges", ranges_to_json(cc.ranges)}};
}

ordered_json string_to_json(const std::string& s) {
  if (printable_ascii(s)) return s;
  ordered_json bytes = ordered_json::array();
  for (unsigned char c : s) bytes.push_back(static_cast<int>(c));
  return ordered_json{{"bytes", bytes}};
}

ordered_json command_to_json(const Command& c) {
  ordered_json j{{"op", op_name(c.op)}};
  switch (c.op) {
    case Op::StoreVal: j["res"] = c.res; j["val"] = c.val; break;
    case Op::StoreCur: j["res"] = c.res; break;
    case Op::StoreAcc: j["src"] = c.r1; j["dst"] = c.res; break;
    case Op::Add:
    case Op::Sub:
    case Op::Mult:
    case Op::Div:
    case Op::Mod: j["res"] = c.res; j["r1"] = c.r1; j["r2"] = c.r2; break;
    case Op::AddI:
    case Op::MultI: j["src"] = c.r1; j["val"] = c.val; j["dst"] = c.res; break;
    case Op::Assign: j["res"] = c.res; j["src"] = c.r1; break;
    case Op::Increment:
    case Op::Decrement: j["res"] = c.res; break;
    case Op::Nop: break;
    case Op::Hook: j["name"] = c.hook; break;
  }
  return j;
}

ordered_json theta_to_json(const HlTheta& theta) {
  switch (theta.kind) {
    case HlTheta::Kind::Empty:
      return ordered_json{{"kind", "empty"}};
    case HlTheta::Kind::Ranges:
      return ordered_json{{"kind", "ranges"},
                          {"polarity", theta.polarity == Polarity::Inclusive ? "in" : "not_in"},
                          {"ranges", ranges_to_json(theta.ranges)}};
    case HlTheta::Kind::Strings: {
      ordered_json arr = ordered_json::array();
      for (const std::string& s : theta.strings) arr.push_back(string_to_json(s));
      return ordered_json{{"kind", "strings"}, {"strings", arr}};
    }
  }
  return {};
}

template <typename Automaton>
ordered_json automaton_header(const Automaton& a, const char* level) {
  std::vector<std::string> states = a.states;
  std::sort(states.begin(), states.end());
  ordered_json j;
  j["level"] = level;
  j["config"] = config_to_json(a.config);
  j["states"] = states;
  j["start"] = a.start;
  j["accept"] = a.accept;
  return j;
}

// JSON reading -------------------------------------------------------------

struct JsonReader {
  std::vector<ParseError> errors;

  void fail(const std::string& msg) {
    if (errors.size() < 64) errors.push_back({"json-schema", msg, 0, 0});
  }

  std::optional<std::int64_t> get_int(const ordered_json& j, const char* key, bool required = true) {
    if (!j.contains(key)) {
      if (required) fail(std::string("missing key '") + key + "'");
      return std::nullopt;
    }
    if (!j[key].is_number_integer()) {
      fail(std::string("key '") + key + "' must be an integer");
      return std::nullopt;
    }
    return j[key].get<std::int64_t>();
  }

  std::optional<std::string> get_string(const ordered_json& j, const char* key,
                                        bool required = true) {
    if (!j.contains(key)) {
      if (required) fail(std::string("missing key '") + key + "'");
      return std::nullopt;
    }
    if (!j[key].is_string()) {
      fail(std::string("key '") + key + "' must be a string");
      return std::nullopt;
    }
    return j[key].get<std::string>();
  }

  MachineConfig read_config(const ordered_json& j) {
    MachineConfig c;
    if (!j.contains("config")) return c;
    const auto& cj = j["config"];
    if (!cj.is_object()) {
      fail("'config' must be an object");
      return c;
    }
    if (auto v = get_int(cj, "max_reg", false)) c.max_reg = static_cast<int>(*v);
    if (auto v = get_int(cj, "max_int", false)) c.max_int = *v;
    if (auto v = get_int(cj, "step_limit", false)) c.step_limit = *v;
    return c;
  }

  std::optional<CharRange> read_range(const ordered_json& j) {
    if (!j.is_array() || j.size() != 2 || !j[0].is_number_integer() || !j[1].is_number_integer()) {
      fail("ranges must be [lo, hi] byte pairs");
      return std::nullopt;
    }
    std::int64_t lo = j[0].get<std::int64_t>(), hi = j[1].get<std::int64_t>();
    if (lo < 0 || lo > 255 || hi < 0 || hi > 255) {
      fail("range bounds must lie in 0..255");
      return std::nullopt;
    }
    return CharRange{static_cast<std::uint8_t>(lo), static_cast<std::uint8_t>(hi)};
  }

  std::optional<std::vector<CharRange>> read_ranges(const ordered_json& j) {
    if (!j.is_array()) {
      fail("'ranges' must be an array");
      return std::nullopt;
    }
    std::vector<CharRange> out;
    for (const auto& rj : j) {
      auto r = read_range(rj);
      if (!r) return std::nullopt;
      out.push_back(*r);
    }
    return out;
  }

  std::optional<Polarity> read_polarity(const ordered_json& j) {
    auto p = get_string(j, "polarity");
    if (!p) return std::nullopt;
    if (*p == "in") return Polarity::Inclusive;
    if (*p == "not_in") return Polarity::Exclusive;
    fail("polarity must be 'in' or 'not_in'");
    return std::nullopt;
  }

  std::optional<RegComparison> read_comparison(const ordered_json& j) {
    if (!j.is_object()) {
      fail("register comparison must be an object");
      return std::nullopt;
    }
    auto lhs = get_int(j, "lhs");
    auto opname = get_string(j, "op");
    if (!lhs || !opname) return std::nullopt;
    auto op = cmp_op_from_name(*opname);
    if (!op) {
      fail("unknown comparison op '" + *opname + "'");
      return std::nullopt;
    }
    if (!j.contains("rhs") || !j["rhs"].is_object()) {
      fail("comparison lacks 'rhs' object");
      return std::nullopt;
    }
    const auto& rhs = j["rhs"];
    auto kind = get_string(rhs, "kind");
    if (!kind) return std::nullopt;
    if (*kind == "const") {
      auto v = get_int(rhs, "value");
      if (!v) return std::nullopt;
      return RegComparison::with_const(static_cast<int>(*lhs), *op, *v);
    }
    if (*kind == "reg") {
      auto r = get_int(rhs, "reg");
      if (!r) return std::nullopt;
      return RegComparison::with_reg(static_cast<int>(*lhs), *op, static_cast<int>(*r));
    }
    fail("rhs kind must be 'const' or 'reg'");
    return std::nullopt;
  }

  std::optional<std::string> read_byte_string(const ordered_json& j) {
    if (j.is_string()) return j.get<std::string>();
    if (j.is_object() && j.contains("bytes") && j["bytes"].is_array()) {
      std::string out;
      for (const auto& b : j["bytes"]) {
        if (!b.is_number_integer() || b.get<std::int64_t>() < 0 || b.get<std::int64_t>() > 255) {
          fail("string bytes must lie in 0..255");
          return std::nullopt;
        }
        out.push_back(static_cast<char>(b.get<int>()));
      }
      return out;
    }
    fail("strings must be text or {\"bytes\": [...]}");
    return std::nullopt;
  }

  std::optional<Command> read_command(const ordered_json& j) {
    if (!j.is_object()) {
      fail("command must be an object");
      return std::nullopt;
    }
    auto opname = get_string(j, "op");
    if (!opname) return std::nullopt;
    auto op = op_from_name(*opname);
    if (!op) {
      fail("unknown command op '" + *opname + "'");
      return std::nullopt;
    }
    Command c;
    c.op = *op;
    auto take_int = [&](const char* key, int& slot) {
      if (auto v = get_int(j, key)) {
        slot = static_cast<int>(*v);
        return true;
      }
      return false;
    };
    switch (*op) {
      case Op::StoreVal: {
        auto v = get_int(j, "val");
        if (!take_int("res", c.res) || !v) return std::nullopt;
        c.val = *v;
        break;
      }
      case Op::StoreCur:
      case Op::Increment:
      case Op::Decrement:
        if (!take_int("res", c.res)) return std::nullopt;
        break;
      case Op::StoreAcc:
        if (!take_int("src", c.r1) || !take_int("dst", c.res)) return std::nullopt;
        break;
      case Op::Add:
      case Op::Sub:
      case Op::Mult:
      case Op::Div:
      case Op::Mod:
        if (!take_int("res", c.res) || !take_int("r1", c.r1) || !take_int("r2", c.r2))
          return std::nullopt;
        break;
      case Op::AddI:
      case Op::MultI: {
        auto v = get_int(j, "val");
        if (!take_int("src", c.r1) || !take_int("dst", c.res) || !v) return std::nullopt;
        c.val = *v;
        break;
      }
      case Op::Assign:
        if (!take_int("res", c.res) || !take_int("src", c.r1)) return std::nullopt;
        break;
      case Op::Nop:
        break;
      case Op::Hook: {
        auto n = get_string(j, "name");
        if (!n) return std::nullopt;
        c.hook = *n;
        break;
      }
    }
    return c;
  }

  template <typename Automaton>
  bool read_header(const ordered_json& j, Automaton& a) {
    a.config = read_config(j);
    if (!j.contains("states") || !j["states"].is_array()) {
      fail("missing 'states' array");
      return false;
    }
    for (const auto& s : j["states"]) {
      if (!s.is_string()) {
        fail("state names must be strings");
        return false;
      }
      a.states.push_back(s.get<std::string>());
    }
    auto start = get_string(j, "start");
    auto accept = get_string(j, "accept");
    if (!start || !accept) return false;
    a.start = *start;
    a.accept = *accept;
    if (!j.contains("transitions") || !j["transitions"].is_array()) {
      fail("missing 'transitions' array");
      return false;
    }
    return true;
  }

  std::optional<HlAutomaton> read_hl(const ordered_json& j) {
    HlAutomaton a;
    if (!read_header(j, a)) return std::nullopt;
    for (const auto& tj : j["transitions"]) {
      HlTransition t;
      auto src = get_string(tj, "src");
      auto dst = get_string(tj, "dst");
      if (!src || !dst) return std::nullopt;
      t.src = *src;
      t.dst = *dst;
      if (tj.contains("gamma")) {
        if (!tj["gamma"].is_array()) {
          fail("'gamma' must be an array");
          return std::nullopt;
        }
        for (const auto& g : tj["gamma"]) {
          auto rc = read_comparison(g);
          if (!rc) return std::nullopt;
          t.gamma.push_back(*rc);
        }
      }
      if (tj.contains("theta")) {
        const auto& th = tj["theta"];
        auto kind = get_string(th, "kind");
        if (!kind) return std::nullopt;
        if (*kind == "ranges") {
          auto p = read_polarity(th);
          if (!th.contains("ranges")) {
            fail("ranges theta lacks 'ranges'");
            return std::nullopt;
          }
          auto rs = read_ranges(th["ranges"]);
          if (!p || !rs) return std::nullopt;
          t.theta = HlTheta::of_ranges(*p, *rs);
        } else if (*kind == "strings") {
          if (!th.contains("strings") || !th["strings"].is_array()) {
            fail("strings theta lacks 'strings'");
            return std::nullopt;
          }
          std::vector<std::string> ss;
          for (const auto& sj : th["strings"]) {
            auto s = read_byte_string(sj);
            if (!s) return std::nullopt;
            ss.push_back(*s);
          }
          t.theta = HlTheta::of_strings(std::move(ss));
        } else if (*kind != "empty") {
          fail("theta kind must be empty, ranges or strings");
          return std::nullopt;
        }
      }
      if (tj.contains("phi")) {
        if (!tj["phi"].is_array()) {
          fail("'phi' must be an array");
          return std::nullopt;
        }
        for (const auto& cj : tj["phi"]) {
          auto c = read_command(cj);
          if (!c) return std::nullopt;
          t.phi.push_back(*c);
        }
      }
      if (auto mv = get_int(tj, "move", false)) t.move = *mv;
      a.transitions.push_back(std::move(t));
    }
    return a;
  }

  std::optional<LlAutomaton> read_ll(const ordered_json& j) {
    LlAutomaton a;
    if (!read_header(j, a)) return std::nullopt;
    for (const auto& tj : j["transitions"]) {
      LlTransition t;
      auto src = get_string(tj, "src");
      auto dst = get_string(tj, "dst");
      if (!src || !dst) return std::nullopt;
      t.src = *src;
      t.dst = *dst;
      if (tj.contains("reg_check") && !tj["reg_check"].is_null()) {
        auto rc = read_comparison(tj["reg_check"]);
        if (!rc) return std::nullopt;
        t.reg_check = *rc;
      }
      if (tj.contains("char_check") && !tj["char_check"].is_null()) {
        const auto& cc = tj["char_check"];
        auto p = read_polarity(cc);
        if (!cc.contains("ranges")) {
          fail("char_check lacks 'ranges'");
          return std::nullopt;
        }
        auto rs = read_ranges(cc["ranges"]);
        if (!p || !rs) return std::nullopt;
        t.char_check = CharCheck{*p, *rs};
      }
      if (tj.contains("command") && !tj["command"].is_null()) {
        auto c = read_command(tj["command"]);
        if (!c) return std::nullopt;
        t.command = *c;
      }
      if (auto mv = get_int(tj, "move", false)) t.move = *mv;
      a.transitions.push_back(std::move(t));
    }
    return a;
  }
};

void offset_to_line_col(std::string_view text, std::size_t offset, int& line, int& col) {
  line = 1;
  col = 1;
  for (std::size_t i = 0; i < offset && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
}

}  // namespace

std::string format_error(const ParseError& e) {
  std::string out = "error";
  if (e.line > 0) out += " at " + std::to_string(e.line) + ":" + std::to_string(e.col);
  out += ": " + e.message + " [" + e.code + "]";
  return out;
}

HlParseResult parse_hl(std::string_view text, const MachineConfig& config) {
  return HlParser(text, config).run();
}

std::string serialize(const HlAutomaton& a) {
  ordered_json j = automaton_header(a, "high");
  ordered_json ts = ordered_json::array();
  for (const HlTransition& t : a.transitions) {
    ordered_json tj;
    tj["src"] = t.src;
    tj["dst"] = t.dst;
    ordered_json gamma = ordered_json::array();
    for (const RegComparison& rc : t.gamma) gamma.push_back(comparison_to_json(rc));
    tj["gamma"] = gamma;
    tj["theta"] = theta_to_json(t.theta);
    ordered_json phi = ordered_json::array();
    for (const Command& c : t.phi) phi.push_back(command_to_json(c));
    tj["phi"] = phi;
    tj["move"] = t.move;
    ts.push_back(tj);
  }
  j["transitions"] = ts;
  return j.dump(2) + "\n";
}

std::string serialize(const LlAutomaton& a) {
  ordered_json j = automaton_header(a, "low");
  ordered_json ts = ordered_json::array();
  for (const LlTransition& t : a.transitions) {
    ordered_json tj;
    tj["src"] = t.src;
    tj["dst"] = t.dst;
    if (t.reg_check) tj["reg_check"] = comparison_to_json(*t.reg_check);
    if (t.char_check) tj["char_check"] = char_check_to_json(*t.char_check);
    if (t.command) tj["command"] = command_to_json(*t.command);
    tj["move"] = t.move;
    ts.push_back(tj);
  }
  j["transitions"] = ts;
  return j.dump(2) + "\n";
}

LoadResult load_json(std::string_view text) {
  LoadResult result;
  ordered_json j;
  try {
    j = ordered_json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    int line = 0, col = 0;
    offset_to_line_col(text, e.byte > 0 ? e.byte - 1 : 0, line, col);
    result.errors.push_back({"json-syntax", e.what(), line, col});
    return result;
  }
  if (!j.is_object()) {
    result.errors.push_back({"json-schema", "document must be a JSON object", 1, 1});
    return result;
  }
  JsonReader reader;
  auto level = reader.get_string(j, "level");
  if (level) {
    if (*level == "high") {
      result.hl = reader.read_hl(j);
    } else if (*level == "low") {
      result.ll = reader.read_ll(j);
    } else {
      reader.fail("level must be 'high' or 'low'");
    }
  }
  result.errors = std::move(reader.errors);
  if (!result.errors.empty()) {
    result.hl.reset();
    result.ll.reset();
  }
  return result;
}

LoadResult load_spec(std::string_view text, const MachineConfig& defaults) {
  std::size_t i = 0;
  while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
  if (i < text.size() && text[i] == '<') {
    LoadResult result;
    HlParseResult parsed = parse_hl(text, defaults);
    result.errors = std::move(parsed.errors);
    result.hl = std::move(parsed.automaton);
    if (!result.errors.empty()) result.hl.reset();
    return result;
  }
  return load_json(text);
}

}  // namespace isl
