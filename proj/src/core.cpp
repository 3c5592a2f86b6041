#include "isl/core.hpp"

#include <algorithm>
#include <cctype>
#include <limits>
#include <set>

namespace isl {

bool cmp_eval(CmpOp op, std::int64_t lhs, std::int64_t rhs) {
  switch (op) {
    case CmpOp::Eq: return lhs == rhs;
    case CmpOp::Ne: return lhs != rhs;
    case CmpOp::Lt: return lhs < rhs;
    case CmpOp::Le: return lhs <= rhs;
    case CmpOp::Gt: return lhs > rhs;
    case CmpOp::Ge: return lhs >= rhs;
  }
  return false;
}

const char* cmp_op_name(CmpOp op) {
  switch (op) {
    case CmpOp::Eq: return "eq";
    case CmpOp::Ne: return "ne";
    case CmpOp::Lt: return "lt";
    case CmpOp::Le: return "le";
    case CmpOp::Gt: return "gt";
    case CmpOp::Ge: return "ge";
  }
  return "?";
}

std::optional<CmpOp> cmp_op_from_name(std::string_view name) {
  if (name == "eq") return CmpOp::Eq;
  if (name == "ne") return CmpOp::Ne;
  if (name == "lt") return CmpOp::Lt;
  if (name == "le") return CmpOp::Le;
  if (name == "gt") return CmpOp::Gt;
  if (name == "ge") return CmpOp::Ge;
  return std::nullopt;
}

const char* op_name(Op op) {
  switch (op) {
    case Op::StoreVal: return "store_val";
    case Op::StoreCur: return "store_cur";
    case Op::StoreAcc: return "store_acc";
    case Op::Add: return "add";
    case Op::Sub: return "sub";
    case Op::Mult: return "mult";
    case Op::Div: return "div";
    case Op::Mod: return "mod";
    case Op::AddI: return "add_i";
    case Op::MultI: return "mult_i";
    case Op::Assign: return "assign";
    case Op::Increment: return "increment";
    case Op::Decrement: return "decrement";
    case Op::Nop: return "nop";
    case Op::Hook: return "hook";
  }
  return "?";
}

std::optional<Op> op_from_name(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  lower.erase(std::remove(lower.begin(), lower.end(), '_'), lower.end());
  if (lower == "storeval") return Op::StoreVal;
  if (lower == "storecur") return Op::StoreCur;
  if (lower == "storeacc" || lower == "store") return Op::StoreAcc;
  if (lower == "add") return Op::Add;
  if (lower == "sub") return Op::Sub;
  if (lower == "mult" || lower == "mul") return Op::Mult;
  if (lower == "div") return Op::Div;
  if (lower == "mod") return Op::Mod;
  if (lower == "addi") return Op::AddI;
  if (lower == "multi") return Op::MultI;
  if (lower == "assign") return Op::Assign;
  if (lower == "increment") return Op::Increment;
  if (lower == "decrement") return Op::Decrement;
  if (lower == "nop" || lower == "noop") return Op::Nop;
  if (lower == "hook") return Op::Hook;
  return std::nullopt;
}

HlTheta HlTheta::of_ranges(Polarity p, std::vector<CharRange> rs) {
  HlTheta t;
  t.kind = Kind::Ranges;
  t.polarity = p;
  t.ranges = std::move(rs);
  return t;
}

HlTheta HlTheta::of_strings(std::vector<std::string> ss) {
  HlTheta t;
  t.kind = Kind::Strings;
  std::sort(ss.begin(), ss.end());
  ss.erase(std::unique(ss.begin(), ss.end()), ss.end());
  t.strings = std::move(ss);
  return t;
}

RegisterFile make_registers(const MachineConfig& config) {
  return RegisterFile(static_cast<std::size_t>(config.max_reg), 0);
}

std::int64_t wrap_add(std::int64_t a, std::int64_t b) {
  return static_cast<std::int64_t>(static_cast<std::uint64_t>(a) + static_cast<std::uint64_t>(b));
}

std::int64_t wrap_sub(std::int64_t a, std::int64_t b) {
  return static_cast<std::int64_t>(static_cast<std::uint64_t>(a) - static_cast<std::uint64_t>(b));
}

std::int64_t wrap_mul(std::int64_t a, std::int64_t b) {
  return static_cast<std::int64_t>(static_cast<std::uint64_t>(a) * static_cast<std::uint64_t>(b));
}

std::optional<std::int64_t> wrap_div(std::int64_t a, std::int64_t b) {
  if (b == 0) return std::nullopt;
  if (a == std::numeric_limits<std::int64_t>::min() && b == -1) return a;
  return a / b;
}

std::optional<std::int64_t> wrap_mod(std::int64_t a, std::int64_t b) {
  if (b == 0) return std::nullopt;
  if (a == std::numeric_limits<std::int64_t>::min() && b == -1) return std::int64_t{0};
  return a % b;
}

CommandResult apply_command(const Command& cmd, const RegisterFile& regs,
                            std::optional<std::uint8_t> cur, const HookRegistry* hooks) {
  RegisterFile out = regs;
  switch (cmd.op) {
    case Op::StoreVal:
      out[cmd.res] = cmd.val;
      break;
    case Op::StoreCur:
      if (!cur) return CmdError::MissingChar;
      out[cmd.res] = *cur;
      break;
    case Op::StoreAcc:
      if (!cur) return CmdError::MissingChar;
      out[cmd.res] = wrap_add(regs[cmd.r1], *cur);
      break;
    case Op::Add:
      out[cmd.res] = wrap_add(regs[cmd.r1], regs[cmd.r2]);
      break;
    case Op::Sub:
      out[cmd.res] = wrap_sub(regs[cmd.r1], regs[cmd.r2]);
      break;
    case Op::Mult:
      out[cmd.res] = wrap_mul(regs[cmd.r1], regs[cmd.r2]);
      break;
    case Op::Div: {
      auto q = wrap_div(regs[cmd.r1], regs[cmd.r2]);
      if (!q) return CmdError::DivByZero;
      out[cmd.res] = *q;
      break;
    }
    case Op::Mod: {
      auto r = wrap_mod(regs[cmd.r1], regs[cmd.r2]);
      if (!r) return CmdError::DivByZero;
      out[cmd.res] = *r;
      break;
    }
    case Op::AddI:
      out[cmd.res] = wrap_add(regs[cmd.r1], cmd.val);
      break;
    case Op::MultI:
      out[cmd.res] = wrap_mul(regs[cmd.r1], cmd.val);
      break;
    case Op::Assign:
      out[cmd.res] = regs[cmd.r1];
      break;
    case Op::Increment:
      out[cmd.res] = wrap_add(regs[cmd.res], 1);
      break;
    case Op::Decrement:
      out[cmd.res] = wrap_sub(regs[cmd.res], 1);
      break;
    case Op::Nop:
      break;
    case Op::Hook: {
      if (hooks) {
        auto it = hooks->find(cmd.hook);
        if (it != hooks->end()) {
          out = it->second(regs, cur);
          break;
        }
      }
      return CmdError::HookUnbound;
    }
  }
  return out;
}

bool eval_guard(const std::optional<RegComparison>& reg_check,
                const std::optional<CharCheck>& char_check,
                const RegisterFile& regs, std::optional<std::uint8_t> cur) {
  if (reg_check) {
    std::int64_t lhs = regs[reg_check->lhs];
    std::int64_t rhs = reg_check->kind == RegComparison::Rhs::Const ? reg_check->constant
                                                                    : regs[reg_check->reg];
    if (!cmp_eval(reg_check->op, lhs, rhs)) return false;
  }
  if (char_check) {
    bool member = false;
    if (cur) {
      for (const CharRange& r : char_check->ranges) {
        if (r.contains(*cur)) {
          member = true;
          break;
        }
      }
    }
    bool pass = char_check->polarity == Polarity::Inclusive ? member : !member;
    if (!pass) return false;
  }
  return true;
}

bool is_reserved_state_name(std::string_view name) {
  if (name == "ACCEPT") return true;
  if (name.size() > 3 && name.substr(0, 3) == "FSA") {
    return std::all_of(name.begin() + 3, name.end(),
                       [](unsigned char c) { return std::isdigit(c); });
  }
  return name == "FSA";
}

namespace {

void check_reg(int idx, const MachineConfig& cfg, const std::string& where,
               std::vector<Diagnostic>& out) {
  if (idx < 0 || idx >= cfg.max_reg) {
    out.push_back({"register-out-of-range",
                   where + ": register " + std::to_string(idx) + " not below max_reg " +
                       std::to_string(cfg.max_reg)});
  }
}

void check_const(std::int64_t v, const MachineConfig& cfg, const std::string& where,
                 std::vector<Diagnostic>& out) {
  std::uint64_t mag = v < 0 ? static_cast<std::uint64_t>(-(v + 1)) + 1 : static_cast<std::uint64_t>(v);
  if (mag > static_cast<std::uint64_t>(cfg.max_int)) {
    out.push_back({"constant-out-of-range",
                   where + ": constant " + std::to_string(v) + " exceeds max_int " +
                       std::to_string(cfg.max_int)});
  }
}

void check_comparison(const RegComparison& rc, const MachineConfig& cfg,
                      const std::string& where, std::vector<Diagnostic>& out) {
  check_reg(rc.lhs, cfg, where, out);
  if (rc.kind == RegComparison::Rhs::Reg) {
    check_reg(rc.reg, cfg, where, out);
  } else {
    check_const(rc.constant, cfg, where, out);
  }
}

void check_command(const Command& c, const MachineConfig& cfg, const std::string& where,
                   std::vector<Diagnostic>& out) {
  switch (c.op) {
    case Op::StoreVal:
      check_reg(c.res, cfg, where, out);
      check_const(c.val, cfg, where, out);
      break;
    case Op::StoreCur:
    case Op::Increment:
    case Op::Decrement:
      check_reg(c.res, cfg, where, out);
      break;
    case Op::StoreAcc:
    case Op::Assign:
      check_reg(c.res, cfg, where, out);
      check_reg(c.r1, cfg, where, out);
      break;
    case Op::Add:
    case Op::Sub:
    case Op::Mult:
    case Op::Div:
    case Op::Mod:
      check_reg(c.res, cfg, where, out);
      check_reg(c.r1, cfg, where, out);
      check_reg(c.r2, cfg, where, out);
      break;
    case Op::AddI:
    case Op::MultI:
      check_reg(c.res, cfg, where, out);
      check_reg(c.r1, cfg, where, out);
      check_const(c.val, cfg, where, out);
      break;
    case Op::Nop:
    case Op::Hook:
      break;
  }
}

void check_ranges(const std::vector<CharRange>& ranges, const std::string& where,
                  std::vector<Diagnostic>& out) {
  if (ranges.empty()) {
    out.push_back({"empty-ranges", where + ": character check lists no ranges"});
  }
  for (const CharRange& r : ranges) {
    if (r.lo > r.hi) {
      out.push_back({"malformed-range", where + ": range lower bound " + std::to_string(r.lo) +
                                            " above upper bound " + std::to_string(r.hi)});
    }
  }
}

template <typename Automaton>
void check_shape(const Automaton& a, std::vector<Diagnostic>& out) {
  std::set<std::string> names(a.states.begin(), a.states.end());
  if (!names.count(a.start)) {
    out.push_back({"unknown-state", "start state '" + a.start + "' is not declared"});
  }
  if (!names.count(a.accept)) {
    out.push_back({"unknown-state", "accept state '" + a.accept + "' is not declared"});
  }
  if (!a.config.valid()) {
    out.push_back({"bad-config", "machine config bounds must all be at least 1"});
  }
  for (std::size_t i = 0; i < a.transitions.size(); ++i) {
    const auto& t = a.transitions[i];
    const std::string where = "transition " + std::to_string(i);
    if (!names.count(t.src)) {
      out.push_back({"unknown-state", where + ": source '" + t.src + "' is not declared"});
    }
    if (!names.count(t.dst)) {
      out.push_back({"unknown-state", where + ": target '" + t.dst + "' is not declared"});
    }
    if (t.src == a.accept) {
      out.push_back({"accept-outgoing", where + ": accept state has an outgoing transition"});
    }
    if (t.move < 0) {
      out.push_back({"negative-move", where + ": move must be non-negative"});
    }
  }
}

}  // namespace

std::vector<Diagnostic> validate(const HlAutomaton& a) {
  std::vector<Diagnostic> out;
  check_shape(a, out);
  for (const std::string& s : a.states) {
    if (s != a.accept && is_reserved_state_name(s)) {
      out.push_back({"reserved-name", "state '" + s + "' uses a reserved name"});
    }
  }
  for (std::size_t i = 0; i < a.transitions.size(); ++i) {
    const auto& t = a.transitions[i];
    const std::string where = "transition " + std::to_string(i);
    for (const RegComparison& rc : t.gamma) check_comparison(rc, a.config, where, out);
    for (const Command& c : t.phi) check_command(c, a.config, where, out);
    if (t.theta.kind == HlTheta::Kind::Ranges) {
      check_ranges(t.theta.ranges, where, out);
    } else if (t.theta.kind == HlTheta::Kind::Strings) {
      if (t.theta.strings.empty()) {
        out.push_back({"empty-strings", where + ": string set is empty"});
      }
      for (const std::string& s : t.theta.strings) {
        if (s.empty()) out.push_back({"empty-string", where + ": string set contains the empty string"});
      }
      for (std::size_t k = 1; k < t.theta.strings.size(); ++k) {
        if (t.theta.strings[k] == t.theta.strings[k - 1]) {
          out.push_back({"duplicate-string", where + ": duplicate string in set"});
        }
      }
    }
  }
  return out;
}

std::vector<Diagnostic> validate(const LlAutomaton& a) {
  std::vector<Diagnostic> out;
  check_shape(a, out);
  for (std::size_t i = 0; i < a.transitions.size(); ++i) {
    const auto& t = a.transitions[i];
    const std::string where = "transition " + std::to_string(i);
    if (t.reg_check) check_comparison(*t.reg_check, a.config, where, out);
    if (t.command) check_command(*t.command, a.config, where, out);
    if (t.char_check) {
      check_ranges(t.char_check->ranges, where, out);
      if (t.char_check->ranges.size() > 1) {
        out.push_back({"multi-range-char-check",
                       where + ": low-level character checks carry a single range"});
      }
    }
  }
  return out;
}

}  // namespace isl
