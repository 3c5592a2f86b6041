// Core domain types shared by both automaton levels: guarded transitions,
// register commands, and the small-step semantics used by the interpreter
// and the symbolic path enumerator.

#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace isl {

struct MachineConfig {
  int max_reg = 8;                      // number of registers
  std::int64_t max_int = 1024;          // magnitude bound on literal constants
  std::int64_t step_limit = 1 << 20;    // interpreter step budget

  static constexpr int int_width = 64;  // registers are signed 64-bit, wrapping

  bool valid() const { return max_reg >= 1 && max_int >= 1 && step_limit >= 1; }
};

struct CharRange {
  std::uint8_t lo = 0;
  std::uint8_t hi = 0;

  bool contains(std::uint8_t b) const { return lo <= b && b <= hi; }
  friend bool operator==(const CharRange&, const CharRange&) = default;
};

enum class Polarity { Inclusive, Exclusive };

// One character guard: byte must (or must not) fall in any of the ranges.
struct CharCheck {
  Polarity polarity = Polarity::Inclusive;
  std::vector<CharRange> ranges;

  friend bool operator==(const CharCheck&, const CharCheck&) = default;
};

enum class CmpOp { Eq, Ne, Lt, Le, Gt, Ge };

bool cmp_eval(CmpOp op, std::int64_t lhs, std::int64_t rhs);
const char* cmp_op_name(CmpOp op);  // "eq", "ne", ...
std::optional<CmpOp> cmp_op_from_name(std::string_view name);

// reg[lhs] <op> (constant | reg[reg])
struct RegComparison {
  enum class Rhs { Const, Reg };

  int lhs = 0;
  CmpOp op = CmpOp::Eq;
  Rhs kind = Rhs::Const;
  std::int64_t constant = 0;
  int reg = 0;

  static RegComparison with_const(int lhs, CmpOp op, std::int64_t c) {
    return RegComparison{lhs, op, Rhs::Const, c, 0};
  }
  static RegComparison with_reg(int lhs, CmpOp op, int r) {
    return RegComparison{lhs, op, Rhs::Reg, 0, r};
  }
  friend bool operator==(const RegComparison&, const RegComparison&) = default;
};

// Register-update commands. Field use depends on the opcode:
//   StoreVal   res, val        reg[res] = val
//   StoreCur   res             reg[res] = code of current byte
//   StoreAcc   res, r1         reg[res] = reg[r1] + code of current byte
//   Add..Mod   res, r1, r2     reg[res] = reg[r1] op reg[r2]
//   AddI/MultI res, r1, val    reg[res] = reg[r1] op val
//   Assign     res, r1         reg[res] = reg[r1]
//   Increment  res             reg[res] += 1 (Decrement: -= 1)
//   Nop        -
//   Hook       hook            named external function
enum class Op {
  StoreVal, StoreCur, StoreAcc,
  Add, Sub, Mult, Div, Mod,
  AddI, MultI,
  Assign, Increment, Decrement,
  Nop, Hook,
};

struct Command {
  Op op = Op::Nop;
  int res = -1;
  int r1 = -1;
  int r2 = -1;
  std::int64_t val = 0;
  std::string hook;

  friend bool operator==(const Command&, const Command&) = default;
};

const char* op_name(Op op);
std::optional<Op> op_from_name(std::string_view name);

struct LlTransition {
  std::string src;
  std::string dst;
  std::optional<RegComparison> reg_check;
  std::optional<CharCheck> char_check;
  std::optional<Command> command;
  std::int64_t move = 0;

  friend bool operator==(const LlTransition&, const LlTransition&) = default;
};

// Theta of a high-level transition: nothing, a range set, or a string set.
struct HlTheta {
  enum class Kind { Empty, Ranges, Strings };

  Kind kind = Kind::Empty;
  Polarity polarity = Polarity::Inclusive;
  std::vector<CharRange> ranges;      // Ranges
  std::vector<std::string> strings;   // Strings, sorted and unique

  static HlTheta empty() { return HlTheta{}; }
  static HlTheta of_ranges(Polarity p, std::vector<CharRange> rs);
  static HlTheta of_strings(std::vector<std::string> ss);
  friend bool operator==(const HlTheta&, const HlTheta&) = default;
};

struct HlTransition {
  std::string src;
  std::string dst;
  std::vector<RegComparison> gamma;   // conjunction of register checks
  HlTheta theta;
  std::vector<Command> phi;           // command sequence
  std::int64_t move = 0;

  friend bool operator==(const HlTransition&, const HlTransition&) = default;
};

struct LlAutomaton {
  std::vector<std::string> states;
  std::string start;
  std::string accept;
  std::vector<LlTransition> transitions;
  MachineConfig config;
};

struct HlAutomaton {
  std::vector<std::string> states;
  std::string start;
  std::string accept;
  std::vector<HlTransition> transitions;
  MachineConfig config;
};

using RegisterFile = std::vector<std::int64_t>;

RegisterFile make_registers(const MachineConfig& config);  // all zeros

// Wrapping signed 64-bit arithmetic. Division truncates toward zero and
// modulo takes the sign of the dividend; INT64_MIN / -1 wraps.
std::int64_t wrap_add(std::int64_t a, std::int64_t b);
std::int64_t wrap_sub(std::int64_t a, std::int64_t b);
std::int64_t wrap_mul(std::int64_t a, std::int64_t b);
std::optional<std::int64_t> wrap_div(std::int64_t a, std::int64_t b);  // nullopt on b == 0
std::optional<std::int64_t> wrap_mod(std::int64_t a, std::int64_t b);

enum class CmdError { DivByZero, MissingChar, HookUnbound };

using HookFn = std::function<RegisterFile(const RegisterFile&, std::optional<std::uint8_t>)>;
using HookRegistry = std::map<std::string, HookFn>;

using CommandResult = std::variant<RegisterFile, CmdError>;

// Applies one command to a register file, returning the new file. Never
// mutates the input; the result differs in at most one register.
CommandResult apply_command(const Command& cmd, const RegisterFile& regs,
                            std::optional<std::uint8_t> cur,
                            const HookRegistry* hooks = nullptr);

// Conjunction of the two optional checks. An absent check is true. An
// Inclusive char check is true iff cur lies in any listed range; Exclusive
// is the negation of that membership (so it holds on an exhausted tape).
bool eval_guard(const std::optional<RegComparison>& reg_check,
                const std::optional<CharCheck>& char_check,
                const RegisterFile& regs, std::optional<std::uint8_t> cur);

struct Diagnostic {
  std::string code;
  std::string message;
};

// Structural checks: dangling states, out-of-range registers or constants,
// accept with outgoing edges, reserved state names, malformed ranges.
std::vector<Diagnostic> validate(const HlAutomaton& a);
std::vector<Diagnostic> validate(const LlAutomaton& a);

bool is_reserved_state_name(std::string_view name);  // ACCEPT / FSA<digits>

}  // namespace isl
