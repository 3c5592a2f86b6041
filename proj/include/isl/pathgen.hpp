// Bounded explicit enumeration of low-level automaton paths with symbolic
// input bytes and registers, accumulating one constraint per guard in path
// order. Replaces engine forking with a deterministic depth-first walk.

#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "isl/core.hpp"

namespace isl {

enum class SymOp { Add, Sub, Mul, Div, Mod };

struct SymExpr;
using SymExprPtr = std::shared_ptr<const SymExpr>;

struct SymExpr {
  enum class Kind { Const, Input, BinOp };

  Kind kind = Kind::Const;
  std::int64_t value = 0;  // Const
  std::int64_t pos = 0;    // Input
  SymOp op = SymOp::Add;   // BinOp
  SymExprPtr left;
  SymExprPtr right;

  static SymExprPtr constant(std::int64_t v);
  static SymExprPtr input(std::int64_t pos);
  // Folds constant operands (division and modulo never fold on zero).
  static SymExprPtr binop(SymOp op, SymExprPtr l, SymExprPtr r);
};

// nullopt on division by zero anywhere in the tree or an input position
// beyond the provided bytes.
std::optional<std::int64_t> eval_expr(const SymExpr& e, std::string_view input);
void collect_positions(const SymExpr& e, std::set<std::int64_t>& out);
bool mentions_input(const SymExpr& e);

struct Constraint {
  enum class Kind { CharIn, CharNotIn, RegCmp };

  Kind kind = Kind::CharIn;
  std::int64_t pos = 0;   // CharIn / CharNotIn
  CharRange range{};      // CharIn / CharNotIn
  SymExprPtr lhs;         // RegCmp
  SymExprPtr rhs;         // RegCmp
  CmpOp op = CmpOp::Eq;   // RegCmp

  static Constraint char_in(std::int64_t pos, CharRange r);
  static Constraint char_not_in(std::int64_t pos, CharRange r);
  static Constraint reg_cmp(SymExprPtr lhs, CmpOp op, SymExprPtr rhs);
};

bool eval_constraint(const Constraint& c, std::string_view input);

struct ConstraintSet {
  std::vector<Constraint> items;
};

struct PathReport {
  std::vector<int> transitions;      // indices into the automaton's list
  ConstraintSet constraints;
  std::int64_t final_ip = 0;         // concrete: moves are concrete
  std::vector<SymExprPtr> sym_regs;  // final register expressions
};

struct EnumBounds {
  std::int64_t max_path_len = 256;
  std::int64_t max_paths = 1000;
  std::int64_t max_edge_visits = 8;
  bool prune = false;  // drop subtrees whose constraint set is refutable
};

struct SymState {
  std::string state;
  std::vector<SymExprPtr> regs;
  std::int64_t ip = 0;
};

SymState make_sym_state(const LlAutomaton& m);

struct SymStep {
  bool ok = false;
  std::string error;  // set when !ok, e.g. "hook-unbound"
  std::vector<Constraint> emitted;
  bool symbolic_divisor = false;
};

// One transition applied symbolically: the register check and character
// check each emit a constraint, the command rewrites one register
// expression, and ip advances by the concrete move.
SymStep step_symbolic(SymState& state, const LlTransition& t);

struct EnumResult {
  std::int64_t emitted = 0;
  bool truncated = false;  // max_paths was hit with more accepting paths left
};

// Depth-first over transitions in declaration order. The sink may return
// false to stop early. With prune set, every delivered report is feasible.
EnumResult enumerate_paths(const LlAutomaton& m, const EnumBounds& bounds,
                           const std::function<bool(const PathReport&)>& sink);

// One line of JSON: {"transitions": [...], "constraints": [...], "final_ip": n}
std::string path_report_jsonl(const PathReport& report);
std::string constraints_to_json(const ConstraintSet& cs);
std::optional<ConstraintSet> constraints_from_json(std::string_view json_text);

}  // namespace isl
