// Acceptance of concrete byte strings by backtracking search over the
// non-deterministic transition choices, bounded by the config step budget.

#pragma once

#include <string_view>
#include <vector>

#include "isl/core.hpp"

namespace isl {

enum class VerdictKind { Accept, Reject, BudgetExceeded };

struct Verdict {
  VerdictKind kind = VerdictKind::Reject;
  std::vector<int> trace;  // indices into the automaton's transition list
};

// Depth-first search in transition declaration order; each taken transition
// costs one step from config.step_limit. Trailing unread input is fine.
Verdict interpret_ll(const LlAutomaton& m, std::string_view input,
                     const HookRegistry* hooks = nullptr);

// High-level execution: gamma is one conjunctive guard, a range set branches
// per range, a string set branches per string (consuming its length, the
// transition's own move is ignored), and phi runs as an atomic sequence.
Verdict interpret_hl(const HlAutomaton& m, std::string_view input,
                     const HookRegistry* hooks = nullptr);

const char* verdict_name(VerdictKind v);

}  // namespace isl
