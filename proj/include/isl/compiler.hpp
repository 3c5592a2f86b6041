// Lowers high-level automata to the low-level form: register-check chains,
// parallel character ranges, string tries, command chains, then a peephole
// merge that packs adjacent single-purpose transitions together.

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "isl/core.hpp"

namespace isl {

// Names for compiler-introduced states: FSA0, FSA1, ...
class FreshNamer {
 public:
  explicit FreshNamer(int start = 0) : counter_(start) {}

  std::string next() { return "FSA" + std::to_string(counter_++); }
  int counter() const { return counter_; }

 private:
  int counter_;
};

struct Fragment {
  std::vector<LlTransition> transitions;
  std::vector<std::string> fresh_states;  // excludes the src/dst endpoints
};

// m register checks become m serial transitions through m-1 fresh states.
Fragment expand_reg_checks(const std::vector<RegComparison>& gamma, const std::string& src,
                           const std::string& dst, FreshNamer& namer);

// k ranges become k parallel transitions, each carrying one single-range
// check with the set's polarity. No fresh states.
Fragment expand_char_ranges(Polarity polarity, const std::vector<CharRange>& ranges,
                            const std::string& src, const std::string& dst);

// The string set becomes a trie rooted at src whose terminal edges land in
// dst; every edge checks one exact byte and moves one. Sets where one string
// is a proper prefix of another are rejected.
struct StringExpansion {
  Fragment fragment;
  std::optional<Diagnostic> error;
};
StringExpansion expand_strings(const std::vector<std::string>& strings, const std::string& src,
                               const std::string& dst, FreshNamer& namer);

// m commands become m serial transitions through m-1 fresh states.
Fragment expand_commands(const std::vector<Command>& phi, const std::string& src,
                         const std::string& dst, FreshNamer& namer);

struct CompileResult {
  std::optional<LlAutomaton> automaton;
  std::vector<Diagnostic> errors;

  bool ok() const { return automaton.has_value() && errors.empty(); }
};

CompileResult compile(const HlAutomaton& hl);

}  // namespace isl
