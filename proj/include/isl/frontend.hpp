// Text frontend: parses the <FSA> tag format into a high-level automaton and
// reads/writes the canonical JSON interchange form for both levels.

#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "isl/core.hpp"

namespace isl {

struct ParseError {
  std::string code;     // e.g. "missing-end", "unknown-node"
  std::string message;
  int line = 0;         // 1-based; 0 when not applicable
  int col = 0;
};

std::string format_error(const ParseError& e);

struct HlParseResult {
  std::optional<HlAutomaton> automaton;
  std::vector<ParseError> errors;

  bool ok() const { return automaton.has_value() && errors.empty(); }
};

// Parses the tag format. Total: any input yields an automaton or errors
// carrying line/column positions. The first declared node is the start
// state; ACCEPT names the accept state and needs no declaration.
HlParseResult parse_hl(std::string_view text, const MachineConfig& config = {});

// Canonical JSON with top-level keys level, config, states, start, accept,
// transitions. States are sorted; transitions keep declaration order.
// Output is deterministic byte for byte.
std::string serialize(const HlAutomaton& a);
std::string serialize(const LlAutomaton& a);

enum class SpecLevel { High, Low };

struct LoadResult {
  std::optional<HlAutomaton> hl;
  std::optional<LlAutomaton> ll;
  std::vector<ParseError> errors;

  bool ok() const { return errors.empty() && (hl.has_value() || ll.has_value()); }
  SpecLevel level() const { return hl ? SpecLevel::High : SpecLevel::Low; }
};

// Auto-detects the input form: documents starting with '<' go through the
// tag parser, anything else through the canonical JSON reader.
LoadResult load_spec(std::string_view text, const MachineConfig& defaults = {});

LoadResult load_json(std::string_view text);

}  // namespace isl
