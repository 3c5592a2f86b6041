// GraphViz rendering: one node per state (accept double-circled, start bold),
// edges labeled guard / command / move.

#pragma once

#include <string>

#include "isl/core.hpp"

namespace isl {

std::string to_dot(const HlAutomaton& a);
std::string to_dot(const LlAutomaton& a);

}  // namespace isl
