// Shared fixtures: bundled spec loading, tiny automaton builders, and the
// seeded input generator used by the differential suites.

#pragma once

#include <doctest.h>

#include <fstream>
#include <random>
#include <set>
#include <sstream>
#include <string>

#include "isl/compiler.hpp"
#include "isl/core.hpp"
#include "isl/frontend.hpp"

namespace isl::test {

inline std::string specs_dir() { return ISL_SPECS_DIR; }

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE_MESSAGE(static_cast<bool>(in), "missing file " << path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline HlAutomaton load_bundled(const std::string& name) {
  HlParseResult parsed = parse_hl(read_file(specs_dir() + "/" + name + ".fsa"));
  for (const ParseError& e : parsed.errors) {
    FAIL_CHECK(name << ": " << format_error(e));
  }
  REQUIRE(parsed.automaton.has_value());
  return *parsed.automaton;
}

inline LlAutomaton compile_bundled(const std::string& name) {
  CompileResult compiled = compile(load_bundled(name));
  for (const Diagnostic& d : compiled.errors) FAIL_CHECK(name << ": " << d.message);
  REQUIRE(compiled.automaton.has_value());
  return *compiled.automaton;
}

// Every byte a spec's guards or strings can match, for input generation.
inline std::vector<std::uint8_t> alphabet_of(const HlAutomaton& a) {
  std::set<std::uint8_t> bytes;
  for (const HlTransition& t : a.transitions) {
    if (t.theta.kind == HlTheta::Kind::Ranges) {
      for (const CharRange& r : t.theta.ranges) {
        for (int b = r.lo; b <= static_cast<int>(r.hi) && bytes.size() < 64; ++b) {
          bytes.insert(static_cast<std::uint8_t>(b));
        }
      }
    } else if (t.theta.kind == HlTheta::Kind::Strings) {
      for (const std::string& s : t.theta.strings) {
        for (char c : s) bytes.insert(static_cast<std::uint8_t>(c));
      }
    }
  }
  if (bytes.empty()) bytes.insert('a');
  return {bytes.begin(), bytes.end()};
}

// Random string of length <= max_len, 90% alphabet bytes, 10% arbitrary.
inline std::string random_input(std::mt19937_64& rng, const std::vector<std::uint8_t>& alphabet,
                                std::size_t max_len) {
  std::size_t len = rng() % (max_len + 1);
  std::string out;
  out.reserve(len);
  for (std::size_t i = 0; i < len; ++i) {
    if (rng() % 10 == 0) {
      out.push_back(static_cast<char>(rng() % 256));
    } else {
      out.push_back(static_cast<char>(alphabet[rng() % alphabet.size()]));
    }
  }
  return out;
}

inline LlTransition ll_edge(std::string src, std::string dst, std::int64_t move = 0) {
  LlTransition t;
  t.src = std::move(src);
  t.dst = std::move(dst);
  t.move = move;
  return t;
}

inline LlTransition ll_char(std::string src, std::string dst, std::uint8_t lo, std::uint8_t hi,
                            std::int64_t move, Polarity polarity = Polarity::Inclusive) {
  LlTransition t = ll_edge(std::move(src), std::move(dst), move);
  t.char_check = CharCheck{polarity, {CharRange{lo, hi}}};
  return t;
}

// Consumes one or more digits, accepting only at end of input: A --digit--> B,
// B --digit--> B, B --(not in [0,255])--> ACCEPT.
inline LlAutomaton digit_plus_automaton() {
  LlAutomaton m;
  m.states = {"A", "B", "ACCEPT"};
  m.start = "A";
  m.accept = "ACCEPT";
  m.transitions.push_back(ll_char("A", "B", '0', '9', 1));
  m.transitions.push_back(ll_char("B", "B", '0', '9', 1));
  m.transitions.push_back(ll_char("B", "ACCEPT", 0, 255, 0, Polarity::Exclusive));
  return m;
}

}  // namespace isl::test
