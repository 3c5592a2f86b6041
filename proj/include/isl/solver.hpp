// Decision procedures over constraint sets: per-position byte domains, a
// sound quick feasibility check, witness synthesis, and SMT-LIB export.

#pragma once

#include <bitset>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "isl/pathgen.hpp"

namespace isl {

struct CharDomain {
  std::int64_t pos = 0;
  std::bitset<256> allowed;
};

// Intersection of all character constraints per mentioned position (input
// positions referenced only through register expressions stay unrestricted).
// nullopt when some position's domain is empty.
std::optional<std::vector<CharDomain>> char_domains(const ConstraintSet& cs);

enum class Feasibility { Feasible, Infeasible, Unknown };

// Never misreports: Infeasible sets are truly unsatisfiable and Feasible
// sets truly satisfiable. Unknown whenever a register constraint mentions
// input bytes.
Feasibility quick_feasible(const ConstraintSet& cs);

// Stronger sound refutation used for enumeration pruning: additionally
// groups register constraints into components connected by shared input
// positions and refutes each component by bounded exhaustive search.
Feasibility prune_check(const ConstraintSet& cs);

using ByteDomains = std::map<std::int64_t, std::bitset<256>>;

// Decides the register-constraint component containing reg_cmps[seed],
// where membership is the transitive closure of shared input positions.
// Exhaustive over the component's domain product; Unknown past the limit.
Feasibility component_feasibility(const std::vector<Constraint>& reg_cmps, std::size_t seed,
                                  const ByteDomains& domains);

constexpr std::uint64_t kExhaustiveLimit = 1u << 16;

struct SynthOptions {
  std::uint64_t budget = 65536;  // random attempts for oversized components
  std::uint64_t seed = 0;
  bool random_fill = false;      // sample free bytes instead of taking the smallest
};

enum class SynthStatus { Witness, Exhausted, Infeasible };

struct SynthResult {
  SynthStatus status = SynthStatus::Exhausted;
  std::string input;  // witness bytes; length = max constrained position + 1
};

// Deterministic witness search: register-constraint components with a small
// domain product are enumerated exhaustively, larger ones sampled under the
// budget; every returned witness is re-verified against all constraints.
SynthResult synthesize(const ConstraintSet& cs, const SynthOptions& options = {});

// SMT-LIB v2 script: one integer constant per mentioned input position,
// bounded to 0..255, one assert per constraint, then (check-sat) and a
// value query. Byte-for-byte deterministic.
std::string export_smtlib(const ConstraintSet& cs);

}  // namespace isl
