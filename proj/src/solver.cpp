#include "isl/solver.hpp"

#include <algorithm>
#include <random>
#include <sstream>

namespace isl {

namespace {

std::bitset<256> full_domain() {
  std::bitset<256> b;
  b.set();
  return b;
}

void positions_of(const Constraint& c, std::set<std::int64_t>& out) {
  if (c.kind == Constraint::Kind::RegCmp) {
    collect_positions(*c.lhs, out);
    collect_positions(*c.rhs, out);
  } else {
    out.insert(c.pos);
  }
}

ByteDomains build_domains(const ConstraintSet& cs, bool& empty_domain) {
  ByteDomains domains;
  empty_domain = false;
  for (const Constraint& c : cs.items) {
    std::set<std::int64_t> mentioned;
    positions_of(c, mentioned);
    for (std::int64_t p : mentioned) {
      if (!domains.count(p)) domains[p] = full_domain();
    }
    if (c.kind == Constraint::Kind::CharIn || c.kind == Constraint::Kind::CharNotIn) {
      std::bitset<256> mask;
      for (int b = c.range.lo; b <= static_cast<int>(c.range.hi); ++b)
        mask.set(static_cast<std::size_t>(b));
      if (c.kind == Constraint::Kind::CharNotIn) mask = ~mask;
      domains[c.pos] &= mask;
      if (domains[c.pos].none()) empty_domain = true;
    }
  }
  return domains;
}

std::vector<std::uint8_t> allowed_bytes(const std::bitset<256>& d) {
  std::vector<std::uint8_t> out;
  for (int b = 0; b < 256; ++b) {
    if (d.test(static_cast<std::size_t>(b))) out.push_back(static_cast<std::uint8_t>(b));
  }
  return out;
}

struct Component {
  std::vector<std::size_t> members;       // indices into the reg-cmp list
  std::vector<std::int64_t> positions;    // sorted union of mentioned positions
};

// Gathers the component around `seed` by transitively chasing shared
// positions among the register constraints.
Component gather_component(const std::vector<Constraint>& reg_cmps, std::size_t seed) {
  Component comp;
  std::set<std::int64_t> pos;
  positions_of(reg_cmps[seed], pos);
  std::vector<bool> used(reg_cmps.size(), false);
  used[seed] = true;
  comp.members.push_back(seed);
  bool grew = true;
  while (grew) {
    grew = false;
    for (std::size_t i = 0; i < reg_cmps.size(); ++i) {
      if (used[i]) continue;
      std::set<std::int64_t> mine;
      positions_of(reg_cmps[i], mine);
      bool overlaps = std::any_of(mine.begin(), mine.end(),
                                  [&](std::int64_t p) { return pos.count(p) > 0; });
      if (overlaps) {
        used[i] = true;
        comp.members.push_back(i);
        pos.insert(mine.begin(), mine.end());
        grew = true;
      }
    }
  }
  std::sort(comp.members.begin(), comp.members.end());
  comp.positions.assign(pos.begin(), pos.end());
  return comp;
}

// Exhaustive satisfiability of one component over the domain product. The
// odometer mutates a dense byte buffer so each step touches one position.
Feasibility decide_component(const std::vector<Constraint>& reg_cmps, const Component& comp,
                             const ByteDomains& domains,
                             std::vector<std::uint8_t>* witness_out = nullptr) {
  std::vector<std::vector<std::uint8_t>> values;
  std::uint64_t product = 1;
  for (std::int64_t p : comp.positions) {
    auto it = domains.find(p);
    std::vector<std::uint8_t> vals =
        it == domains.end() ? allowed_bytes(full_domain()) : allowed_bytes(it->second);
    if (vals.empty()) return Feasibility::Infeasible;
    product *= vals.size();
    if (product > kExhaustiveLimit) return Feasibility::Unknown;
    values.push_back(std::move(vals));
  }

  std::int64_t max_pos = comp.positions.empty() ? -1 : comp.positions.back();
  std::string buffer(static_cast<std::size_t>(max_pos + 1), '\0');
  std::vector<std::size_t> odometer(comp.positions.size(), 0);
  for (std::size_t k = 0; k < comp.positions.size(); ++k) {
    buffer[static_cast<std::size_t>(comp.positions[k])] = static_cast<char>(values[k][0]);
  }

  while (true) {
    bool sat = std::all_of(comp.members.begin(), comp.members.end(), [&](std::size_t i) {
      return eval_constraint(reg_cmps[i], buffer);
    });
    if (sat) {
      if (witness_out) {
        witness_out->assign(comp.positions.size(), 0);
        for (std::size_t k = 0; k < comp.positions.size(); ++k) {
          (*witness_out)[k] = static_cast<std::uint8_t>(
              buffer[static_cast<std::size_t>(comp.positions[k])]);
        }
      }
      return Feasibility::Feasible;
    }
    std::size_t k = 0;
    while (k < odometer.size()) {
      if (++odometer[k] < values[k].size()) {
        buffer[static_cast<std::size_t>(comp.positions[k])] =
            static_cast<char>(values[k][odometer[k]]);
        break;
      }
      odometer[k] = 0;
      buffer[static_cast<std::size_t>(comp.positions[k])] = static_cast<char>(values[k][0]);
      ++k;
    }
    if (k == odometer.size()) return Feasibility::Infeasible;
  }
}

std::vector<Constraint> reg_cmps_of(const ConstraintSet& cs) {
  std::vector<Constraint> out;
  for (const Constraint& c : cs.items) {
    if (c.kind == Constraint::Kind::RegCmp) out.push_back(c);
  }
  return out;
}

}  // namespace

std::optional<std::vector<CharDomain>> char_domains(const ConstraintSet& cs) {
  bool empty_domain = false;
  ByteDomains domains = build_domains(cs, empty_domain);
  if (empty_domain) return std::nullopt;
  std::vector<CharDomain> out;
  out.reserve(domains.size());
  for (const auto& [pos, bits] : domains) out.push_back(CharDomain{pos, bits});
  return out;
}

Feasibility quick_feasible(const ConstraintSet& cs) {
  bool empty_domain = false;
  build_domains(cs, empty_domain);
  if (empty_domain) return Feasibility::Infeasible;
  bool symbolic = false;
  for (const Constraint& c : cs.items) {
    if (c.kind != Constraint::Kind::RegCmp) continue;
    if (mentions_input(*c.lhs) || mentions_input(*c.rhs)) {
      symbolic = true;
      continue;
    }
    if (!eval_constraint(c, std::string_view{})) return Feasibility::Infeasible;
  }
  return symbolic ? Feasibility::Unknown : Feasibility::Feasible;
}

Feasibility component_feasibility(const std::vector<Constraint>& reg_cmps, std::size_t seed,
                                  const ByteDomains& domains) {
  Component comp = gather_component(reg_cmps, seed);
  return decide_component(reg_cmps, comp, domains);
}

Feasibility prune_check(const ConstraintSet& cs) {
  bool empty_domain = false;
  ByteDomains domains = build_domains(cs, empty_domain);
  if (empty_domain) return Feasibility::Infeasible;

  std::vector<Constraint> reg_cmps = reg_cmps_of(cs);
  bool unknown = false;
  std::vector<bool> seen(reg_cmps.size(), false);
  for (std::size_t i = 0; i < reg_cmps.size(); ++i) {
    if (seen[i]) continue;
    Component comp = gather_component(reg_cmps, i);
    for (std::size_t member : comp.members) seen[member] = true;
    switch (decide_component(reg_cmps, comp, domains)) {
      case Feasibility::Infeasible:
        return Feasibility::Infeasible;
      case Feasibility::Unknown:
        unknown = true;
        break;
      case Feasibility::Feasible:
        break;
    }
  }
  return unknown ? Feasibility::Unknown : Feasibility::Feasible;
}

SynthResult synthesize(const ConstraintSet& cs, const SynthOptions& options) {
  SynthResult out;
  bool empty_domain = false;
  ByteDomains domains = build_domains(cs, empty_domain);
  if (empty_domain) {
    out.status = SynthStatus::Infeasible;
    return out;
  }

  std::int64_t max_pos = domains.empty() ? -1 : domains.rbegin()->first;
  std::string witness(static_cast<std::size_t>(max_pos + 1), '\0');
  std::mt19937_64 rng(options.seed);

  // Every byte starts at its smallest allowed value (or a sampled one).
  for (std::size_t p = 0; p < witness.size(); ++p) {
    auto it = domains.find(static_cast<std::int64_t>(p));
    std::bitset<256> d = it == domains.end() ? full_domain() : it->second;
    std::vector<std::uint8_t> vals = allowed_bytes(d);
    witness[p] = static_cast<char>(
        options.random_fill ? vals[rng() % vals.size()] : vals.front());
  }

  std::vector<Constraint> reg_cmps = reg_cmps_of(cs);
  std::vector<bool> seen(reg_cmps.size(), false);
  for (std::size_t i = 0; i < reg_cmps.size(); ++i) {
    if (seen[i]) continue;
    Component comp = gather_component(reg_cmps, i);
    for (std::size_t member : comp.members) seen[member] = true;

    std::vector<std::uint8_t> assignment;
    Feasibility verdict = decide_component(reg_cmps, comp, domains, &assignment);
    if (verdict == Feasibility::Infeasible) {
      out.status = SynthStatus::Infeasible;
      return out;
    }
    if (verdict == Feasibility::Feasible) {
      for (std::size_t k = 0; k < comp.positions.size(); ++k) {
        witness[static_cast<std::size_t>(comp.positions[k])] = static_cast<char>(assignment[k]);
      }
      continue;
    }

    // Domain product too large to enumerate: sample under the budget.
    std::vector<std::vector<std::uint8_t>> values;
    for (std::int64_t p : comp.positions) {
      auto it = domains.find(p);
      values.push_back(allowed_bytes(it == domains.end() ? full_domain() : it->second));
    }
    bool found = false;
    for (std::uint64_t attempt = 0; attempt < options.budget && !found; ++attempt) {
      for (std::size_t k = 0; k < comp.positions.size(); ++k) {
        witness[static_cast<std::size_t>(comp.positions[k])] =
            static_cast<char>(values[k][rng() % values[k].size()]);
      }
      found = std::all_of(comp.members.begin(), comp.members.end(), [&](std::size_t m) {
        return eval_constraint(reg_cmps[m], witness);
      });
    }
    if (!found) {
      out.status = SynthStatus::Exhausted;
      return out;
    }
  }

  for (const Constraint& c : cs.items) {
    if (!eval_constraint(c, witness)) {
      out.status = SynthStatus::Exhausted;  // inconclusive; never misreport
      return out;
    }
  }
  out.status = SynthStatus::Witness;
  out.input = std::move(witness);
  return out;
}

namespace {

void expr_to_smt(const SymExpr& e, std::ostringstream& os) {
  switch (e.kind) {
    case SymExpr::Kind::Const:
      if (e.value < 0) {
        os << "(- " << static_cast<std::uint64_t>(-(e.value + 1)) + 1 << ")";
      } else {
        os << e.value;
      }
      return;
    case SymExpr::Kind::Input:
      os << "b" << e.pos;
      return;
    case SymExpr::Kind::BinOp: {
      const char* op = "+";
      switch (e.op) {
        case SymOp::Add: op = "+"; break;
        case SymOp::Sub: op = "-"; break;
        case SymOp::Mul: op = "*"; break;
        case SymOp::Div: op = "div"; break;
        case SymOp::Mod: op = "mod"; break;
      }
      os << "(" << op << " ";
      expr_to_smt(*e.left, os);
      os << " ";
      expr_to_smt(*e.right, os);
      os << ")";
      return;
    }
  }
}

}  // namespace

std::string export_smtlib(const ConstraintSet& cs) {
  std::set<std::int64_t> positions;
  for (const Constraint& c : cs.items) positions_of(c, positions);

  std::ostringstream os;
  os << "(set-logic QF_NIA)\n";
  os << "; input bytes as integers; div and mod below use SMT-LIB semantics\n";
  os << "; while the machine truncates quotients toward zero\n";
  for (std::int64_t p : positions) {
    os << "(declare-const b" << p << " Int)\n";
  }
  for (std::int64_t p : positions) {
    os << "(assert (and (>= b" << p << " 0) (<= b" << p << " 255)))\n";
  }
  for (const Constraint& c : cs.items) {
    switch (c.kind) {
      case Constraint::Kind::CharIn:
        os << "(assert (and (>= b" << c.pos << " " << static_cast<int>(c.range.lo) << ") (<= b"
           << c.pos << " " << static_cast<int>(c.range.hi) << ")))\n";
        break;
      case Constraint::Kind::CharNotIn:
        os << "(assert (or (< b" << c.pos << " " << static_cast<int>(c.range.lo) << ") (> b"
           << c.pos << " " << static_cast<int>(c.range.hi) << ")))\n";
        break;
      case Constraint::Kind::RegCmp: {
        std::ostringstream lhs, rhs;
        expr_to_smt(*c.lhs, lhs);
        expr_to_smt(*c.rhs, rhs);
        const char* rel = "=";
        bool negate = false;
        switch (c.op) {
          case CmpOp::Eq: rel = "="; break;
          case CmpOp::Ne: rel = "="; negate = true; break;
          case CmpOp::Lt: rel = "<"; break;
          case CmpOp::Le: rel = "<="; break;
          case CmpOp::Gt: rel = ">"; break;
          case CmpOp::Ge: rel = ">="; break;
        }
        if (negate) {
          os << "(assert (not (" << rel << " " << lhs.str() << " " << rhs.str() << ")))\n";
        } else {
          os << "(assert (" << rel << " " << lhs.str() << " " << rhs.str() << "))\n";
        }
        break;
      }
    }
  }
  os << "(check-sat)\n";
  if (!positions.empty()) {
    os << "(get-value (";
    bool first = true;
    for (std::int64_t p : positions) {
      if (!first) os << " ";
      os << "b" << p;
      first = false;
    }
    os << "))\n";
  }
  return os.str();
}

}  // namespace isl
