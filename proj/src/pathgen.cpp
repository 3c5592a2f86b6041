#include "isl/pathgen.hpp"

#include <algorithm>
#include <map>

#include <json.hpp>

#include "isl/solver.hpp"

namespace isl {

namespace {

using ordered_json = nlohmann::ordered_json;

std::int64_t apply_sym_op(SymOp op, std::int64_t a, std::int64_t b, bool& ok) {
  switch (op) {
    case SymOp::Add: return wrap_add(a, b);
    case SymOp::Sub: return wrap_sub(a, b);
    case SymOp::Mul: return wrap_mul(a, b);
    case SymOp::Div: {
      auto q = wrap_div(a, b);
      if (!q) { ok = false; return 0; }
      return *q;
    }
    case SymOp::Mod: {
      auto r = wrap_mod(a, b);
      if (!r) { ok = false; return 0; }
      return *r;
    }
  }
  ok = false;
  return 0;
}

const char* sym_op_name(SymOp op) {
  switch (op) {
    case SymOp::Add: return "add";
    case SymOp::Sub: return "sub";
    case SymOp::Mul: return "mul";
    case SymOp::Div: return "div";
    case SymOp::Mod: return "mod";
  }
  return "?";
}

std::optional<SymOp> sym_op_from_name(std::string_view n) {
  if (n == "add") return SymOp::Add;
  if (n == "sub") return SymOp::Sub;
  if (n == "mul") return SymOp::Mul;
  if (n == "div") return SymOp::Div;
  if (n == "mod") return SymOp::Mod;
  return std::nullopt;
}

}  // namespace

SymExprPtr SymExpr::constant(std::int64_t v) {
  auto e = std::make_shared<SymExpr>();
  e->kind = Kind::Const;
  e->value = v;
  return e;
}

SymExprPtr SymExpr::input(std::int64_t pos) {
  auto e = std::make_shared<SymExpr>();
  e->kind = Kind::Input;
  e->pos = pos;
  return e;
}

SymExprPtr SymExpr::binop(SymOp op, SymExprPtr l, SymExprPtr r) {
  if (l->kind == Kind::Const && r->kind == Kind::Const) {
    bool ok = true;
    std::int64_t v = apply_sym_op(op, l->value, r->value, ok);
    if (ok) return constant(v);
  }
  auto e = std::make_shared<SymExpr>();
  e->kind = Kind::BinOp;
  e->op = op;
  e->left = std::move(l);
  e->right = std::move(r);
  return e;
}

std::optional<std::int64_t> eval_expr(const SymExpr& e, std::string_view input) {
  switch (e.kind) {
    case SymExpr::Kind::Const:
      return e.value;
    case SymExpr::Kind::Input:
      if (e.pos < 0 || static_cast<std::size_t>(e.pos) >= input.size()) return std::nullopt;
      return static_cast<std::int64_t>(
          static_cast<std::uint8_t>(input[static_cast<std::size_t>(e.pos)]));
    case SymExpr::Kind::BinOp: {
      auto l = eval_expr(*e.left, input);
      auto r = eval_expr(*e.right, input);
      if (!l || !r) return std::nullopt;
      bool ok = true;
      std::int64_t v = apply_sym_op(e.op, *l, *r, ok);
      if (!ok) return std::nullopt;
      return v;
    }
  }
  return std::nullopt;
}

void collect_positions(const SymExpr& e, std::set<std::int64_t>& out) {
  switch (e.kind) {
    case SymExpr::Kind::Const:
      return;
    case SymExpr::Kind::Input:
      out.insert(e.pos);
      return;
    case SymExpr::Kind::BinOp:
      collect_positions(*e.left, out);
      collect_positions(*e.right, out);
      return;
  }
}

bool mentions_input(const SymExpr& e) {
  switch (e.kind) {
    case SymExpr::Kind::Const: return false;
    case SymExpr::Kind::Input: return true;
    case SymExpr::Kind::BinOp: return mentions_input(*e.left) || mentions_input(*e.right);
  }
  return false;
}

Constraint Constraint::char_in(std::int64_t pos, CharRange r) {
  Constraint c;
  c.kind = Kind::CharIn;
  c.pos = pos;
  c.range = r;
  return c;
}

Constraint Constraint::char_not_in(std::int64_t pos, CharRange r) {
  Constraint c;
  c.kind = Kind::CharNotIn;
  c.pos = pos;
  c.range = r;
  return c;
}

Constraint Constraint::reg_cmp(SymExprPtr lhs, CmpOp op, SymExprPtr rhs) {
  Constraint c;
  c.kind = Kind::RegCmp;
  c.lhs = std::move(lhs);
  c.rhs = std::move(rhs);
  c.op = op;
  return c;
}

bool eval_constraint(const Constraint& c, std::string_view input) {
  switch (c.kind) {
    case Constraint::Kind::CharIn:
    case Constraint::Kind::CharNotIn: {
      if (c.pos < 0 || static_cast<std::size_t>(c.pos) >= input.size()) return false;
      bool in = c.range.contains(static_cast<std::uint8_t>(input[static_cast<std::size_t>(c.pos)]));
      return c.kind == Constraint::Kind::CharIn ? in : !in;
    }
    case Constraint::Kind::RegCmp: {
      auto l = eval_expr(*c.lhs, input);
      auto r = eval_expr(*c.rhs, input);
      if (!l || !r) return false;
      return cmp_eval(c.op, *l, *r);
    }
  }
  return false;
}

SymState make_sym_state(const LlAutomaton& m) {
  SymState s;
  s.state = m.start;
  s.regs.assign(static_cast<std::size_t>(m.config.max_reg), SymExpr::constant(0));
  s.ip = 0;
  return s;
}

namespace {

// New expression for the command's destination register; Nop yields null.
// Division and modulo by a symbolic divisor append a "divisor differs from
// zero" side constraint; a constant zero divisor appends an unsatisfiable
// one, matching the interpreter's rejection of the branch.
SymExprPtr command_result_expr(const Command& c, const std::vector<SymExprPtr>& regs,
                               std::int64_t ip, std::vector<Constraint>& side,
                               bool& symbolic_divisor) {
  switch (c.op) {
    case Op::StoreVal: return SymExpr::constant(c.val);
    case Op::StoreCur: return SymExpr::input(ip);
    case Op::StoreAcc: return SymExpr::binop(SymOp::Add, regs[c.r1], SymExpr::input(ip));
    case Op::Add: return SymExpr::binop(SymOp::Add, regs[c.r1], regs[c.r2]);
    case Op::Sub: return SymExpr::binop(SymOp::Sub, regs[c.r1], regs[c.r2]);
    case Op::Mult: return SymExpr::binop(SymOp::Mul, regs[c.r1], regs[c.r2]);
    case Op::Div:
    case Op::Mod: {
      const SymExprPtr& divisor = regs[c.r2];
      if (divisor->kind == SymExpr::Kind::Const) {
        if (divisor->value == 0) {
          side.push_back(Constraint::reg_cmp(SymExpr::constant(0), CmpOp::Ne, SymExpr::constant(0)));
        }
      } else {
        symbolic_divisor = true;
        side.push_back(Constraint::reg_cmp(divisor, CmpOp::Ne, SymExpr::constant(0)));
      }
      return SymExpr::binop(c.op == Op::Div ? SymOp::Div : SymOp::Mod, regs[c.r1], divisor);
    }
    case Op::AddI: return SymExpr::binop(SymOp::Add, regs[c.r1], SymExpr::constant(c.val));
    case Op::MultI: return SymExpr::binop(SymOp::Mul, regs[c.r1], SymExpr::constant(c.val));
    case Op::Assign: return regs[c.r1];
    case Op::Increment: return SymExpr::binop(SymOp::Add, regs[c.res], SymExpr::constant(1));
    case Op::Decrement: return SymExpr::binop(SymOp::Sub, regs[c.res], SymExpr::constant(1));
    case Op::Nop: return nullptr;
    case Op::Hook: return nullptr;  // callers reject hooks beforehand
  }
  return nullptr;
}

}  // namespace

SymStep step_symbolic(SymState& state, const LlTransition& t) {
  SymStep out;
  if (t.src != state.state) {
    out.error = "wrong-source";
    return out;
  }
  if (t.command && t.command->op == Op::Hook) {
    out.error = "hook-unbound";
    return out;
  }
  if (t.reg_check) {
    const RegComparison& rc = *t.reg_check;
    SymExprPtr lhs = state.regs[rc.lhs];
    SymExprPtr rhs = rc.kind == RegComparison::Rhs::Const ? SymExpr::constant(rc.constant)
                                                          : state.regs[rc.reg];
    out.emitted.push_back(Constraint::reg_cmp(std::move(lhs), rc.op, std::move(rhs)));
  }
  if (t.char_check) {
    if (t.char_check->ranges.size() != 1) {
      out.error = "multi-range-char-check";
      out.emitted.clear();
      return out;
    }
    const CharRange& r = t.char_check->ranges[0];
    out.emitted.push_back(t.char_check->polarity == Polarity::Inclusive
                              ? Constraint::char_in(state.ip, r)
                              : Constraint::char_not_in(state.ip, r));
  }
  if (t.command && t.command->op != Op::Nop) {
    std::vector<Constraint> side;
    SymExprPtr result = command_result_expr(*t.command, state.regs, state.ip, side,
                                            out.symbolic_divisor);
    for (auto& c : side) out.emitted.push_back(std::move(c));
    if (result) state.regs[t.command->res] = std::move(result);
  }
  state.ip += t.move;
  state.state = t.dst;
  out.ok = true;
  return out;
}

namespace {

std::bitset<256> range_mask(CharRange r, bool complement) {
  std::bitset<256> m;
  for (int b = r.lo; b <= static_cast<int>(r.hi); ++b) m.set(static_cast<std::size_t>(b));
  return complement ? ~m : m;
}

struct DomainUndo {
  std::int64_t pos;
  bool existed;
  std::bitset<256> prev;
};

struct EnumFrame {
  int state = 0;
  std::size_t cursor = 0;
  // Undo bookkeeping for the step that entered this state.
  int taken = -1;
  std::size_t constraints_before = 0;
  std::size_t reg_cmps_before = 0;
  std::size_t domain_undo_before = 0;
  int changed_reg = -1;
  SymExprPtr prev_reg;
  std::int64_t prev_ip = 0;
};

struct Enumerator {
  const LlAutomaton& m;
  const EnumBounds& bounds;
  const std::function<bool(const PathReport&)>& sink;

  std::map<std::string, int> ids;
  std::vector<std::vector<int>> adjacency;
  int accept = -1;

  std::vector<int> path;
  std::vector<Constraint> constraints;
  std::vector<Constraint> reg_cmps;
  std::vector<SymExprPtr> regs;
  std::int64_t ip = 0;
  std::map<std::int64_t, std::bitset<256>> domains;
  std::vector<DomainUndo> domain_undo;
  std::vector<std::int64_t> edge_visits;

  EnumResult result;

  Enumerator(const LlAutomaton& automaton, const EnumBounds& b,
             const std::function<bool(const PathReport&)>& s)
      : m(automaton), bounds(b), sink(s) {
    for (const auto& st : m.states) ids.emplace(st, static_cast<int>(ids.size()));
    adjacency.resize(ids.size());
    for (std::size_t i = 0; i < m.transitions.size(); ++i) {
      adjacency[ids.at(m.transitions[i].src)].push_back(static_cast<int>(i));
    }
    accept = ids.at(m.accept);
    regs.assign(static_cast<std::size_t>(m.config.max_reg), SymExpr::constant(0));
    edge_visits.assign(m.transitions.size(), 0);
  }

  bool narrow_domain(std::int64_t pos, const std::bitset<256>& mask) {
    auto it = domains.find(pos);
    if (it == domains.end()) {
      domain_undo.push_back({pos, false, {}});
      auto& bits = domains[pos];
      bits.set();
      bits &= mask;
      return bits.any();
    }
    domain_undo.push_back({pos, true, it->second});
    it->second &= mask;
    return it->second.any();
  }

  void undo_domains(std::size_t mark) {
    while (domain_undo.size() > mark) {
      DomainUndo& u = domain_undo.back();
      if (u.existed) {
        domains[u.pos] = u.prev;
      } else {
        domains.erase(u.pos);
      }
      domain_undo.pop_back();
    }
  }

  // Appends one constraint; under prune it also maintains byte domains and
  // refutes register-constraint components. False means the branch is dead.
  bool absorb(const Constraint& c) {
    constraints.push_back(c);
    switch (c.kind) {
      case Constraint::Kind::CharIn:
        if (!bounds.prune) return true;
        return narrow_domain(c.pos, range_mask(c.range, false));
      case Constraint::Kind::CharNotIn:
        if (!bounds.prune) return true;
        return narrow_domain(c.pos, range_mask(c.range, true));
      case Constraint::Kind::RegCmp:
        if (!bounds.prune) return true;
        reg_cmps.push_back(c);
        return component_feasibility(reg_cmps, reg_cmps.size() - 1, domains) !=
               Feasibility::Infeasible;
    }
    return true;
  }

  // Components are verified when their last member lands; a later character
  // constraint on one of their positions may invalidate that verdict, in
  // which case the whole set is re-checked before delivery.
  bool feasible_at_emit() {
    if (!bounds.prune) return true;
    std::map<std::int64_t, std::size_t> last_char;
    std::vector<std::size_t> reg_indices;
    for (std::size_t i = 0; i < constraints.size(); ++i) {
      if (constraints[i].kind == Constraint::Kind::RegCmp) {
        reg_indices.push_back(i);
      } else {
        last_char[constraints[i].pos] = i;
      }
    }
    bool stale = false;
    for (std::size_t ri = 0; ri < reg_cmps.size() && !stale; ++ri) {
      std::set<std::int64_t> pos;
      collect_positions(*reg_cmps[ri].lhs, pos);
      collect_positions(*reg_cmps[ri].rhs, pos);
      for (std::int64_t p : pos) {
        auto it = last_char.find(p);
        if (it != last_char.end() && it->second > reg_indices[ri]) {
          stale = true;
          break;
        }
      }
    }
    if (!stale) return true;
    ConstraintSet cs;
    cs.items = constraints;
    return prune_check(cs) != Feasibility::Infeasible;
  }

  bool emit() {
    if (!feasible_at_emit()) return true;
    if (result.emitted == bounds.max_paths) {
      result.truncated = true;
      return false;  // stop: one more accepting path exists beyond the cap
    }
    PathReport report;
    report.transitions = path;
    report.constraints.items = constraints;
    report.final_ip = ip;
    report.sym_regs = regs;
    ++result.emitted;
    return sink(report);
  }

  void run() {
    std::vector<EnumFrame> stack;
    EnumFrame root;
    root.state = ids.at(m.start);
    stack.push_back(std::move(root));

    while (!stack.empty()) {
      EnumFrame& f = stack.back();

      if (f.state == accept && f.cursor == 0) {
        f.cursor = adjacency[f.state].size();  // accept has no outgoing edges
        if (!emit()) return;
      }

      bool advanced = false;
      const auto& adj = adjacency[f.state];
      while (f.cursor < adj.size()) {
        int ti = adj[f.cursor];
        ++f.cursor;
        const LlTransition& t = m.transitions[ti];
        if (static_cast<std::int64_t>(path.size()) >= bounds.max_path_len) continue;
        if (edge_visits[ti] >= bounds.max_edge_visits) continue;
        if (t.command && t.command->op == Op::Hook) continue;  // no symbolic model
        if (t.char_check && t.char_check->ranges.size() != 1) continue;

        EnumFrame next;
        next.taken = ti;
        next.constraints_before = constraints.size();
        next.reg_cmps_before = reg_cmps.size();
        next.domain_undo_before = domain_undo.size();
        next.prev_ip = ip;

        bool ok = true;
        if (t.reg_check) {
          const RegComparison& rc = *t.reg_check;
          SymExprPtr rhs = rc.kind == RegComparison::Rhs::Const ? SymExpr::constant(rc.constant)
                                                                : regs[rc.reg];
          ok = absorb(Constraint::reg_cmp(regs[rc.lhs], rc.op, std::move(rhs)));
        }
        if (ok && t.char_check) {
          const CharRange& r = t.char_check->ranges[0];
          ok = absorb(t.char_check->polarity == Polarity::Inclusive
                          ? Constraint::char_in(ip, r)
                          : Constraint::char_not_in(ip, r));
        }
        if (ok && t.command && t.command->op != Op::Nop) {
          std::vector<Constraint> side;
          bool symdiv = false;
          SymExprPtr value = command_result_expr(*t.command, regs, ip, side, symdiv);
          for (const Constraint& c : side) {
            if (!(ok = absorb(c))) break;
          }
          if (ok && value) {
            next.changed_reg = t.command->res;
            next.prev_reg = regs[next.changed_reg];
            regs[next.changed_reg] = std::move(value);
          }
        }
        if (!ok) {
          constraints.resize(next.constraints_before);
          reg_cmps.resize(next.reg_cmps_before);
          undo_domains(next.domain_undo_before);
          continue;
        }

        next.state = ids.at(t.dst);
        ip += t.move;
        ++edge_visits[ti];
        path.push_back(ti);
        stack.push_back(std::move(next));
        advanced = true;
        break;
      }

      if (advanced) continue;

      // Exhausted: undo the step that entered this frame and pop.
      EnumFrame dead = std::move(stack.back());
      stack.pop_back();
      if (dead.taken >= 0) {
        constraints.resize(dead.constraints_before);
        reg_cmps.resize(dead.reg_cmps_before);
        undo_domains(dead.domain_undo_before);
        if (dead.changed_reg >= 0) regs[dead.changed_reg] = std::move(dead.prev_reg);
        ip = dead.prev_ip;
        --edge_visits[dead.taken];
        path.pop_back();
      }
    }
  }
};

ordered_json expr_to_json(const SymExpr& e) {
  switch (e.kind) {
    case SymExpr::Kind::Const:
      return ordered_json{{"kind", "const"}, {"value", e.value}};
    case SymExpr::Kind::Input:
      return ordered_json{{"kind", "input"}, {"pos", e.pos}};
    case SymExpr::Kind::BinOp:
      return ordered_json{{"kind", "binop"},
                          {"op", sym_op_name(e.op)},
                          {"left", expr_to_json(*e.left)},
                          {"right", expr_to_json(*e.right)}};
  }
  return {};
}

ordered_json constraint_to_json(const Constraint& c) {
  switch (c.kind) {
    case Constraint::Kind::CharIn:
    case Constraint::Kind::CharNotIn:
      return ordered_json{{"kind", c.kind == Constraint::Kind::CharIn ? "char_in" : "char_not_in"},
                          {"pos", c.pos},
                          {"lo", c.range.lo},
                          {"hi", c.range.hi}};
    case Constraint::Kind::RegCmp:
      return ordered_json{{"kind", "reg_cmp"},
                          {"op", cmp_op_name(c.op)},
                          {"lhs", expr_to_json(*c.lhs)},
                          {"rhs", expr_to_json(*c.rhs)}};
  }
  return {};
}

SymExprPtr expr_from_json(const ordered_json& j) {
  if (!j.is_object() || !j.contains("kind") || !j["kind"].is_string()) return nullptr;
  std::string kind = j["kind"].get<std::string>();
  if (kind == "const") {
    if (!j.contains("value") || !j["value"].is_number_integer()) return nullptr;
    return SymExpr::constant(j["value"].get<std::int64_t>());
  }
  if (kind == "input") {
    if (!j.contains("pos") || !j["pos"].is_number_integer()) return nullptr;
    return SymExpr::input(j["pos"].get<std::int64_t>());
  }
  if (kind == "binop") {
    if (!j.contains("op") || !j["op"].is_string()) return nullptr;
    auto op = sym_op_from_name(j["op"].get<std::string>());
    if (!op || !j.contains("left") || !j.contains("right")) return nullptr;
    auto l = expr_from_json(j["left"]);
    auto r = expr_from_json(j["right"]);
    if (!l || !r) return nullptr;
    // Rebuild without folding so round trips stay structural.
    auto e = std::make_shared<SymExpr>();
    e->kind = SymExpr::Kind::BinOp;
    e->op = *op;
    e->left = std::move(l);
    e->right = std::move(r);
    return e;
  }
  return nullptr;
}

std::optional<Constraint> constraint_from_json(const ordered_json& j) {
  if (!j.is_object() || !j.contains("kind") || !j["kind"].is_string()) return std::nullopt;
  std::string kind = j["kind"].get<std::string>();
  if (kind == "char_in" || kind == "char_not_in") {
    if (!j.contains("pos") || !j.contains("lo") || !j.contains("hi")) return std::nullopt;
    std::int64_t lo = j["lo"].get<std::int64_t>(), hi = j["hi"].get<std::int64_t>();
    if (lo < 0 || lo > 255 || hi < 0 || hi > 255) return std::nullopt;
    CharRange r{static_cast<std::uint8_t>(lo), static_cast<std::uint8_t>(hi)};
    return kind == "char_in" ? Constraint::char_in(j["pos"].get<std::int64_t>(), r)
                             : Constraint::char_not_in(j["pos"].get<std::int64_t>(), r);
  }
  if (kind == "reg_cmp") {
    if (!j.contains("op") || !j["op"].is_string()) return std::nullopt;
    auto op = cmp_op_from_name(j["op"].get<std::string>());
    if (!op || !j.contains("lhs") || !j.contains("rhs")) return std::nullopt;
    auto l = expr_from_json(j["lhs"]);
    auto r = expr_from_json(j["rhs"]);
    if (!l || !r) return std::nullopt;
    return Constraint::reg_cmp(std::move(l), *op, std::move(r));
  }
  return std::nullopt;
}

}  // namespace

EnumResult enumerate_paths(const LlAutomaton& m, const EnumBounds& bounds,
                           const std::function<bool(const PathReport&)>& sink) {
  Enumerator e(m, bounds, sink);
  e.run();
  return e.result;
}

std::string constraints_to_json(const ConstraintSet& cs) {
  ordered_json arr = ordered_json::array();
  for (const Constraint& c : cs.items) arr.push_back(constraint_to_json(c));
  return arr.dump();
}

std::optional<ConstraintSet> constraints_from_json(std::string_view json_text) {
  ordered_json j = ordered_json::parse(json_text, nullptr, false);
  if (j.is_discarded() || !j.is_array()) return std::nullopt;
  ConstraintSet cs;
  for (const auto& cj : j) {
    auto c = constraint_from_json(cj);
    if (!c) return std::nullopt;
    cs.items.push_back(*c);
  }
  return cs;
}

std::string path_report_jsonl(const PathReport& report) {
  ordered_json j;
  j["transitions"] = report.transitions;
  ordered_json arr = ordered_json::array();
  for (const Constraint& c : report.constraints.items) arr.push_back(constraint_to_json(c));
  j["constraints"] = arr;
  j["final_ip"] = report.final_ip;
  return j.dump();
}

}  // namespace isl
