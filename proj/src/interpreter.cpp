#include "isl/interpreter.hpp"

#include <map>
#include <optional>

namespace isl {

namespace {

struct StateIndex {
  std::map<std::string, int> ids;
  std::vector<std::vector<int>> adjacency;  // state id -> transition indices
  int start = -1;
  int accept = -1;

  template <typename Automaton>
  explicit StateIndex(const Automaton& a) {
    for (const auto& s : a.states) ids.emplace(s, static_cast<int>(ids.size()));
    adjacency.resize(ids.size());
    for (std::size_t i = 0; i < a.transitions.size(); ++i) {
      adjacency[ids.at(a.transitions[i].src)].push_back(static_cast<int>(i));
    }
    start = ids.at(a.start);
    accept = ids.at(a.accept);
  }
};

std::optional<std::uint8_t> byte_at(std::string_view input, std::int64_t ip) {
  if (ip < 0 || static_cast<std::size_t>(ip) >= input.size()) return std::nullopt;
  return static_cast<std::uint8_t>(input[static_cast<std::size_t>(ip)]);
}

struct Frame {
  int state;
  std::int64_t ip;
  RegisterFile regs;
  std::size_t cursor = 0;  // next (transition, alternative) to try
  std::size_t alt = 0;
  int taken = -1;          // transition that produced this frame
};

template <typename Automaton, typename TryStep>
Verdict search(const Automaton& m, const StateIndex& index, TryStep&& try_step) {
  std::int64_t budget = m.config.step_limit;
  std::vector<Frame> stack;
  stack.push_back(Frame{index.start, 0, make_registers(m.config)});

  while (!stack.empty()) {
    Frame& f = stack.back();
    if (f.state == index.accept) {
      Verdict v;
      v.kind = VerdictKind::Accept;
      for (const Frame& fr : stack) {
        if (fr.taken >= 0) v.trace.push_back(fr.taken);
      }
      return v;
    }

    const auto& adj = index.adjacency[f.state];
    bool advanced = false;
    while (f.cursor < adj.size()) {
      int ti = adj[f.cursor];
      auto next = try_step(ti, f.alt, f.regs, f.ip);
      if (next.moved_past_alternatives) {
        f.cursor++;
        f.alt = 0;
        continue;
      }
      f.alt++;
      if (!next.frame) continue;
      if (budget == 0) return Verdict{VerdictKind::BudgetExceeded, {}};
      --budget;
      next.frame->taken = ti;
      // Deliberately invalidates f; push after all reads.
      stack.push_back(std::move(*next.frame));
      advanced = true;
      break;
    }
    if (!advanced && stack.back().cursor >= adj.size()) stack.pop_back();
  }
  return Verdict{VerdictKind::Reject, {}};
}

struct StepResult {
  std::optional<Frame> frame;
  bool moved_past_alternatives = false;
};

}  // namespace

const char* verdict_name(VerdictKind v) {
  switch (v) {
    case VerdictKind::Accept: return "accept";
    case VerdictKind::Reject: return "reject";
    case VerdictKind::BudgetExceeded: return "budget-exceeded";
  }
  return "?";
}

Verdict interpret_ll(const LlAutomaton& m, std::string_view input, const HookRegistry* hooks) {
  StateIndex index(m);
  auto try_step = [&](int ti, std::size_t alt, const RegisterFile& regs,
                      std::int64_t ip) -> StepResult {
    if (alt > 0) return {std::nullopt, true};  // one alternative per transition
    const LlTransition& t = m.transitions[ti];
    auto cur = byte_at(input, ip);
    if (!eval_guard(t.reg_check, t.char_check, regs, cur)) return {std::nullopt, false};
    RegisterFile next_regs = regs;
    if (t.command) {
      CommandResult r = apply_command(*t.command, regs, cur, hooks);
      if (std::holds_alternative<CmdError>(r)) return {std::nullopt, false};
      next_regs = std::move(std::get<RegisterFile>(r));
    }
    Frame frame{index.ids.at(t.dst), ip + t.move, std::move(next_regs)};
    return {std::move(frame), false};
  };
  return search(m, index, try_step);
}

Verdict interpret_hl(const HlAutomaton& m, std::string_view input, const HookRegistry* hooks) {
  StateIndex index(m);
  auto try_step = [&](int ti, std::size_t alt, const RegisterFile& regs,
                      std::int64_t ip) -> StepResult {
    const HlTransition& t = m.transitions[ti];

    std::size_t alternatives = 1;
    if (t.theta.kind == HlTheta::Kind::Ranges) alternatives = t.theta.ranges.size();
    if (t.theta.kind == HlTheta::Kind::Strings) alternatives = t.theta.strings.size();
    if (alt >= alternatives) return {std::nullopt, true};

    for (const RegComparison& rc : t.gamma) {
      if (!eval_guard(rc, std::nullopt, regs, std::nullopt)) return {std::nullopt, true};
    }

    // Theta; commands read the byte at the post-match position for strings
    // and the unmoved position for ranges.
    std::int64_t cmd_ip = ip;
    std::int64_t next_ip = ip + t.move;
    if (t.theta.kind == HlTheta::Kind::Ranges) {
      CharCheck one{t.theta.polarity, {t.theta.ranges[alt]}};
      if (!eval_guard(std::nullopt, one, regs, byte_at(input, ip))) return {std::nullopt, false};
    } else if (t.theta.kind == HlTheta::Kind::Strings) {
      const std::string& s = t.theta.strings[alt];
      if (static_cast<std::size_t>(ip) + s.size() > input.size() ||
          input.substr(static_cast<std::size_t>(ip), s.size()) != s) {
        return {std::nullopt, false};
      }
      cmd_ip = ip + static_cast<std::int64_t>(s.size());
      next_ip = cmd_ip;  // string match consumes its length; move is ignored
    }

    RegisterFile next_regs = regs;
    for (const Command& c : t.phi) {
      CommandResult r = apply_command(c, next_regs, byte_at(input, cmd_ip), hooks);
      if (std::holds_alternative<CmdError>(r)) return {std::nullopt, false};
      next_regs = std::move(std::get<RegisterFile>(r));
    }
    Frame frame{index.ids.at(t.dst), next_ip, std::move(next_regs)};
    return {std::move(frame), false};
  };
  return search(m, index, try_step);
}

}  // namespace isl
