#include <doctest.h>

#include <random>

#include "helpers.hpp"
#include "isl/compiler.hpp"
#include "isl/interpreter.hpp"
#include "isl/pathgen.hpp"
#include "isl/solver.hpp"

using namespace isl;
using isl::test::digit_plus_automaton;
using isl::test::ll_char;
using isl::test::ll_edge;

TEST_CASE("digit runs accept only at end of input") {
  LlAutomaton m = digit_plus_automaton();
  CHECK(interpret_ll(m, "123").kind == VerdictKind::Accept);
  CHECK(interpret_ll(m, "").kind == VerdictKind::Reject);
  CHECK(interpret_ll(m, "12a").kind == VerdictKind::Reject);
  CHECK(interpret_ll(m, "7").kind == VerdictKind::Accept);
}

TEST_CASE("a zero-move loop exhausts the budget") {
  LlAutomaton m;
  m.states = {"A", "ACCEPT"};
  m.start = "A";
  m.accept = "ACCEPT";
  m.transitions.push_back(ll_edge("A", "A", 0));
  m.config.step_limit = 10;
  CHECK(interpret_ll(m, "anything").kind == VerdictKind::BudgetExceeded);
}

TEST_CASE("accept traces replay") {
  LlAutomaton m = isl::test::compile_bundled("qsort");
  Verdict v = interpret_ll(m, "12 3 456\n");
  REQUIRE(v.kind == VerdictKind::Accept);

  // Re-drive the trace through the single-step semantics.
  std::map<std::string, int> ids;
  RegisterFile regs = make_registers(m.config);
  std::string state = m.start;
  std::int64_t ip = 0;
  std::string input = "12 3 456\n";
  for (int ti : v.trace) {
    const LlTransition& t = m.transitions[ti];
    REQUIRE(t.src == state);
    std::optional<std::uint8_t> cur;
    if (static_cast<std::size_t>(ip) < input.size()) {
      cur = static_cast<std::uint8_t>(input[ip]);
    }
    REQUIRE(eval_guard(t.reg_check, t.char_check, regs, cur));
    if (t.command) {
      CommandResult r = apply_command(*t.command, regs, cur);
      REQUIRE(std::holds_alternative<RegisterFile>(r));
      regs = std::get<RegisterFile>(r);
    }
    ip += t.move;
    state = t.dst;
  }
  CHECK(state == m.accept);
}

TEST_CASE("acceptance is monotone in the step budget") {
  LlAutomaton m = isl::test::compile_bundled("qsort");
  std::string input = "1 2 3\n";
  std::optional<std::int64_t> accepted_at;
  for (std::int64_t budget = 1; budget <= 64; ++budget) {
    m.config.step_limit = budget;
    Verdict v = interpret_ll(m, input);
    if (v.kind == VerdictKind::Accept) {
      if (!accepted_at) accepted_at = budget;
    } else if (accepted_at) {
      FAIL_CHECK("accepted at " << *accepted_at << " but not at " << budget);
    }
  }
  CHECK(accepted_at.has_value());
}

TEST_CASE("trailing input is permitted") {
  LlAutomaton m = isl::test::compile_bundled("keywords");
  CHECK(interpret_ll(m, "pushx").kind == VerdictKind::Accept);
}

TEST_CASE("high-level keyword matching") {
  HlAutomaton hl = isl::test::load_bundled("keywords");
  CHECK(interpret_hl(hl, "pull").kind == VerdictKind::Accept);
  CHECK(interpret_hl(hl, "pus").kind == VerdictKind::Reject);
  CHECK(interpret_hl(hl, "commit").kind == VerdictKind::Accept);
  CHECK(interpret_hl(hl, "").kind == VerdictKind::Reject);
}

TEST_CASE("registers start at zero") {
  HlAutomaton hl;
  hl.states = {"A", "ACCEPT"};
  hl.start = "A";
  hl.accept = "ACCEPT";
  HlTransition t;
  t.src = "A";
  t.dst = "ACCEPT";
  t.gamma.push_back(RegComparison::with_const(1, CmpOp::Eq, 0));
  hl.transitions.push_back(t);
  CHECK(interpret_hl(hl, "").kind == VerdictKind::Accept);
}

TEST_CASE("high-level strings consume their own length") {
  HlAutomaton hl;
  hl.states = {"A", "B", "ACCEPT"};
  hl.start = "A";
  hl.accept = "ACCEPT";
  HlTransition first;
  first.src = "A";
  first.dst = "B";
  first.theta = HlTheta::of_strings({"ab", "wxyz"});
  first.move = 7;  // ignored for string sets
  hl.transitions.push_back(first);
  HlTransition second;
  second.src = "B";
  second.dst = "ACCEPT";
  second.theta = HlTheta::of_ranges(Polarity::Inclusive, {{'!', '!'}});
  hl.transitions.push_back(second);

  CHECK(interpret_hl(hl, "ab!").kind == VerdictKind::Accept);
  CHECK(interpret_hl(hl, "wxyz!").kind == VerdictKind::Accept);
  CHECK(interpret_hl(hl, "ab?").kind == VerdictKind::Reject);
  CHECK(interpret_hl(hl, "abx!").kind == VerdictKind::Reject);
}

TEST_CASE("commands after a string match read the next byte") {
  HlAutomaton hl;
  hl.states = {"A", "B", "ACCEPT"};
  hl.start = "A";
  hl.accept = "ACCEPT";
  HlTransition first;
  first.src = "A";
  first.dst = "B";
  first.theta = HlTheta::of_strings({"ok"});
  Command store;
  store.op = Op::StoreCur;
  store.res = 1;
  first.phi.push_back(store);
  hl.transitions.push_back(first);
  HlTransition second;
  second.src = "B";
  second.dst = "ACCEPT";
  second.gamma.push_back(RegComparison::with_const(1, CmpOp::Eq, '!'));
  hl.transitions.push_back(second);

  // The stored byte is the one after "ok", matching the compiled semantics.
  CHECK(interpret_hl(hl, "ok!").kind == VerdictKind::Accept);
  CHECK(interpret_hl(hl, "ok?").kind == VerdictKind::Reject);
  LlAutomaton ll = *compile(hl).automaton;
  CHECK(interpret_ll(ll, "ok!").kind == VerdictKind::Accept);
  CHECK(interpret_ll(ll, "ok?").kind == VerdictKind::Reject);
}

TEST_CASE("failed commands reject the branch") {
  LlAutomaton m;
  m.states = {"A", "ACCEPT"};
  m.start = "A";
  m.accept = "ACCEPT";
  LlTransition t = ll_edge("A", "ACCEPT");
  Command div;
  div.op = Op::Div;
  div.res = 1;
  div.r1 = 1;
  div.r2 = 2;  // register 2 holds zero initially
  t.command = div;
  m.transitions.push_back(t);
  CHECK(interpret_ll(m, "x").kind == VerdictKind::Reject);

  // Unbound hooks behave the same way.
  m.transitions[0].command->op = Op::Hook;
  m.transitions[0].command->hook = "f";
  CHECK(interpret_ll(m, "x").kind == VerdictKind::Reject);
  HookRegistry hooks;
  hooks["f"] = [](const RegisterFile& r, std::optional<std::uint8_t>) { return r; };
  CHECK(interpret_ll(m, "x", &hooks).kind == VerdictKind::Accept);
}

TEST_CASE("bundled tot_info accepts a synthesized sample") {
  LlAutomaton m = isl::test::compile_bundled("tot_info");
  std::optional<std::string> sample;
  EnumBounds bounds{4096, 1, 4096, true};
  enumerate_paths(m, bounds, [&](const PathReport& report) {
    SynthResult synth = synthesize(report.constraints);
    if (synth.status == SynthStatus::Witness) sample = synth.input;
    return false;
  });
  REQUIRE(sample.has_value());
  CHECK(sample->find("1 1") == 0);  // single-digit rows and columns
  CHECK(interpret_ll(m, *sample).kind == VerdictKind::Accept);
  CHECK(interpret_hl(isl::test::load_bundled("tot_info"), *sample).kind == VerdictKind::Accept);
}
