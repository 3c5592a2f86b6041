#include <doctest.h>

#include <limits>
#include <random>

#include "helpers.hpp"
#include "isl/core.hpp"

using namespace isl;

namespace {

RegisterFile regs_with(std::initializer_list<std::pair<int, std::int64_t>> values) {
  RegisterFile r(8, 0);
  for (auto [idx, v] : values) r[idx] = v;
  return r;
}

Command cmd3(Op op, int res, int r1, int r2) {
  Command c;
  c.op = op;
  c.res = res;
  c.r1 = r1;
  c.r2 = r2;
  return c;
}

Command cmd1(Op op, int res) {
  Command c;
  c.op = op;
  c.res = res;
  return c;
}

const RegisterFile& unwrap(const CommandResult& r) {
  REQUIRE(std::holds_alternative<RegisterFile>(r));
  return std::get<RegisterFile>(r);
}

}  // namespace

TEST_CASE("apply_command arithmetic") {
  RegisterFile regs = regs_with({{1, 2}, {2, 3}});

  CHECK(unwrap(apply_command(cmd3(Op::Add, 3, 1, 2), regs, std::nullopt))[3] == 5);
  CHECK(unwrap(apply_command(cmd3(Op::Mult, 3, 1, 2), regs, std::nullopt))[3] == 6);
  CHECK(unwrap(apply_command(cmd3(Op::Sub, 3, 1, 2), regs, std::nullopt))[3] == -1);

  RegisterFile four = regs_with({{3, 4}});
  CHECK(unwrap(apply_command(cmd1(Op::Decrement, 3), four, std::nullopt))[3] == 3);
  CHECK(unwrap(apply_command(cmd1(Op::Increment, 3), four, std::nullopt))[3] == 5);
}

TEST_CASE("apply_command reads the current byte") {
  RegisterFile regs(8, 0);
  CHECK(unwrap(apply_command(cmd1(Op::StoreCur, 1), regs, std::uint8_t{'7'}))[1] == 55);

  Command acc;
  acc.op = Op::StoreAcc;
  acc.res = 2;
  acc.r1 = 1;
  RegisterFile ten = regs_with({{1, 10}});
  CHECK(unwrap(apply_command(acc, ten, std::uint8_t{'a'}))[2] == 10 + 'a');

  auto missing = apply_command(cmd1(Op::StoreCur, 1), regs, std::nullopt);
  REQUIRE(std::holds_alternative<CmdError>(missing));
  CHECK(std::get<CmdError>(missing) == CmdError::MissingChar);
}

TEST_CASE("division semantics") {
  RegisterFile regs = regs_with({{1, -7}, {2, 2}});
  CHECK(unwrap(apply_command(cmd3(Op::Div, 3, 1, 2), regs, std::nullopt))[3] == -3);
  CHECK(unwrap(apply_command(cmd3(Op::Mod, 3, 1, 2), regs, std::nullopt))[3] == -1);

  RegisterFile pos = regs_with({{1, 7}, {2, -2}});
  CHECK(unwrap(apply_command(cmd3(Op::Mod, 3, 1, 2), pos, std::nullopt))[3] == 1);

  RegisterFile zero = regs_with({{1, 7}});
  auto div0 = apply_command(cmd3(Op::Div, 3, 1, 2), zero, std::nullopt);
  REQUIRE(std::holds_alternative<CmdError>(div0));
  CHECK(std::get<CmdError>(div0) == CmdError::DivByZero);

  constexpr std::int64_t kMin = std::numeric_limits<std::int64_t>::min();
  RegisterFile edge = regs_with({{1, kMin}, {2, -1}});
  CHECK(unwrap(apply_command(cmd3(Op::Div, 3, 1, 2), edge, std::nullopt))[3] == kMin);
  CHECK(unwrap(apply_command(cmd3(Op::Mod, 3, 1, 2), edge, std::nullopt))[3] == 0);
}

TEST_CASE("wrapping arithmetic") {
  constexpr std::int64_t kMax = std::numeric_limits<std::int64_t>::max();
  constexpr std::int64_t kMin = std::numeric_limits<std::int64_t>::min();
  CHECK(wrap_add(kMax, 1) == kMin);
  CHECK(wrap_sub(kMin, 1) == kMax);
  CHECK(wrap_mul(kMax, 2) == -2);
}

TEST_CASE("hooks resolve through the registry only") {
  Command hook;
  hook.op = Op::Hook;
  hook.hook = "reset";
  RegisterFile regs = regs_with({{0, 9}});

  auto unbound = apply_command(hook, regs, std::nullopt);
  REQUIRE(std::holds_alternative<CmdError>(unbound));
  CHECK(std::get<CmdError>(unbound) == CmdError::HookUnbound);

  HookRegistry hooks;
  hooks["reset"] = [](const RegisterFile& r, std::optional<std::uint8_t>) {
    return RegisterFile(r.size(), 0);
  };
  CHECK(unwrap(apply_command(hook, regs, std::nullopt, &hooks))[0] == 0);
}

TEST_CASE("eval_guard") {
  RegisterFile regs = regs_with({{3, 1}});
  CharCheck digits19{Polarity::Inclusive, {CharRange{'1', '9'}}};
  CHECK_FALSE(eval_guard(std::nullopt, digits19, regs, std::uint8_t{'a'}));

  auto r3_is_1 = RegComparison::with_const(3, CmpOp::Eq, 1);
  CHECK(eval_guard(r3_is_1, std::nullopt, regs, std::nullopt));

  CharCheck not_digits{Polarity::Exclusive, {CharRange{'0', '9'}}};
  CHECK(eval_guard(std::nullopt, not_digits, regs, std::uint8_t{' '}));

  CharCheck space{Polarity::Inclusive, {CharRange{32, 32}}};
  CHECK_FALSE(eval_guard(std::nullopt, space, regs, std::nullopt));

  // Exhausted tape satisfies an exclusive check: membership is negated.
  CharCheck anything{Polarity::Exclusive, {CharRange{0, 255}}};
  CHECK(eval_guard(std::nullopt, anything, regs, std::nullopt));

  // Multi-range membership is a disjunction across the ranges.
  CharCheck ops{Polarity::Inclusive, {CharRange{'+', '+'}, CharRange{'-', '-'}}};
  CHECK(eval_guard(std::nullopt, ops, regs, std::uint8_t{'-'}));
  CHECK_FALSE(eval_guard(std::nullopt, ops, regs, std::uint8_t{'*'}));

  auto r3_vs_r4 = RegComparison::with_reg(3, CmpOp::Gt, 4);
  CHECK(eval_guard(r3_vs_r4, std::nullopt, regs, std::nullopt));  // 1 > 0

  // Both checks must hold together.
  CHECK_FALSE(eval_guard(r3_is_1, digits19, regs, std::uint8_t{'a'}));
  CHECK(eval_guard(r3_is_1, digits19, regs, std::uint8_t{'5'}));
}

TEST_CASE("apply_command changes at most the destination register") {
  std::mt19937_64 rng(20123);
  const Op ops[] = {Op::StoreVal,  Op::StoreCur,  Op::StoreAcc, Op::Add,   Op::Sub,
                    Op::Mult,      Op::Div,       Op::Mod,      Op::AddI,  Op::MultI,
                    Op::Assign,    Op::Increment, Op::Decrement, Op::Nop};
  for (int round = 0; round < 500; ++round) {
    Command c;
    c.op = ops[rng() % (sizeof(ops) / sizeof(ops[0]))];
    c.res = static_cast<int>(rng() % 8);
    c.r1 = static_cast<int>(rng() % 8);
    c.r2 = static_cast<int>(rng() % 8);
    c.val = static_cast<std::int64_t>(rng() % 2001) - 1000;
    RegisterFile regs(8);
    for (auto& r : regs) r = static_cast<std::int64_t>(rng() % 1000);
    RegisterFile snapshot = regs;
    std::optional<std::uint8_t> cur = static_cast<std::uint8_t>(rng() % 256);

    CommandResult result = apply_command(c, regs, cur);
    CHECK(regs == snapshot);  // input untouched
    if (std::holds_alternative<RegisterFile>(result)) {
      const RegisterFile& out = std::get<RegisterFile>(result);
      for (std::size_t i = 0; i < out.size(); ++i) {
        if (c.op == Op::Nop || static_cast<int>(i) != c.res) CHECK(out[i] == snapshot[i]);
      }
    } else {
      // Only division by zero can fail here; the byte is always present.
      CHECK(std::get<CmdError>(result) == CmdError::DivByZero);
      CHECK((c.op == Op::Div || c.op == Op::Mod));
    }
  }
}

TEST_CASE("validate flags structural problems") {
  SUBCASE("transition to an undeclared state") {
    LlAutomaton m;
    m.states = {"A", "ACCEPT"};
    m.start = "A";
    m.accept = "ACCEPT";
    m.transitions.push_back(isl::test::ll_char("A", "Z", '0', '9', 1));
    auto diags = validate(m);
    REQUIRE(diags.size() == 1);
    CHECK(diags[0].code == "unknown-state");
  }

  SUBCASE("register index at max_reg") {
    LlAutomaton r;
    r.states = {"A", "ACCEPT"};
    r.start = "A";
    r.accept = "ACCEPT";
    LlTransition t = isl::test::ll_edge("A", "ACCEPT");
    t.reg_check = RegComparison::with_const(r.config.max_reg, CmpOp::Eq, 0);
    r.transitions.push_back(t);
    auto d = validate(r);
    REQUIRE(d.size() == 1);
    CHECK(d[0].code == "register-out-of-range");
  }

  SUBCASE("accept with outgoing edge") {
    LlAutomaton r;
    r.states = {"A", "ACCEPT"};
    r.start = "A";
    r.accept = "ACCEPT";
    r.transitions.push_back(isl::test::ll_edge("ACCEPT", "A"));
    auto d = validate(r);
    REQUIRE(d.size() == 1);
    CHECK(d[0].code == "accept-outgoing");
  }

  SUBCASE("low-level char checks hold one range") {
    LlAutomaton r;
    r.states = {"A", "ACCEPT"};
    r.start = "A";
    r.accept = "ACCEPT";
    LlTransition t = isl::test::ll_edge("A", "ACCEPT");
    t.char_check = CharCheck{Polarity::Inclusive, {CharRange{'0', '9'}, CharRange{'a', 'z'}}};
    r.transitions.push_back(t);
    auto d = validate(r);
    REQUIRE(d.size() == 1);
    CHECK(d[0].code == "multi-range-char-check");
  }

  SUBCASE("constant beyond max_int") {
    HlAutomaton h;
    h.states = {"A", "ACCEPT"};
    h.start = "A";
    h.accept = "ACCEPT";
    HlTransition t;
    t.src = "A";
    t.dst = "ACCEPT";
    t.gamma.push_back(RegComparison::with_const(1, CmpOp::Eq, h.config.max_int + 1));
    h.transitions.push_back(t);
    auto d = validate(h);
    REQUIRE(d.size() == 1);
    CHECK(d[0].code == "constant-out-of-range");
  }

  SUBCASE("reserved state names in the high-level form") {
    HlAutomaton h;
    h.states = {"A", "FSA3", "ACCEPT"};
    h.start = "A";
    h.accept = "ACCEPT";
    auto d = validate(h);
    REQUIRE(d.size() == 1);
    CHECK(d[0].code == "reserved-name");
  }
}

TEST_CASE("bundled low-level automata validate clean") {
  for (const char* name : {"tot_info", "qsort", "binary_search", "keywords"}) {
    LlAutomaton ll = isl::test::compile_bundled(name);
    CHECK(validate(ll).empty());
  }
}
