#include "isl/compiler.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace isl {

namespace {

bool reads_cur(const Command& c) { return c.op == Op::StoreCur || c.op == Op::StoreAcc; }

// Whether the pair (t1 then t2) may collapse into one transition without
// changing acceptance. The merged transition evaluates both checks first,
// then the single command, then moves by the summed amount.
bool can_combine(const LlTransition& t1, const LlTransition& t2) {
  if (t1.reg_check && t2.reg_check) return false;
  if (t1.char_check && t2.char_check) return false;
  if (t1.command && t2.command) return false;
  // t2's register check would otherwise observe pre-command registers.
  if (t1.command && t2.reg_check) return false;
  // Anything in t2 that reads the tape must still see the same position.
  if (t1.move != 0 && (t2.char_check || (t2.command && reads_cur(*t2.command)))) return false;
  return true;
}

LlTransition combine(const LlTransition& t1, const LlTransition& t2) {
  LlTransition t;
  t.src = t1.src;
  t.dst = t2.dst;
  t.reg_check = t1.reg_check ? t1.reg_check : t2.reg_check;
  t.char_check = t1.char_check ? t1.char_check : t2.char_check;
  t.command = t1.command ? t1.command : t2.command;
  t.move = t1.move + t2.move;
  return t;
}

// Greedy peephole over one expansion chain: a fresh state with a unique
// incoming (or outgoing) transition is eliminated when that transition can
// combine with every transition on the other side.
void merge_chain(std::vector<LlTransition>& chain, std::vector<std::string>& fresh) {
  std::vector<std::string> order = fresh;
  for (const std::string& v : order) {
    std::vector<std::size_t> in, out;
    for (std::size_t i = 0; i < chain.size(); ++i) {
      if (chain[i].dst == v) in.push_back(i);
      if (chain[i].src == v) out.push_back(i);
    }
    if (in.empty() || out.empty()) continue;

    bool fold_forward = in.size() == 1 && std::all_of(out.begin(), out.end(), [&](std::size_t o) {
                          return can_combine(chain[in[0]], chain[o]);
                        });
    bool fold_backward = !fold_forward && out.size() == 1 &&
                         std::all_of(in.begin(), in.end(), [&](std::size_t i) {
                           return can_combine(chain[i], chain[out[0]]);
                         });
    if (!fold_forward && !fold_backward) continue;

    std::vector<LlTransition> merged;
    if (fold_forward) {
      for (std::size_t o : out) merged.push_back(combine(chain[in[0]], chain[o]));
    } else {
      for (std::size_t i : in) merged.push_back(combine(chain[i], chain[out[0]]));
    }

    std::set<std::size_t> dead(in.begin(), in.end());
    dead.insert(out.begin(), out.end());
    std::size_t insert_at = *dead.begin();
    std::vector<LlTransition> next;
    next.reserve(chain.size());
    for (std::size_t i = 0; i < chain.size(); ++i) {
      if (i == insert_at) {
        for (auto& m : merged) next.push_back(std::move(m));
      }
      if (!dead.count(i)) next.push_back(std::move(chain[i]));
    }
    chain = std::move(next);
    fresh.erase(std::remove(fresh.begin(), fresh.end(), v), fresh.end());
  }
}

struct TrieNode {
  std::map<std::uint8_t, TrieNode> children;
  bool terminal = false;
};

}  // namespace

Fragment expand_reg_checks(const std::vector<RegComparison>& gamma, const std::string& src,
                           const std::string& dst, FreshNamer& namer) {
  Fragment f;
  if (gamma.empty()) return f;
  std::string at = src;
  for (std::size_t i = 0; i < gamma.size(); ++i) {
    std::string to = i + 1 == gamma.size() ? dst : namer.next();
    if (to != dst) f.fresh_states.push_back(to);
    LlTransition t;
    t.src = at;
    t.dst = to;
    t.reg_check = gamma[i];
    f.transitions.push_back(std::move(t));
    at = to;
  }
  return f;
}

Fragment expand_char_ranges(Polarity polarity, const std::vector<CharRange>& ranges,
                            const std::string& src, const std::string& dst) {
  Fragment f;
  for (const CharRange& r : ranges) {
    LlTransition t;
    t.src = src;
    t.dst = dst;
    t.char_check = CharCheck{polarity, {r}};
    f.transitions.push_back(std::move(t));
  }
  return f;
}

StringExpansion expand_strings(const std::vector<std::string>& strings, const std::string& src,
                               const std::string& dst, FreshNamer& namer) {
  StringExpansion out;
  TrieNode root;
  for (const std::string& s : strings) {
    TrieNode* node = &root;
    for (char c : s) node = &node->children[static_cast<std::uint8_t>(c)];
    node->terminal = true;
  }

  // A terminal with children means one string is a proper prefix of another;
  // the acceptance point would be ambiguous in the low-level form.
  struct Walker {
    StringExpansion& out;
    FreshNamer& namer;
    const std::string& dst;

    bool check(const TrieNode& node) {
      for (const auto& [byte, child] : node.children) {
        if (child.terminal && !child.children.empty()) return false;
        if (!check(child)) return false;
      }
      return true;
    }

    void emit(const TrieNode& node, const std::string& name) {
      for (const auto& [byte, child] : node.children) {
        std::string child_name;
        if (child.terminal) {
          child_name = dst;
        } else {
          child_name = namer.next();
          out.fragment.fresh_states.push_back(child_name);
        }
        LlTransition t;
        t.src = name;
        t.dst = child_name;
        t.char_check = CharCheck{Polarity::Inclusive, {CharRange{byte, byte}}};
        t.move = 1;
        out.fragment.transitions.push_back(std::move(t));
        if (!child.terminal) emit(child, child_name);
      }
    }
  } walker{out, namer, dst};

  if (root.terminal || !walker.check(root)) {
    out.error = Diagnostic{"prefix-conflict",
                           "string set contains a string that is a proper prefix of another"};
    return out;
  }
  walker.emit(root, src);
  return out;
}

Fragment expand_commands(const std::vector<Command>& phi, const std::string& src,
                         const std::string& dst, FreshNamer& namer) {
  Fragment f;
  if (phi.empty()) return f;
  std::string at = src;
  for (std::size_t i = 0; i < phi.size(); ++i) {
    std::string to = i + 1 == phi.size() ? dst : namer.next();
    if (to != dst) f.fresh_states.push_back(to);
    LlTransition t;
    t.src = at;
    t.dst = to;
    t.command = phi[i];
    f.transitions.push_back(std::move(t));
    at = to;
  }
  return f;
}

CompileResult compile(const HlAutomaton& hl) {
  CompileResult result;
  result.errors = validate(hl);
  if (!result.errors.empty()) return result;

  LlAutomaton ll;
  ll.states = hl.states;
  ll.start = hl.start;
  ll.accept = hl.accept;
  ll.config = hl.config;

  FreshNamer namer;
  for (const HlTransition& t : hl.transitions) {
    enum class Seg { Reg, Theta, Phi };
    std::vector<Seg> segments;
    if (!t.gamma.empty()) segments.push_back(Seg::Reg);
    if (t.theta.kind != HlTheta::Kind::Empty) segments.push_back(Seg::Theta);
    if (!t.phi.empty()) segments.push_back(Seg::Phi);

    std::vector<LlTransition> chain;
    std::vector<std::string> fresh;

    if (segments.empty()) {
      LlTransition bare;
      bare.src = t.src;
      bare.dst = t.dst;
      bare.move = t.move;
      chain.push_back(std::move(bare));
    } else {
      std::string at = t.src;
      for (std::size_t i = 0; i < segments.size(); ++i) {
        std::string to = i + 1 == segments.size() ? t.dst : namer.next();
        if (to != t.dst) fresh.push_back(to);
        Fragment frag;
        switch (segments[i]) {
          case Seg::Reg:
            frag = expand_reg_checks(t.gamma, at, to, namer);
            break;
          case Seg::Theta:
            if (t.theta.kind == HlTheta::Kind::Ranges) {
              frag = expand_char_ranges(t.theta.polarity, t.theta.ranges, at, to);
            } else {
              StringExpansion se = expand_strings(t.theta.strings, at, to, namer);
              if (se.error) {
                result.errors.push_back(*se.error);
                return result;
              }
              frag = std::move(se.fragment);
            }
            break;
          case Seg::Phi:
            frag = expand_commands(t.phi, at, to, namer);
            break;
        }
        for (auto& tr : frag.transitions) chain.push_back(std::move(tr));
        for (auto& s : frag.fresh_states) fresh.push_back(std::move(s));
        at = to;
      }

      // The consuming move sits on the chain's final transition(s); string
      // sets are the exception, their trie edges each move one and the
      // user-provided move is dropped.
      if (t.theta.kind != HlTheta::Kind::Strings && t.move != 0) {
        for (auto& tr : chain) {
          if (tr.dst == t.dst) tr.move = t.move;
        }
      }

      merge_chain(chain, fresh);
    }

    for (auto& tr : chain) ll.transitions.push_back(std::move(tr));
    for (auto& s : fresh) ll.states.push_back(std::move(s));
  }

  // Renumber surviving compiler states densely, in order of first use.
  {
    std::set<std::string> original(hl.states.begin(), hl.states.end());
    std::map<std::string, std::string> rename;
    FreshNamer dense;
    auto visit = [&](const std::string& name) {
      if (!original.count(name) && !rename.count(name)) rename[name] = dense.next();
    };
    for (const LlTransition& tr : ll.transitions) {
      visit(tr.src);
      visit(tr.dst);
    }
    if (!rename.empty()) {
      for (LlTransition& tr : ll.transitions) {
        if (auto it = rename.find(tr.src); it != rename.end()) tr.src = it->second;
        if (auto it = rename.find(tr.dst); it != rename.end()) tr.dst = it->second;
      }
      for (std::string& s : ll.states) {
        if (auto it = rename.find(s); it != rename.end()) s = it->second;
      }
    }
  }

  result.errors = validate(ll);
  if (!result.errors.empty()) return result;
  result.automaton = std::move(ll);
  return result;
}

}  // namespace isl
