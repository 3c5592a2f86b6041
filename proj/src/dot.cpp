#include "isl/dot.hpp"

#include <sstream>

namespace isl {

namespace {

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
  return out;
}

std::string byte_text(std::uint8_t b) {
  if (b >= 0x21 && b <= 0x7e && b != '\'' && b != '"' && b != '\\') {
    return std::string("'") + static_cast<char>(b) + "'";
  }
  return std::to_string(static_cast<int>(b));
}

std::string ranges_text(Polarity polarity, const std::vector<CharRange>& ranges) {
  std::string out = polarity == Polarity::Inclusive ? "a in " : "a not in ";
  for (std::size_t i = 0; i < ranges.size(); ++i) {
    if (i) out += ",";
    out += "[" + byte_text(ranges[i].lo) + ".." + byte_text(ranges[i].hi) + "]";
  }
  return out;
}

std::string comparison_text(const RegComparison& rc) {
  static const char* symbols[] = {"==", "!=", "<", "<=", ">", ">="};
  std::string out = "r" + std::to_string(rc.lhs);
  out += symbols[static_cast<int>(rc.op)];
  if (rc.kind == RegComparison::Rhs::Const) {
    out += std::to_string(rc.constant);
  } else {
    out += "r" + std::to_string(rc.reg);
  }
  return out;
}

std::string command_text(const Command& c) {
  std::string out = op_name(c.op);
  switch (c.op) {
    case Op::StoreVal: out += "(" + std::to_string(c.res) + "," + std::to_string(c.val) + ")"; break;
    case Op::StoreCur:
    case Op::Increment:
    case Op::Decrement: out += "(" + std::to_string(c.res) + ")"; break;
    case Op::StoreAcc:
    case Op::Assign: out += "(" + std::to_string(c.res) + "," + std::to_string(c.r1) + ")"; break;
    case Op::Add:
    case Op::Sub:
    case Op::Mult:
    case Op::Div:
    case Op::Mod:
      out += "(" + std::to_string(c.res) + "," + std::to_string(c.r1) + "," +
             std::to_string(c.r2) + ")";
      break;
    case Op::AddI:
    case Op::MultI:
      out += "(" + std::to_string(c.r1) + "," + std::to_string(c.val) + "," +
             std::to_string(c.res) + ")";
      break;
    case Op::Nop: break;
    case Op::Hook: out += "(" + c.hook + ")"; break;
  }
  return out;
}

template <typename Automaton, typename LabelFn>
std::string render(const Automaton& a, LabelFn&& label) {
  std::ostringstream os;
  os << "digraph isl {\n";
  os << "  rankdir=LR;\n";
  os << "  node [shape=circle];\n";
  for (const std::string& s : a.states) {
    os << "  \"" << escape(s) << "\"";
    if (s == a.accept) {
      os << " [shape=doublecircle]";
    } else if (s == a.start) {
      os << " [penwidth=2]";
    }
    os << ";\n";
  }
  for (const auto& t : a.transitions) {
    os << "  \"" << escape(t.src) << "\" -> \"" << escape(t.dst) << "\" [label=\""
       << escape(label(t)) << "\"];\n";
  }
  os << "}\n";
  return os.str();
}

std::string join(const std::vector<std::string>& parts) {
  std::string out;
  for (const auto& p : parts) {
    if (p.empty()) continue;
    if (!out.empty()) out += " / ";
    out += p;
  }
  return out;
}

}  // namespace

std::string to_dot(const HlAutomaton& a) {
  return render(a, [](const HlTransition& t) {
    std::vector<std::string> parts;
    std::string gamma;
    for (std::size_t i = 0; i < t.gamma.size(); ++i) {
      if (i) gamma += " & ";
      gamma += comparison_text(t.gamma[i]);
    }
    parts.push_back(gamma);
    if (t.theta.kind == HlTheta::Kind::Ranges) {
      parts.push_back(ranges_text(t.theta.polarity, t.theta.ranges));
    } else if (t.theta.kind == HlTheta::Kind::Strings) {
      std::string s = "{";
      for (std::size_t i = 0; i < t.theta.strings.size(); ++i) {
        if (i) s += ",";
        s += t.theta.strings[i];
      }
      s += "}";
      parts.push_back(s);
    }
    std::string phi;
    for (std::size_t i = 0; i < t.phi.size(); ++i) {
      if (i) phi += "; ";
      phi += command_text(t.phi[i]);
    }
    parts.push_back(phi);
    parts.push_back("mv" + std::to_string(t.move));
    return join(parts);
  });
}

std::string to_dot(const LlAutomaton& a) {
  return render(a, [](const LlTransition& t) {
    std::vector<std::string> parts;
    if (t.reg_check) parts.push_back(comparison_text(*t.reg_check));
    if (t.char_check) parts.push_back(ranges_text(t.char_check->polarity, t.char_check->ranges));
    if (t.command) parts.push_back(command_text(*t.command));
    parts.push_back("mv" + std::to_string(t.move));
    return join(parts);
  });
}

}  // namespace isl
