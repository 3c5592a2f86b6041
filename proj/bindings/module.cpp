// Python bindings over the main operations: parse, compile, interpret,
// enumerate, synthesize, export. Specs travel as canonical JSON strings and
// inputs as bytes, so the surface stays stable and language-neutral.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>
#include <stdexcept>

#include "isl/compiler.hpp"
#include "isl/dot.hpp"
#include "isl/frontend.hpp"
#include "isl/interpreter.hpp"
#include "isl/pathgen.hpp"
#include "isl/solver.hpp"

#ifndef ISL_VERSION
#define ISL_VERSION "0.0.0"
#endif

namespace py = pybind11;

namespace {

isl::LoadResult load_or_throw(const std::string& text) {
  isl::LoadResult loaded = isl::load_spec(text);
  if (!loaded.ok()) {
    std::string msg = "invalid spec";
    if (!loaded.errors.empty()) msg = isl::format_error(loaded.errors.front());
    throw std::invalid_argument(msg);
  }
  std::vector<isl::Diagnostic> diags =
      loaded.hl ? isl::validate(*loaded.hl) : isl::validate(*loaded.ll);
  if (!diags.empty()) {
    throw std::invalid_argument(diags.front().message);
  }
  return loaded;
}

isl::LlAutomaton low_level_or_throw(const std::string& text) {
  isl::LoadResult loaded = load_or_throw(text);
  if (loaded.ll) return std::move(*loaded.ll);
  isl::CompileResult compiled = isl::compile(*loaded.hl);
  if (!compiled.ok()) {
    throw std::invalid_argument(compiled.errors.empty() ? "compile failed"
                                                        : compiled.errors.front().message);
  }
  return std::move(*compiled.automaton);
}

}  // namespace

PYBIND11_MODULE(_islkit, m) {
  m.doc() = "Register-automaton input specification toolkit";
  m.attr("__version__") = ISL_VERSION;

  m.def(
      "parse_spec",
      [](const std::string& text) {
        isl::LoadResult loaded = load_or_throw(text);
        return loaded.hl ? isl::serialize(*loaded.hl) : isl::serialize(*loaded.ll);
      },
      py::arg("text"),
      "Parse a spec (tag format or canonical JSON) and return canonical JSON.");

  m.def(
      "compile_spec",
      [](const std::string& text) {
        return isl::serialize(low_level_or_throw(text));
      },
      py::arg("text"), "Compile to the low-level form, returned as canonical JSON.");

  m.def(
      "validate_spec",
      [](const std::string& text) {
        isl::LoadResult loaded = isl::load_spec(text);
        std::vector<std::string> out;
        if (!loaded.ok()) {
          for (const auto& e : loaded.errors) out.push_back(isl::format_error(e));
          return out;
        }
        auto diags = loaded.hl ? isl::validate(*loaded.hl) : isl::validate(*loaded.ll);
        for (const auto& d : diags) out.push_back(d.message + " [" + d.code + "]");
        return out;
      },
      py::arg("text"), "All structural problems with the spec, empty when clean.");

  m.def(
      "state_count",
      [](const std::string& text) {
        isl::LoadResult loaded = load_or_throw(text);
        const auto& states = loaded.hl ? loaded.hl->states : loaded.ll->states;
        const auto& accept = loaded.hl ? loaded.hl->accept : loaded.ll->accept;
        std::size_t n = states.size();
        for (const auto& s : states) {
          if (s == accept) return n - 1;
        }
        return n;
      },
      py::arg("text"), "Number of working states (the accept state is not counted).");

  m.def(
      "check",
      [](const std::string& text, const py::bytes& data, std::optional<std::int64_t> steps) {
        isl::LoadResult loaded = load_or_throw(text);
        std::string input = data;
        if (steps) {
          if (loaded.hl) loaded.hl->config.step_limit = *steps;
          if (loaded.ll) loaded.ll->config.step_limit = *steps;
        }
        isl::Verdict v = loaded.hl ? isl::interpret_hl(*loaded.hl, input)
                                   : isl::interpret_ll(*loaded.ll, input);
        py::dict out;
        out["verdict"] = isl::verdict_name(v.kind);
        out["trace"] = v.trace;
        return out;
      },
      py::arg("text"), py::arg("data"), py::arg("steps") = std::nullopt,
      "Run the interpreter; returns {'verdict': ..., 'trace': [...]}.");

  m.def(
      "enumerate_paths",
      [](const std::string& text, std::int64_t max_path_len, std::int64_t max_paths,
         std::int64_t max_edge_visits, bool prune) {
        isl::LlAutomaton ll = low_level_or_throw(text);
        isl::EnumBounds bounds{max_path_len, max_paths, max_edge_visits, prune};
        std::vector<std::string> lines;
        isl::enumerate_paths(ll, bounds, [&](const isl::PathReport& r) {
          lines.push_back(isl::path_report_jsonl(r));
          return true;
        });
        return lines;
      },
      py::arg("text"), py::arg("max_path_len") = 256, py::arg("max_paths") = 1000,
      py::arg("max_edge_visits") = 8, py::arg("prune") = false,
      "Accepting paths as JSON lines with transitions, constraints and final_ip.");

  m.def(
      "generate",
      [](const std::string& text, std::int64_t count, std::uint64_t seed, bool random_fill) {
        isl::LlAutomaton ll = low_level_or_throw(text);
        isl::EnumBounds bounds{1 << 20, std::numeric_limits<std::int64_t>::max(), 1 << 20, true};
        std::vector<py::bytes> out;
        isl::enumerate_paths(ll, bounds, [&](const isl::PathReport& r) {
          isl::SynthOptions opts;
          opts.seed = seed + out.size() * 0x9e3779b97f4a7c15ull;
          opts.random_fill = random_fill;
          isl::SynthResult synth = isl::synthesize(r.constraints, opts);
          if (synth.status == isl::SynthStatus::Witness) {
            out.push_back(py::bytes(synth.input));
          }
          return static_cast<std::int64_t>(out.size()) < count;
        });
        return out;
      },
      py::arg("text"), py::arg("count") = 10, py::arg("seed") = 0,
      py::arg("random_fill") = false, "Synthesize up to count accepted inputs.");

  m.def(
      "smtlib",
      [](const std::string& constraints_json) {
        auto cs = isl::constraints_from_json(constraints_json);
        if (!cs) throw std::invalid_argument("malformed constraints JSON");
        return isl::export_smtlib(*cs);
      },
      py::arg("constraints_json"),
      "SMT-LIB v2 script for a path's constraints (the JSON array from a path line).");

  m.def(
      "to_dot",
      [](const std::string& text) {
        isl::LoadResult loaded = load_or_throw(text);
        return loaded.hl ? isl::to_dot(*loaded.hl) : isl::to_dot(*loaded.ll);
      },
      py::arg("text"), "GraphViz rendering of the automaton.");
}
