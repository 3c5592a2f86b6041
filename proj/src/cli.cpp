#include "isl/cli.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <json.hpp>

#include "isl/compiler.hpp"
#include "isl/dot.hpp"
#include "isl/frontend.hpp"
#include "isl/interpreter.hpp"
#include "isl/solver.hpp"

#ifndef ISL_VERSION
#define ISL_VERSION "0.0.0"
#endif

namespace isl::cli {

namespace {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

std::optional<std::string> read_file(const std::string& path, std::ostream& err) {
  if (path == "-") {
    std::ostringstream buf;
    buf << std::cin.rdbuf();
    return buf.str();
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    err << "error: cannot read '" << path << "'\n";
    return std::nullopt;
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void apply_overrides(MachineConfig& config, const ConfigOverrides& overrides) {
  if (overrides.max_reg) config.max_reg = *overrides.max_reg;
  if (overrides.max_int) config.max_int = *overrides.max_int;
  if (overrides.steps) config.step_limit = *overrides.steps;
}

// Loads either level, applies overrides, and validates. nullopt on failure
// with diagnostics already printed.
std::optional<LoadResult> load_valid_spec(const std::string& path, const ConfigOverrides& overrides,
                                          std::ostream& err) {
  auto text = read_file(path, err);
  if (!text) return std::nullopt;
  MachineConfig defaults;
  apply_overrides(defaults, overrides);
  LoadResult loaded = load_spec(*text, defaults);
  if (!loaded.ok()) {
    for (const ParseError& e : loaded.errors) err << path << ": " << format_error(e) << "\n";
    if (loaded.errors.empty()) err << path << ": unrecognized spec document\n";
    return std::nullopt;
  }
  std::vector<Diagnostic> diags;
  if (loaded.hl) {
    apply_overrides(loaded.hl->config, overrides);
    diags = validate(*loaded.hl);
  } else {
    apply_overrides(loaded.ll->config, overrides);
    diags = validate(*loaded.ll);
  }
  if (!diags.empty()) {
    for (const Diagnostic& d : diags) err << path << ": " << d.message << " [" << d.code << "]\n";
    return std::nullopt;
  }
  return loaded;
}

// Reported sizes exclude the accept state, counting only the working states.
std::size_t working_states(const std::vector<std::string>& states, const std::string& accept) {
  std::size_t n = states.size();
  for (const auto& s : states) {
    if (s == accept) return n - 1;
  }
  return n;
}

// Compiles when given the high-level form; low-level specs pass through.
std::optional<LlAutomaton> to_low_level(LoadResult& loaded, const std::string& path,
                                        std::ostream& err) {
  if (loaded.ll) return std::move(*loaded.ll);
  CompileResult compiled = compile(*loaded.hl);
  if (!compiled.ok()) {
    for (const Diagnostic& d : compiled.errors) {
      err << path << ": " << d.message << " [" << d.code << "]\n";
    }
    return std::nullopt;
  }
  return std::move(*compiled.automaton);
}

ordered_json bounds_to_json(const EnumBounds& b) {
  return ordered_json{{"max_path_len", b.max_path_len},
                      {"max_paths", b.max_paths},
                      {"max_edge_visits", b.max_edge_visits},
                      {"prune", b.prune}};
}

}  // namespace

const char* version() { return ISL_VERSION; }

int cmd_compile(const CompileOptions& opts, std::ostream& out, std::ostream& err) {
  auto loaded = load_valid_spec(opts.spec_path, opts.config, err);
  if (!loaded) return kExitSpecError;
  if (!loaded->hl) {
    err << opts.spec_path << ": already a low-level spec; compile expects the high-level form\n";
    return kExitSpecError;
  }
  CompileResult compiled = compile(*loaded->hl);
  if (!compiled.ok()) {
    for (const Diagnostic& d : compiled.errors) {
      err << opts.spec_path << ": " << d.message << " [" << d.code << "]\n";
    }
    return kExitSpecError;
  }
  std::string json = serialize(*compiled.automaton);
  std::string counts = "HL=" + std::to_string(working_states(loaded->hl->states, loaded->hl->accept)) +
                       " LL=" +
                       std::to_string(working_states(compiled.automaton->states,
                                                     compiled.automaton->accept)) +
                       "\n";
  if (opts.output_path) {
    std::ofstream f(*opts.output_path, std::ios::binary);
    if (!f) {
      err << "error: cannot write '" << *opts.output_path << "'\n";
      return kExitSpecError;
    }
    f << json;
    out << counts;
  } else {
    out << json;
    err << counts;
  }
  return kExitOk;
}

int cmd_check(const CheckOptions& opts, std::ostream& out, std::ostream& err) {
  auto loaded = load_valid_spec(opts.spec_path, opts.config, err);
  if (!loaded) return kExitSpecError;
  auto input = read_file(opts.input_path, err);
  if (!input) return kExitSpecError;

  Verdict verdict = loaded->hl ? interpret_hl(*loaded->hl, *input)
                               : interpret_ll(*loaded->ll, *input);
  out << verdict_name(verdict.kind) << "\n";
  if (opts.trace && verdict.kind == VerdictKind::Accept) {
    out << "trace:";
    for (int t : verdict.trace) out << " " << t;
    out << "\n";
  }
  switch (verdict.kind) {
    case VerdictKind::Accept: return kExitOk;
    case VerdictKind::Reject: return kExitReject;
    case VerdictKind::BudgetExceeded: return kExitBudget;
  }
  return kExitReject;
}

int cmd_paths(const PathsOptions& opts, std::ostream& out, std::ostream& err) {
  auto loaded = load_valid_spec(opts.spec_path, opts.config, err);
  if (!loaded) return kExitSpecError;
  auto ll = to_low_level(*loaded, opts.spec_path, err);
  if (!ll) return kExitSpecError;

  if (opts.smt_dir) {
    std::error_code ec;
    fs::create_directories(*opts.smt_dir, ec);
    if (ec) {
      err << "error: cannot create '" << *opts.smt_dir << "'\n";
      return kExitSpecError;
    }
  }

  std::int64_t index = 0;
  EnumResult result = enumerate_paths(*ll, opts.bounds, [&](const PathReport& report) {
    out << path_report_jsonl(report) << "\n";
    if (opts.smt_dir) {
      fs::path file = fs::path(*opts.smt_dir) / ("path-" + std::to_string(index) + ".smt2");
      std::ofstream f(file, std::ios::binary);
      f << export_smtlib(report.constraints);
    }
    ++index;
    return true;
  });
  if (result.truncated) out << "{\"truncated\":true}\n";
  return kExitOk;
}

int cmd_gen(const GenOptions& opts, std::ostream& out, std::ostream& err) {
  auto started = std::chrono::steady_clock::now();
  auto loaded = load_valid_spec(opts.spec_path, opts.config, err);
  if (!loaded) return kExitSpecError;
  auto ll = to_low_level(*loaded, opts.spec_path, err);
  if (!ll) return kExitSpecError;

  std::error_code ec;
  fs::create_directories(opts.out_dir, ec);
  if (ec) {
    err << "error: cannot create '" << opts.out_dir << "'\n";
    return kExitSpecError;
  }

  EnumBounds bounds = opts.bounds;
  bounds.prune = true;  // only feasible paths are worth synthesizing

  ordered_json files = ordered_json::array();
  std::int64_t written = 0;
  enumerate_paths(*ll, bounds, [&](const PathReport& report) {
    SynthOptions sopts;
    sopts.random_fill = opts.random_fill;
    sopts.seed = opts.seed + static_cast<std::uint64_t>(written) * 0x9e3779b97f4a7c15ull;
    SynthResult synth = synthesize(report.constraints, sopts);
    if (synth.status != SynthStatus::Witness) return true;  // keep looking

    std::string name = "path-" + std::to_string(written) + ".bin";
    std::ofstream f(fs::path(opts.out_dir) / name, std::ios::binary);
    f.write(synth.input.data(), static_cast<std::streamsize>(synth.input.size()));
    files.push_back(ordered_json{{"file", name}, {"transitions", report.transitions}});
    ++written;
    return written < opts.count;
  });

  auto elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(
                     std::chrono::steady_clock::now() - started)
                     .count();
  ordered_json manifest;
  manifest["spec"] = opts.spec_path;
  manifest["command"] = "gen";
  manifest["count"] = opts.count;
  manifest["seed"] = opts.seed;
  manifest["random"] = opts.random_fill;
  manifest["bounds"] = bounds_to_json(bounds);
  manifest["version"] = version();
  manifest["timing_ms"] = elapsed;
  manifest["paths"] = files;
  {
    std::ofstream f(fs::path(opts.out_dir) / "manifest.json", std::ios::binary);
    f << manifest.dump(2) << "\n";
  }

  if (written == 0) {
    err << "error: no feasible path found within bounds\n";
    return kExitNoPaths;
  }
  out << "wrote " << written << " witness file(s) to " << opts.out_dir << "\n";
  return kExitOk;
}

int cmd_dot(const DotOptions& opts, std::ostream& out, std::ostream& err) {
  auto loaded = load_valid_spec(opts.spec_path, opts.config, err);
  if (!loaded) return kExitSpecError;
  out << (loaded->hl ? to_dot(*loaded->hl) : to_dot(*loaded->ll));
  return kExitOk;
}

}  // namespace isl::cli
