// isl: compile, run and explore input specification automata.

#include <cstdlib>
#include <fstream>
#include <limits>
#include <iostream>
#include <memory>

#include <CLI11.hpp>
#include <json.hpp>

#include "isl/cli.hpp"

namespace {

// Optional defaults file: ISL_CONFIG may point at a JSON object with any of
// steps, max_reg, max_int, max_path_len, max_paths, max_edge_visits, seed.
// Flags always win over the file.
nlohmann::json load_env_defaults() {
  const char* path = std::getenv("ISL_CONFIG");
  if (!path) return nlohmann::json::object();
  std::ifstream in(path);
  if (!in) return nlohmann::json::object();
  nlohmann::json parsed = nlohmann::json::parse(in, nullptr, false);
  return parsed.is_object() ? parsed : nlohmann::json::object();
}

template <typename T>
void env_apply(const nlohmann::json& env, const char* key, T& slot) {
  if (env.contains(key) && env[key].is_number_integer()) {
    slot = static_cast<T>(env[key].get<std::int64_t>());
  }
}

struct ConfigFlags {
  int max_reg = 0;
  std::int64_t max_int = 0;
  std::int64_t steps = 0;
  CLI::Option* max_reg_opt = nullptr;
  CLI::Option* max_int_opt = nullptr;
  CLI::Option* steps_opt = nullptr;

  isl::cli::ConfigOverrides overrides(const nlohmann::json& env) const {
    isl::cli::ConfigOverrides o;
    if (env.contains("max_reg") && env["max_reg"].is_number_integer()) {
      o.max_reg = env["max_reg"].get<int>();
    }
    if (env.contains("max_int") && env["max_int"].is_number_integer()) {
      o.max_int = env["max_int"].get<std::int64_t>();
    }
    if (env.contains("steps") && env["steps"].is_number_integer()) {
      o.steps = env["steps"].get<std::int64_t>();
    }
    if (max_reg_opt->count()) o.max_reg = max_reg;
    if (max_int_opt->count()) o.max_int = max_int;
    if (steps_opt->count()) o.steps = steps;
    return o;
  }
};

std::shared_ptr<ConfigFlags> add_config_flags(CLI::App* cmd) {
  auto flags = std::make_shared<ConfigFlags>();
  flags->max_reg_opt = cmd->add_option("--max-reg", flags->max_reg, "Number of registers")
                           ->check(CLI::Range(std::int64_t{1}, std::numeric_limits<std::int64_t>::max()));
  flags->max_int_opt = cmd->add_option("--max-int", flags->max_int, "Magnitude bound for constants")
                           ->check(CLI::Range(std::int64_t{1}, std::numeric_limits<std::int64_t>::max()));
  flags->steps_opt = cmd->add_option("--steps", flags->steps, "Interpreter step budget")
                         ->check(CLI::Range(std::int64_t{1}, std::numeric_limits<std::int64_t>::max()));
  return flags;
}

void add_bounds_flags(CLI::App* cmd, isl::EnumBounds& bounds, const nlohmann::json& env) {
  env_apply(env, "max_path_len", bounds.max_path_len);
  env_apply(env, "max_paths", bounds.max_paths);
  env_apply(env, "max_edge_visits", bounds.max_edge_visits);
  cmd->add_option("--max-path-len", bounds.max_path_len, "Longest path to explore")
      ->check(CLI::Range(std::int64_t{1}, std::numeric_limits<std::int64_t>::max()));
  cmd->add_option("--max-paths", bounds.max_paths, "Path cap for the enumeration")
      ->check(CLI::Range(std::int64_t{1}, std::numeric_limits<std::int64_t>::max()));
  cmd->add_option("--max-edge-visits", bounds.max_edge_visits,
                  "Per-edge repetition cap along one path")
      ->check(CLI::Range(std::int64_t{1}, std::numeric_limits<std::int64_t>::max()));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Register-automaton input specification toolkit"};
  app.set_version_flag("--version", std::string(isl::cli::version()));
  app.require_subcommand(1);

  nlohmann::json env = load_env_defaults();
  int exit_code = 0;

  // compile
  auto compile_opts = std::make_shared<isl::cli::CompileOptions>();
  auto compile_out = std::make_shared<std::string>();
  auto* compile = app.add_subcommand("compile", "Compile a high-level spec to the low-level form");
  compile->add_option("spec", compile_opts->spec_path, "Spec file (tag format or JSON)")->required();
  auto* compile_o = compile->add_option("-o,--output", *compile_out, "Write low-level JSON here");
  auto compile_cfg = add_config_flags(compile);
  compile->callback([&, compile_opts, compile_out, compile_cfg, compile_o]() {
    compile_opts->config = compile_cfg->overrides(env);
    if (compile_o->count()) compile_opts->output_path = *compile_out;
    exit_code = isl::cli::cmd_compile(*compile_opts, std::cout, std::cerr);
  });

  // check
  auto check_opts = std::make_shared<isl::cli::CheckOptions>();
  auto* check = app.add_subcommand("check", "Decide whether an input file is accepted");
  check->add_option("spec", check_opts->spec_path, "Spec file")->required();
  check->add_option("input", check_opts->input_path, "Input bytes ('-' for stdin)")->required();
  check->add_flag("--trace", check_opts->trace, "Print the accepting transition sequence");
  auto check_cfg = add_config_flags(check);
  check->callback([&, check_opts, check_cfg]() {
    check_opts->config = check_cfg->overrides(env);
    exit_code = isl::cli::cmd_check(*check_opts, std::cout, std::cerr);
  });

  // paths
  auto paths_opts = std::make_shared<isl::cli::PathsOptions>();
  auto paths_smt = std::make_shared<std::string>();
  auto* paths = app.add_subcommand("paths", "Enumerate accepting paths with their constraint sets");
  paths->add_option("spec", paths_opts->spec_path, "Spec file")->required();
  add_bounds_flags(paths, paths_opts->bounds, env);
  paths->add_flag("--prune", paths_opts->bounds.prune, "Drop provably infeasible subtrees");
  auto* paths_smt_opt = paths->add_option("--smt", *paths_smt, "Also write SMT-LIB files here");
  auto paths_cfg = add_config_flags(paths);
  paths->callback([&, paths_opts, paths_smt, paths_cfg, paths_smt_opt]() {
    paths_opts->config = paths_cfg->overrides(env);
    if (paths_smt_opt->count()) paths_opts->smt_dir = *paths_smt;
    exit_code = isl::cli::cmd_paths(*paths_opts, std::cout, std::cerr);
  });

  // gen
  auto gen_opts = std::make_shared<isl::cli::GenOptions>();
  auto* gen = app.add_subcommand("gen", "Synthesize a corpus of accepted inputs");
  gen->add_option("spec", gen_opts->spec_path, "Spec file")->required();
  gen->add_option("--out", gen_opts->out_dir, "Output directory")->required();
  gen->add_option("--count", gen_opts->count, "Witness files to produce")
      ->check(CLI::Range(std::int64_t{1}, std::numeric_limits<std::int64_t>::max()));
  env_apply(env, "seed", gen_opts->seed);
  gen->add_option("--seed", gen_opts->seed, "Random seed");
  gen->add_flag("--random", gen_opts->random_fill, "Sample free bytes instead of smallest");
  add_bounds_flags(gen, gen_opts->bounds, env);
  auto gen_cfg = add_config_flags(gen);
  gen->callback([&, gen_opts, gen_cfg]() {
    gen_opts->config = gen_cfg->overrides(env);
    exit_code = isl::cli::cmd_gen(*gen_opts, std::cout, std::cerr);
  });

  // dot
  auto dot_opts = std::make_shared<isl::cli::DotOptions>();
  auto* dot = app.add_subcommand("dot", "Emit the automaton as GraphViz text");
  dot->add_option("spec", dot_opts->spec_path, "Spec file")->required();
  auto dot_cfg = add_config_flags(dot);
  dot->callback([&, dot_opts, dot_cfg]() {
    dot_opts->config = dot_cfg->overrides(env);
    exit_code = isl::cli::cmd_dot(*dot_opts, std::cout, std::cerr);
  });

  CLI11_PARSE(app, argc, argv);
  return exit_code;
}
