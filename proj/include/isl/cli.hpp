// Command implementations behind the isl tool. Each takes explicit output
// streams and returns the process exit code, so tests can drive them
// in-process.

#pragma once

#include <limits>
#include <optional>
#include <ostream>
#include <string>

#include "isl/core.hpp"
#include "isl/pathgen.hpp"

namespace isl::cli {

// Exit code contract shared by all commands.
inline constexpr int kExitOk = 0;        // success / accept
inline constexpr int kExitReject = 1;    // input rejected
inline constexpr int kExitSpecError = 2; // parse or validation failure
inline constexpr int kExitBudget = 3;    // step budget exhausted
inline constexpr int kExitNoPaths = 4;   // no feasible path found

const char* version();

struct ConfigOverrides {
  std::optional<int> max_reg;
  std::optional<std::int64_t> max_int;
  std::optional<std::int64_t> steps;
};

struct CompileOptions {
  std::string spec_path;
  std::optional<std::string> output_path;  // default: JSON to stdout, counts to stderr
  ConfigOverrides config;
};
int cmd_compile(const CompileOptions& opts, std::ostream& out, std::ostream& err);

struct CheckOptions {
  std::string spec_path;
  std::string input_path;
  bool trace = false;
  ConfigOverrides config;
};
int cmd_check(const CheckOptions& opts, std::ostream& out, std::ostream& err);

struct PathsOptions {
  std::string spec_path;
  EnumBounds bounds;                   // prune defaults off: structural enumeration
  std::optional<std::string> smt_dir;  // also write one SMT-LIB file per path
  ConfigOverrides config;
};
int cmd_paths(const PathsOptions& opts, std::ostream& out, std::ostream& err);

struct GenOptions {
  std::string spec_path;
  std::string out_dir;
  std::int64_t count = 10;
  std::uint64_t seed = 0;
  bool random_fill = false;
  // Generation wants feasible paths, so pruning is on and the structural
  // bounds are generous; flags can still lower them.
  EnumBounds bounds{1 << 20, std::numeric_limits<std::int64_t>::max(), 1 << 20, true};
  ConfigOverrides config;
};
int cmd_gen(const GenOptions& opts, std::ostream& out, std::ostream& err);

struct DotOptions {
  std::string spec_path;
  ConfigOverrides config;
};
int cmd_dot(const DotOptions& opts, std::ostream& out, std::ostream& err);

}  // namespace isl::cli
