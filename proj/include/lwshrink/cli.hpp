#pragma once

#include "lwshrink/experiments.hpp"
#include "lwshrink/linalg.hpp"

#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace lwshrink::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInputError = 2;
inline constexpr int kExitPrecondition = 3;

inline constexpr std::string_view kVersion = "0.1.0";

/// Bad user input: malformed CSV, unknown config key, ... (exit code 2).
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Experiment configuration as read from a `key = value` file.
struct RunConfig {
  ExperimentConfig experiment;
  std::string csv_path;  ///< empty when the file has no [output] csv key
};

/// Parses the sectioned `key = value` format:
///
///   [experiment]   mode, n_mc, seed, estimators, threads, timing
///   [distribution] kind (gaussian | student | mixed_student), nu,
///                  nu_first, nu_second
///   [sigma]        mode (identity | wishart)
///   [grid]         p, n          (list "5, 15, 25" or range "5:45:10")
///   [convergence]  c, n
///   [output]       csv
///
/// `experiment.mode` and `distribution.kind` are required. Unknown or
/// missing keys raise InputError naming the key.
RunConfig parse_config(std::istream& in);
RunConfig load_config(const std::string& path);

/// Canonical text form; parse_config(render_config(c)) reproduces c.
std::string render_config(const RunConfig& config);

/// Reads samples-as-rows numeric CSV into a p x n observation block
/// (transposed). InputError messages name the offending row and column.
Matrix read_samples_csv(std::istream& in, bool has_header);

/// Reads a square numeric CSV (a covariance matrix).
Matrix read_matrix_csv(std::istream& in);

void write_matrix_csv(const Matrix& m, std::ostream& out);

/// Shortest round-trip decimal form, used for key=value diagnostics.
std::string format_scalar(double value);

struct EstimateOptions {
  std::string input;
  std::string output;
  std::string variant = "u";
  bool has_header = false;
};

int cmd_estimate(const EstimateOptions& options, std::ostream& out, std::ostream& err);

struct ExperimentOptions {
  std::string config_path;  ///< config file, or a manifest (.json) to re-run
  std::optional<std::string> out;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> threads;
};

int cmd_experiment(ExperimentMode mode, const ExperimentOptions& options, std::ostream& out,
                   std::ostream& err);

struct OracleOptions {
  std::optional<Index> p;
  Index n = 0;
  bool gaussian = false;
  std::optional<double> student_nu;
  bool identity = false;
  std::string sigma_path;
};

int cmd_oracle(const OracleOptions& options, std::ostream& out, std::ostream& err);

/// Full command-line entry point (subcommands estimate, grid, convergence,
/// oracle). Returns the process exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace lwshrink::cli
