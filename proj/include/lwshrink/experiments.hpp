#pragma once

#include "lwshrink/linalg.hpp"
#include "lwshrink/population.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace lwshrink {

enum class Estimator { EC, LW_u, LW_r, LW_m, LW_s, LW_ex, LW_op };

std::string_view to_string(Estimator e) noexcept;
Estimator parse_estimator(std::string_view text);
std::vector<Estimator> all_estimators();

enum class ExperimentMode { grid, convergence };
enum class SigmaMode { identity, wishart };

std::string_view to_string(ExperimentMode m) noexcept;
std::string_view to_string(SigmaMode m) noexcept;

/// Desk-scale defaults: n_mc = 200 and p, n in {5, 15, ..., 45}.
struct ExperimentConfig {
  ExperimentMode mode = ExperimentMode::grid;
  Distribution distribution = Gaussian{};
  SigmaMode sigma_mode = SigmaMode::identity;
  std::vector<Index> grid_p = {5, 15, 25, 35, 45};
  std::vector<Index> grid_n = {5, 15, 25, 35, 45};
  double ratio = 1.0;  ///< p / n in convergence mode
  std::vector<Index> n_values = {20, 40, 80, 160};
  Index n_mc = 200;
  std::vector<Estimator> estimators = all_estimators();
  std::uint64_t base_seed = 0;
  unsigned threads = 0;  ///< 0 picks std::thread::hardware_concurrency()
  bool record_timing = false;
};

/// Full-size settings: p, n in {5, 7, ..., 99} and n_mc = 10000.
/// Hours of compute on one core.
ExperimentConfig full_scale_grid();

/// Full-size convergence run at p / n = c with n_mc = 10000.
ExperimentConfig full_scale_convergence(double c);

/// Throws std::invalid_argument on an inconsistent configuration, e.g.
/// LW_ex requested for a law without closed-form scalars.
void validate(const ExperimentConfig& config);

/// One Monte-Carlo replication: draw Sigma (fixed identity or a fresh
/// normalised Wishart), draw X, then compute every requested estimator from
/// X and its loss |estimate - Sigma|^2. Entries follow `estimators` order.
struct IterationOutcome {
  std::vector<double> losses;
  std::vector<double> seconds;      ///< wall time per estimator
  std::vector<double> intensities;  ///< shrinkage intensity, NaN for EC/LW_ex/LW_op
  std::optional<double> oracle_expected_loss;  ///< alpha2 beta2 / delta2 if available
};

IterationOutcome run_iteration(Index p, Index n, const Distribution& distribution,
                               SigmaMode sigma_mode, std::span<const Estimator> estimators,
                               std::uint64_t seed);

struct LossStats {
  double mean = 0.0;
  double std_err = 0.0;  ///< sample standard deviation / sqrt(count)
};

LossStats summarize(std::span<const double> values);

/// Mean wall time in seconds.
double timing_capture(std::span<const double> seconds);

struct EstimatorSummary {
  Estimator estimator = Estimator::EC;
  LossStats loss;
  double mean_time_s = 0.0;
  double min_intensity = 0.0;  ///< NaN when the estimator has no intensity
  double max_intensity = 0.0;
  std::vector<double> losses;  ///< per iteration, in iteration order
};

struct CellResult {
  Index p = 0;
  Index n = 0;
  std::vector<EstimatorSummary> estimators;
  /// Mean over iterations of the analytic alpha2 beta2 / delta2.
  std::optional<double> mean_oracle_expected_loss;

  const EstimatorSummary& at(Estimator e) const;
  bool has(Estimator e) const noexcept;
};

/// Runs config.n_mc replications of one (p, n) cell over a bounded worker
/// pool. Iteration i uses a seed derived from (base_seed, p, n, i), and the
/// reduction is done in iteration order, so results do not depend on the
/// number of workers.
CellResult run_cell(Index p, Index n, const ExperimentConfig& config);

/// One CSV row.
struct LossRecord {
  Estimator estimator = Estimator::EC;
  Index p = 0;
  Index n = 0;
  double c = 0.0;
  std::string distribution;
  SigmaMode sigma_mode = SigmaMode::identity;
  Index n_mc = 0;
  double mean_loss = 0.0;
  double std_err = 0.0;
  double mean_time_s = 0.0;  ///< NaN unless timing was recorded
};

struct ExperimentTable {
  ExperimentConfig config;
  std::vector<CellResult> cells;

  std::vector<LossRecord> records() const;
};

/// Every (p, n) pair of the grid, p-major.
ExperimentTable run_grid(const ExperimentConfig& config);

/// p = max(1, round(ratio * n)) for every n in config.n_values.
ExperimentTable run_convergence(const ExperimentConfig& config);

ExperimentTable run_experiment(const ExperimentConfig& config);

/// log10(loss_a) - log10(loss_b) per cell, raw and relative to LW_op (the
/// LW_op mean loss is subtracted from both before taking logs). A value is
/// NaN when its argument is not positive or LW_op was not run.
struct LogDifference {
  Index p = 0;
  Index n = 0;
  Estimator a = Estimator::EC;
  Estimator b = Estimator::EC;
  double raw = 0.0;
  double relative = 0.0;
};

/// All ordered pairs (a, b) where b is LW_u and a is another requested
/// estimator other than LW_op, for every cell.
std::vector<LogDifference> pairwise_log10_differences(const ExperimentTable& table);

/// "%.17g", with "nan" / "inf" / "-inf" for non-finite values.
std::string format_double(double value);

inline constexpr std::string_view kLossCsvHeader =
    "estimator,p,n,c,distribution,sigma_mode,n_mc,mean_loss,std_err,mean_time_s";
inline constexpr std::string_view kDifferenceCsvHeader =
    "p,n,estimator_a,estimator_b,log10_diff,log10_diff_relative";

void write_loss_csv(const ExperimentTable& table, std::ostream& out);
void write_difference_csv(const ExperimentTable& table, std::ostream& out);

}  // namespace lwshrink
