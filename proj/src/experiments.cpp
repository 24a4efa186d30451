#include "lwshrink/experiments.hpp"

#include "lwshrink/oracle.hpp"
#include "lwshrink/sampling.hpp"
#include "lwshrink/shrinkage.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <limits>
#include <mutex>
#include <ostream>
#include <thread>

namespace lwshrink {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::optional<Variant> variant_of(Estimator e) {
  switch (e) {
    case Estimator::LW_u: return Variant::u;
    case Estimator::LW_r: return Variant::r;
    case Estimator::LW_m: return Variant::m;
    case Estimator::LW_s: return Variant::s;
    default: return std::nullopt;
  }
}

bool has_closed_form_oracle(const Distribution& d) {
  return !std::holds_alternative<MixedStudent>(d);
}

std::uint64_t cell_seed(std::uint64_t base, Index p, Index n) {
  return derive_seed(derive_seed(base, static_cast<std::uint64_t>(p)), static_cast<std::uint64_t>(n));
}

unsigned worker_count(unsigned requested, Index tasks) {
  unsigned threads = requested != 0 ? requested : std::max(1u, std::thread::hardware_concurrency());
  return static_cast<unsigned>(std::min<Index>(threads, std::max<Index>(tasks, 1)));
}

template <typename Task>
void parallel_for(Index count, unsigned threads, Task&& task) {
  std::atomic<Index> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (Index i = next++; i < count; i = next++) {
      try {
        task(i);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = count;
      }
    }
  };
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);
}

}  // namespace

std::string_view to_string(Estimator e) noexcept {
  switch (e) {
    case Estimator::EC: return "EC";
    case Estimator::LW_u: return "LW_u";
    case Estimator::LW_r: return "LW_r";
    case Estimator::LW_m: return "LW_m";
    case Estimator::LW_s: return "LW_s";
    case Estimator::LW_ex: return "LW_ex";
    case Estimator::LW_op: return "LW_op";
  }
  return "?";
}

Estimator parse_estimator(std::string_view text) {
  for (Estimator e : all_estimators()) {
    if (to_string(e) == text) return e;
  }
  throw std::invalid_argument("unknown estimator '" + std::string(text) +
                              "' (expected EC, LW_u, LW_r, LW_m, LW_s, LW_ex or LW_op)");
}

std::vector<Estimator> all_estimators() {
  return {Estimator::EC,   Estimator::LW_u,  Estimator::LW_r, Estimator::LW_m,
          Estimator::LW_s, Estimator::LW_ex, Estimator::LW_op};
}

std::string_view to_string(ExperimentMode m) noexcept {
  return m == ExperimentMode::grid ? "grid" : "convergence";
}

std::string_view to_string(SigmaMode m) noexcept {
  return m == SigmaMode::identity ? "identity" : "wishart";
}

ExperimentConfig full_scale_grid() {
  ExperimentConfig config;
  config.mode = ExperimentMode::grid;
  config.grid_p.clear();
  for (Index v = 5; v < 100; v += 2) config.grid_p.push_back(v);
  config.grid_n = config.grid_p;
  config.n_mc = 10000;
  return config;
}

ExperimentConfig full_scale_convergence(double c) {
  ExperimentConfig config;
  config.mode = ExperimentMode::convergence;
  config.ratio = c;
  config.n_values = {10, 20, 40, 80, 160};
  config.n_mc = 10000;
  return config;
}

void validate(const ExperimentConfig& config) {
  if (config.n_mc < 1) throw std::invalid_argument("n_mc must be >= 1");
  if (config.estimators.empty()) throw std::invalid_argument("no estimators requested");

  const bool wants_oracle = std::ranges::find(config.estimators, Estimator::LW_ex) != config.estimators.end();
  if (wants_oracle && !has_closed_form_oracle(config.distribution)) {
    throw std::invalid_argument("LW_ex needs closed-form oracle scalars, which are not available for " +
                                distribution_label(config.distribution) +
                                "; remove LW_ex from the estimator list");
  }
  // Validates the tail parameters.
  PopulationModel(SymmetricMatrix::identity(2), config.distribution);

  const bool needs_u = std::ranges::find(config.estimators, Estimator::LW_u) != config.estimators.end();
  const Index min_n = needs_u ? minimum_samples(Variant::u) : 2;
  auto check_n = [&](Index n) {
    if (n < min_n) {
      throw std::invalid_argument("n=" + std::to_string(n) + " is below the minimum of " +
                                  std::to_string(min_n) + " for the requested estimators");
    }
  };

  if (config.mode == ExperimentMode::grid) {
    if (config.grid_p.empty() || config.grid_n.empty()) throw std::invalid_argument("empty grid");
    for (Index p : config.grid_p) {
      if (p < 1) throw std::invalid_argument("grid p values must be >= 1");
    }
    std::ranges::for_each(config.grid_n, check_n);
  } else {
    if (!(config.ratio > 0.0) || !std::isfinite(config.ratio)) {
      throw std::invalid_argument("convergence ratio c must be positive");
    }
    if (config.n_values.empty()) throw std::invalid_argument("empty n list");
    std::ranges::for_each(config.n_values, check_n);
  }
  if (std::holds_alternative<MixedStudent>(config.distribution)) {
    auto check_p = [](Index p) {
      if (p < 2) throw std::invalid_argument("mixed t laws need p >= 2");
    };
    if (config.mode == ExperimentMode::grid) std::ranges::for_each(config.grid_p, check_p);
  }
}

IterationOutcome run_iteration(Index p, Index n, const Distribution& distribution,
                               SigmaMode sigma_mode, std::span<const Estimator> estimators,
                               std::uint64_t seed) {
  using Clock = std::chrono::steady_clock;

  SymmetricMatrix sigma = sigma_mode == SigmaMode::identity ? SymmetricMatrix::identity(p)
                                                            : random_wishart_sigma(p, derive_seed(seed, 0));
  const PopulationModel model(std::move(sigma), distribution);
  const ObservationMatrix x = sample(model, n, derive_seed(seed, 1));

  IterationOutcome out;
  std::optional<OracleScalars> scalars = analytic_oracle(model, n);
  if (scalars) out.oracle_expected_loss = oracle_expected_loss(*scalars);

  out.losses.reserve(estimators.size());
  out.seconds.reserve(estimators.size());
  out.intensities.reserve(estimators.size());
  for (Estimator e : estimators) {
    double intensity = kNaN;
    const auto start = Clock::now();
    SymmetricMatrix value = [&] {
      if (auto v = variant_of(e)) {
        ShrinkageResult r = estimate(x, *v);
        intensity = r.shrinkage_intensity;
        return std::move(r.estimate);
      }
      switch (e) {
        case Estimator::EC:
          return sample_covariance(x);
        case Estimator::LW_ex:
          if (!scalars) {
            throw std::invalid_argument("LW_ex requested without closed-form oracle scalars for " +
                                        distribution_label(distribution));
          }
          return oracle_sigma_star(*scalars, sample_covariance(x));
        case Estimator::LW_op:
          return optimal_sigma_starstar(model.sigma(), sample_covariance(x)).sigma_starstar;
        default:
          throw std::logic_error("unhandled estimator");
      }
    }();
    const auto stop = Clock::now();
    out.seconds.push_back(std::chrono::duration<double>(stop - start).count());
    out.losses.push_back(loss(value, model.sigma()));
    out.intensities.push_back(intensity);
  }
  return out;
}

LossStats summarize(std::span<const double> values) {
  LossStats stats;
  if (values.empty()) return {kNaN, kNaN};
  double sum = 0.0;
  for (double v : values) sum += v;
  stats.mean = sum / static_cast<double>(values.size());
  if (values.size() < 2) return stats;
  double ss = 0.0;
  for (double v : values) ss += (v - stats.mean) * (v - stats.mean);
  const double count = static_cast<double>(values.size());
  stats.std_err = std::sqrt(ss / (count - 1.0)) / std::sqrt(count);
  return stats;
}

double timing_capture(std::span<const double> seconds) {
  if (seconds.empty()) return kNaN;
  double sum = 0.0;
  for (double s : seconds) sum += s;
  return sum / static_cast<double>(seconds.size());
}

const EstimatorSummary& CellResult::at(Estimator e) const {
  for (const auto& s : estimators) {
    if (s.estimator == e) return s;
  }
  throw std::out_of_range("estimator " + std::string(to_string(e)) + " was not run for this cell");
}

bool CellResult::has(Estimator e) const noexcept {
  return std::ranges::any_of(estimators, [e](const auto& s) { return s.estimator == e; });
}

CellResult run_cell(Index p, Index n, const ExperimentConfig& config) {
  const Index iterations = config.n_mc;
  const std::uint64_t seed = cell_seed(config.base_seed, p, n);
  std::vector<IterationOutcome> outcomes(static_cast<std::size_t>(iterations));

  try {
    parallel_for(iterations, worker_count(config.threads, iterations), [&](Index i) {
      outcomes[static_cast<std::size_t>(i)] =
          run_iteration(p, n, config.distribution, config.sigma_mode, config.estimators,
                        derive_seed(seed, static_cast<std::uint64_t>(i)));
    });
  } catch (const std::exception& e) {
    throw std::runtime_error("cell (p=" + std::to_string(p) + ", n=" + std::to_string(n) +
                             ") failed: " + e.what());
  }

  CellResult cell;
  cell.p = p;
  cell.n = n;
  std::vector<double> seconds(static_cast<std::size_t>(iterations));
  for (std::size_t k = 0; k < config.estimators.size(); ++k) {
    EstimatorSummary summary;
    summary.estimator = config.estimators[k];
    summary.losses.resize(outcomes.size());
    summary.min_intensity = std::numeric_limits<double>::infinity();
    summary.max_intensity = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < outcomes.size(); ++i) {
      summary.losses[i] = outcomes[i].losses[k];
      seconds[i] = outcomes[i].seconds[k];
      const double intensity = outcomes[i].intensities[k];
      if (!std::isnan(intensity)) {
        summary.min_intensity = std::min(summary.min_intensity, intensity);
        summary.max_intensity = std::max(summary.max_intensity, intensity);
      }
    }
    if (!variant_of(summary.estimator)) summary.min_intensity = summary.max_intensity = kNaN;
    summary.loss = summarize(summary.losses);
    summary.mean_time_s = config.record_timing ? timing_capture(seconds) : kNaN;
    cell.estimators.push_back(std::move(summary));
  }

  if (!outcomes.empty() && outcomes.front().oracle_expected_loss) {
    double sum = 0.0;
    for (const auto& o : outcomes) sum += *o.oracle_expected_loss;
    cell.mean_oracle_expected_loss = sum / static_cast<double>(outcomes.size());
  }
  return cell;
}

std::vector<LossRecord> ExperimentTable::records() const {
  std::vector<LossRecord> rows;
  const std::string label = distribution_label(config.distribution);
  for (const auto& cell : cells) {
    for (const auto& s : cell.estimators) {
      LossRecord r;
      r.estimator = s.estimator;
      r.p = cell.p;
      r.n = cell.n;
      r.c = static_cast<double>(cell.p) / static_cast<double>(cell.n);
      r.distribution = label;
      r.sigma_mode = config.sigma_mode;
      r.n_mc = config.n_mc;
      r.mean_loss = s.loss.mean;
      r.std_err = s.loss.std_err;
      r.mean_time_s = s.mean_time_s;
      rows.push_back(std::move(r));
    }
  }
  return rows;
}

ExperimentTable run_grid(const ExperimentConfig& config) {
  if (config.mode != ExperimentMode::grid) throw std::invalid_argument("run_grid: config mode is not grid");
  validate(config);
  ExperimentTable table{config, {}};
  for (Index p : config.grid_p) {
    for (Index n : config.grid_n) table.cells.push_back(run_cell(p, n, config));
  }
  return table;
}

ExperimentTable run_convergence(const ExperimentConfig& config) {
  if (config.mode != ExperimentMode::convergence) {
    throw std::invalid_argument("run_convergence: config mode is not convergence");
  }
  validate(config);
  ExperimentTable table{config, {}};
  for (Index n : config.n_values) {
    const Index p = std::max<Index>(1, std::llround(config.ratio * static_cast<double>(n)));
    if (std::holds_alternative<MixedStudent>(config.distribution) && p < 2) {
      throw std::invalid_argument("mixed t laws need p >= 2 (n=" + std::to_string(n) + ")");
    }
    table.cells.push_back(run_cell(p, n, config));
  }
  return table;
}

ExperimentTable run_experiment(const ExperimentConfig& config) {
  return config.mode == ExperimentMode::grid ? run_grid(config) : run_convergence(config);
}

std::vector<LogDifference> pairwise_log10_differences(const ExperimentTable& table) {
  auto log_or_nan = [](double v) { return v > 0.0 ? std::log10(v) : kNaN; };
  std::vector<LogDifference> rows;
  for (const auto& cell : table.cells) {
    if (!cell.has(Estimator::LW_u)) continue;
    const double base = cell.at(Estimator::LW_u).loss.mean;
    const std::optional<double> bound =
        cell.has(Estimator::LW_op) ? std::optional(cell.at(Estimator::LW_op).loss.mean) : std::nullopt;
    for (const auto& s : cell.estimators) {
      if (s.estimator == Estimator::LW_u || s.estimator == Estimator::LW_op) continue;
      LogDifference d;
      d.p = cell.p;
      d.n = cell.n;
      d.a = s.estimator;
      d.b = Estimator::LW_u;
      d.raw = log_or_nan(s.loss.mean) - log_or_nan(base);
      d.relative = bound ? log_or_nan(s.loss.mean - *bound) - log_or_nan(base - *bound) : kNaN;
      rows.push_back(d);
    }
  }
  return rows;
}

std::string format_double(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

void write_loss_csv(const ExperimentTable& table, std::ostream& out) {
  out << kLossCsvHeader << '\n';
  for (const auto& r : table.records()) {
    out << to_string(r.estimator) << ',' << r.p << ',' << r.n << ',' << format_double(r.c) << ','
        << r.distribution << ',' << to_string(r.sigma_mode) << ',' << r.n_mc << ','
        << format_double(r.mean_loss) << ',' << format_double(r.std_err) << ','
        << format_double(r.mean_time_s) << '\n';
  }
}

void write_difference_csv(const ExperimentTable& table, std::ostream& out) {
  out << kDifferenceCsvHeader << '\n';
  for (const auto& d : pairwise_log10_differences(table)) {
    out << d.p << ',' << d.n << ',' << to_string(d.a) << ',' << to_string(d.b) << ','
        << format_double(d.raw) << ',' << format_double(d.relative) << '\n';
  }
}

}  // namespace lwshrink
