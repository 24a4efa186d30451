#include "lwshrink/experiments.hpp"
#include "lwshrink/oracle.hpp"

#include "test_helpers.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <set>
#include <sstream>

namespace lwshrink {
namespace {

constexpr std::array kLw = {Estimator::LW_u, Estimator::LW_r, Estimator::LW_m, Estimator::LW_s};

ExperimentConfig grid_config(std::vector<Index> values, Index n_mc) {
  ExperimentConfig c;
  c.mode = ExperimentMode::grid;
  c.grid_p = values;
  c.grid_n = values;
  c.n_mc = n_mc;
  return c;
}

ExperimentConfig convergence_config(double ratio, std::vector<Index> n_values, Index n_mc) {
  ExperimentConfig c;
  c.mode = ExperimentMode::convergence;
  c.ratio = ratio;
  c.n_values = std::move(n_values);
  c.n_mc = n_mc;
  return c;
}

std::string loss_csv(const ExperimentTable& t) {
  std::ostringstream os;
  write_loss_csv(t, os);
  return os.str();
}

TEST(Estimators, NamesRoundTrip) {
  for (Estimator e : all_estimators()) EXPECT_EQ(parse_estimator(to_string(e)), e);
  EXPECT_THROW(parse_estimator("LW_x"), std::invalid_argument);
}

TEST(Presets, FullScale) {
  const auto g = full_scale_grid();
  ASSERT_EQ(g.grid_p.size(), 48u);
  EXPECT_EQ(g.grid_p.front(), 5);
  EXPECT_EQ(g.grid_p.back(), 99);
  EXPECT_EQ(g.grid_n, g.grid_p);
  EXPECT_EQ(g.n_mc, 10000);
  const auto c = full_scale_convergence(0.25);
  EXPECT_EQ(c.mode, ExperimentMode::convergence);
  EXPECT_EQ(c.ratio, 0.25);
  EXPECT_NO_THROW(validate(g));
  EXPECT_NO_THROW(validate(c));
  const ExperimentConfig desk;
  EXPECT_EQ(desk.n_mc, 200);
  EXPECT_EQ(desk.grid_p, (std::vector<Index>{5, 15, 25, 35, 45}));
}

TEST(RunIteration, OraclesAreExactAtIdentity) {
  const std::vector<Estimator> es = {Estimator::LW_ex, Estimator::LW_op};
  const auto out = run_iteration(6, 10, Gaussian{}, SigmaMode::identity, es, 3);
  EXPECT_EQ(out.losses[0], 0.0);
  EXPECT_NEAR(out.losses[1], 0.0, 1e-28);
  EXPECT_EQ(*out.oracle_expected_loss, 0.0);
}

TEST(RunIteration, Deterministic) {
  const auto es = all_estimators();
  const auto a = run_iteration(7, 9, Student{10.0}, SigmaMode::wishart, es, 11);
  const auto b = run_iteration(7, 9, Student{10.0}, SigmaMode::wishart, es, 11);
  EXPECT_EQ(a.losses, b.losses);
  const auto c = run_iteration(7, 9, Student{10.0}, SigmaMode::wishart, es, 12);
  EXPECT_NE(a.losses, c.losses);
}

TEST(RunIteration, OracleUnavailableForMixedLaw) {
  const std::vector<Estimator> es = {Estimator::LW_ex};
  EXPECT_THROW(run_iteration(4, 10, MixedStudent{15.0, 8.5}, SigmaMode::identity, es, 1), std::invalid_argument);
  const std::vector<Estimator> ok = {Estimator::EC, Estimator::LW_op};
  EXPECT_NO_THROW(run_iteration(4, 10, MixedStudent{15.0, 8.5}, SigmaMode::wishart, ok, 1));
}

TEST(RunCell, SampleCovarianceLossMatchesBeta2) {
  ExperimentConfig c = grid_config({5}, 10000);
  c.grid_n = {20};
  c.estimators = {Estimator::EC};
  const auto cell = run_cell(5, 20, c);
  const auto& ec = cell.at(Estimator::EC);
  EXPECT_LT(std::abs(ec.loss.mean - 6.0 / 19.0), 4 * ec.loss.std_err);
}

TEST(Summarize, KnownValues) {
  const std::vector<double> v = {1.0, 2.0, 3.0, 4.0};
  const auto s = summarize(v);
  EXPECT_DOUBLE_EQ(s.mean, 2.5);
  EXPECT_DOUBLE_EQ(s.std_err, std::sqrt(5.0 / 3.0) / 2.0);
  EXPECT_DOUBLE_EQ(timing_capture(v), 2.5);
}

TEST(Validate, RejectsInconsistentConfigs) {
  ExperimentConfig c = convergence_config(1.0, {20, 40}, 10);
  c.distribution = MixedStudent{15.0, 8.5};
  EXPECT_THROW(validate(c), std::invalid_argument);
  c.estimators = {Estimator::LW_u, Estimator::LW_op};
  EXPECT_NO_THROW(validate(c));

  ExperimentConfig small = grid_config({5}, 10);
  small.grid_n = {3};
  EXPECT_THROW(validate(small), std::invalid_argument);
  small.estimators = {Estimator::EC, Estimator::LW_m};
  EXPECT_NO_THROW(validate(small));

  ExperimentConfig heavy = grid_config({5}, 10);
  heavy.distribution = Student{3.5};
  EXPECT_THROW(validate(heavy), PreconditionError);
}

TEST(RunGrid, CompleteTable) {
  const auto table = run_grid(grid_config({5, 15, 25}, 100));
  const auto rows = table.records();
  EXPECT_EQ(rows.size(), 9u * all_estimators().size());
  std::set<std::tuple<Index, Index, std::string>> seen;
  for (const auto& r : rows) {
    seen.emplace(r.p, r.n, std::string(to_string(r.estimator)));
    EXPECT_GE(r.mean_loss, 0.0);
    EXPECT_EQ(r.n_mc, 100);
    EXPECT_TRUE(std::isnan(r.mean_time_s));
  }
  EXPECT_EQ(seen.size(), rows.size());
}

TEST(RunGrid, ThreadCountDoesNotChangeResults) {
  ExperimentConfig c = grid_config({5, 12}, 60);
  c.sigma_mode = SigmaMode::wishart;
  c.distribution = Student{10.0};
  c.threads = 1;
  const std::string one = loss_csv(run_grid(c));
  c.threads = 4;
  EXPECT_EQ(loss_csv(run_grid(c)), one);
  c.base_seed = 1;
  EXPECT_NE(loss_csv(run_grid(c)), one);
}

TEST(RunGrid, CellInvariants) {
  ExperimentConfig c = grid_config({5, 15, 25}, 300);
  c.sigma_mode = SigmaMode::wishart;
  const auto table = run_grid(c);
  for (const auto& cell : table.cells) {
    const auto& op = cell.at(Estimator::LW_op);
    for (Estimator e : kLw) {
      const auto& v = cell.at(e);
      EXPECT_LE(op.loss.mean, v.loss.mean + 2 * v.loss.std_err);
      EXPECT_GE(v.min_intensity, 0.0);
      EXPECT_LE(v.max_intensity, 1.0);
    }
    const auto& ex = cell.at(Estimator::LW_ex);
    ASSERT_TRUE(cell.mean_oracle_expected_loss.has_value());
    EXPECT_LT(std::abs(ex.loss.mean - *cell.mean_oracle_expected_loss), 4 * ex.loss.std_err)
        << "p=" << cell.p << " n=" << cell.n;
  }
}

TEST(RunGrid, UnbiasedVariantWinsWhenDimensionExceedsSamples) {
  const auto table = run_grid(grid_config({5, 15, 25}, 300));
  for (const auto& cell : table.cells) {
    if (cell.p <= cell.n) continue;
    const auto& m = cell.at(Estimator::LW_m);
    const auto& u = cell.at(Estimator::LW_u);
    const double se = std::hypot(m.loss.std_err, u.loss.std_err);
    EXPECT_GE(m.loss.mean - u.loss.mean, -2 * se) << "p=" << cell.p << " n=" << cell.n;
  }
}

TEST(RunGrid, RescaledVariantWinsSomewhereWithWishartSigma) {
  ExperimentConfig c = grid_config({5, 15, 25, 35, 45}, 400);
  c.sigma_mode = SigmaMode::wishart;
  c.estimators = {Estimator::LW_u, Estimator::LW_s};
  const auto table = run_grid(c);
  int wins = 0;
  for (const auto& cell : table.cells) {
    if (cell.n > cell.p && cell.at(Estimator::LW_s).loss.mean < cell.at(Estimator::LW_u).loss.mean) ++wins;
  }
  EXPECT_GT(wins, 0);
}

TEST(RunConvergence, ExcessOverProjectionDecreases) {
  const auto table = run_convergence(convergence_config(1.0, {20, 40, 80}, 400));
  ASSERT_EQ(table.cells.size(), 3u);
  for (std::size_t k = 0; k < 3; ++k) EXPECT_EQ(table.cells[k].p, table.cells[k].n);
  auto excess = [&](std::size_t k) {
    return table.cells[k].at(Estimator::LW_u).loss.mean - table.cells[k].at(Estimator::LW_op).loss.mean;
  };
  for (std::size_t k = 1; k < 3; ++k) {
    const double se = table.cells[k].at(Estimator::LW_u).loss.std_err +
                      table.cells[k - 1].at(Estimator::LW_u).loss.std_err;
    EXPECT_LT(excess(k), excess(k - 1) + 2 * se);
  }
}

TEST(RunConvergence, RoundsDimension) {
  ExperimentConfig c = convergence_config(0.25, {10, 2}, 5);
  c.estimators = {Estimator::EC, Estimator::LW_m};
  const auto table = run_convergence(c);
  EXPECT_EQ(table.cells[0].p, 3);  // round(2.5) away from zero
  EXPECT_EQ(table.cells[1].p, 1);
}

TEST(RunConvergence, GapsWidenWithConcentration) {
  auto spread = [](double ratio) {
    ExperimentConfig c = convergence_config(ratio, {40}, 300);
    c.estimators = {Estimator::LW_u, Estimator::LW_r, Estimator::LW_m, Estimator::LW_s};
    const auto cell = run_convergence(c).cells.front();
    double lo = INFINITY, hi = -INFINITY;
    for (const auto& s : cell.estimators) {
      lo = std::min(lo, s.loss.mean);
      hi = std::max(hi, s.loss.mean);
    }
    return hi - lo;
  };
  EXPECT_GT(spread(4.0), spread(0.25));
}

TEST(Timing, SampleCovarianceIsCheapestAndCostGrowsWithDimension) {
  auto times = [](Index p) {
    ExperimentConfig c = grid_config({p}, 100);
    c.grid_n = {40};
    c.record_timing = true;
    c.threads = 1;
    c.estimators = {Estimator::EC, Estimator::LW_u, Estimator::LW_r, Estimator::LW_m, Estimator::LW_s};
    return run_cell(p, 40, c);
  };
  const auto small = times(20);
  const auto large = times(160);
  for (Estimator e : kLw) EXPECT_LT(large.at(Estimator::EC).mean_time_s, large.at(e).mean_time_s);
  const double slope = std::log(large.at(Estimator::LW_u).mean_time_s / small.at(Estimator::LW_u).mean_time_s) /
                       std::log(160.0 / 20.0);
  EXPECT_GT(slope, 1.0);
}

TEST(Differences, RelativeToProjection) {
  ExperimentTable table;
  table.config = grid_config({5}, 1);
  CellResult cell;
  cell.p = 5;
  cell.n = 5;
  auto add = [&](Estimator e, double mean) {
    EstimatorSummary s;
    s.estimator = e;
    s.loss.mean = mean;
    cell.estimators.push_back(s);
  };
  add(Estimator::LW_m, 0.3);
  add(Estimator::LW_u, 0.2);
  add(Estimator::LW_s, 0.1);
  add(Estimator::LW_op, 0.1);
  table.cells.push_back(cell);
  const auto d = pairwise_log10_differences(table);
  ASSERT_EQ(d.size(), 2u);
  EXPECT_EQ(d[0].a, Estimator::LW_m);
  EXPECT_NEAR(d[0].raw, std::log10(1.5), 1e-15);
  EXPECT_NEAR(d[0].relative, std::log10(2.0), 1e-15);
  EXPECT_NEAR(d[1].raw, std::log10(0.5), 1e-15);
  EXPECT_TRUE(std::isnan(d[1].relative));
}

TEST(Csv, HeaderAndPrecision) {
  ExperimentConfig c = convergence_config(1.0, {6}, 3);
  c.estimators = {Estimator::EC};
  const auto table = run_convergence(c);
  std::istringstream in(loss_csv(table));
  std::string header, row;
  std::getline(in, header);
  std::getline(in, row);
  EXPECT_EQ(header, kLossCsvHeader);
  EXPECT_EQ(row.rfind("EC,6,6,1,gaussian,identity,3,", 0), 0u) << row;
  const auto mean_field = row.substr(std::string("EC,6,6,1,gaussian,identity,3,").size());
  const double mean = std::stod(mean_field);
  EXPECT_EQ(mean, table.cells[0].at(Estimator::EC).loss.mean);
  EXPECT_EQ(row.substr(row.rfind(',') + 1), "nan");
  EXPECT_EQ(format_double(0.1), "0.10000000000000001");
}

}  // namespace
}  // namespace lwshrink
