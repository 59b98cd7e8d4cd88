#include "mclsquad/bench/csv.hpp"
#include "mclsquad/bench/problems.hpp"
#include "mclsquad/bench/sweep.hpp"
#include "mclsquad/estimators.hpp"
#include "mclsquad/normal.hpp"
#include "mclsquad/sampling.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <chrono>
#include <cmath>
#include <sstream>

using namespace mclsquad;
using namespace mclsquad::bench;

TEST(Normal, InverseCdfAgainstOracle) {
  EXPECT_NEAR(inverse_normal_cdf(0.975), 1.959964, 1e-6);
  EXPECT_EQ(inverse_normal_cdf(0.5), 0.0);
  // The quadrature oracle loses accuracy deeper in the tail than 1e-7.
  for (double p : {1e-7, 1e-6, 0.001, 0.02, 0.1, 0.3, 0.5, 0.7, 0.9, 0.98, 0.999, 1 - 1e-7}) {
    const double ref = oracle::normal_quantile(p);
    EXPECT_NEAR(inverse_normal_cdf(p), ref, 1.2e-9 * std::max(1.0, std::abs(ref))) << p;
  }
  EXPECT_TRUE(std::isinf(inverse_normal_cdf(0.0)));
  EXPECT_NEAR(normal_cdf(1.959964), 0.975, 1e-7);
  EXPECT_NEAR(normal_cdf(-0.7), oracle::normal_cdf(-0.7), 1e-12);
}

TEST(Basket, CenterValue) {
  const BasketParams p;
  for (std::size_t d : {1u, 4u, 16u}) {
    const std::vector<double> x(d, 0.5);
    EXPECT_NEAR(basket_payoff(x, p, basket_cholesky(d, p.rho)), std::exp(-0.05) * (10.0 * std::exp(0.03) - 10.0), 1e-12);
  }
  EXPECT_NEAR(std::exp(-0.05) * (10.0 * std::exp(0.03) - 10.0), 0.2897, 1e-4);
}

TEST(Basket, ClampAndDeepOutOfMoney) {
  const BasketParams p;
  const auto L = basket_cholesky(3, p.rho);
  bool clamped = false;
  const std::vector<double> zero(3, 0.0);
  EXPECT_EQ(basket_payoff(zero, p, L, &clamped), 0.0);
  EXPECT_TRUE(clamped);
  clamped = false;
  const std::vector<double> low(3, 1e-4);
  EXPECT_EQ(basket_payoff(low, p, L, &clamped), 0.0);
  EXPECT_FALSE(clamped);
  const std::vector<double> one(3, 1.0);
  EXPECT_TRUE(std::isfinite(basket_payoff(one, p, L)));
}

TEST(Basket, CholeskyFactor) {
  const auto L = basket_cholesky(5, 0.1);
  const Eigen::MatrixXd C = L * L.transpose();
  for (int i = 0; i < 5; ++i) {
    for (int j = 0; j < 5; ++j) EXPECT_NEAR(C(i, j), i == j ? 1.0 : 0.1, 1e-15);
  }
  EXPECT_TRUE(L.isLowerTriangular());
}

TEST(Basket, GeometricPriceMatchesMc) {
  // MC on the geometric basket itself as an independent check of the closed form.
  const BasketParams p;
  const std::size_t d = 4;
  const auto L = basket_cholesky(d, p.rho);
  const auto g = make_integrand("geo", HyperRect::unit_cube(d), [&](Point x) {
    Eigen::VectorXd z(d);
    for (std::size_t m = 0; m < d; ++m) z[m] = inverse_normal_cdf(std::clamp(x[m], 1e-12, 1 - 1e-12));
    const Eigen::VectorXd y = L * z;
    double logs = 0.0;
    for (std::size_t m = 0; m < d; ++m) logs += (p.r - 0.5 * p.sigma * p.sigma) * p.T + p.sigma * std::sqrt(p.T) * y[m];
    return std::exp(-p.r * p.T) * std::max(0.0, p.S0 * std::exp(logs / d) - p.K);
  });
  const EstimateReport r = mc_estimate(antithetic_batch(g, 200000, {1, 0}));
  EXPECT_NEAR(r.estimate, geometric_basket_price(d, p), 4.0 * r.ci_half_width);
}

TEST(Registry, StandardProblems) {
  const ProblemRegistry& reg = standard_problems();
  for (const char* n : {"runge1d", "genz1", "genz5", "basket"}) EXPECT_TRUE(reg.contains(n)) << n;
  EXPECT_FALSE(reg.contains("genz2"));
  EXPECT_NEAR(reg.get("runge1d", 1).true_value, 0.5493603067, 1e-10);
  EXPECT_NEAR(reg.get("genz1", 6).true_value, 0.1096719475, 1e-10);
  EXPECT_NEAR(reg.get("genz1", 6).true_value, std::pow(2 * std::sin(0.5), 6) * std::sin(3.0), 1e-15);
  EXPECT_NEAR(reg.get("genz5", 6).true_value, 4.7216320834, 1e-10);
  EXPECT_THROW(reg.get("runge1d", 2), std::invalid_argument);
  EXPECT_THROW(reg.get("nope", 2), std::invalid_argument);
  const TestProblem b = reg.get("basket", 2);
  EXPECT_TRUE(b.oracle_valued);
  EXPECT_TRUE(std::isfinite(b.true_value));
  EXPECT_GT(b.true_value, 0.0);
}

TEST(Registry, ClosedFormsMatchQuadrature) {
  const auto checks = validate_closed_forms();
  ASSERT_FALSE(checks.empty());
  for (const auto& c : checks) EXPECT_LE(c.rel_error, 1e-8) << c.problem << " d=" << c.dim;
  const double oracle_runge = oracle::simpson([](double x) { return 1.0 / (1.0 + 25.0 * x * x); }, -1.0, 1.0, 200000);
  EXPECT_NEAR(standard_problems().get("runge1d", 1).true_value, oracle_runge, 1e-12);
}

TEST(Registry, BasketOracleAgreesWithMc) {
  const TestProblem b = standard_problems().get("basket", 3);
  const EstimateReport r = mc_estimate(uniform_batch(b.integrand, 200000, {3, 0}));
  EXPECT_NEAR(r.estimate, b.true_value, 4.0 * r.ci_half_width);
}

TEST(NGrid, Parse) {
  EXPECT_EQ(parse_n_grid("100,1000,10000"), (std::vector<std::size_t>{100, 1000, 10000}));
  EXPECT_EQ(parse_n_grid("log:100:100000:4"), (std::vector<std::size_t>{100, 1000, 10000, 100000}));
  EXPECT_EQ(parse_n_grid("log:10:12:5"), (std::vector<std::size_t>{10, 11, 12}));
  EXPECT_THROW(parse_n_grid("10,abc"), std::invalid_argument);
  EXPECT_THROW(parse_n_grid("log:10:100"), std::invalid_argument);
}

TEST(Slope, SyntheticPowerLaws) {
  SweepResult r;
  for (std::size_t n : {100u, 1000u, 10000u, 100000u}) {
    SweepRow row;
    row.method = "x";
    row.n = n;
    row.ci_half = 3.0 / std::sqrt(static_cast<double>(n));
    row.sigma2 = 5.0 / static_cast<double>(n);
    r.rows.push_back(row);
  }
  EXPECT_NEAR(fit_loglog_slope(r, SweepField::ci_half), -0.5, 1e-12);
  EXPECT_NEAR(fit_loglog_slope(r, SweepField::sigma2), -1.0, 1e-12);
  r.rows[0].ci_half = 0.0;
  std::vector<std::string> warnings;
  EXPECT_NEAR(fit_loglog_slope(r, SweepField::ci_half, "", std::nullopt, &warnings), -0.5, 1e-12);
  EXPECT_FALSE(warnings.empty());
  EXPECT_THROW(fit_loglog_slope(r, SweepField::abs_error), std::invalid_argument);
  r.rows.resize(2);
  EXPECT_THROW(fit_loglog_slope(r, SweepField::sigma2), std::invalid_argument);
}

TEST(Sweep, EmptyGrid) {
  SweepConfig cfg;
  cfg.methods = {"mc"};
  const SweepResult r = convergence_sweep(standard_problems().get("genz1", 2), cfg);
  EXPECT_TRUE(r.rows.empty());
  EXPECT_TRUE(r.failures.empty());
}

TEST(Sweep, McSlopeOnRunge) {
  SweepConfig cfg;
  cfg.methods = {"mc"};
  cfg.n_grid = {100, 1000, 10000, 100000};
  cfg.seeds = 20;
  const SweepResult r = convergence_sweep(standard_problems().get("runge1d", 1), cfg);
  EXPECT_EQ(r.rows.size(), 80u);
  EXPECT_NEAR(fit_loglog_slope(r, SweepField::ci_half, "mc"), -0.5, 0.1);
}

TEST(Sweep, McSlopeOnGenz1) {
  SweepConfig cfg;
  cfg.methods = {"mc"};
  cfg.n_grid = {1000, 10000, 100000};
  cfg.seeds = 20;
  const SweepResult r = convergence_sweep(standard_problems().get("genz1", 3), cfg);
  const double s = fit_loglog_slope(r, SweepField::ci_half);
  EXPECT_GE(s, -0.6);
  EXPECT_LE(s, -0.4);
}

TEST(Sweep, GrowingFitMatchesFreshFit) {
  const TestProblem p = standard_problems().get("genz1", 2);
  SweepConfig cfg;
  cfg.methods = {"mcls"};
  cfg.n_grid = {100, 500, 2000};
  cfg.degree = 3;
  cfg.seed0 = 9;
  const SweepResult r = convergence_sweep(p, cfg);
  ASSERT_EQ(r.rows.size(), 3u);
  const SampleBatch big = uniform_batch(p.integrand, 2000, {9, 0});
  for (const SweepRow& row : r.rows) {
    SampleBatch head = big;
    head.points = big.points.topRows(row.n);
    head.fvals = big.fvals.head(row.n);
    const Fit f = mcls_estimate(head, multi_index_set(2, 3, DegreeKind::total));
    EXPECT_NEAR(row.estimate, f.report.estimate, 1e-13);
    EXPECT_NEAR(row.ci_half, f.report.ci_half_width, 1e-12);
    EXPECT_EQ(row.degree, 3);
  }
}

TEST(Sweep, FailuresAreRecordedAndSweepContinues) {
  SweepConfig cfg;
  cfg.methods = {"mcls", "mc"};
  cfg.n_grid = {5, 50};
  cfg.degree = 3;
  const SweepResult r = convergence_sweep(standard_problems().get("genz1", 2), cfg);
  ASSERT_EQ(r.failures.size(), 1u);
  EXPECT_EQ(r.failures[0].method, "mcls");
  EXPECT_EQ(r.failures[0].n, 5u);
  EXPECT_EQ(r.rows.size(), 3u);
  cfg.methods = {"bogus"};
  EXPECT_THROW(convergence_sweep(standard_problems().get("genz1", 2), cfg), std::invalid_argument);
  cfg.methods = {"mc"};
  cfg.n_grid = {50, 10};
  EXPECT_THROW(convergence_sweep(standard_problems().get("genz1", 2), cfg), std::invalid_argument);
}

TEST(Sweep, EveryMethodRunsAndIsDeterministic) {
  SweepConfig cfg;
  cfg.methods = sweep_methods();
  cfg.n_grid = {200, 800};
  cfg.seeds = 2;
  cfg.degree = 2;
  const TestProblem p = standard_problems().get("genz5", 2);
  const SweepResult a = convergence_sweep(p, cfg);
  EXPECT_TRUE(a.failures.empty());
  EXPECT_EQ(a.rows.size(), sweep_methods().size() * 4);
  for (const SweepRow& row : a.rows) {
    EXPECT_TRUE(std::isfinite(row.estimate)) << row.method;
    EXPECT_NEAR(row.estimate, p.true_value, std::max(10.0 * row.ci_half, 1e-6)) << row.method << " " << row.n;
    EXPECT_EQ(row.wall_ms, 0.0);
  }
  const SweepResult b = convergence_sweep(p, cfg);
  EXPECT_EQ(a.rows, b.rows);
}

TEST(Sweep, StreamingCostIsAmortized) {
  const TestProblem p = standard_problems().get("genz1", 4);
  SweepConfig grid;
  grid.methods = {"mcls"};
  grid.degree = 4;
  grid.n_grid = {1000, 3000, 10000, 30000, 100000};
  SweepConfig single = grid;
  single.n_grid = {100000};
  auto best_of = [&](const SweepConfig& c) {
    double best = INFINITY;
    for (int i = 0; i < 3; ++i) {
      const auto t0 = std::chrono::steady_clock::now();
      convergence_sweep(p, c);
      best = std::min(best, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
    }
    return best;
  };
  const double t_single = best_of(single);
  EXPECT_LT(best_of(grid), 2.0 * t_single);
}

TEST(Csv, RoundTrip) {
  SweepConfig cfg;
  cfg.methods = {"mc", "mcls", "sgmcls"};
  cfg.n_grid = {100, 300};
  cfg.seeds = 2;
  cfg.timing = true;
  const SweepResult r = convergence_sweep(standard_problems().get("genz1", 3), cfg);
  std::ostringstream out;
  write_csv(out, r);
  EXPECT_EQ(out.str().substr(0, out.str().find('\n')), kCsvHeader);
  std::istringstream in(out.str());
  const SweepResult back = read_csv(in);
  EXPECT_EQ(back.rows, r.rows);
  std::ostringstream again;
  write_csv(again, back);
  EXPECT_EQ(again.str(), out.str());
}

TEST(Csv, ExtremeValuesRoundTrip) {
  SweepResult r;
  SweepRow row;
  row.method = "mc";
  row.problem = "p";
  row.estimate = 0.1 + 0.2;
  row.ci_half = 5e-324;
  row.sigma2 = 1.7976931348623157e308;
  row.kappa = -0.0;
  row.seed = ~std::uint64_t{0};
  r.rows.push_back(row);
  std::ostringstream out;
  write_csv(out, r);
  std::istringstream in(out.str());
  EXPECT_EQ(read_csv(in).rows, r.rows);
}

TEST(Csv, MalformedInput) {
  std::istringstream no_header("a,b\n");
  EXPECT_THROW(read_csv(no_header), std::runtime_error);
  std::istringstream short_row(std::string(kCsvHeader) + "\nmc,p,1\n");
  EXPECT_THROW(read_csv(short_row), std::runtime_error);
  std::istringstream bad_num(std::string(kCsvHeader) + "\nmc,p,1,10,0,x,1,1,1,0,-1,0\n");
  EXPECT_THROW(read_csv(bad_num), std::runtime_error);
}

TEST(Gnuplot, ScriptReferencesCsv) {
  SweepResult r;
  SweepRow row;
  row.method = "mcls";
  r.rows.push_back(row);
  std::ostringstream out;
  write_gnuplot(out, "sweep.csv", r);
  EXPECT_NE(out.str().find("sweep.csv"), std::string::npos);
  EXPECT_NE(out.str().find("logscale"), std::string::npos);
  EXPECT_NE(out.str().find("mcls"), std::string::npos);
}
