#pragma once

#include "mclsquad/basis.hpp"
#include "mclsquad/bench/problems.hpp"
#include "mclsquad/sparsegrid.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace mclsquad::bench {

/// Methods understood by the sweep runner.
const std::vector<std::string>& sweep_methods();

struct SweepConfig {
  std::vector<std::string> methods;
  std::vector<std::size_t> n_grid;  // ascending
  std::size_t seeds = 1;
  std::uint64_t seed0 = 0;
  int degree = 2;
  DegreeKind kind = DegreeKind::total;
  /// Sparse-grid level; when unset, each N is a total budget split by
  /// sg_fraction between the grid and regression.
  std::optional<int> level;
  double sg_fraction = 0.5;
  SgBasis sg_basis = SgBasis::hat;
  double ratio = 10.0;
  std::size_t max_basis = 1000;
  std::size_t strata = 2;       // cells per split dimension
  std::size_t strata_dims = 1;  // leading dimensions that are split
  bool timing = false;
};

struct SweepRow {
  std::string method;
  std::string problem;
  std::size_t dim = 0;
  std::size_t n = 0;
  std::uint64_t seed = 0;
  double estimate = 0.0;
  double ci_half = 0.0;
  double sigma2 = 0.0;
  double kappa = 0.0;
  int degree = -1;
  int level = -1;
  double wall_ms = 0.0;

  friend bool operator==(const SweepRow&, const SweepRow&) = default;
};

struct SweepFailure {
  std::string method;
  std::size_t n = 0;
  std::uint64_t seed = 0;
  std::string message;
};

struct SweepResult {
  std::vector<SweepRow> rows;
  std::vector<SweepFailure> failures;
};

/// Runs every (method, N, seed) cell. Rows are ordered by method (as given),
/// seed, then N. mc, qmc, mcls, wmcls and qmcls draw one batch of the largest
/// N per seed and grow the fit with QR row updates across the grid. A failing
/// cell is recorded and the sweep continues. wall_ms is 0 unless timing is set.
SweepResult convergence_sweep(const TestProblem& problem, const SweepConfig& config);

enum class SweepField { estimate, ci_half, sigma2, kappa, abs_error };

/// Least-squares slope of log(median field) against log N, over the rows of
/// `method` (all rows when empty). Non-positive values are skipped and noted
/// in *warnings. abs_error needs true_value. Requires 3 distinct N.
double fit_loglog_slope(const SweepResult& result, SweepField field, const std::string& method = "",
                        std::optional<double> true_value = std::nullopt,
                        std::vector<std::string>* warnings = nullptr);

/// Parses "a,b,c" or "log:a:b:count" (count values geometrically spaced from
/// a to b, rounded and deduplicated).
std::vector<std::size_t> parse_n_grid(const std::string& spec);

}  // namespace mclsquad::bench
