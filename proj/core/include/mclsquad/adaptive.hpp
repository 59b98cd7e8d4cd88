#pragma once

#include "mclsquad/basis.hpp"
#include "mclsquad/core.hpp"
#include "mclsquad/estimators.hpp"
#include "mclsquad/sampling.hpp"
#include "mclsquad/sparsegrid.hpp"

#include <cstddef>
#include <limits>
#include <optional>
#include <vector>

namespace mclsquad {

/// Degree rule: the largest k whose index set has at most N / ratio members
/// (and at most max_basis, a cost guard).
struct DegreeSchedule {
  std::size_t dim = 1;
  DegreeKind kind = DegreeKind::total;
  double ratio = 10.0;
  std::size_t max_basis = std::numeric_limits<std::size_t>::max();
};

/// 0 when no positive degree fits, which means plain MC.
int degree_for_budget(const DegreeSchedule& sched, std::size_t n);

struct MclsaOptions {
  DegreeKind kind = DegreeKind::total;
  double ratio = 10.0;
  /// Upper bound on n+1 so the fit stays cheap relative to sampling.
  std::size_t max_basis = 1000;
  /// Bypasses the schedule when set.
  std::optional<int> force_degree;
};

/// Adaptive-degree MCLS: picks k from the budget, draws N Christoffel samples
/// for that index set and fits by weighted least squares. k = 0 draws a
/// uniform batch and returns plain MC.
EstimateReport mclsa_run(const Integrand& f, std::size_t n, const MclsaOptions& opts, RngSpec rng);

/// Evaluation budget shared between a sparse-grid build and regression.
struct BudgetSplit {
  std::size_t n_total = 0;
  std::size_t n_sg = 0;  // nodes of the grid
  std::size_t n_reg = 0;  // regression samples
  int level = 1;
};

/// Largest level whose grid uses at most sg_fraction of n_total; the rest
/// goes to regression. Throws when fewer than 4 regression samples remain.
BudgetSplit split_budget(std::size_t dim, std::size_t n_total, double sg_fraction = 0.5);

/// Sparse-grid control variate: fits f ~ c0 + c1 p_s on n fresh uniform
/// samples. n_samples is n; n_evals adds the grid nodes.
EstimateReport sg_mclsa_run(const Integrand& f, const SparseGridInterpolant& ps, std::size_t n,
                            RngSpec rng);
EstimateReport sg_mclsa_run(const Integrand& f, int level, std::size_t n, RngSpec rng,
                            SgBasis basis = SgBasis::hat);

/// Independent MCLS fit per stratum, each on the stratum's own unit cube.
/// The estimate is the sum of stratum estimates; sigma2 = N sum sigma2_s / N_s
/// so the usual CI formula with N = sum N_s gives the combined interval, and
/// kappa is the variance-weighted RMS of the stratum kappas.
EstimateReport stratified_mcls(const Integrand& f, const StratumPartition& partition,
                               const std::vector<IndexSet>& isets, RngSpec rng);
EstimateReport stratified_mcls(const Integrand& f, const StratumPartition& partition,
                               const IndexSet& iset, RngSpec rng);

/// Comparison mode: one global polynomial fitted to the stratified points,
/// weighted by (|Omega_s|/|Omega|) N / N_s to undo the sampling density.
EstimateReport stratified_global_mcls(const Integrand& f, const StratumPartition& partition,
                                      const IndexSet& iset, RngSpec rng);

/// Antithetic MCLS: drops the basis terms odd about the center (they
/// integrate to zero over every antithetic pair) and fits the pair means.
/// Estimates of center-odd integrands are exactly zero.
EstimateReport antithetic_mcls(const Integrand& f, const IndexSet& iset, std::size_t n_pairs,
                               RngSpec rng);

}  // namespace mclsquad
