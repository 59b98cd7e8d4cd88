#pragma once

#include "mclsquad/basis.hpp"
#include "mclsquad/core.hpp"

#include <cstddef>
#include <vector>

namespace mclsquad {

/// N i.i.d. uniform points on [0,1]^d. Point i uses substream rng.stream + i
/// and consumes d uniforms in coordinate order.
PointMatrix uniform_points(std::size_t dim, std::size_t n, RngSpec rng);

SampleBatch uniform_batch(const Integrand& f, std::size_t n, RngSpec rng);

/// Sampler for the density (1/(n+1)) sum_j phi_j(x)^2 on [0,1]^d.
///
/// A draw picks j uniformly, then samples coordinate m from the density
/// proportional to L_{j_m}(x)^2 by inverting a tabulated CDF. Weights are
/// computed exactly at the drawn point, so table error only perturbs the
/// sampling law, never the estimator.
class ChristoffelSampler {
 public:
  static constexpr std::size_t kDefaultResolution = 4096;

  explicit ChristoffelSampler(IndexSet iset, std::size_t resolution = kDefaultResolution);

  const IndexSet& index_set() const { return iset_; }
  std::size_t resolution() const { return resolution_; }

  /// Draws n points on [0,1]^d; weights[i] = w(x_i) = (n+1) / sum_j phi_j(x_i)^2.
  PointMatrix draw(std::size_t n, RngSpec rng, Eigen::VectorXd& weights) const;

  /// w(u) for u in [0,1]^d.
  double weight(Point u) const;

  /// Inverse of the tabulated 1-D CDF of L_j^2 at probability p.
  double inverse_cdf(int degree, double p) const;

  /// Tabulated CDF of L_j^2 on the grid k / resolution.
  const std::vector<double>& cdf_table(int degree) const;

 private:
  IndexSet iset_;
  BasisEvaluator basis_;
  std::size_t resolution_;
  std::vector<std::vector<double>> cdf_;  // one table per 1-D degree
};

SampleBatch christoffel_batch(const Integrand& f, const ChristoffelSampler& sampler,
                              std::size_t n, RngSpec rng);
SampleBatch christoffel_batch(const Integrand& f, const IndexSet& iset, std::size_t n, RngSpec rng);

/// Maximum dimension supported by the Halton generator.
inline constexpr std::size_t kMaxHaltonDim = 64;

/// Halton points with indices rng.stream + 1, ..., rng.stream + n in the bases
/// of the first d primes. With scramble set, each digit position of each
/// dimension is passed through a random permutation keyed by rng.seed.
PointMatrix halton_points(std::size_t dim, std::size_t n, RngSpec rng, bool scramble = true);

SampleBatch halton_batch(const Integrand& f, std::size_t n, RngSpec rng, bool scramble = true);

/// 2 * n_pairs points; row 2k+1 is the reflection 1 - u of row 2k through the
/// center of the domain.
PointMatrix antithetic_points(std::size_t dim, std::size_t n_pairs, RngSpec rng);

SampleBatch antithetic_batch(const Integrand& f, std::size_t n_pairs, RngSpec rng);

/// Disjoint boxes covering a domain, each with its own sample budget.
struct StratumPartition {
  HyperRect domain;
  std::vector<HyperRect> strata;
  std::vector<std::size_t> budgets;

  /// Checks coverage, disjointness and budget >= min_budget per stratum.
  void validate(std::size_t min_budget = 2) const;

  /// Tensor grid with cells[m] equal slices along coordinate m, each stratum
  /// receiving budget_per_stratum samples.
  static StratumPartition grid(const HyperRect& domain, const std::vector<std::size_t>& cells,
                               std::size_t budget_per_stratum);
};

/// One uniform batch per stratum. Stratum s draws from streams after the
/// budgets of strata 0..s-1, so the whole partition consumes sum(budgets).
std::vector<SampleBatch> stratified_batch(const Integrand& f, const StratumPartition& partition,
                                          RngSpec rng, std::size_t min_budget = 2);

}  // namespace mclsquad
