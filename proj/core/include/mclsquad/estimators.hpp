#pragma once

#include "mclsquad/basis.hpp"
#include "mclsquad/core.hpp"
#include "mclsquad/linalg.hpp"

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

namespace mclsquad {

/// Least-squares fit: report plus coefficients in index-set order.
struct Fit {
  EstimateReport report;
  Eigen::VectorXd coef;
};

/// Plain Monte Carlo: |Omega| mean(f), sample variance with divisor N-1.
/// Antithetic batches are reduced to pair means first, so n_samples is the
/// number of pairs and center-odd integrands give exactly 0.
EstimateReport mc_estimate(const SampleBatch& batch);

/// Streaming least-squares fit over a prefix of one batch. Rows enter the QR
/// factorization in blocks, so the Vandermonde matrix is never stored;
/// extending the prefix costs O(new rows * m^2). Weighted batches are fitted
/// with rows scaled by sqrt(w_i).
class LsAccumulator {
 public:
  LsAccumulator(const SampleBatch& batch, IndexSet iset, bool weighted);

  const IndexSet& index_set() const { return iset_; }
  std::size_t rows() const { return rows_; }
  const QRState& state() const { return state_; }

  /// Adds batch rows [rows(), n).
  void extend_to(std::size_t n);

  /// Fit over the rows added so far. Residuals are recomputed explicitly,
  /// sigma2 = sum (w_i^2) r_i^2 / (N - rank).
  Fit fit() const;

 private:
  const SampleBatch& batch_;
  IndexSet iset_;
  BasisEvaluator basis_;
  bool weighted_;
  PointMatrix unit_;
  QRState state_;
  std::size_t rows_ = 0;
};

/// Unweighted MCLS. With the constant basis alone this is mc_estimate.
Fit mcls_estimate(const SampleBatch& batch, const IndexSet& iset);

/// Weighted MCLS on a Christoffel batch.
Fit wls_mcls_estimate(const SampleBatch& batch, const IndexSet& iset);

/// A function with known integral over the batch domain.
struct ControlVariate {
  std::function<double(Point)> g;
  double integral = 0.0;
  std::string name;
};

/// Least squares on the columns [1, g_1, ..., g_p]. Each g_j is centered by
/// its exact mean and scaled to unit sample RMS before fitting, which leaves
/// the estimate unchanged and makes kappa scale-free. A constant variate
/// becomes a zero column and is dropped as dependent.
Fit control_variate_estimate(const SampleBatch& batch, const std::vector<ControlVariate>& variates);

/// Pilot fit on n1 uniform samples, then plain MC of f - p on n2 fresh
/// samples (streams after the pilot's). Unbiased; sigma2 comes from stage 2.
EstimateReport two_stage_unbiased(const Integrand& f, const IndexSet& iset, std::size_t n1,
                                  std::size_t n2, RngSpec rng);

/// Order-of-magnitude bias bound sigma / N.
double bias_bound(double sigma, std::size_t n);

/// 2 (n+1) exp(-c N/(n+1)) with delta = (K^2-1)/(K^2+1) and
/// c = delta + (1-delta) ln(1-delta). Not clamped; reports use min(1, eps).
double chernoff_epsilon(std::size_t n_basis, std::size_t n, double K);

}  // namespace mclsquad
