#include "mclsquad/estimators.hpp"

#include "mclsquad/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace mclsquad {

namespace {

using Eigen::Index;

constexpr Index kFitBlock = 512;

// Mean and N-1 variance of y with a plain left-to-right sum, so that exactly
// cancelling pairs cancel exactly.
void mean_and_variance(const Eigen::VectorXd& y, double& mean, double& var) {
  double s = 0.0;
  for (Index i = 0; i < y.size(); ++i) s += y[i];
  mean = s / static_cast<double>(y.size());
  double ss = 0.0;
  for (Index i = 0; i < y.size(); ++i) {
    const double r = y[i] - mean;
    ss += r * r;
  }
  var = y.size() > 1 ? ss / static_cast<double>(y.size() - 1) : 0.0;
}

Eigen::VectorXd pair_means(const Eigen::VectorXd& f) {
  Eigen::VectorXd y(f.size() / 2);
  for (Index k = 0; k < y.size(); ++k) y[k] = 0.5 * (f[2 * k] + f[2 * k + 1]);
  return y;
}

EstimateReport mc_from_values(const Eigen::VectorXd& y, double vol, std::size_t n_evals) {
  if (y.size() < 2) throw std::invalid_argument("mc_estimate: need at least two samples for a variance");
  double mean = 0.0;
  double var = 0.0;
  mean_and_variance(y, mean, var);
  EstimateReport r;
  r.estimate = vol * mean;
  r.sigma2 = vol * vol * var;
  r.kappa = 1.0;
  r.n_samples = static_cast<std::size_t>(y.size());
  r.n_evals = n_evals;
  r.n_basis = 1;
  r.method = "mc";
  r.degree = 0;
  return finalize(r);
}

Fit fit_dense_columns(const Eigen::MatrixXd& V, const Eigen::VectorXd& f, double vol,
                      const Eigen::VectorXd& integrals) {
  const Index n = V.rows();
  const Index m = V.cols();
  if (n <= m) {
    throw std::invalid_argument("least squares needs more samples (" + std::to_string(n) +
                                ") than basis functions (" + std::to_string(m) + ")");
  }
  const QRState qr = qr_factor(V, f, QRMode::accumulate);
  Fit out;
  out.coef = ls_solve(qr);
  const Eigen::VectorXd r = f - V * out.coef;
  const auto rank = m - static_cast<Index>(qr.dependent_columns().size());
  EstimateReport& rep = out.report;
  rep.estimate = vol * integrals.dot(out.coef);
  rep.sigma2 = vol * vol * r.squaredNorm() / static_cast<double>(n - rank);
  rep.kappa = cond2_independent(qr);
  rep.n_samples = static_cast<std::size_t>(n);
  rep.n_evals = rep.n_samples;
  rep.n_basis = static_cast<std::size_t>(m);
  rep.rank_deficient = rank < m;
  return out;
}

}  // namespace

EstimateReport mc_estimate(const SampleBatch& batch) {
  if (batch.weights) throw std::invalid_argument("mc_estimate: batch must be unweighted");
  const double vol = volume(batch.domain);
  if (batch.scheme == SamplingScheme::antithetic) {
    if (batch.size() % 2 != 0) throw std::invalid_argument("mc_estimate: antithetic batch of odd size");
    return mc_from_values(pair_means(batch.fvals), vol, batch.size());
  }
  return mc_from_values(batch.fvals, vol, batch.size());
}

LsAccumulator::LsAccumulator(const SampleBatch& batch, IndexSet iset, bool weighted)
    : batch_(batch),
      iset_(std::move(iset)),
      basis_(iset_),
      weighted_(weighted),
      unit_(batch.unit_points()),
      state_(static_cast<Index>(iset_.size())) {
  if (iset_.dim() != batch.dim()) {
    throw std::invalid_argument("LsAccumulator: index set dimension does not match batch");
  }
  if (weighted_ && !batch.weights) throw std::invalid_argument("LsAccumulator: batch has no weights");
  if (weighted_ && static_cast<std::size_t>(batch.weights->size()) != batch.size()) {
    throw std::invalid_argument("LsAccumulator: weight count differs from sample count");
  }
}

void LsAccumulator::extend_to(std::size_t n) {
  if (n > batch_.size()) throw std::invalid_argument("LsAccumulator: prefix longer than the batch");
  const auto m = static_cast<Index>(iset_.size());
  Eigen::MatrixXd block;
  std::vector<double> scale;
  for (auto r0 = static_cast<Index>(rows_); r0 < static_cast<Index>(n); r0 += kFitBlock) {
    const Index p = std::min(kFitBlock, static_cast<Index>(n) - r0);
    block.resize(p, m + 1);
    scale.clear();
    if (weighted_) {
      for (Index i = 0; i < p; ++i) scale.push_back(std::sqrt((*batch_.weights)[r0 + i]));
    }
    basis_.eval_rows(unit_, r0, block.leftCols(m), scale);
    for (Index i = 0; i < p; ++i) {
      block(i, m) = (weighted_ ? scale[static_cast<std::size_t>(i)] : 1.0) * batch_.fvals[r0 + i];
    }
    qr_row_update_inplace(state_, block);
  }
  rows_ = std::max(rows_, n);
}

Fit LsAccumulator::fit() const {
  const std::size_t m = iset_.size();
  if (rows_ <= m) {
    throw std::invalid_argument("least squares needs more samples (" + std::to_string(rows_) +
                                ") than basis functions (" + std::to_string(m) + ")");
  }
  Fit out;
  out.coef = ls_solve(state_);
  std::vector<double> row(m);
  std::vector<double> scratch;
  const std::size_t d = iset_.dim();
  double acc = 0.0;
  for (std::size_t i = 0; i < rows_; ++i) {
    const auto ii = static_cast<Index>(i);
    basis_.eval(Point(unit_.row(ii).data(), d), row, scratch);
    double p = 0.0;
    for (std::size_t j = 0; j < m; ++j) p += row[j] * out.coef[static_cast<Index>(j)];
    const double r = batch_.fvals[ii] - p;
    const double w = weighted_ ? (*batch_.weights)[ii] : 1.0;
    acc += w * w * r * r;
  }
  const std::size_t rank = m - state_.dependent_columns().size();
  const double vol = volume(batch_.domain);
  EstimateReport& rep = out.report;
  rep.estimate = vol * basis_integrals(iset_).dot(out.coef);
  rep.sigma2 = vol * vol * acc / static_cast<double>(rows_ - rank);
  rep.kappa = cond2_independent(state_);
  rep.n_samples = rows_;
  rep.n_evals = rows_;
  rep.n_basis = m;
  rep.method = weighted_ ? "wmcls" : "mcls";
  rep.degree = iset_.degree_cap();
  rep.rank_deficient = rank < m;
  out.report = finalize(rep);
  return out;
}

Fit mcls_estimate(const SampleBatch& batch, const IndexSet& iset) {
  if (batch.weights) throw std::invalid_argument("mcls_estimate: batch must be unweighted");
  if (iset.dim() != batch.dim()) throw std::invalid_argument("mcls_estimate: dimension mismatch");
  if (batch.size() <= iset.size()) {
    throw std::invalid_argument("mcls_estimate: need N > n+1 samples (N=" +
                                std::to_string(batch.size()) + ", n+1=" +
                                std::to_string(iset.size()) + ")");
  }
  if (iset.size() == 1) {
    // One-column least squares is the sample mean in closed form.
    Fit out;
    out.report = mc_estimate(batch);
    out.report.method = "mcls";
    out.coef = Eigen::VectorXd::Constant(1, out.report.estimate / volume(batch.domain));
    return out;
  }
  LsAccumulator acc(batch, iset, false);
  acc.extend_to(batch.size());
  return acc.fit();
}

Fit wls_mcls_estimate(const SampleBatch& batch, const IndexSet& iset) {
  if (!batch.weights) throw std::invalid_argument("wls_mcls_estimate: batch has no weights");
  if (iset.dim() != batch.dim()) throw std::invalid_argument("wls_mcls_estimate: dimension mismatch");
  if (batch.size() <= iset.size()) {
    throw std::invalid_argument("wls_mcls_estimate: need N > n+1 samples (N=" +
                                std::to_string(batch.size()) + ", n+1=" +
                                std::to_string(iset.size()) + ")");
  }
  if ((batch.weights->array() <= 0.0).any()) {
    throw std::invalid_argument("wls_mcls_estimate: weights must be positive");
  }
  LsAccumulator acc(batch, iset, true);
  acc.extend_to(batch.size());
  return acc.fit();
}

Fit control_variate_estimate(const SampleBatch& batch, const std::vector<ControlVariate>& variates) {
  if (batch.weights) throw std::invalid_argument("control_variate_estimate: batch must be unweighted");
  const auto n = static_cast<Index>(batch.size());
  const auto p = static_cast<Index>(variates.size());
  if (n <= p + 1) {
    throw std::invalid_argument("control_variate_estimate: need N > #variates + 1");
  }
  const double vol = volume(batch.domain);
  const std::size_t d = batch.dim();
  Eigen::MatrixXd V(n, p + 1);
  V.col(0).setOnes();
  for (Index j = 0; j < p; ++j) {
    const auto& cv = variates[static_cast<std::size_t>(j)];
    if (!cv.g) throw std::invalid_argument("control_variate_estimate: empty variate");
    const double mu = cv.integral / vol;
    for (Index i = 0; i < n; ++i) {
      const double g = cv.g(Point(batch.points.row(i).data(), d));
      if (!std::isfinite(g)) throw Error("control_variate_estimate: variate '" + cv.name + "' not finite");
      V(i, j + 1) = g - mu;
    }
    const double rms = std::sqrt(V.col(j + 1).squaredNorm() / static_cast<double>(n));
    // Scale-free columns; a vanishing column stays zero and is flagged dependent.
    if (rms > 0.0) V.col(j + 1) /= rms;
  }
  Eigen::VectorXd integrals = Eigen::VectorXd::Zero(p + 1);
  integrals[0] = 1.0;
  Fit out = fit_dense_columns(V, batch.fvals, vol, integrals);
  out.report.method = "cv";
  out.report.degree = -1;
  out.report = finalize(out.report);
  return out;
}

EstimateReport two_stage_unbiased(const Integrand& f, const IndexSet& iset, std::size_t n1,
                                  std::size_t n2, RngSpec rng) {
  if (n1 <= iset.size()) throw std::invalid_argument("two_stage_unbiased: need N1 > n+1");
  if (n2 < 2) throw std::invalid_argument("two_stage_unbiased: need N2 >= 2");
  const SampleBatch pilot = uniform_batch(f, n1, rng);
  const Fit fit = mcls_estimate(pilot, iset);
  const SampleBatch second = uniform_batch(f, n2, rng.advanced(n1));
  const PointMatrix u = second.unit_points();
  const BasisEvaluator basis(iset);
  std::vector<double> row(iset.size());
  std::vector<double> scratch;
  Eigen::VectorXd g(static_cast<Index>(n2));
  for (Index i = 0; i < g.size(); ++i) {
    basis.eval(Point(u.row(i).data(), iset.dim()), row, scratch);
    double p = 0.0;
    for (std::size_t j = 0; j < row.size(); ++j) p += row[j] * fit.coef[static_cast<Index>(j)];
    g[i] = second.fvals[i] - p;
  }
  const double vol = volume(f.domain);
  EstimateReport r = mc_from_values(g, vol, n1 + n2);
  r.estimate += vol * basis_integrals(iset).dot(fit.coef);
  r.n_basis = iset.size();
  r.method = "two_stage";
  r.degree = iset.degree_cap();
  r.rank_deficient = fit.report.rank_deficient;
  return finalize(r);
}

double bias_bound(double sigma, std::size_t n) {
  if (!(sigma >= 0.0)) throw std::invalid_argument("bias_bound: sigma must be non-negative");
  if (n == 0) throw std::invalid_argument("bias_bound: N must be positive");
  return sigma / static_cast<double>(n);
}

double chernoff_epsilon(std::size_t n_basis, std::size_t n, double K) {
  if (!(K > 1.0)) throw std::invalid_argument("chernoff_epsilon: K must exceed 1");
  if (n_basis == 0) throw std::invalid_argument("chernoff_epsilon: empty basis");
  const double delta = (K * K - 1.0) / (K * K + 1.0);
  const double c = delta + (1.0 - delta) * std::log1p(-delta);
  const double nb = static_cast<double>(n_basis);
  return 2.0 * nb * std::exp(-c * static_cast<double>(n) / nb);
}

}  // namespace mclsquad
