#include "mclsquad/adaptive.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace mclsquad {

int degree_for_budget(const DegreeSchedule& sched, std::size_t n) {
  if (sched.dim == 0) throw std::invalid_argument("degree_for_budget: dimension must be positive");
  if (!(sched.ratio > 0.0)) throw std::invalid_argument("degree_for_budget: ratio must be positive");
  const double cap = static_cast<double>(n) / sched.ratio;
  int k = 0;
  for (int next = 1;; ++next) {
    const std::size_t size = index_set_size(sched.dim, next, sched.kind);
    if (size > kMaxBasisSize || static_cast<double>(size) > cap || size > sched.max_basis) break;
    k = next;
  }
  return k;
}

EstimateReport mclsa_run(const Integrand& f, std::size_t n, const MclsaOptions& opts, RngSpec rng) {
  if (n < 10) throw std::invalid_argument("mclsa_run: budget must be at least 10");
  const int k = opts.force_degree
                    ? *opts.force_degree
                    : degree_for_budget({f.dim(), opts.kind, opts.ratio, opts.max_basis}, n);
  EstimateReport r;
  if (k <= 0) {
    r = mc_estimate(uniform_batch(f, n, rng));
  } else {
    const IndexSet iset = multi_index_set(f.dim(), k, opts.kind);
    const SampleBatch batch = christoffel_batch(f, iset, n, rng);
    r = wls_mcls_estimate(batch, iset).report;
  }
  r.method = "mclsa";
  r.degree = std::max(k, 0);
  return r;
}

BudgetSplit split_budget(std::size_t dim, std::size_t n_total, double sg_fraction) {
  if (!(sg_fraction > 0.0 && sg_fraction < 1.0)) {
    throw std::invalid_argument("split_budget: sparse-grid fraction must be in (0, 1)");
  }
  const auto sg_cap = static_cast<std::size_t>(sg_fraction * static_cast<double>(n_total));
  BudgetSplit s;
  s.n_total = n_total;
  int level = 0;
  std::size_t nodes = 0;
  for (int l = 1;; ++l) {
    const std::size_t c = sg_node_count(dim, l);
    if (c > sg_cap || c > kDefaultMaxNodes) break;
    level = l;
    nodes = c;
  }
  if (level == 0 || n_total - nodes < 4) {
    throw std::invalid_argument("split_budget: budget " + std::to_string(n_total) +
                                " too small for a sparse grid in " + std::to_string(dim) +
                                " dimensions");
  }
  s.level = level;
  s.n_sg = nodes;
  s.n_reg = n_total - nodes;
  return s;
}

EstimateReport sg_mclsa_run(const Integrand& f, const SparseGridInterpolant& ps, std::size_t n,
                            RngSpec rng) {
  if (n < 4) throw std::invalid_argument("sg_mclsa_run: need at least 4 regression samples");
  if (ps.dim() != f.dim()) throw std::invalid_argument("sg_mclsa_run: dimension mismatch");
  const SampleBatch batch = uniform_batch(f, n, rng);
  ControlVariate cv{[&ps](Point x) { return sg_eval(ps, x); }, sg_integral(ps), "sparse_grid"};
  EstimateReport r = control_variate_estimate(batch, {cv}).report;
  r.method = "sgmcls";
  r.level = ps.level();
  r.n_evals = ps.node_count() + n;
  return r;
}

EstimateReport sg_mclsa_run(const Integrand& f, int level, std::size_t n, RngSpec rng,
                            SgBasis basis) {
  return sg_mclsa_run(f, sg_build(f, level, basis), n, rng);
}

EstimateReport stratified_mcls(const Integrand& f, const StratumPartition& partition,
                               const std::vector<IndexSet>& isets, RngSpec rng) {
  if (isets.size() != partition.strata.size()) {
    throw std::invalid_argument("stratified_mcls: one index set per stratum required");
  }
  std::size_t min_budget = 2;
  for (const auto& is : isets) min_budget = std::max(min_budget, is.size() + 1);
  const auto batches = stratified_batch(f, partition, rng, min_budget);
  EstimateReport r;
  double var_sum = 0.0;
  double kappa_var_sum = 0.0;
  std::size_t n_total = 0;
  std::size_t n_basis = 0;
  for (std::size_t s = 0; s < batches.size(); ++s) {
    const Fit fs = mcls_estimate(batches[s], isets[s]);
    const double ns = static_cast<double>(batches[s].size());
    r.estimate += fs.report.estimate;
    var_sum += fs.report.sigma2 / ns;
    kappa_var_sum += fs.report.kappa * fs.report.kappa * fs.report.sigma2 / ns;
    n_total += batches[s].size();
    n_basis += fs.report.n_basis;
    r.rank_deficient = r.rank_deficient || fs.report.rank_deficient;
  }
  r.sigma2 = static_cast<double>(n_total) * var_sum;
  r.kappa = var_sum > 0.0 ? std::sqrt(kappa_var_sum / var_sum) : 1.0;
  r.n_samples = n_total;
  r.n_evals = n_total;
  r.n_basis = n_basis;
  r.method = "strat";
  int deg = 0;
  for (const auto& is : isets) deg = std::max(deg, is.degree_cap());
  r.degree = deg;
  return finalize(r);
}

EstimateReport stratified_mcls(const Integrand& f, const StratumPartition& partition,
                               const IndexSet& iset, RngSpec rng) {
  return stratified_mcls(f, partition, std::vector<IndexSet>(partition.strata.size(), iset), rng);
}

EstimateReport stratified_global_mcls(const Integrand& f, const StratumPartition& partition,
                                      const IndexSet& iset, RngSpec rng) {
  const auto batches = stratified_batch(f, partition, rng, 1);
  std::size_t n = 0;
  for (const auto& b : batches) n += b.size();
  const double vol = volume(f.domain);
  SampleBatch merged;
  merged.points.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(f.dim()));
  merged.fvals.resize(static_cast<Eigen::Index>(n));
  Eigen::VectorXd w(static_cast<Eigen::Index>(n));
  Eigen::Index row = 0;
  for (const auto& b : batches) {
    const double ws = volume(b.domain) / vol * static_cast<double>(n) / static_cast<double>(b.size());
    const auto nb = static_cast<Eigen::Index>(b.size());
    merged.points.middleRows(row, nb) = b.points;
    merged.fvals.segment(row, nb) = b.fvals;
    w.segment(row, nb).setConstant(ws);
    row += nb;
  }
  merged.weights = std::move(w);
  merged.rng = rng;
  merged.scheme = SamplingScheme::stratified;
  merged.domain = f.domain;
  if (n <= iset.size()) throw std::invalid_argument("stratified_global_mcls: need N > n+1");
  LsAccumulator acc(merged, iset, true);
  acc.extend_to(n);
  EstimateReport r = acc.fit().report;
  r.method = "strat_global";
  return r;
}

EstimateReport antithetic_mcls(const Integrand& f, const IndexSet& iset, std::size_t n_pairs,
                               RngSpec rng) {
  const IndexSet reduced = iset.filtered([](const MultiIndex& m) { return !m.is_center_odd(); });
  if (n_pairs <= reduced.size()) {
    throw std::invalid_argument("antithetic_mcls: need more pairs than even basis functions");
  }
  const SampleBatch batch = antithetic_batch(f, n_pairs, rng);
  // Even basis functions agree on both points of a pair, so the pair folds
  // into one row with the mean value as right-hand side.
  SampleBatch folded;
  const auto np = static_cast<Eigen::Index>(n_pairs);
  folded.points.resize(np, batch.points.cols());
  folded.fvals.resize(np);
  for (Eigen::Index k = 0; k < np; ++k) {
    folded.points.row(k) = batch.points.row(2 * k);
    folded.fvals[k] = 0.5 * (batch.fvals[2 * k] + batch.fvals[2 * k + 1]);
  }
  folded.rng = rng;
  folded.scheme = SamplingScheme::uniform;
  folded.domain = f.domain;
  EstimateReport r = mcls_estimate(folded, reduced).report;
  r.method = "anti";
  r.degree = iset.degree_cap();
  r.n_evals = 2 * n_pairs;
  return r;
}

}  // namespace mclsquad
