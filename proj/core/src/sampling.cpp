#include "mclsquad/sampling.hpp"

#include "mclsquad/rng.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <string>

namespace mclsquad {

namespace {

SampleBatch make_batch(const Integrand& f, PointMatrix unit, RngSpec rng, SamplingScheme scheme,
                       const HyperRect& domain) {
  SampleBatch batch;
  const std::size_t d = domain.dim();
  batch.points.resize(unit.rows(), static_cast<Eigen::Index>(d));
  for (Eigen::Index i = 0; i < unit.rows(); ++i) {
    from_unit_cube(domain, Point(unit.row(i).data(), d),
                   std::span<double>(batch.points.row(i).data(), d));
  }
  batch.fvals = evaluate(f, batch.points);
  batch.rng = rng;
  batch.scheme = scheme;
  batch.domain = domain;
  return batch;
}

void require_count(std::size_t n, const char* who) {
  if (n == 0) throw std::invalid_argument(std::string(who) + ": need at least one sample");
}

constexpr std::array<int, kMaxHaltonDim> kPrimes = {
    2,   3,   5,   7,   11,  13,  17,  19,  23,  29,  31,  37,  41,  43,  47,  53,
    59,  61,  67,  71,  73,  79,  83,  89,  97,  101, 103, 107, 109, 113, 127, 131,
    137, 139, 149, 151, 157, 163, 167, 173, 179, 181, 191, 193, 197, 199, 211, 223,
    227, 229, 233, 239, 241, 251, 257, 263, 269, 271, 277, 281, 283, 293, 307, 311};

}  // namespace

PointMatrix uniform_points(std::size_t dim, std::size_t n, RngSpec rng) {
  if (dim == 0) throw std::invalid_argument("uniform_points: dimension must be positive");
  PointMatrix u(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(dim));
  for (std::size_t i = 0; i < n; ++i) {
    CounterRng g = point_rng(rng, i);
    for (std::size_t c = 0; c < dim; ++c) u(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) = g.uniform();
  }
  return u;
}

SampleBatch uniform_batch(const Integrand& f, std::size_t n, RngSpec rng) {
  require_count(n, "uniform_batch");
  return make_batch(f, uniform_points(f.dim(), n, rng), rng, SamplingScheme::uniform, f.domain);
}

ChristoffelSampler::ChristoffelSampler(IndexSet iset, std::size_t resolution)
    : iset_(std::move(iset)), basis_(iset_), resolution_(resolution) {
  if (resolution_ < 2) throw std::invalid_argument("ChristoffelSampler: resolution too small");
  const int kmax = iset_.max_coordinate_degree();
  cdf_.resize(static_cast<std::size_t>(kmax) + 1);
  const double h = 1.0 / static_cast<double>(resolution_);
  for (int j = 0; j <= kmax; ++j) {
    // L_j^2 has degree 2j; j+1 Gauss points per cell integrate it exactly.
    const QuadratureRule rule = gauss_legendre_rule(j + 1);
    auto& table = cdf_[static_cast<std::size_t>(j)];
    table.assign(resolution_ + 1, 0.0);
    long double acc = 0.0L;
    for (std::size_t k = 0; k < resolution_; ++k) {
      const double a = static_cast<double>(k) * h;
      double cell = 0.0;
      for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
        const double v = eval_legendre_1d(j, a + h * rule.nodes[q]);
        cell += rule.weights[q] * v * v;
      }
      acc += static_cast<long double>(cell * h);
      table[k + 1] = static_cast<double>(acc);
    }
    const double total = table.back();
    if (!(std::abs(total - 1.0) < 1e-10)) {
      throw Error("ChristoffelSampler: CDF of degree " + std::to_string(j) +
                  " does not integrate to one");
    }
    for (auto& v : table) v /= total;
    table.back() = 1.0;
    for (std::size_t k = 0; k < resolution_; ++k) {
      if (!(table[k + 1] >= table[k])) {
        throw Error("ChristoffelSampler: non-monotone CDF table for degree " + std::to_string(j));
      }
    }
  }
}

const std::vector<double>& ChristoffelSampler::cdf_table(int degree) const {
  if (degree < 0 || static_cast<std::size_t>(degree) >= cdf_.size()) {
    throw std::out_of_range("ChristoffelSampler: no table for degree " + std::to_string(degree));
  }
  return cdf_[static_cast<std::size_t>(degree)];
}

double ChristoffelSampler::inverse_cdf(int degree, double p) const {
  if (degree == 0) return p;
  const auto& table = cdf_table(degree);
  auto it = std::upper_bound(table.begin(), table.end(), p);
  auto k = static_cast<std::size_t>(std::distance(table.begin(), it));
  k = std::clamp<std::size_t>(k, 1, resolution_) - 1;
  const double lo = table[k];
  const double hi = table[k + 1];
  const double t = hi > lo ? std::clamp((p - lo) / (hi - lo), 0.0, 1.0) : 0.0;
  return std::min(1.0, (static_cast<double>(k) + t) / static_cast<double>(resolution_));
}

double ChristoffelSampler::weight(Point u) const {
  return static_cast<double>(iset_.size()) / basis_.sum_of_squares(u);
}

PointMatrix ChristoffelSampler::draw(std::size_t n, RngSpec rng, Eigen::VectorXd& weights) const {
  const std::size_t d = iset_.dim();
  const std::size_t m = iset_.size();
  PointMatrix u(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
  weights.resize(static_cast<Eigen::Index>(n));
  std::vector<double> row(m);
  std::vector<double> scratch;
  for (std::size_t i = 0; i < n; ++i) {
    CounterRng g = point_rng(rng, i);
    const auto ii = static_cast<Eigen::Index>(i);
    if (m == 1) {
      // Same draws as uniform_points, so the degenerate case is plain MC.
      for (std::size_t c = 0; c < d; ++c) u(ii, static_cast<Eigen::Index>(c)) = g.uniform();
      weights[ii] = 1.0;
      continue;
    }
    const MultiIndex& idx = iset_[static_cast<std::size_t>(g.below(m))];
    for (std::size_t c = 0; c < d; ++c) {
      u(ii, static_cast<Eigen::Index>(c)) = inverse_cdf(idx.degrees[c], g.uniform());
    }
    basis_.eval(Point(u.row(ii).data(), d), row, scratch);
    double s = 0.0;
    for (double v : row) s += v * v;
    weights[ii] = static_cast<double>(m) / s;
  }
  return u;
}

SampleBatch christoffel_batch(const Integrand& f, const ChristoffelSampler& sampler,
                              std::size_t n, RngSpec rng) {
  require_count(n, "christoffel_batch");
  if (sampler.index_set().dim() != f.dim()) {
    throw std::invalid_argument("christoffel_batch: index set dimension does not match integrand");
  }
  Eigen::VectorXd w;
  PointMatrix u = sampler.draw(n, rng, w);
  SampleBatch batch = make_batch(f, std::move(u), rng, SamplingScheme::christoffel, f.domain);
  batch.weights = std::move(w);
  return batch;
}

SampleBatch christoffel_batch(const Integrand& f, const IndexSet& iset, std::size_t n, RngSpec rng) {
  return christoffel_batch(f, ChristoffelSampler(iset), n, rng);
}

PointMatrix halton_points(std::size_t dim, std::size_t n, RngSpec rng, bool scramble) {
  if (dim == 0 || dim > kMaxHaltonDim) {
    throw std::invalid_argument("halton_points: dimension must be in [1, " +
                                std::to_string(kMaxHaltonDim) + "]");
  }
  PointMatrix u(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(dim));
  for (std::size_t c = 0; c < dim; ++c) {
    const auto b = static_cast<std::uint64_t>(kPrimes[c]);
    const double inv_b = 1.0 / static_cast<double>(b);
    // Enough digits to resolve a double.
    const auto n_digits =
        static_cast<std::size_t>(std::ceil(53.0 * std::log(2.0) / std::log(static_cast<double>(b))));
    std::vector<std::uint32_t> perm;
    if (scramble) {
      perm.resize(n_digits * b);
      for (std::size_t k = 0; k < n_digits; ++k) {
        CounterRng g(mix64(rng.seed ^ 0x6A09E667F3BCC909ULL), c * 256 + k);
        auto* p = perm.data() + k * b;
        std::iota(p, p + b, 0U);
        for (std::uint64_t s = b - 1; s > 0; --s) std::swap(p[s], p[g.below(s + 1)]);
      }
    }
    for (std::size_t i = 0; i < n; ++i) {
      std::uint64_t idx = rng.stream + i + 1;
      double x = 0.0;
      double scale = inv_b;
      for (std::size_t k = 0; k < n_digits && (scramble || idx > 0); ++k) {
        auto digit = static_cast<std::uint32_t>(idx % b);
        idx /= b;
        if (scramble) digit = perm[k * b + digit];
        x += static_cast<double>(digit) * scale;
        scale *= inv_b;
      }
      u(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) = std::min(x, 1.0);
    }
  }
  return u;
}

SampleBatch halton_batch(const Integrand& f, std::size_t n, RngSpec rng, bool scramble) {
  require_count(n, "halton_batch");
  return make_batch(f, halton_points(f.dim(), n, rng, scramble), rng, SamplingScheme::halton,
                    f.domain);
}

PointMatrix antithetic_points(std::size_t dim, std::size_t n_pairs, RngSpec rng) {
  PointMatrix base = uniform_points(dim, n_pairs, rng);
  PointMatrix u(static_cast<Eigen::Index>(2 * n_pairs), static_cast<Eigen::Index>(dim));
  for (Eigen::Index k = 0; k < base.rows(); ++k) {
    u.row(2 * k) = base.row(k);
    u.row(2 * k + 1) = (1.0 - base.row(k).array()).matrix();
  }
  return u;
}

SampleBatch antithetic_batch(const Integrand& f, std::size_t n_pairs, RngSpec rng) {
  require_count(n_pairs, "antithetic_batch");
  return make_batch(f, antithetic_points(f.dim(), n_pairs, rng), rng, SamplingScheme::antithetic,
                    f.domain);
}

void StratumPartition::validate(std::size_t min_budget) const {
  if (strata.empty()) throw std::invalid_argument("StratumPartition: no strata");
  if (budgets.size() != strata.size()) {
    throw std::invalid_argument("StratumPartition: one budget per stratum required");
  }
  const std::size_t d = domain.dim();
  double vol = 0.0;
  for (std::size_t s = 0; s < strata.size(); ++s) {
    const HyperRect& r = strata[s];
    if (r.dim() != d) throw std::invalid_argument("StratumPartition: stratum dimension mismatch");
    if (!domain.contains(r.lo()) || !domain.contains(r.hi())) {
      throw std::invalid_argument("StratumPartition: stratum " + std::to_string(s) +
                                  " leaves the domain");
    }
    if (budgets[s] < min_budget) {
      throw std::invalid_argument("StratumPartition: stratum " + std::to_string(s) + " budget " +
                                  std::to_string(budgets[s]) + " below minimum " +
                                  std::to_string(min_budget));
    }
    vol += volume(r);
    for (std::size_t t = 0; t < s; ++t) {
      bool overlap = true;
      for (std::size_t c = 0; c < d && overlap; ++c) {
        overlap = std::max(r.lo()[c], strata[t].lo()[c]) < std::min(r.hi()[c], strata[t].hi()[c]);
      }
      if (overlap) {
        throw std::invalid_argument("StratumPartition: strata " + std::to_string(t) + " and " +
                                    std::to_string(s) + " overlap");
      }
    }
  }
  const double dv = volume(domain);
  if (std::abs(vol - dv) > 1e-12 * dv) {
    throw std::invalid_argument("StratumPartition: strata do not cover the domain");
  }
}

StratumPartition StratumPartition::grid(const HyperRect& domain, const std::vector<std::size_t>& cells,
                                        std::size_t budget_per_stratum) {
  const std::size_t d = domain.dim();
  if (cells.size() != d) throw std::invalid_argument("StratumPartition::grid: one count per dimension");
  std::size_t total = 1;
  for (auto c : cells) {
    if (c == 0) throw std::invalid_argument("StratumPartition::grid: zero cells");
    total *= c;
  }
  StratumPartition p{domain, {}, {}};
  std::vector<std::size_t> pos(d, 0);
  for (std::size_t s = 0; s < total; ++s) {
    std::vector<double> lo(d), hi(d);
    for (std::size_t c = 0; c < d; ++c) {
      const double w = domain.width(c);
      const auto nc = static_cast<double>(cells[c]);
      lo[c] = domain.lo()[c] + w * static_cast<double>(pos[c]) / nc;
      hi[c] = pos[c] + 1 == cells[c] ? domain.hi()[c]
                                      : domain.lo()[c] + w * static_cast<double>(pos[c] + 1) / nc;
    }
    p.strata.emplace_back(std::move(lo), std::move(hi));
    p.budgets.push_back(budget_per_stratum);
    for (std::size_t c = 0; c < d; ++c) {
      if (++pos[c] < cells[c]) break;
      pos[c] = 0;
    }
  }
  return p;
}

std::vector<SampleBatch> stratified_batch(const Integrand& f, const StratumPartition& partition,
                                          RngSpec rng, std::size_t min_budget) {
  if (partition.domain.dim() != f.dim()) {
    throw std::invalid_argument("stratified_batch: partition dimension does not match integrand");
  }
  if (partition.domain.lo() != f.domain.lo() || partition.domain.hi() != f.domain.hi()) {
    throw std::invalid_argument("stratified_batch: partition domain differs from integrand domain");
  }
  partition.validate(min_budget);
  std::vector<SampleBatch> out;
  out.reserve(partition.strata.size());
  RngSpec spec = rng;
  for (std::size_t s = 0; s < partition.strata.size(); ++s) {
    const std::size_t n = partition.budgets[s];
    out.push_back(make_batch(f, uniform_points(f.dim(), n, spec), spec, SamplingScheme::stratified,
                             partition.strata[s]));
    spec = spec.advanced(n);
  }
  return out;
}

}  // namespace mclsquad
