#include "mclsquad/bench/problems.hpp"

#include "mclsquad/basis.hpp"
#include "mclsquad/normal.hpp"
#include "mclsquad/rng.hpp"

#include <Eigen/Cholesky>

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numeric>
#include <stdexcept>

namespace mclsquad::bench {

namespace {

constexpr double kClamp = 1e-12;

double runge(Point x) { return 1.0 / (1.0 + 25.0 * x[0] * x[0]); }

double genz1(Point x) {
  double s = 0.0;
  for (double v : x) s += v;
  return std::sin(s);
}

double genz5(Point x) {
  double s = 0.0;
  for (double v : x) s += std::exp(-std::abs(v - 0.5));
  return s;
}

double runge_closed() { return 0.4 * std::atan(5.0); }

double genz1_closed(std::size_t d) {
  const double dd = static_cast<double>(d);
  return std::pow(2.0 * std::sin(0.5), dd) * std::sin(0.5 * dd);
}

double genz5_closed(std::size_t d) { return static_cast<double>(d) * 2.0 * (1.0 - std::exp(-0.5)); }

// Tensor product of a 1-D rule (nodes, weights on [0,1]) applied to f.
double tensor_quadrature(const std::function<double(Point)>& f, std::size_t d,
                         const std::vector<double>& nodes, const std::vector<double>& weights) {
  const std::size_t q = nodes.size();
  std::vector<std::size_t> idx(d, 0);
  std::vector<double> x(d);
  long double total = 0.0L;
  while (true) {
    double w = 1.0;
    for (std::size_t m = 0; m < d; ++m) {
      x[m] = nodes[idx[m]];
      w *= weights[idx[m]];
    }
    total += static_cast<long double>(w * f(x));
    std::size_t m = 0;
    while (m < d && ++idx[m] == q) idx[m++] = 0;
    if (m == d) break;
  }
  return static_cast<double>(total);
}

// Gauss rule with q nodes on each of `panels` equal subintervals of [a, b].
void composite_gauss(int q, int panels, double a, double b, std::vector<double>& nodes,
                     std::vector<double>& weights) {
  const QuadratureRule g = gauss_legendre_rule(q);
  const double h = (b - a) / panels;
  nodes.clear();
  weights.clear();
  for (int p = 0; p < panels; ++p) {
    for (std::size_t k = 0; k < g.nodes.size(); ++k) {
      nodes.push_back(a + h * (p + g.nodes[k]));
      weights.push_back(h * g.weights[k]);
    }
  }
}

OracleCheck check(const std::string& name, std::size_t d, double closed, double oracle) {
  return {name, d, closed, oracle, std::abs(closed - oracle) / std::abs(closed)};
}

}  // namespace

Eigen::MatrixXd basket_cholesky(std::size_t dim, double rho) {
  Eigen::MatrixXd S = Eigen::MatrixXd::Constant(static_cast<Eigen::Index>(dim),
                                                static_cast<Eigen::Index>(dim), rho);
  S.diagonal().setOnes();
  Eigen::LLT<Eigen::MatrixXd> llt(S);
  if (llt.info() != Eigen::Success) throw std::invalid_argument("basket_cholesky: not positive definite");
  return llt.matrixL();
}

double basket_payoff(Point x, const BasketParams& p, const Eigen::MatrixXd& chol, bool* clamped) {
  const auto d = static_cast<Eigen::Index>(x.size());
  if (chol.rows() != d) throw std::invalid_argument("basket_payoff: Cholesky factor size mismatch");
  Eigen::VectorXd z(d);
  for (Eigen::Index m = 0; m < d; ++m) {
    double u = x[static_cast<std::size_t>(m)];
    if (u < kClamp || u > 1.0 - kClamp) {
      u = std::clamp(u, kClamp, 1.0 - kClamp);
      if (clamped) *clamped = true;
    }
    z[m] = inverse_normal_cdf(u);
  }
  const Eigen::VectorXd y = chol.triangularView<Eigen::Lower>() * z;
  const double drift = (p.r - 0.5 * p.sigma * p.sigma) * p.T;
  const double vol = p.sigma * std::sqrt(p.T);
  double mean = 0.0;
  for (Eigen::Index m = 0; m < d; ++m) mean += p.S0 * std::exp(drift + vol * y[m]);
  mean /= static_cast<double>(d);
  return std::exp(-p.r * p.T) * std::max(0.0, mean - p.K);
}

double geometric_basket_price(std::size_t dim, const BasketParams& p) {
  const double d = static_cast<double>(dim);
  // log G = log S0 + drift + vol * mean(y); Var(mean(y)) = (d + d(d-1) rho) / d^2.
  const double mu = std::log(p.S0) + (p.r - 0.5 * p.sigma * p.sigma) * p.T;
  const double var = p.sigma * p.sigma * p.T * (d + d * (d - 1.0) * p.rho) / (d * d);
  const double s = std::sqrt(var);
  const double d1 = (mu - std::log(p.K) + var) / s;
  const double d2 = d1 - s;
  return std::exp(-p.r * p.T) * (std::exp(mu + 0.5 * var) * normal_cdf(d1) - p.K * normal_cdf(d2));
}

double basket_oracle(std::size_t dim, const BasketParams& p, int log2_n) {
  if (dim == 0 || log2_n < 1 || log2_n > 30) throw std::invalid_argument("basket_oracle: bad arguments");
  const Eigen::MatrixXd L = basket_cholesky(dim, p.rho);
  const double geo = geometric_basket_price(dim, p);
  const double drift = (p.r - 0.5 * p.sigma * p.sigma) * p.T;
  const double vol = p.sigma * std::sqrt(p.T);
  const double disc = std::exp(-p.r * p.T);
  const auto d = static_cast<Eigen::Index>(dim);
  const std::uint64_t n = std::uint64_t{1} << log2_n;
  Eigen::VectorXd z(d);
  Eigen::VectorXd y(d);
  long double acc = 0.0L;
  // Antithetic pairs of (arithmetic - geometric) payoffs.
  for (std::uint64_t i = 0; i < n / 2; ++i) {
    CounterRng g(0x0BA5CE7ULL + dim, i);
    for (Eigen::Index m = 0; m < d; ++m) {
      z[m] = inverse_normal_cdf(std::clamp(g.uniform(), kClamp, 1.0 - kClamp));
    }
    for (int sign = -1; sign <= 1; sign += 2) {
      y.noalias() = L.triangularView<Eigen::Lower>() * (sign * z);
      double arith = 0.0;
      double logsum = 0.0;
      for (Eigen::Index m = 0; m < d; ++m) {
        const double e = drift + vol * y[m];
        arith += std::exp(e);
        logsum += e;
      }
      arith = p.S0 * arith / static_cast<double>(d);
      const double geom = p.S0 * std::exp(logsum / static_cast<double>(d));
      acc += static_cast<long double>(disc * (std::max(0.0, arith - p.K) - std::max(0.0, geom - p.K)));
    }
  }
  return geo + static_cast<double>(acc / static_cast<long double>(n));
}

void ProblemRegistry::add(const std::string& name, Factory factory) {
  if (!factory) throw std::invalid_argument("ProblemRegistry: empty factory for " + name);
  factories_[name] = std::move(factory);
}

bool ProblemRegistry::contains(const std::string& name) const { return factories_.count(name) > 0; }

TestProblem ProblemRegistry::get(const std::string& name, std::size_t dim) const {
  auto it = factories_.find(name);
  if (it == factories_.end()) throw std::invalid_argument("unknown problem '" + name + "'");
  return it->second(dim);
}

std::vector<std::string> ProblemRegistry::names() const {
  std::vector<std::string> out;
  for (const auto& kv : factories_) out.push_back(kv.first);
  return out;
}

std::vector<OracleCheck> validate_closed_forms() {
  std::vector<OracleCheck> out;
  std::vector<double> nodes;
  std::vector<double> weights;

  composite_gauss(10, 1000, -1.0, 1.0, nodes, weights);
  {
    double s = 0.0;
    for (std::size_t k = 0; k < nodes.size(); ++k) s += weights[k] * runge(Point(&nodes[k], 1));
    out.push_back(check("runge1d", 1, runge_closed(), s));
  }

  composite_gauss(8, 1, 0.0, 1.0, nodes, weights);
  for (std::size_t d : {1, 2, 3, 6}) {
    out.push_back(check("genz1", d, genz1_closed(d), tensor_quadrature(genz1, d, nodes, weights)));
  }

  // Split at the kink so each panel sees a smooth integrand.
  composite_gauss(12, 2, 0.0, 1.0, nodes, weights);
  for (std::size_t d : {1, 2, 3}) {
    out.push_back(check("genz5", d, genz5_closed(d), tensor_quadrature(genz5, d, nodes, weights)));
  }
  {
    double one = 0.0;
    for (std::size_t k = 0; k < nodes.size(); ++k) one += weights[k] * std::exp(-std::abs(nodes[k] - 0.5));
    for (std::size_t d : {6, 10}) {
      out.push_back(check("genz5", d, genz5_closed(d), static_cast<double>(d) * one));
    }
  }
  return out;
}

ProblemRegistry register_standard_problems() {
  ProblemRegistry reg;
  for (auto& c : validate_closed_forms()) {
    if (!(c.rel_error <= 1e-8)) {
      throw Error("closed-form value of " + c.problem + " (d=" + std::to_string(c.dim) +
                  ") disagrees with its quadrature oracle");
    }
    reg.add_check(c);
  }

  reg.add("runge1d", [](std::size_t d) {
    if (d != 1) throw std::invalid_argument("runge1d is one-dimensional");
    return TestProblem{make_integrand("runge1d", HyperRect({-1.0}, {1.0}), runge), runge_closed(),
                       false, {"smooth", "analytic"}};
  });
  reg.add("genz1", [](std::size_t d) {
    if (d == 0) throw std::invalid_argument("genz1: dimension must be positive");
    return TestProblem{make_integrand("genz1", HyperRect::unit_cube(d), genz1), genz1_closed(d),
                       false, {"analytic", "oscillatory"}};
  });
  reg.add("genz5", [](std::size_t d) {
    if (d == 0) throw std::invalid_argument("genz5: dimension must be positive");
    return TestProblem{make_integrand("genz5", HyperRect::unit_cube(d), genz5), genz5_closed(d),
                       false, {"continuous", "kink"}};
  });

  auto cache = std::make_shared<std::map<std::size_t, double>>();
  auto mtx = std::make_shared<std::mutex>();
  reg.add("basket", [cache, mtx](std::size_t d) {
    if (d == 0) throw std::invalid_argument("basket: dimension must be positive");
    const BasketParams params;
    double truth = 0.0;
    {
      std::lock_guard<std::mutex> lock(*mtx);
      auto it = cache->find(d);
      if (it == cache->end()) it = cache->emplace(d, basket_oracle(d, params)).first;
      truth = it->second;
    }
    auto L = std::make_shared<const Eigen::MatrixXd>(basket_cholesky(d, params.rho));
    auto f = [L, params](Point x) { return basket_payoff(x, params, *L); };
    return TestProblem{make_integrand("basket", HyperRect::unit_cube(d), f), truth, true,
                       {"finance", "kink", "oracle"}};
  });
  return reg;
}

const ProblemRegistry& standard_problems() {
  static const ProblemRegistry reg = register_standard_problems();
  return reg;
}

}  // namespace mclsquad::bench
