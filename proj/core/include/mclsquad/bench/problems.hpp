#pragma once

#include "mclsquad/core.hpp"

#include <Eigen/Core>

#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace mclsquad::bench {

struct TestProblem {
  Integrand integrand;
  /// Closed-form integral, or the value of the registered oracle for
  /// oracle-valued problems.
  double true_value = 0.0;
  bool oracle_valued = false;
  std::vector<std::string> tags;
};

/// Parameters of the mean-basket call.
struct BasketParams {
  double r = 0.05;
  double T = 1.0;
  double sigma = 0.2;
  double K = 10.0;
  double S0 = 10.0;
  double rho = 0.1;  // off-diagonal correlation
};

/// Lower Cholesky factor of the d x d correlation matrix with unit diagonal
/// and rho elsewhere.
Eigen::MatrixXd basket_cholesky(std::size_t dim, double rho);

/// e^{-rT} max(0, mean_m S_m - K), S_m = S0 exp((r - sigma^2/2) T + sigma sqrt(T) (L z)_m),
/// z = Phi^{-1}(x). Coordinates outside [1e-12, 1 - 1e-12] are clamped and
/// *clamped (when given) is set.
double basket_payoff(Point x, const BasketParams& params, const Eigen::MatrixXd& chol,
                     bool* clamped = nullptr);

/// Closed-form price of the geometric-mean basket call.
double geometric_basket_price(std::size_t dim, const BasketParams& params);

/// Control-variate MC estimate of the mean-basket price using the geometric
/// basket as variate; 2^log2_n points from a fixed stream.
double basket_oracle(std::size_t dim, const BasketParams& params, int log2_n = 20);

/// Outcome of checking one closed form against its quadrature oracle.
struct OracleCheck {
  std::string problem;
  std::size_t dim = 0;
  double closed_form = 0.0;
  double oracle = 0.0;
  double rel_error = 0.0;
};

class ProblemRegistry {
 public:
  using Factory = std::function<TestProblem(std::size_t dim)>;

  void add(const std::string& name, Factory factory);
  bool contains(const std::string& name) const;
  TestProblem get(const std::string& name, std::size_t dim) const;
  std::vector<std::string> names() const;

  /// Checks recorded when the registry was built.
  const std::vector<OracleCheck>& oracle_checks() const { return checks_; }
  void add_check(OracleCheck check) { checks_.push_back(std::move(check)); }

 private:
  std::map<std::string, Factory> factories_;
  std::vector<OracleCheck> checks_;
};

/// Registry with runge1d, genz1, genz5 and basket. Every closed-form value is
/// compared with an independent quadrature at construction; a relative
/// mismatch above 1e-8 throws Error.
const ProblemRegistry& standard_problems();
ProblemRegistry register_standard_problems();

/// Runs the quadrature oracles: composite Gauss for runge1d, tensor Gauss for
/// genz1 and genz5 (split at the kink).
std::vector<OracleCheck> validate_closed_forms();

}  // namespace mclsquad::bench
