#pragma once

#include <Eigen/Core>

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace mclsquad {

/// Runtime failure inside the library (non-finite integrand values, rank or
/// budget violations detected during a run). Precondition violations on
/// arguments throw std::invalid_argument instead.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using Point = std::span<const double>;

/// Row-major N x d point storage; one sample point per row.
using PointMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Axis-aligned box lo[i] < hi[i]. All approximation math happens on the unit
/// cube; a HyperRect only supplies the affine map and the volume factor.
class HyperRect {
 public:
  HyperRect(std::vector<double> lo, std::vector<double> hi);

  static HyperRect unit_cube(std::size_t dim);

  std::size_t dim() const { return lo_.size(); }
  const std::vector<double>& lo() const { return lo_; }
  const std::vector<double>& hi() const { return hi_; }
  double width(std::size_t i) const { return hi_[i] - lo_[i]; }

  bool contains(Point x) const;
  bool is_unit_cube() const;

 private:
  std::vector<double> lo_;
  std::vector<double> hi_;
};

double volume(const HyperRect& domain);

/// Componentwise (x - lo) / (hi - lo). Throws std::invalid_argument when x is
/// outside the closed domain.
std::vector<double> to_unit_cube(const HyperRect& domain, Point x);
void to_unit_cube(const HyperRect& domain, Point x, std::span<double> out);

std::vector<double> from_unit_cube(const HyperRect& domain, Point u);
void from_unit_cube(const HyperRect& domain, Point u, std::span<double> out);

/// A deterministic real-valued function on a box.
struct Integrand {
  std::function<double(Point)> eval;
  HyperRect domain;
  std::string name;

  std::size_t dim() const { return domain.dim(); }
  double operator()(Point x) const { return eval(x); }
};

Integrand make_integrand(std::string name, HyperRect domain, std::function<double(Point)> eval);

/// Seed plus a point counter. Point i of a batch drawn with spec (s, c) uses
/// the random substream keyed by (s, c + i), so a batch of N equals two
/// batches of N/2 drawn with (s, c) and (s, c + N/2).
struct RngSpec {
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;

  RngSpec advanced(std::uint64_t count) const { return {seed, stream + count}; }
  friend bool operator==(const RngSpec&, const RngSpec&) = default;
};

enum class SamplingScheme { uniform, christoffel, halton, antithetic, stratified };

const char* to_string(SamplingScheme scheme);

/// Points (in the domain's own coordinates) together with the cached
/// integrand values. Weights are present exactly for Christoffel batches.
struct SampleBatch {
  PointMatrix points;
  Eigen::VectorXd fvals;
  std::optional<Eigen::VectorXd> weights;
  RngSpec rng;
  SamplingScheme scheme = SamplingScheme::uniform;
  HyperRect domain = HyperRect::unit_cube(1);

  std::size_t size() const { return static_cast<std::size_t>(fvals.size()); }
  std::size_t dim() const { return static_cast<std::size_t>(points.cols()); }

  /// Points mapped to [0,1]^d.
  PointMatrix unit_points() const;
};

/// Evaluates f at every row of points (domain coordinates). Throws Error naming
/// the first point where f is NaN or infinite.
Eigen::VectorXd evaluate(const Integrand& f, const PointMatrix& points);

struct EstimateReport {
  double estimate = 0.0;
  double sigma2 = 0.0;
  double ci_half_width = 0.0;
  double kappa = 1.0;
  /// Samples entering the confidence interval.
  std::size_t n_samples = 0;
  /// Total integrand evaluations, including any spent outside the regression.
  std::size_t n_evals = 0;
  std::size_t n_basis = 1;
  std::string method;
  int degree = -1;
  int level = -1;
  bool rank_deficient = false;
};

inline constexpr double kCiMultiplier = 2.0;

/// 2 * kappa * sqrt(sigma2) / sqrt(n).
double ci_half_width(double sigma2, double kappa, std::size_t n_samples);

/// Fills ci_half_width from the other fields.
EstimateReport finalize(EstimateReport report);

}  // namespace mclsquad
