#include "mclsquad/core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace mclsquad {

HyperRect::HyperRect(std::vector<double> lo, std::vector<double> hi)
    : lo_(std::move(lo)), hi_(std::move(hi)) {
  if (lo_.empty() || lo_.size() != hi_.size()) {
    throw std::invalid_argument("HyperRect: lo and hi must be non-empty and of equal length");
  }
  for (std::size_t i = 0; i < lo_.size(); ++i) {
    if (!std::isfinite(lo_[i]) || !std::isfinite(hi_[i]) || !(lo_[i] < hi_[i])) {
      throw std::invalid_argument("HyperRect: need finite lo[i] < hi[i] in every coordinate");
    }
  }
}

HyperRect HyperRect::unit_cube(std::size_t dim) {
  return HyperRect(std::vector<double>(dim, 0.0), std::vector<double>(dim, 1.0));
}

bool HyperRect::contains(Point x) const {
  if (x.size() != dim()) return false;
  for (std::size_t i = 0; i < dim(); ++i) {
    if (!(x[i] >= lo_[i] && x[i] <= hi_[i])) return false;
  }
  return true;
}

bool HyperRect::is_unit_cube() const {
  for (std::size_t i = 0; i < dim(); ++i) {
    if (lo_[i] != 0.0 || hi_[i] != 1.0) return false;
  }
  return true;
}

double volume(const HyperRect& domain) {
  double v = 1.0;
  for (std::size_t i = 0; i < domain.dim(); ++i) v *= domain.width(i);
  return v;
}

void to_unit_cube(const HyperRect& domain, Point x, std::span<double> out) {
  if (!domain.contains(x) || out.size() != x.size()) {
    throw std::invalid_argument("to_unit_cube: point outside the closed domain");
  }
  for (std::size_t i = 0; i < x.size(); ++i) {
    out[i] = (x[i] - domain.lo()[i]) / domain.width(i);
  }
}

std::vector<double> to_unit_cube(const HyperRect& domain, Point x) {
  std::vector<double> out(x.size());
  to_unit_cube(domain, x, out);
  return out;
}

void from_unit_cube(const HyperRect& domain, Point u, std::span<double> out) {
  if (u.size() != domain.dim() || out.size() != u.size()) {
    throw std::invalid_argument("from_unit_cube: dimension mismatch");
  }
  for (std::size_t i = 0; i < u.size(); ++i) {
    out[i] = domain.lo()[i] + u[i] * domain.width(i);
  }
}

std::vector<double> from_unit_cube(const HyperRect& domain, Point u) {
  std::vector<double> out(u.size());
  from_unit_cube(domain, u, out);
  return out;
}

Integrand make_integrand(std::string name, HyperRect domain, std::function<double(Point)> eval) {
  if (!eval) throw std::invalid_argument("make_integrand: empty function");
  return Integrand{std::move(eval), std::move(domain), std::move(name)};
}

const char* to_string(SamplingScheme scheme) {
  switch (scheme) {
    case SamplingScheme::uniform: return "uniform";
    case SamplingScheme::christoffel: return "christoffel";
    case SamplingScheme::halton: return "halton";
    case SamplingScheme::antithetic: return "antithetic";
    case SamplingScheme::stratified: return "stratified";
  }
  return "unknown";
}

PointMatrix SampleBatch::unit_points() const {
  PointMatrix u(points.rows(), points.cols());
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    to_unit_cube(domain, Point(points.row(i).data(), dim()),
                 std::span<double>(u.row(i).data(), dim()));
  }
  return u;
}

Eigen::VectorXd evaluate(const Integrand& f, const PointMatrix& points) {
  const auto d = static_cast<std::size_t>(points.cols());
  if (d != f.dim()) throw std::invalid_argument("evaluate: point dimension does not match integrand");
  Eigen::VectorXd values(points.rows());
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    Point x(points.row(i).data(), d);
    const double v = f.eval(x);
    if (!std::isfinite(v)) {
      std::ostringstream msg;
      msg.precision(17);
      msg << "integrand '" << f.name << "' returned " << v << " at point (";
      for (std::size_t j = 0; j < d; ++j) msg << (j ? ", " : "") << x[j];
      msg << ")";
      throw Error(msg.str());
    }
    values[i] = v;
  }
  return values;
}

double ci_half_width(double sigma2, double kappa, std::size_t n_samples) {
  if (n_samples == 0) return std::numeric_limits<double>::infinity();
  return kCiMultiplier * kappa * std::sqrt(std::max(sigma2, 0.0)) /
         std::sqrt(static_cast<double>(n_samples));
}

EstimateReport finalize(EstimateReport report) {
  report.ci_half_width = ci_half_width(report.sigma2, report.kappa, report.n_samples);
  if (report.n_evals == 0) report.n_evals = report.n_samples;
  return report;
}

}  // namespace mclsquad
