#include "mclsquad/basis.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace mclsquad {

const char* to_string(DegreeKind kind) {
  switch (kind) {
    case DegreeKind::total: return "total";
    case DegreeKind::euclidean: return "euclidean";
    case DegreeKind::max: return "max";
  }
  return "unknown";
}

DegreeKind parse_degree_kind(const std::string& name) {
  if (name == "total") return DegreeKind::total;
  if (name == "euclidean") return DegreeKind::euclidean;
  if (name == "max") return DegreeKind::max;
  throw std::invalid_argument("unknown degree kind '" + name + "'");
}

int MultiIndex::total_degree() const { return std::accumulate(degrees.begin(), degrees.end(), 0); }

int MultiIndex::max_degree() const {
  return degrees.empty() ? 0 : *std::max_element(degrees.begin(), degrees.end());
}

double MultiIndex::euclidean_degree() const {
  double s = 0.0;
  for (int j : degrees) s += static_cast<double>(j) * j;
  return std::sqrt(s);
}

namespace {

bool graded_less(const MultiIndex& a, const MultiIndex& b) {
  const int ta = a.total_degree();
  const int tb = b.total_degree();
  if (ta != tb) return ta < tb;
  return std::lexicographical_compare(b.degrees.begin(), b.degrees.end(), a.degrees.begin(),
                                      a.degrees.end());
}

bool admissible(const MultiIndex& idx, int k, DegreeKind kind) {
  switch (kind) {
    case DegreeKind::total: return idx.total_degree() <= k;
    case DegreeKind::max: return idx.max_degree() <= k;
    case DegreeKind::euclidean: {
      long long s = 0;
      for (int j : idx.degrees) s += static_cast<long long>(j) * j;
      return s <= static_cast<long long>(k) * k;
    }
  }
  return false;
}

std::size_t saturating_add(std::size_t a, std::size_t b) {
  const std::size_t cap = kMaxBasisSize + 1;
  return (a >= cap || b >= cap || a + b >= cap) ? cap : a + b;
}

std::size_t saturating_mul(std::size_t a, std::size_t b) {
  const std::size_t cap = kMaxBasisSize + 1;
  if (a == 0 || b == 0) return 0;
  if (a >= cap || b >= cap || a > cap / b) return cap;
  return std::min(a * b, cap);
}

// Depth-first enumeration; `budget` is the remaining sum (total), squared sum
// (euclidean) or per-coordinate bound (max).
void enumerate(std::size_t coord, long long budget, DegreeKind kind, int k,
               std::vector<int>& current, std::vector<MultiIndex>& out) {
  if (coord == current.size()) {
    if (out.size() >= kMaxBasisSize) {
      throw Error("multi_index_set: index set exceeds " + std::to_string(kMaxBasisSize) +
                  " entries");
    }
    out.push_back(MultiIndex{current});
    return;
  }
  for (int j = 0;; ++j) {
    long long cost = 0;
    switch (kind) {
      case DegreeKind::total: cost = j; break;
      case DegreeKind::euclidean: cost = static_cast<long long>(j) * j; break;
      case DegreeKind::max: cost = 0; break;
    }
    if (kind == DegreeKind::max ? j > k : cost > budget) break;
    current[coord] = j;
    enumerate(coord + 1, budget - cost, kind, k, current, out);
  }
  current[coord] = 0;
}

}  // namespace

IndexSet::IndexSet(std::size_t dim, int degree_cap, DegreeKind kind, std::vector<MultiIndex> indices)
    : dim_(dim), degree_cap_(degree_cap), kind_(kind), indices_(std::move(indices)) {
  if (dim_ == 0) throw std::invalid_argument("IndexSet: dimension must be positive");
  if (indices_.empty()) throw std::invalid_argument("IndexSet: empty index set");
  if (indices_.size() > kMaxBasisSize) throw Error("IndexSet: too many basis functions");
  for (const auto& idx : indices_) {
    if (idx.dim() != dim_) throw std::invalid_argument("IndexSet: index dimension mismatch");
    for (int j : idx.degrees) {
      if (j < 0) throw std::invalid_argument("IndexSet: negative degree");
    }
    if (!admissible(idx, degree_cap_, kind_)) {
      throw std::invalid_argument("IndexSet: index violates the degree constraint");
    }
  }
  if (indices_.front().total_degree() != 0) {
    throw std::invalid_argument("IndexSet: first index must be the zero index");
  }
  std::vector<MultiIndex> sorted = indices_;
  std::sort(sorted.begin(), sorted.end(), graded_less);
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw std::invalid_argument("IndexSet: duplicate index");
  }
}

int IndexSet::max_coordinate_degree() const {
  int m = 0;
  for (const auto& idx : indices_) m = std::max(m, idx.max_degree());
  return m;
}

IndexSet IndexSet::filtered(const std::function<bool(const MultiIndex&)>& pred) const {
  std::vector<MultiIndex> kept;
  for (const auto& idx : indices_) {
    if (pred(idx)) kept.push_back(idx);
  }
  return IndexSet(dim_, degree_cap_, kind_, std::move(kept));
}

IndexSet multi_index_set(std::size_t dim, int degree, DegreeKind kind) {
  if (dim == 0) throw std::invalid_argument("multi_index_set: dimension must be positive");
  if (degree < 0) throw std::invalid_argument("multi_index_set: degree must be non-negative");
  if (index_set_size(dim, degree, kind) > kMaxBasisSize) {
    throw Error("multi_index_set: index set exceeds " + std::to_string(kMaxBasisSize) +
                " entries");
  }
  std::vector<int> current(dim, 0);
  std::vector<MultiIndex> out;
  long long budget = 0;
  switch (kind) {
    case DegreeKind::total: budget = degree; break;
    case DegreeKind::euclidean: budget = static_cast<long long>(degree) * degree; break;
    case DegreeKind::max: budget = degree; break;
  }
  enumerate(0, budget, kind, degree, current, out);
  std::sort(out.begin(), out.end(), graded_less);
  return IndexSet(dim, degree, kind, std::move(out));
}

std::size_t index_set_size(std::size_t dim, int degree, DegreeKind kind) {
  if (dim == 0 || degree < 0) throw std::invalid_argument("index_set_size: bad arguments");
  switch (kind) {
    case DegreeKind::total: {
      // C(d+k, k) built incrementally: C(d+i, i) = C(d+i-1, i-1) * (d+i) / i.
      unsigned __int128 c = 1;
      for (int i = 1; i <= degree; ++i) {
        c = c * (dim + static_cast<std::size_t>(i)) / static_cast<unsigned>(i);
        if (c > kMaxBasisSize) return kMaxBasisSize + 1;
      }
      return static_cast<std::size_t>(c);
    }
    case DegreeKind::max: {
      std::size_t c = 1;
      for (std::size_t i = 0; i < dim; ++i) c = saturating_mul(c, static_cast<std::size_t>(degree) + 1);
      return c;
    }
    case DegreeKind::euclidean: {
      const std::size_t k2 = static_cast<std::size_t>(degree) * static_cast<std::size_t>(degree);
      std::vector<std::size_t> count(k2 + 1, 0);
      count[0] = 1;
      for (std::size_t c = 0; c < dim; ++c) {
        std::vector<std::size_t> next(k2 + 1, 0);
        for (std::size_t s = 0; s <= k2; ++s) {
          if (count[s] == 0) continue;
          for (std::size_t j = 0; s + j * j <= k2; ++j) {
            next[s + j * j] = saturating_add(next[s + j * j], count[s]);
          }
        }
        count = std::move(next);
      }
      std::size_t total = 0;
      for (auto c : count) total = saturating_add(total, c);
      return total;
    }
  }
  return 0;
}

void eval_legendre_1d_all(double x, std::span<double> out) {
  if (out.empty()) return;
  // Three-term recurrence for P_j(t), t = 2x - 1, then orthonormal scaling.
  const double t = 2.0 * x - 1.0;
  double p_prev = 1.0;
  double p = t;
  out[0] = 1.0;
  if (out.size() > 1) out[1] = std::sqrt(3.0) * t;
  for (std::size_t j = 1; j + 1 < out.size(); ++j) {
    const double jd = static_cast<double>(j);
    const double p_next = ((2.0 * jd + 1.0) * t * p - jd * p_prev) / (jd + 1.0);
    p_prev = p;
    p = p_next;
    out[j + 1] = std::sqrt(2.0 * (jd + 1.0) + 1.0) * p;
  }
}

double eval_legendre_1d(int degree, double x) {
  if (degree < 0) throw std::invalid_argument("eval_legendre_1d: negative degree");
  if (degree == 0) return 1.0;
  const double t = 2.0 * x - 1.0;
  double p_prev = 1.0;
  double p = t;
  for (int j = 1; j < degree; ++j) {
    const double p_next = ((2.0 * j + 1.0) * t * p - j * p_prev) / (j + 1.0);
    p_prev = p;
    p = p_next;
  }
  return std::sqrt(2.0 * degree + 1.0) * p;
}

QuadratureRule gauss_legendre_rule(int n) {
  if (n < 1) throw std::invalid_argument("gauss_legendre_rule: need at least one node");
  QuadratureRule rule;
  rule.nodes.resize(static_cast<std::size_t>(n));
  rule.weights.resize(static_cast<std::size_t>(n));
  const double pi = 3.14159265358979323846;
  for (int i = 0; i < (n + 1) / 2; ++i) {
    // Newton on P_n(t) from the Chebyshev-like initial guess.
    double t = std::cos(pi * (i + 0.75) / (n + 0.5));
    double dp = 1.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0;
      double p1 = t;
      for (int k = 1; k < n; ++k) {
        const double p2 = ((2.0 * k + 1.0) * t * p1 - k * p0) / (k + 1.0);
        p0 = p1;
        p1 = p2;
      }
      dp = n * (t * p1 - p0) / (t * t - 1.0);
      const double dt = p1 / dp;
      t -= dt;
      if (std::abs(dt) < 1e-16) break;
    }
    {
      double p0 = 1.0;
      double p1 = t;
      for (int k = 1; k < n; ++k) {
        const double p2 = ((2.0 * k + 1.0) * t * p1 - k * p0) / (k + 1.0);
        p0 = p1;
        p1 = p2;
      }
      dp = n * (t * p1 - p0) / (t * t - 1.0);
    }
    const double w = 2.0 / ((1.0 - t * t) * dp * dp);
    const auto lo = static_cast<std::size_t>(i);
    const auto hi = static_cast<std::size_t>(n - 1 - i);
    rule.nodes[lo] = 0.5 * (1.0 - t);
    rule.nodes[hi] = 0.5 * (1.0 + t);
    rule.weights[lo] = 0.5 * w;
    rule.weights[hi] = 0.5 * w;
  }
  return rule;
}

BasisEvaluator::BasisEvaluator(const IndexSet& iset)
    : dim_(iset.dim()), n_basis_(iset.size()), max_degree_(iset.max_coordinate_degree()) {
  flat_degrees_.reserve(n_basis_ * dim_);
  for (const auto& idx : iset.indices()) {
    flat_degrees_.insert(flat_degrees_.end(), idx.degrees.begin(), idx.degrees.end());
  }
}

void BasisEvaluator::eval(Point x, std::span<double> out, std::vector<double>& scratch) const {
  if (x.size() != dim_ || out.size() != n_basis_) {
    throw std::invalid_argument("BasisEvaluator: dimension mismatch");
  }
  const std::size_t stride = static_cast<std::size_t>(max_degree_) + 1;
  scratch.resize(dim_ * stride);
  for (std::size_t c = 0; c < dim_; ++c) {
    eval_legendre_1d_all(x[c], std::span<double>(scratch.data() + c * stride, stride));
  }
  const int* deg = flat_degrees_.data();
  for (std::size_t j = 0; j < n_basis_; ++j, deg += dim_) {
    double v = 1.0;
    for (std::size_t c = 0; c < dim_; ++c) {
      if (deg[c] != 0) v *= scratch[c * stride + static_cast<std::size_t>(deg[c])];
    }
    out[j] = v;
  }
}

void BasisEvaluator::eval(Point x, std::span<double> out) const {
  std::vector<double> scratch;
  eval(x, out, scratch);
}

void BasisEvaluator::eval_rows(const PointMatrix& unit_points, Eigen::Index first,
                               Eigen::Ref<Eigen::MatrixXd> out,
                               std::span<const double> row_scale) const {
  if (static_cast<std::size_t>(unit_points.cols()) != dim_ ||
      static_cast<std::size_t>(out.cols()) != n_basis_ ||
      first + out.rows() > unit_points.rows()) {
    throw std::invalid_argument("BasisEvaluator::eval_rows: shape mismatch");
  }
  std::vector<double> scratch;
  std::vector<double> row(n_basis_);
  for (Eigen::Index i = 0; i < out.rows(); ++i) {
    eval(Point(unit_points.row(first + i).data(), dim_), row, scratch);
    const double s = row_scale.empty() ? 1.0 : row_scale[static_cast<std::size_t>(i)];
    for (std::size_t j = 0; j < n_basis_; ++j) out(i, static_cast<Eigen::Index>(j)) = s * row[j];
  }
}

double BasisEvaluator::sum_of_squares(Point x) const {
  std::vector<double> row(n_basis_);
  eval(x, row);
  double s = 0.0;
  for (double v : row) s += v * v;
  return s;
}

Eigen::MatrixXd eval_basis_matrix(const PointMatrix& unit_points, const IndexSet& iset) {
  if (static_cast<std::size_t>(unit_points.cols()) != iset.dim()) {
    throw std::invalid_argument("eval_basis_matrix: point dimension does not match index set");
  }
  BasisEvaluator basis(iset);
  Eigen::MatrixXd v(unit_points.rows(), static_cast<Eigen::Index>(iset.size()));
  basis.eval_rows(unit_points, 0, v);
  return v;
}

Eigen::VectorXd basis_integrals(const IndexSet& iset) {
  Eigen::VectorXd e = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(iset.size()));
  e[0] = 1.0;
  return e;
}

}  // namespace mclsquad
