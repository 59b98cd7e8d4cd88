#pragma once

#include "mclsquad/core.hpp"

#include <Eigen/Core>

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace mclsquad {

enum class DegreeKind { total, euclidean, max };

const char* to_string(DegreeKind kind);
DegreeKind parse_degree_kind(const std::string& name);

/// Per-coordinate polynomial degrees (j_1, ..., j_d) of a tensor Legendre term.
struct MultiIndex {
  std::vector<int> degrees;

  std::size_t dim() const { return degrees.size(); }
  int total_degree() const;
  int max_degree() const;
  double euclidean_degree() const;
  /// True when the term is odd under x -> 1 - x, i.e. the total degree is odd.
  bool is_center_odd() const { return total_degree() % 2 == 1; }

  friend bool operator==(const MultiIndex&, const MultiIndex&) = default;
};

/// Largest index set accepted anywhere in the library.
inline constexpr std::size_t kMaxBasisSize = 2'000'000;

/// Ordered multi-index set. Order is graded: by total degree, then by
/// descending lexicographic order of the degree vector, so (1,0) precedes
/// (0,1). Entry 0 is always the zero index.
class IndexSet {
 public:
  IndexSet(std::size_t dim, int degree_cap, DegreeKind kind, std::vector<MultiIndex> indices);

  std::size_t dim() const { return dim_; }
  int degree_cap() const { return degree_cap_; }
  DegreeKind kind() const { return kind_; }
  std::size_t size() const { return indices_.size(); }
  const MultiIndex& operator[](std::size_t i) const { return indices_[i]; }
  const std::vector<MultiIndex>& indices() const { return indices_; }

  /// Highest 1-D degree appearing in any coordinate.
  int max_coordinate_degree() const;

  /// Members satisfying pred, order preserved. pred must keep the zero index.
  IndexSet filtered(const std::function<bool(const MultiIndex&)>& pred) const;

 private:
  std::size_t dim_;
  int degree_cap_;
  DegreeKind kind_;
  std::vector<MultiIndex> indices_;
};

/// All indices with (total | euclidean | max) degree <= k. Throws Error when
/// the set would exceed kMaxBasisSize.
IndexSet multi_index_set(std::size_t dim, int degree, DegreeKind kind);

/// Cardinality of multi_index_set(dim, degree, kind) without building it,
/// saturating at kMaxBasisSize + 1.
std::size_t index_set_size(std::size_t dim, int degree, DegreeKind kind);

/// Orthonormal shifted Legendre polynomial sqrt(2j+1) P_j(2x-1) on [0,1].
double eval_legendre_1d(int degree, double x);

/// Values of the orthonormal shifted Legendre polynomials 0..out.size()-1 at x.
void eval_legendre_1d_all(double x, std::span<double> out);

/// n-point Gauss-Legendre rule mapped to [0,1]; weights sum to 1.
struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};
QuadratureRule gauss_legendre_rule(int n);

/// Row evaluator for the tensor basis of an IndexSet. Cheap to copy.
class BasisEvaluator {
 public:
  explicit BasisEvaluator(const IndexSet& iset);

  std::size_t dim() const { return dim_; }
  std::size_t size() const { return n_basis_; }

  /// out[j] = phi_j(x) for x in [0,1]^d. scratch is resized as needed.
  void eval(Point x, std::span<double> out, std::vector<double>& scratch) const;
  void eval(Point x, std::span<double> out) const;

  /// Rows [first, first + out.rows()) of the Vandermonde matrix, each row
  /// multiplied by row_scale[i] when row_scale is non-empty.
  void eval_rows(const PointMatrix& unit_points, Eigen::Index first,
                 Eigen::Ref<Eigen::MatrixXd> out,
                 std::span<const double> row_scale = {}) const;

  /// Sum over j of phi_j(x)^2, the reciprocal Christoffel function times (n+1).
  double sum_of_squares(Point x) const;

 private:
  std::size_t dim_;
  std::size_t n_basis_;
  int max_degree_;
  std::vector<int> flat_degrees_;  // n_basis_ x dim_, row-major
};

/// Vandermonde matrix V(i, j) = phi_j(x_i) for points in [0,1]^d.
Eigen::MatrixXd eval_basis_matrix(const PointMatrix& unit_points, const IndexSet& iset);

/// Exact integrals of the basis over [0,1]^d: e_0.
Eigen::VectorXd basis_integrals(const IndexSet& iset);

}  // namespace mclsquad
