#pragma once

#include "mclsquad/core.hpp"

#include <cstddef>
#include <string>
#include <vector>

namespace mclsquad {

/// Default cap on sparse-grid nodes accepted by sg_build.
inline constexpr std::size_t kDefaultMaxNodes = 1'000'000;

/// 1-D hierarchical basis on the interior nodes i 2^-l (i odd).
///
/// hat:      max(0, 1 - |2^l x - i|) on every level. Vanishes on the boundary,
///           so functions that do not are only approximated to O(2^-L) in a
///           boundary layer.
/// modified: constant 1 on level 1; on levels >= 2 the two outermost hats are
///           replaced by the linear functions through them that reach 2 at
///           the boundary. Same supports and nodes, but constants and linear
///           boundary behaviour are reproduced.
enum class SgBasis { hat, modified };

const char* to_string(SgBasis basis);
SgBasis parse_sg_basis(const std::string& name);

/// Piecewise-linear hierarchical sparse-grid interpolant without boundary
/// nodes. Subspace l (l_m >= 1) holds basis functions centered at i_m 2^-l_m
/// for odd i_m; the grid of level L keeps all subspaces with |l|_1 <= L + d - 1.
class SparseGridInterpolant {
 public:
  struct Subspace {
    std::vector<int> levels;
    std::size_t offset = 0;  // first surplus of this subspace
    std::size_t count = 0;   // prod 2^(l_m - 1)
  };

  SparseGridInterpolant(HyperRect domain, int level, SgBasis basis = SgBasis::hat);

  std::size_t dim() const { return domain_.dim(); }
  int level() const { return level_; }
  SgBasis basis() const { return basis_; }
  const HyperRect& domain() const { return domain_; }
  std::size_t node_count() const { return surplus_.size(); }
  const std::vector<Subspace>& subspaces() const { return subspaces_; }
  const std::vector<double>& surpluses() const { return surplus_; }

  /// Node k in [0,1]^d coordinates (order matches surpluses()).
  std::vector<double> unit_node(std::size_t k) const;

  /// All nodes in domain coordinates, one per row.
  PointMatrix nodes() const;

  /// Value at a point of [0,1]^d using the first `n_subspaces` subspaces.
  double eval_unit(Point u, std::size_t n_subspaces) const;
  double eval_unit(Point u) const { return eval_unit(u, subspaces_.size()); }

 private:
  friend SparseGridInterpolant sg_build(const Integrand&, int, SgBasis, std::size_t);

  HyperRect domain_;
  int level_;
  SgBasis basis_;
  std::vector<Subspace> subspaces_;
  std::vector<double> surplus_;
};

/// Number of nodes of the level-L grid in d dimensions.
std::size_t sg_node_count(std::size_t dim, int level);

/// Builds the interpolant of f, evaluating f once per node. Subspaces are
/// processed in increasing |l|_1, each surplus being f(node) minus the
/// interpolant of the subspaces already built: O(N_s * #subspaces * d).
SparseGridInterpolant sg_build(const Integrand& f, int level, SgBasis basis,
                               std::size_t max_nodes = kDefaultMaxNodes);
SparseGridInterpolant sg_build(const Integrand& f, int level,
                               std::size_t max_nodes = kDefaultMaxNodes);

/// p_s(x) for x in the interpolant's domain.
double sg_eval(const SparseGridInterpolant& p, Point x);

/// Values at every row of points (domain coordinates).
Eigen::VectorXd sg_eval(const SparseGridInterpolant& p, const PointMatrix& points);

/// Exact integral of p_s over its domain.
double sg_integral(const SparseGridInterpolant& p);

}  // namespace mclsquad
