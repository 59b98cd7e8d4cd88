#include "mclsquad/sparsegrid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace mclsquad {

namespace {

// Multi-levels l >= 1 with |l|_1 <= budget, ordered by |l|_1 then descending
// lexicographic.
std::vector<std::vector<int>> enumerate_levels(std::size_t dim, int budget) {
  std::vector<std::vector<int>> out;
  std::vector<int> cur(dim, 1);
  const int base = static_cast<int>(dim);
  if (budget < base) return out;
  // Distribute the excess e = |l|_1 - d over coordinates.
  auto rec = [&](auto&& self, std::size_t c, int left) -> void {
    if (c == dim) {
      out.push_back(cur);
      return;
    }
    for (int e = 0; e <= left; ++e) {
      cur[c] = 1 + e;
      self(self, c + 1, left - e);
    }
    cur[c] = 1;
  };
  rec(rec, 0, budget - base);
  std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    const int sa = std::accumulate(a.begin(), a.end(), 0);
    const int sb = std::accumulate(b.begin(), b.end(), 0);
    if (sa != sb) return sa < sb;
    return std::lexicographical_compare(b.begin(), b.end(), a.begin(), a.end());
  });
  return out;
}

// Value of the level-l basis function number j (node 2j+1) at pos = 2^l u.
double basis_1d(SgBasis basis, int l, std::size_t j, std::size_t per, double pos) {
  if (basis == SgBasis::modified) {
    if (l == 1) return 1.0;
    if (j == 0) return 2.0 - pos;
    if (j == per - 1) return pos - std::ldexp(1.0, l) + 2.0;
  }
  return 1.0 - std::abs(pos - static_cast<double>(2 * j + 1));
}

// Integral of that function over [0, 1].
double basis_integral_1d(SgBasis basis, int l, std::size_t j, std::size_t per) {
  if (basis == SgBasis::modified) {
    if (l == 1) return 1.0;
    if (j == 0 || j == per - 1) return std::ldexp(1.0, 1 - l);
  }
  return std::ldexp(1.0, -l);
}

}  // namespace

const char* to_string(SgBasis basis) { return basis == SgBasis::hat ? "hat" : "modified"; }

SgBasis parse_sg_basis(const std::string& name) {
  if (name == "hat") return SgBasis::hat;
  if (name == "modified") return SgBasis::modified;
  throw std::invalid_argument("unknown sparse-grid basis '" + name + "'");
}

SparseGridInterpolant::SparseGridInterpolant(HyperRect domain, int level, SgBasis basis)
    : domain_(std::move(domain)), level_(level), basis_(basis) {
  if (level_ < 1) throw std::invalid_argument("SparseGridInterpolant: level must be >= 1");
}

std::size_t sg_node_count(std::size_t dim, int level) {
  if (dim == 0 || level < 1) throw std::invalid_argument("sg_node_count: bad arguments");
  std::size_t total = 0;
  for (const auto& l : enumerate_levels(dim, level + static_cast<int>(dim) - 1)) {
    int e = 0;
    for (int lm : l) e += lm - 1;
    if (e >= 63) return std::numeric_limits<std::size_t>::max();
    total += std::size_t{1} << e;
  }
  return total;
}

std::vector<double> SparseGridInterpolant::unit_node(std::size_t k) const {
  auto it = std::upper_bound(subspaces_.begin(), subspaces_.end(), k,
                             [](std::size_t v, const Subspace& s) { return v < s.offset; });
  const Subspace& s = *(it - 1);
  std::size_t local = k - s.offset;
  std::vector<double> u(dim());
  for (std::size_t m = 0; m < dim(); ++m) {
    const std::size_t per = std::size_t{1} << (s.levels[m] - 1);
    const std::size_t j = local % per;
    local /= per;
    u[m] = std::ldexp(static_cast<double>(2 * j + 1), -s.levels[m]);
  }
  return u;
}

PointMatrix SparseGridInterpolant::nodes() const {
  const std::size_t d = dim();
  PointMatrix x(static_cast<Eigen::Index>(node_count()), static_cast<Eigen::Index>(d));
  for (std::size_t k = 0; k < node_count(); ++k) {
    const auto u = unit_node(k);
    from_unit_cube(domain_, u, std::span<double>(x.row(static_cast<Eigen::Index>(k)).data(), d));
  }
  return x;
}

double SparseGridInterpolant::eval_unit(Point u, std::size_t n_subspaces) const {
  const std::size_t d = dim();
  double sum = 0.0;
  for (std::size_t s = 0; s < n_subspaces; ++s) {
    const Subspace& sub = subspaces_[s];
    double phi = 1.0;
    std::size_t local = 0;
    std::size_t stride = 1;
    for (std::size_t m = 0; m < d; ++m) {
      const int l = sub.levels[m];
      const std::size_t per = std::size_t{1} << (l - 1);
      // Only the function whose support contains u_m can be nonzero.
      const double pos = std::ldexp(u[m], l);
      auto j = static_cast<std::size_t>(std::max(0.0, std::floor(0.5 * pos)));
      j = std::min(j, per - 1);
      const double h = basis_1d(basis_, l, j, per, pos);
      if (h <= 0.0) {
        phi = 0.0;
        break;
      }
      phi *= h;
      local += j * stride;
      stride *= per;
    }
    if (phi != 0.0) sum += phi * surplus_[sub.offset + local];
  }
  return sum;
}

SparseGridInterpolant sg_build(const Integrand& f, int level, std::size_t max_nodes) {
  return sg_build(f, level, SgBasis::hat, max_nodes);
}

SparseGridInterpolant sg_build(const Integrand& f, int level, SgBasis basis, std::size_t max_nodes) {
  SparseGridInterpolant p(f.domain, level, basis);
  const std::size_t d = f.dim();
  const std::size_t n_nodes = sg_node_count(d, level);
  if (n_nodes > max_nodes) {
    throw Error("sg_build: level " + std::to_string(level) + " in " + std::to_string(d) +
                " dimensions needs " + std::to_string(n_nodes) + " nodes, cap is " +
                std::to_string(max_nodes));
  }
  std::size_t offset = 0;
  for (auto& l : enumerate_levels(d, level + static_cast<int>(d) - 1)) {
    std::size_t count = 1;
    for (int lm : l) count <<= (lm - 1);
    p.subspaces_.push_back({std::move(l), offset, count});
    offset += count;
  }
  p.surplus_.assign(offset, 0.0);
  std::vector<double> x(d);
  for (std::size_t s = 0; s < p.subspaces_.size(); ++s) {
    const auto& sub = p.subspaces_[s];
    for (std::size_t k = sub.offset; k < sub.offset + sub.count; ++k) {
      const auto u = p.unit_node(k);
      from_unit_cube(f.domain, u, x);
      const double fx = f.eval(x);
      if (!std::isfinite(fx)) {
        throw Error("sg_build: integrand '" + f.name + "' is not finite at a grid node");
      }
      p.surplus_[k] = fx - p.eval_unit(u, s);
    }
  }
  return p;
}

double sg_eval(const SparseGridInterpolant& p, Point x) {
  return p.eval_unit(to_unit_cube(p.domain(), x));
}

Eigen::VectorXd sg_eval(const SparseGridInterpolant& p, const PointMatrix& points) {
  const std::size_t d = p.dim();
  if (static_cast<std::size_t>(points.cols()) != d) {
    throw std::invalid_argument("sg_eval: point dimension mismatch");
  }
  Eigen::VectorXd v(points.rows());
  std::vector<double> u(d);
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    to_unit_cube(p.domain(), Point(points.row(i).data(), d), u);
    v[i] = p.eval_unit(u);
  }
  return v;
}

double sg_integral(const SparseGridInterpolant& p) {
  double total = 0.0;
  if (p.basis() == SgBasis::modified) {
    const std::size_t d = p.dim();
    for (const auto& sub : p.subspaces()) {
      for (std::size_t k = sub.offset; k < sub.offset + sub.count; ++k) {
        std::size_t local = k - sub.offset;
        double w = 1.0;
        for (std::size_t m = 0; m < d; ++m) {
          const std::size_t per = std::size_t{1} << (sub.levels[m] - 1);
          w *= basis_integral_1d(SgBasis::modified, sub.levels[m], local % per, per);
          local /= per;
        }
        total += w * p.surpluses()[k];
      }
    }
    return total * volume(p.domain());
  }
  for (const auto& sub : p.subspaces()) {
    int e = 0;
    for (int l : sub.levels) e += l;
    double s = 0.0;
    for (std::size_t k = sub.offset; k < sub.offset + sub.count; ++k) s += p.surpluses()[k];
    total += std::ldexp(s, -e);
  }
  return total * volume(p.domain());
}

}  // namespace mclsquad
