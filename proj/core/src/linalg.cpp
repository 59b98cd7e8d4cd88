#include "mclsquad/linalg.hpp"

#include <Eigen/QR>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <limits>

namespace mclsquad {

namespace {

using Eigen::Index;

constexpr Index kPanel = 32;
constexpr Index kRowBlock = 512;

struct Reflector {
  double tau = 0.0;
  double beta = 0.0;  // new diagonal, always >= 0
  double v0 = 1.0;    // divisor for the tail
};

// Householder reflector mapping (alpha, tail) to (beta, 0) with beta >= 0.
// Parlett's choice of v0 avoids cancellation when alpha > 0.
Reflector make_reflector(double alpha, double sigma) {
  Reflector h;
  if (sigma == 0.0) {
    if (alpha >= 0.0) {
      h.beta = alpha;
    } else {
      h.tau = 2.0;
      h.beta = -alpha;
    }
    return h;
  }
  h.beta = std::sqrt(alpha * alpha + sigma);
  h.v0 = alpha <= 0.0 ? alpha - h.beta : -sigma / (alpha + h.beta);
  h.tau = 2.0 * h.v0 * h.v0 / (sigma + h.v0 * h.v0);
  return h;
}

// Structured QR of [top; W] where top = [R | qtb] (m x (m+1)) is upper
// triangular in its first m columns and W is a dense p x (m+1) block. On
// return top holds the updated factor, W holds the reflector tails in its
// first m columns and the leftover right-hand side in its last column.
void structured_qr(Eigen::Ref<Eigen::MatrixXd> top, Eigen::Ref<Eigen::MatrixXd> W, Index m) {
  const Index ncols = top.cols();
  Eigen::VectorXd tau(kPanel);
  Eigen::MatrixXd T(kPanel, kPanel);
  Eigen::MatrixXd M;
  for (Index k0 = 0; k0 < m; k0 += kPanel) {
    const Index kb = std::min(kPanel, m - k0);
    for (Index k = k0; k < k0 + kb; ++k) {
      auto w = W.col(k);
      const Reflector h = make_reflector(top(k, k), w.squaredNorm());
      if (h.tau != 0.0 && h.tau != 2.0) w /= h.v0;
      if (h.tau == 2.0) w.setZero();
      top(k, k) = h.beta;
      tau[k - k0] = h.tau;
      if (h.tau == 0.0) continue;
      for (Index c = k + 1; c < k0 + kb; ++c) {
        const double s = h.tau * (top(k, c) + w.dot(W.col(c)));
        top(k, c) -= s;
        W.col(c) -= s * w;
      }
    }
    const Index rest = ncols - (k0 + kb);
    if (rest == 0) continue;
    auto V = W.middleCols(k0, kb);
    // Compact WY: H_1 ... H_kb = I - Y T Y^T, Y = [I; V]; the identity part
    // contributes nothing to Y^T y_i for i > j.
    T.setZero();
    for (Index i = 0; i < kb; ++i) {
      T(i, i) = tau[i];
      if (i > 0 && tau[i] != 0.0) {
        Eigen::VectorXd z = V.leftCols(i).transpose() * V.col(i);
        const Eigen::VectorXd tz = T.topLeftCorner(i, i).triangularView<Eigen::Upper>() * z;
        T.col(i).head(i) = -tau[i] * tz;
      }
    }
    auto Rr = top.block(k0, k0 + kb, kb, rest);
    auto Wr = W.rightCols(rest);
    M = Rr;
    M.noalias() += V.transpose() * Wr;
    M = T.topLeftCorner(kb, kb).triangularView<Eigen::Upper>().transpose() * M;
    Rr -= M;
    Wr.noalias() -= V * M;
  }
}

void require_full(const QRState& state, const char* who) {
  if (state.mode() != QRMode::full) {
    throw std::invalid_argument(std::string(who) +
                                ": needs a full-mode QRState (reflectors were discarded)");
  }
}

// Applies reflector k stored in house (column k, rows k..N-1) to x in place.
template <typename Vec>
void apply_reflector(const Eigen::MatrixXd& house, double tau, Index k, Vec&& x) {
  if (tau == 0.0) return;
  const Index n = house.rows();
  const auto tail = house.col(k).tail(n - k - 1);
  const double s = tau * (x[k] + tail.dot(x.tail(n - k - 1)));
  x[k] -= s;
  x.tail(n - k - 1) -= s * tail;
}

// In-place Householder on columns [c0, c1) of house, rows c.. for column c.
// Reflectors from earlier columns must already be applied.
void householder_columns(Eigen::MatrixXd& house, Eigen::VectorXd& tau, Index c0, Index c1) {
  const Index n = house.rows();
  for (Index k = c0; k < c1; ++k) {
    auto tail = house.col(k).tail(n - k - 1);
    const Reflector h = make_reflector(house(k, k), tail.squaredNorm());
    if (h.tau == 2.0) tail.setZero();
    else if (h.tau != 0.0) tail /= h.v0;
    house(k, k) = h.beta;
    tau[k] = h.tau;
    for (Index c = k + 1; c < c1; ++c) {
      auto col = house.col(c);
      if (h.tau == 0.0) break;
      const double s = h.tau * (col[k] + tail.dot(col.tail(n - k - 1)));
      col[k] -= s;
      col.tail(n - k - 1) -= s * tail;
    }
  }
}

}  // namespace

QRState::QRState(Index cols)
    : R_(Eigen::MatrixXd::Zero(cols, cols)), qtb_(Eigen::VectorXd::Zero(cols)) {
  if (cols < 0) throw std::invalid_argument("QRState: negative column count");
}

bool QRState::rank_deficient() const { return !dependent_columns().empty(); }

std::vector<Index> QRState::dependent_columns() const {
  std::vector<Index> dep;
  const double tol = kRankTol * a_max_;
  for (Index k = 0; k < R_.cols(); ++k) {
    if (!(std::abs(R_(k, k)) > tol)) dep.push_back(k);
  }
  return dep;
}

QRState qr_factor(const Eigen::MatrixXd& A, const Eigen::VectorXd& b, QRMode mode) {
  const Index n = A.rows();
  const Index m = A.cols();
  if (b.size() != n) throw std::invalid_argument("qr_factor: rhs length differs from row count");
  if (n < m) throw std::invalid_argument("qr_factor: fewer rows than columns");
  if (!A.allFinite() || !b.allFinite()) throw std::invalid_argument("qr_factor: non-finite input");
  QRState s(m);
  if (mode == QRMode::accumulate) {
    Eigen::MatrixXd block;
    for (Index r0 = 0; r0 < n; r0 += kRowBlock) {
      const Index p = std::min(kRowBlock, n - r0);
      block.resize(p, m + 1);
      block.leftCols(m) = A.middleRows(r0, p);
      block.col(m) = b.segment(r0, p);
      qr_row_update_inplace(s, block);
    }
    return s;
  }
  s.mode_ = QRMode::full;
  s.rows_seen_ = static_cast<std::size_t>(n);
  s.a_max_ = A.size() ? A.cwiseAbs().maxCoeff() : 0.0;
  s.house_ = A;
  s.tau_ = Eigen::VectorXd::Zero(m);
  householder_columns(s.house_, s.tau_, 0, m);
  s.R_ = s.house_.topRows(m).triangularView<Eigen::Upper>();
  s.qtb_full_ = b;
  for (Index k = 0; k < m; ++k) apply_reflector(s.house_, s.tau_[k], k, s.qtb_full_);
  s.qtb_ = s.qtb_full_.head(m);
  s.rss_ = s.qtb_full_.tail(n - m).squaredNorm();
  return s;
}

QRState qr_factor(const Eigen::MatrixXd& A) {
  return qr_factor(A, Eigen::VectorXd::Zero(A.rows()), QRMode::full);
}

Eigen::VectorXd apply_qt(const QRState& state, const Eigen::VectorXd& b) {
  require_full(state, "apply_qt");
  if (static_cast<std::size_t>(b.size()) != state.rows_seen_) {
    throw std::invalid_argument("apply_qt: rhs length differs from rows seen");
  }
  Eigen::VectorXd y = b;
  for (Index k = 0; k < state.cols(); ++k) apply_reflector(state.house_, state.tau_[k], k, y);
  return y;
}

namespace {

Eigen::VectorXd solve_with(const QRState& state, const Eigen::VectorXd& qtb) {
  const Index m = state.cols();
  const auto dep = state.dependent_columns();
  if (dep.empty()) {
    return state.R().triangularView<Eigen::Upper>().solve(qtb);
  }
  // Least squares over the independent columns: min ||R(:, keep) c - qtb||.
  std::vector<Index> keep;
  for (Index k = 0, d = 0; k < m; ++k) {
    if (d < static_cast<Index>(dep.size()) && dep[static_cast<std::size_t>(d)] == k) {
      ++d;
    } else {
      keep.push_back(k);
    }
  }
  Eigen::VectorXd c = Eigen::VectorXd::Zero(m);
  if (keep.empty()) return c;
  Eigen::MatrixXd Rk(m, static_cast<Index>(keep.size()));
  for (std::size_t j = 0; j < keep.size(); ++j) Rk.col(static_cast<Index>(j)) = state.R().col(keep[j]);
  const Eigen::VectorXd ck = Rk.householderQr().solve(qtb);
  for (std::size_t j = 0; j < keep.size(); ++j) c[keep[j]] = ck[static_cast<Index>(j)];
  return c;
}

}  // namespace

Eigen::VectorXd ls_solve(const QRState& state) { return solve_with(state, state.qtb()); }

Eigen::VectorXd ls_solve(const QRState& state, const Eigen::VectorXd& b) {
  return solve_with(state, apply_qt(state, b).head(state.cols()));
}

Eigen::MatrixXd form_q(const QRState& state) {
  require_full(state, "form_q");
  const Index n = static_cast<Index>(state.rows_seen());
  const Index m = state.cols();
  Eigen::MatrixXd Q = Eigen::MatrixXd::Identity(n, m);
  for (Index k = m - 1; k >= 0; --k) {
    for (Index c = 0; c < m; ++c) apply_reflector(state.reflectors(), state.tau()[k], k, Q.col(c));
  }
  return Q;
}

void qr_row_update_inplace(QRState& state, Eigen::Ref<Eigen::MatrixXd> block) {
  const Index m = state.cols();
  if (block.cols() != m + 1) {
    throw std::invalid_argument("qr_row_update: block must have one column per basis function plus rhs");
  }
  if (block.rows() == 0) return;
  if (!block.allFinite()) throw std::invalid_argument("qr_row_update: non-finite input");
  if (state.mode_ == QRMode::full) {
    state.mode_ = QRMode::accumulate;
    state.house_.resize(0, 0);
    state.tau_.resize(0);
    state.qtb_full_.resize(0);
  }
  if (m > 0) state.a_max_ = std::max(state.a_max_, block.leftCols(m).cwiseAbs().maxCoeff());
  for (Index r0 = 0; r0 < block.rows(); r0 += kRowBlock) {
    const Index p = std::min(kRowBlock, block.rows() - r0);
    auto W = block.middleRows(r0, p);
    Eigen::MatrixXd top(m, m + 1);
    top.leftCols(m) = state.R_;
    top.col(m) = state.qtb_;
    structured_qr(top, W, m);
    state.R_ = top.leftCols(m).triangularView<Eigen::Upper>();
    state.qtb_ = top.col(m);
    state.rss_ += W.col(m).squaredNorm();
  }
  state.rows_seen_ += static_cast<std::size_t>(block.rows());
}

QRState qr_row_update(const QRState& state, const Eigen::MatrixXd& new_rows,
                      const Eigen::VectorXd& new_rhs) {
  if (new_rows.rows() != new_rhs.size()) {
    throw std::invalid_argument("qr_row_update: rhs length differs from row count");
  }
  if (new_rows.cols() != state.cols()) {
    throw std::invalid_argument("qr_row_update: column count mismatch");
  }
  if (new_rows.rows() == 0) return state;
  QRState out = state;
  Eigen::MatrixXd block(new_rows.rows(), new_rows.cols() + 1);
  block.leftCols(new_rows.cols()) = new_rows;
  block.col(new_rows.cols()) = new_rhs;
  qr_row_update_inplace(out, block);
  return out;
}

QRState qr_col_append(const QRState& state, const Eigen::MatrixXd& new_cols) {
  require_full(state, "qr_col_append");
  const Index n = static_cast<Index>(state.rows_seen_);
  const Index m = state.cols();
  const Index p = new_cols.cols();
  if (new_cols.rows() != n) throw std::invalid_argument("qr_col_append: row count mismatch");
  if (m + p > n) throw std::invalid_argument("qr_col_append: more columns than rows");
  if (!new_cols.allFinite()) throw std::invalid_argument("qr_col_append: non-finite input");
  QRState s = state;
  s.house_.conservativeResize(n, m + p);
  s.house_.rightCols(p) = new_cols;
  for (Index k = 0; k < m; ++k) {
    for (Index c = m; c < m + p; ++c) apply_reflector(s.house_, s.tau_[k], k, s.house_.col(c));
  }
  s.tau_.conservativeResize(m + p);
  householder_columns(s.house_, s.tau_, m, m + p);
  for (Index k = m; k < m + p; ++k) apply_reflector(s.house_, s.tau_[k], k, s.qtb_full_);
  s.R_ = s.house_.topRows(m + p).triangularView<Eigen::Upper>();
  s.qtb_ = s.qtb_full_.head(m + p);
  s.rss_ = s.qtb_full_.tail(n - m - p).squaredNorm();
  if (p > 0) s.a_max_ = std::max(s.a_max_, new_cols.cwiseAbs().maxCoeff());
  return s;
}

CgResult cg_normal(const Eigen::MatrixXd& A, const Eigen::VectorXd& b, double tol,
                   std::size_t maxit, const std::optional<Eigen::VectorXd>& x0) {
  if (!(tol > 0.0)) throw std::invalid_argument("cg_normal: tol must be positive");
  if (b.size() != A.rows()) throw std::invalid_argument("cg_normal: rhs length differs from row count");
  CgResult res;
  res.coef = Eigen::VectorXd::Zero(A.cols());
  if (x0) {
    if (x0->size() != A.cols()) throw std::invalid_argument("cg_normal: warm start has wrong length");
    res.coef = *x0;
  }
  const double target = tol * (A.transpose() * b).norm();
  Eigen::VectorXd r = b - A * res.coef;
  Eigen::VectorXd s = A.transpose() * r;
  double gamma = s.squaredNorm();
  if (std::sqrt(gamma) <= target || gamma == 0.0) {
    res.converged = true;
    return res;
  }
  Eigen::VectorXd p = s;
  Eigen::VectorXd q(A.rows());
  while (res.iterations < maxit) {
    q.noalias() = A * p;
    const double qq = q.squaredNorm();
    if (qq == 0.0) break;
    const double alpha = gamma / qq;
    res.coef += alpha * p;
    r -= alpha * q;
    s.noalias() = A.transpose() * r;
    const double gamma_new = s.squaredNorm();
    ++res.iterations;
    if (std::sqrt(gamma_new) <= target) {
      res.converged = true;
      break;
    }
    p = s + (gamma_new / gamma) * p;
    gamma = gamma_new;
  }
  return res;
}

namespace {

double svd_ratio(const Eigen::MatrixXd& M) {
  if (M.cols() == 0) return 1.0;
  Eigen::BDCSVD<Eigen::MatrixXd> svd(M);
  const auto& sv = svd.singularValues();
  const double smax = sv.maxCoeff();
  const double smin = sv.minCoeff();
  if (!(smin > 0.0)) return std::numeric_limits<double>::infinity();
  return smax / smin;
}

}  // namespace

double cond2(const QRState& state) {
  if (state.cols() == 0) return 1.0;
  if (state.rank_deficient()) return std::numeric_limits<double>::infinity();
  return svd_ratio(state.R());
}

double cond2_independent(const QRState& state) {
  const auto dep = state.dependent_columns();
  if (dep.empty()) return cond2(state);
  std::vector<Index> keep;
  for (Index k = 0; k < state.cols(); ++k) {
    if (std::find(dep.begin(), dep.end(), k) == dep.end()) keep.push_back(k);
  }
  if (keep.empty()) return std::numeric_limits<double>::infinity();
  Eigen::MatrixXd Rk(state.cols(), static_cast<Index>(keep.size()));
  for (std::size_t j = 0; j < keep.size(); ++j) Rk.col(static_cast<Index>(j)) = state.R().col(keep[j]);
  return svd_ratio(Rk);
}

}  // namespace mclsquad
