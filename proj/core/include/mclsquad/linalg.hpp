#pragma once

#include "mclsquad/core.hpp"

#include <Eigen/Core>

#include <cstddef>
#include <optional>
#include <vector>

namespace mclsquad {

/// Columns with |R_ii| <= kRankTol * max|A| are treated as dependent.
inline constexpr double kRankTol = 1e-12;

enum class QRMode {
  accumulate,  // R, Q^T b and the residual norm only; supports row updates
  full,        // keeps the Householder reflectors; supports column appends
};

/// Thin Householder QR of an N x m least-squares system A c ~ b with
/// R_kk >= 0.
class QRState {
 public:
  /// Empty accumulate-mode state for m columns (no rows seen).
  explicit QRState(Eigen::Index cols = 0);

  QRMode mode() const { return mode_; }
  Eigen::Index cols() const { return R_.cols(); }
  std::size_t rows_seen() const { return rows_seen_; }

  const Eigen::MatrixXd& R() const { return R_; }
  /// First m entries of Q^T b.
  const Eigen::VectorXd& qtb() const { return qtb_; }
  /// Squared norm of the component of b orthogonal to range(A).
  double residual_sq() const { return rss_; }
  /// Largest |A_ij| over all rows seen.
  double a_max() const { return a_max_; }

  bool rank_deficient() const;
  /// Indices k with |R_kk| <= kRankTol * a_max.
  std::vector<Eigen::Index> dependent_columns() const;

  /// Full mode only: packed reflectors (below the diagonal, unit diagonal
  /// implied), their scalars, and the whole of Q^T b.
  const Eigen::MatrixXd& reflectors() const { return house_; }
  const Eigen::VectorXd& tau() const { return tau_; }
  const Eigen::VectorXd& qtb_full() const { return qtb_full_; }

 private:
  friend QRState qr_factor(const Eigen::MatrixXd&, const Eigen::VectorXd&, QRMode);
  friend void qr_row_update_inplace(QRState&, Eigen::Ref<Eigen::MatrixXd>);
  friend QRState qr_col_append(const QRState&, const Eigen::MatrixXd&);
  friend Eigen::VectorXd apply_qt(const QRState&, const Eigen::VectorXd&);

  QRMode mode_ = QRMode::accumulate;
  Eigen::MatrixXd R_;
  Eigen::VectorXd qtb_;
  double rss_ = 0.0;
  std::size_t rows_seen_ = 0;
  double a_max_ = 0.0;
  Eigen::MatrixXd house_;
  Eigen::VectorXd tau_;
  Eigen::VectorXd qtb_full_;
};

/// Factors A with right-hand side b. Accumulate mode streams A through the
/// row-update kernel in blocks; full mode is an unblocked in-place
/// Householder factorization that keeps the reflectors.
QRState qr_factor(const Eigen::MatrixXd& A, const Eigen::VectorXd& b, QRMode mode = QRMode::full);

/// Factors A with a zero right-hand side (full mode).
QRState qr_factor(const Eigen::MatrixXd& A);

/// Back substitution R c = qtb. Coefficients of dependent columns are set to
/// zero and the remaining system is solved over the independent ones.
Eigen::VectorXd ls_solve(const QRState& state);

/// Solves for a new right-hand side b of length rows_seen (full mode only).
Eigen::VectorXd ls_solve(const QRState& state, const Eigen::VectorXd& b);

/// Q^T b for b of length rows_seen (full mode only).
Eigen::VectorXd apply_qt(const QRState& state, const Eigen::VectorXd& b);

/// Explicit thin Q (full mode only).
Eigen::MatrixXd form_q(const QRState& state);

/// Adds rows to the factorization. `block` is p x (m+1): new rows of A with
/// the new right-hand-side entries in the last column; it is overwritten.
/// A full-mode state drops its reflectors and continues in accumulate mode.
/// Cost is O(p m^2), independent of rows already seen.
void qr_row_update_inplace(QRState& state, Eigen::Ref<Eigen::MatrixXd> block);

QRState qr_row_update(const QRState& state, const Eigen::MatrixXd& new_rows,
                      const Eigen::VectorXd& new_rhs);

/// Appends columns (one entry per row seen) to a full-mode state.
QRState qr_col_append(const QRState& state, const Eigen::MatrixXd& new_cols);

struct CgResult {
  Eigen::VectorXd coef;
  std::size_t iterations = 0;
  bool converged = false;
};

/// Conjugate gradients on A^T A c = A^T b (CGNR), stopping when
/// ||A^T (A c - b)|| <= tol ||A^T b||. x0 warm-starts the iteration.
CgResult cg_normal(const Eigen::MatrixXd& A, const Eigen::VectorXd& b, double tol,
                   std::size_t maxit, const std::optional<Eigen::VectorXd>& x0 = std::nullopt);

/// sigma_max(R) / sigma_min(R); +infinity when R is singular.
double cond2(const QRState& state);

/// Condition number of the independent columns only, that is of A with the
/// dependent columns removed. Equals cond2 for full-rank states.
double cond2_independent(const QRState& state);

}  // namespace mclsquad
