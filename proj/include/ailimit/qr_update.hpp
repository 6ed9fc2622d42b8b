#pragma once

#include <cmath>

#include <Eigen/Dense>

#include "ailimit/error.hpp"

namespace ailimit {

/// Dense A = QR with an explicit orthogonal Q, kept current under rank-one
/// modifications A + u v^T in O(m^2) with Givens rotations.
class QrFactor {
 public:
  QrFactor() = default;
  explicit QrFactor(const Eigen::MatrixXd& A) { factor(A); }

  void factor(const Eigen::MatrixXd& A) {
    if (A.rows() != A.cols()) throw Error(Errc::invalid_argument, "QrFactor needs a square matrix");
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(A);
    q_ = qr.householderQ() * Eigen::MatrixXd::Identity(A.rows(), A.rows());
    r_ = qr.matrixQR().triangularView<Eigen::Upper>();
  }

  Eigen::Index size() const { return r_.rows(); }
  const Eigen::MatrixXd& q() const { return q_; }
  const Eigen::MatrixXd& r() const { return r_; }
  Eigen::MatrixXd matrix() const { return q_ * r_; }

  /// Smallest |R_ii| relative to the largest; 0 means singular.
  double conditioning() const {
    const Eigen::VectorXd d = r_.diagonal().cwiseAbs();
    const double big = d.maxCoeff();
    return big > 0.0 ? d.minCoeff() / big : 0.0;
  }

  /// x with A x = b.
  Eigen::VectorXd solve(const Eigen::VectorXd& b) const {
    if (conditioning() < 1e-14) throw Error(Errc::corrector_failure, "singular QR factor");
    Eigen::VectorXd y = q_.transpose() * b;
    r_.triangularView<Eigen::Upper>().solveInPlace(y);
    return y;
  }

  /// Replaces A by A + u v^T.
  void rank_one_update(const Eigen::VectorXd& u, const Eigen::VectorXd& v) {
    const Eigen::Index m = size();
    Eigen::VectorXd w = q_.transpose() * u;
    // Rotate w onto e_0 from the bottom up; R picks up a subdiagonal.
    for (Eigen::Index k = m - 1; k > 0; --k) {
      rotate_rows(k - 1, k, w(k - 1), w(k), &w, k - 1);
    }
    r_.row(0) += w(0) * v.transpose();
    // Chase the subdiagonal back out.
    for (Eigen::Index k = 0; k + 1 < m; ++k) {
      rotate_rows(k, k + 1, r_(k, k), r_(k + 1, k), nullptr, k);
      r_(k + 1, k) = 0.0;  // rounding leaves ~1e-16 here
    }
  }

 private:
  // Givens rotation G acting on rows (i, j) so that G [a; b] = [hypot; 0];
  // applied to R from the left and to Q from the right (Q G^T).
  void rotate_rows(Eigen::Index i, Eigen::Index j, double a, double b, Eigen::VectorXd* w,
                   Eigen::Index first_col) {
    if (b == 0.0) return;
    const double h = std::hypot(a, b);
    const double c = a / h, s = b / h;
    for (Eigen::Index col = first_col; col < r_.cols(); ++col) {
      const double ri = r_(i, col), rj = r_(j, col);
      r_(i, col) = c * ri + s * rj;
      r_(j, col) = -s * ri + c * rj;
    }
    if (w != nullptr) {
      const double wi = (*w)(i), wj = (*w)(j);
      (*w)(i) = c * wi + s * wj;
      (*w)(j) = -s * wi + c * wj;
    }
    auto qi = q_.col(i);
    auto qj = q_.col(j);
    for (Eigen::Index row = 0; row < q_.rows(); ++row) {
      const double x = qi(row), y = qj(row);
      qi(row) = c * x + s * y;
      qj(row) = -s * x + c * y;
    }
  }

  Eigen::MatrixXd q_;
  Eigen::MatrixXd r_;
};

}  // namespace ailimit
