#include <random>

#include <gtest/gtest.h>

#include "ailimit/qr_update.hpp"

using namespace ailimit;

TEST(QrFactor, ReproducesMatrixAndSolves) {
  const Eigen::MatrixXd A = Eigen::MatrixXd::Random(7, 7) + 3.0 * Eigen::MatrixXd::Identity(7, 7);
  const QrFactor f(A);
  EXPECT_LT((f.matrix() - A).norm(), 1e-13);
  const Eigen::VectorXd b = Eigen::VectorXd::Random(7);
  EXPECT_LT((A * f.solve(b) - b).norm(), 1e-12);
}

TEST(QrFactor, RankOneUpdateMatchesRefactorization) {
  std::mt19937 rng(1);
  for (int n : {1, 2, 5, 30}) {
    Eigen::MatrixXd A = Eigen::MatrixXd::Random(n, n) + 4.0 * Eigen::MatrixXd::Identity(n, n);
    QrFactor f(A);
    for (int k = 0; k < 20; ++k) {
      const Eigen::VectorXd u = Eigen::VectorXd::Random(n), v = Eigen::VectorXd::Random(n);
      A += u * v.transpose();
      f.rank_one_update(u, v);
      EXPECT_LT((f.matrix() - A).norm(), 1e-11 * A.norm()) << n;
      EXPECT_LT((f.q().transpose() * f.q() - Eigen::MatrixXd::Identity(n, n)).norm(), 1e-12);
      const Eigen::MatrixXd lower = f.r().triangularView<Eigen::StrictlyLower>();
      EXPECT_EQ(lower.norm(), 0.0);
    }
  }
}

TEST(QrFactor, RefusesSingularSolve) {
  Eigen::MatrixXd A = Eigen::MatrixXd::Identity(3, 3);
  A(2, 2) = 0.0;
  EXPECT_THROW(QrFactor(A).solve(Eigen::VectorXd::Ones(3)), Error);
}
