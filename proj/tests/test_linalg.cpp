#include <cmath>

#include <Eigen/Dense>

#include "doctest.h"
#include "perisel/linalg.hpp"

using namespace perisel;

TEST_CASE("matrix exponential on closed-form cases") {
  // Diagonal.
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(2, 2);
  d(0, 0) = -1.0;
  d(1, 1) = 2.0;
  Eigen::MatrixXd ed = expm(d);
  CHECK(ed(0, 0) == doctest::Approx(std::exp(-1.0)).epsilon(1e-14));
  CHECK(ed(1, 1) == doctest::Approx(std::exp(2.0)).epsilon(1e-14));
  CHECK(std::abs(ed(0, 1)) < 1e-16);

  // Nilpotent: exp([[0,1],[0,0]]) = I + N.
  Eigen::MatrixXd nil = Eigen::MatrixXd::Zero(2, 2);
  nil(0, 1) = 3.0;
  Eigen::MatrixXd en = expm(nil);
  CHECK(en(0, 0) == doctest::Approx(1.0));
  CHECK(en(0, 1) == doctest::Approx(3.0));
  CHECK(en(1, 0) == doctest::Approx(0.0));

  // Rotation generator: exp(t J) = [[cos t, -sin t], [sin t, cos t]].
  const double t = 0.7;
  Eigen::MatrixXd j(2, 2);
  j << 0.0, -t, t, 0.0;
  Eigen::MatrixXd ej = expm(j);
  CHECK(ej(0, 0) == doctest::Approx(std::cos(t)).epsilon(1e-14));
  CHECK(ej(1, 0) == doctest::Approx(std::sin(t)).epsilon(1e-14));

  // Large norm exercises the scaling/squaring path.
  Eigen::MatrixXd big = Eigen::MatrixXd::Identity(1, 1) * 30.0;
  CHECK(expm(big)(0, 0) == doctest::Approx(std::exp(30.0)).epsilon(1e-12));
}

TEST_CASE("exponential additivity on commuting arguments") {
  Eigen::MatrixXd a(3, 3);
  a << -2, 1, 0, 0, -2, 1, 0, 0, -2;  // Jordan block, commutes with itself
  Eigen::MatrixXd once = expm(a);
  Eigen::MatrixXd half = expm((a / 2).eval());
  CHECK((half * half - once).norm() < 1e-12 * once.norm());
}

TEST_CASE("lyapunov solver hits the stationary covariance") {
  // Scalar: a x + x a + q = 0 -> x = -q / (2a).
  Eigen::MatrixXd a1 = Eigen::MatrixXd::Constant(1, 1, -0.5);
  Eigen::MatrixXd q1 = Eigen::MatrixXd::Identity(1, 1);
  CHECK(lyapunov_solve(a1, q1)(0, 0) == doctest::Approx(1.0).epsilon(1e-13));

  // Companion form used by the second-order noise model.
  Eigen::MatrixXd a(2, 2);
  a << 0, 1, -2, -3;  // eigenvalues -1, -2
  Eigen::MatrixXd q = Eigen::MatrixXd::Zero(2, 2);
  q(0, 0) = 1.0;
  Eigen::MatrixXd x = lyapunov_solve(a, q);
  CHECK((x - x.transpose()).norm() < 1e-13);
  Eigen::MatrixXd residual = a * x + x * a.transpose() + q;
  CHECK(residual.norm() < 1e-12);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(x);
  CHECK(es.eigenvalues().minCoeff() > 0.0);
}

TEST_CASE("psd square root round-trips and clamps noise") {
  Eigen::MatrixXd m(3, 3);
  m << 4, 1, 0, 1, 3, 1, 0, 1, 2;
  Eigen::MatrixXd r = psd_sqrt(m);
  CHECK((r - r.transpose()).norm() < 1e-12);
  CHECK((r * r - m).norm() < 1e-12);

  // Rank-deficient Gramian with a tiny negative eigenvalue perturbation.
  Eigen::VectorXd v(3);
  v << 1, 2, 2;
  Eigen::MatrixXd rank1 = v * v.transpose();
  rank1 -= 1e-15 * Eigen::MatrixXd::Identity(3, 3);
  Eigen::MatrixXd s = psd_sqrt(rank1);
  CHECK((s * s - v * v.transpose()).norm() < 1e-10);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(s);
  CHECK(es.eigenvalues().minCoeff() >= 0.0);
}
