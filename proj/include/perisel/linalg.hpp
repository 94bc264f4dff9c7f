#pragma once

#include <Eigen/Dense>

namespace perisel {

/// Matrix exponential by Pade(13) with scaling and squaring.
Eigen::MatrixXd expm(const Eigen::MatrixXd& a);

/// Solves the continuous Lyapunov equation A X + X A' + Q = 0 for symmetric Q.
/// Dense Kronecker formulation; intended for small state dimensions (q <= 8).
Eigen::MatrixXd lyapunov_solve(const Eigen::MatrixXd& a,
                               const Eigen::MatrixXd& q);

/// Symmetric square root of a (numerically) positive semidefinite matrix.
/// Eigenvalues below `floor_rel * max(|lambda|)` are clamped to zero, which
/// keeps the factor real for Gramians that are PSD up to roundoff.
Eigen::MatrixXd psd_sqrt(const Eigen::MatrixXd& s, double floor_rel = 1e-14);

}  // namespace perisel
