#include "perisel/linalg.hpp"

#include <cmath>
#include <stdexcept>

#include <Eigen/Eigenvalues>

namespace perisel {

namespace {

// Pade(13) numerator/denominator split: expm(A) ~ q(A)^{-1} p(A) with
// p = U + V, q = -U + V, U odd part, V even part.
Eigen::MatrixXd pade13(const Eigen::MatrixXd& a) {
  static const double b[] = {64764752532480000.0, 32382376266240000.0,
                             7771770303897600.0,  1187353796428800.0,
                             129060195264000.0,   10559470521600.0,
                             670442572800.0,      33522128640.0,
                             1323241920.0,        40840800.0,
                             960960.0,            16380.0,
                             182.0,               1.0};
  const auto n = a.rows();
  const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(n, n);
  const Eigen::MatrixXd a2 = a * a;
  const Eigen::MatrixXd a4 = a2 * a2;
  const Eigen::MatrixXd a6 = a4 * a2;
  const Eigen::MatrixXd u =
      a * (a6 * (b[13] * a6 + b[11] * a4 + b[9] * a2) + b[7] * a6 + b[5] * a4 +
           b[3] * a2 + b[1] * id);
  const Eigen::MatrixXd v = a6 * (b[12] * a6 + b[10] * a4 + b[8] * a2) +
                            b[6] * a6 + b[4] * a4 + b[2] * a2 + b[0] * id;
  return (v - u).partialPivLu().solve(v + u);
}

}  // namespace

Eigen::MatrixXd expm(const Eigen::MatrixXd& a) {
  if (a.rows() != a.cols()) throw std::invalid_argument("expm: square matrix required");
  const double theta13 = 5.371920351148152;  // Pade(13) accuracy radius
  const double nrm = a.cwiseAbs().colwise().sum().maxCoeff();  // 1-norm
  int squarings = 0;
  Eigen::MatrixXd scaled = a;
  if (nrm > theta13) {
    squarings = static_cast<int>(std::ceil(std::log2(nrm / theta13)));
    scaled /= std::pow(2.0, squarings);
  }
  Eigen::MatrixXd e = pade13(scaled);
  for (int i = 0; i < squarings; ++i) e = e * e;
  return e;
}

Eigen::MatrixXd lyapunov_solve(const Eigen::MatrixXd& a,
                               const Eigen::MatrixXd& q) {
  const auto n = a.rows();
  if (a.cols() != n || q.rows() != n || q.cols() != n)
    throw std::invalid_argument("lyapunov_solve: dimension mismatch");
  // vec(AX + XA') = (I kron A + A kron I) vec(X) = -vec(Q)
  const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(n, n);
  Eigen::MatrixXd k = Eigen::MatrixXd::Zero(n * n, n * n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) {
      k.block(i * n, j * n, n, n) += a(i, j) * id;  // A kron I
      if (i == j) k.block(i * n, j * n, n, n) += a; // I kron A
    }
  Eigen::VectorXd rhs(n * n);
  for (Eigen::Index j = 0; j < n; ++j) rhs.segment(j * n, n) = -q.col(j);
  const Eigen::VectorXd x = k.fullPivLu().solve(rhs);
  Eigen::MatrixXd out(n, n);
  for (Eigen::Index j = 0; j < n; ++j) out.col(j) = x.segment(j * n, n);
  return 0.5 * (out + out.transpose());  // symmetrize roundoff
}

Eigen::MatrixXd psd_sqrt(const Eigen::MatrixXd& s, double floor_rel) {
  if (s.rows() != s.cols()) throw std::invalid_argument("psd_sqrt: square matrix required");
  const Eigen::MatrixXd sym = 0.5 * (s + s.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("psd_sqrt: eigendecomposition failed");
  Eigen::VectorXd lam = es.eigenvalues();
  const double floor_abs = floor_rel * lam.cwiseAbs().maxCoeff();
  for (Eigen::Index i = 0; i < lam.size(); ++i)
    lam(i) = lam(i) > floor_abs ? std::sqrt(lam(i)) : 0.0;
  return es.eigenvectors() * lam.asDiagonal() * es.eigenvectors().transpose();
}

}  // namespace perisel
