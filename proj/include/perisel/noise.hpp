#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "perisel/basis.hpp"
#include "perisel/rng.hpp"

namespace perisel {

class CounterRng;

enum class NoiseKind { White, Ou, Car };

/// Two-clause stability report for a CAR companion matrix A(theta):
///   eig_ok:  max Re lambda(A) <= -delta   (hard requirement for simulation)
///   norm_ok: ||A||_F <= 1/delta           (compactness clause of the
///            parameter box; reported, not enforced)
/// in_k_delta is the conjunction.
struct StabilityReport {
  bool in_k_delta = false;
  bool eig_ok = false;
  bool norm_ok = false;
  double matrix_norm = 0.0;    // Frobenius
  double eig_margin = 0.0;     // -max Re lambda(A)
  std::vector<std::complex<double>> eigenvalues;
};

StabilityReport stability_check(const std::vector<double>& theta, double delta);

/// Companion matrix: first row theta', identity subdiagonal. The state is
/// X = (xi^(q-1), ..., xi')' with xi the last component; noise drives the
/// first component only.
Eigen::MatrixXd companion_matrix(const std::vector<double>& theta);

/// Driving-noise model for dy = S dt + dxi. White noise is the Wiener case;
/// Ou is the scalar mean-reverting case started from its stationary law
/// (theta < 0) or from zero (theta = 0); Car(q) is the stationary
/// continuous-time autoregression of order q.
class NoiseModel {
 public:
  static NoiseModel white();
  static NoiseModel ou(double theta);
  static NoiseModel car(const std::vector<double>& theta, double delta);

  NoiseKind kind() const { return kind_; }
  int state_dim() const { return static_cast<int>(theta_.size()); }
  const std::vector<double>& theta() const { return theta_; }
  double delta() const { return delta_; }
  const std::string& label() const { return label_; }

  /// Variance-proportionality coefficient lambda*: the sharp constant with
  /// E zeta_{j,n}^2 <= lambda* for every basis index and horizon.
  double lambda_star() const;

  StabilityReport stability() const;  // Car only; throws otherwise

 private:
  NoiseModel(NoiseKind kind, std::vector<double> theta, double delta,
             std::string label);
  NoiseKind kind_;
  std::vector<double> theta_;
  double delta_;
  std::string label_;
};

/// lambda* for a CAR(q) model on the delta-stability box:
/// (2/delta^2) F*(delta) J*(delta).
double car_lambda_star(int q, double delta);

/// Exact one-step discretization of the CAR state:
///   X_{t+h} = exp(Ah) X_t + eps,  eps ~ N(0, Q_h),
///   Q_h = F - exp(Ah) F exp(Ah)',  A F + F A' + e1 e1' = 0.
struct CarState {
  Eigen::MatrixXd a;
  Eigen::MatrixXd f;        // stationary covariance
  Eigen::MatrixXd exp_ah;
  Eigen::MatrixXd q_h;      // one-step innovation covariance
  Eigen::MatrixXd sqrt_f;
  Eigen::MatrixXd sqrt_q;
};

CarState car_discretization(const NoiseModel& model, double h);

/// Increments of the periodic signal over one period of the grid:
/// entry k = int_{k/p}^{(k+1)/p} S dt for k = 0..p-1 (exact, no quadrature).
std::vector<double> signal_increments_period(const Signal& s, int p);

/// Noise increments d xi over all n*p grid steps; `out` is overwritten.
void noise_increments(const NoiseModel& model, const GridSpec& grid,
                      CounterRng& rng, std::vector<double>& out);

/// Full observation path on the grid t_k = k/p, k = 0..n*p.
struct SamplePath {
  GridSpec grid;
  std::vector<double> d_y;   // observation increments, length n*p
  std::vector<double> d_xi;  // noise increments, length n*p
  std::uint64_t seed = 0;
  std::uint64_t replicate = 0;
  std::string model_label;
  std::string signal_label;
};

SamplePath simulate_path(const Signal& s, const NoiseModel& model,
                         const GridSpec& grid, std::uint64_t seed,
                         std::uint64_t replicate = 0);

/// E I_n(g)^2 for I_n(g) = int_0^n g dxi, by the closed covariance formula
///   theta int_0^n e^{theta v} int_v^n g(t) g(t-v) dt dv + int_0^n g^2
/// (Ou; the White case is the last term alone). Quadratic cost in the
/// horizon; intended for small-horizon validation, not production runs.
double theoretical_zeta_variance(const NoiseModel& model,
                                 const std::function<double(double)>& g,
                                 int horizon, int max_freq = 8);

/// Monte Carlo second-moment matrix of zeta_j = I_n(phi_j)/sqrt(n),
/// j = 1..k, with delete-one-group jackknife standard errors.
struct ZetaCovariance {
  Eigen::MatrixXd second_moment;  // k x k
  Eigen::MatrixXd se;             // entrywise jackknife SE
  double lambda_max = 0.0;        // largest eigenvalue of second_moment
  double lambda_max_se = 0.0;
  int k = 0;
  int n = 0;
  int p = 0;
  int replicates = 0;
};

/// p = 0 selects the smallest odd p >= max(32, 8 * [k/2]). Requires
/// replicates >= 100 (aim for >= 1000 for stable eigenvalue SEs).
ZetaCovariance empirical_zeta_cov(const NoiseModel& model, int k, int n,
                                  int replicates, std::uint64_t seed,
                                  int p = 0);

}  // namespace perisel
