#include <cmath>
#include <numeric>
#include <vector>

#include "doctest.h"
#include "perisel/basis.hpp"
#include "perisel/linalg.hpp"
#include "perisel/noise.hpp"
#include "perisel/rng.hpp"

using namespace perisel;

TEST_CASE("variance-proportionality constants") {
  CHECK(NoiseModel::white().lambda_star() == 1.0);
  CHECK(NoiseModel::ou(-1.0).lambda_star() == 2.0);
  CHECK(NoiseModel::ou(0.0).lambda_star() == 2.0);  // Wiener edge of the box
  // q = 2, delta = 1/2: F* = 1026, J* = 66, lambda* = 8 * 1026 * 66.
  CHECK(car_lambda_star(2, 0.5) == doctest::Approx(541728.0).epsilon(1e-12));
  CHECK(NoiseModel::car({-3.0, -2.0}, 0.5).lambda_star() ==
        doctest::Approx(541728.0));
  CHECK(car_lambda_star(1, 0.5) == doctest::Approx(8.0 * 1.0 * 2.0));
  CHECK_THROWS(car_lambda_star(0, 0.5));
  CHECK_THROWS(car_lambda_star(2, 0.0));
}

TEST_CASE("stability report clauses are independent") {
  // theta = (-3, -2): companion eigenvalues -1 and -2, Frobenius norm sqrt(14).
  const StabilityReport rep = stability_check({-3.0, -2.0}, 0.5);
  CHECK(rep.eig_ok);
  CHECK(rep.eig_margin == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(rep.matrix_norm == doctest::Approx(std::sqrt(14.0)).epsilon(1e-12));
  CHECK_FALSE(rep.norm_ok);  // sqrt(14) > 1/delta = 2
  CHECK_FALSE(rep.in_k_delta);
  REQUIRE(rep.eigenvalues.size() == 2);
  // At delta = 0.25 both clauses hold.
  const StabilityReport ok = stability_check({-3.0, -2.0}, 0.25);
  CHECK(ok.in_k_delta);

  CHECK_THROWS_AS(stability_check({-1.0}, 0.0), std::invalid_argument);
}

TEST_CASE("model construction guards") {
  CHECK_THROWS_WITH_AS(NoiseModel::ou(0.1), doctest::Contains("theta must be <= 0"),
                       std::invalid_argument);
  // Unstable spectrum (Re lambda = 1/2 > 0) is a hard rejection.
  CHECK_THROWS_AS(NoiseModel::car({1.0, -2.0}, 0.5), std::invalid_argument);
  // Eigenvalue-stable theta is accepted even when the norm clause fails.
  CHECK_NOTHROW(NoiseModel::car({-3.0, -2.0}, 0.5));
  CHECK(NoiseModel::white().label() == "white");
  CHECK(NoiseModel::car({-3.0, -2.0}, 0.5).label() == "car(q=2,delta=0.5)");
  CHECK_THROWS(NoiseModel::white().stability());
}

TEST_CASE("mean-reverting increments match the exact law") {
  const NoiseModel model = NoiseModel::ou(-1.0);
  const GridSpec grid(1, 11);
  const double h = grid.dt();
  const double a = std::exp(-h);
  const double sig2 = 0.5;                      // stationary variance 1/(2|theta|)
  const double var_inc = 2.0 * sig2 * (1.0 - a);
  const double cov_lag1 = -sig2 * (1.0 - a) * (1.0 - a);

  const int reps = 20000;
  std::vector<double> sum(11, 0.0), sumsq(11, 0.0);
  double lag_acc = 0.0, total_var_acc = 0.0;
  std::vector<double> inc;
  for (int r = 0; r < reps; ++r) {
    CounterRng rng(2024, static_cast<std::uint64_t>(r), 0);
    noise_increments(model, grid, rng, inc);
    REQUIRE(inc.size() == 11);
    for (int k = 0; k < 11; ++k) {
      sum[k] += inc[k];
      sumsq[k] += inc[k] * inc[k];
    }
    lag_acc += inc[3] * inc[4];
    const double tot = std::accumulate(inc.begin(), inc.end(), 0.0);
    total_var_acc += tot * tot;
  }
  // Stationary start: every position has the same increment variance.
  const double se_var = var_inc * std::sqrt(2.0 / reps);
  for (int k = 0; k < 11; ++k) {
    const double mean = sum[k] / reps;
    const double var = sumsq[k] / reps - mean * mean;
    CHECK(std::abs(mean) < 4.0 * std::sqrt(var_inc / reps));
    CHECK(std::abs(var - var_inc) < 4.0 * se_var);
  }
  // Negative lag-1 covariance of increments.
  const double lag_se = var_inc / std::sqrt(static_cast<double>(reps));
  CHECK(std::abs(lag_acc / reps - cov_lag1) < 4.0 * lag_se);
  // Whole-period increment xi(1) - xi(0): variance 2 sig2 (1 - e^theta),
  // the same constant the closed-form integral functional produces for g = 1.
  const double var_total = 2.0 * sig2 * (1.0 - std::exp(-1.0));
  CHECK(total_var_acc / reps ==
        doctest::Approx(var_total).epsilon(0.05));
}

TEST_CASE("white increments are iid N(0, h)") {
  const NoiseModel model = NoiseModel::white();
  const GridSpec grid(1, 11);
  const int reps = 5000;
  double acc = 0.0, lag = 0.0;
  std::size_t count = 0;
  std::vector<double> inc;
  for (int r = 0; r < reps; ++r) {
    CounterRng rng(7, static_cast<std::uint64_t>(r), 0);
    noise_increments(model, grid, rng, inc);
    for (double v : inc) acc += v * v;
    lag += inc[0] * inc[1];
    count += inc.size();
  }
  const double var = acc / static_cast<double>(count);
  CHECK(var == doctest::Approx(grid.dt()).epsilon(0.03));
  CHECK(std::abs(lag / reps) < 4.0 * grid.dt() / std::sqrt(static_cast<double>(reps)));
}

TEST_CASE("second-order model: exact discretization pieces") {
  const NoiseModel model = NoiseModel::car({-3.0, -2.0}, 0.5);
  const CarState st = car_discretization(model, 0.1);
  // Stationary covariance solves A F + F A' + e1 e1' = 0; here it is
  // diag(1/6, 1/12) in closed form.
  CHECK(st.f(0, 0) == doctest::Approx(1.0 / 6).epsilon(1e-10));
  CHECK(st.f(1, 1) == doctest::Approx(1.0 / 12).epsilon(1e-10));
  CHECK(std::abs(st.f(0, 1)) < 1e-12);
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(2, 2);
  d(0, 0) = 1.0;
  CHECK((st.a * st.f + st.f * st.a.transpose() + d).norm() < 1e-8);
  CHECK((st.exp_ah - expm((st.a * 0.1).eval())).norm() < 1e-12);
  // One-step innovation covariance is PSD and its root round-trips.
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(st.q_h);
  CHECK(es.eigenvalues().minCoeff() > -1e-12);
  CHECK((st.sqrt_q * st.sqrt_q - st.q_h).norm() < 1e-10);
  CHECK((st.sqrt_f * st.sqrt_f - st.f).norm() < 1e-10);
}

TEST_CASE("second-order paths reach the stationary spread") {
  // Var(xi(t) - xi(0)) -> 2 F_22 = 1/6 once correlations decay (t >> 1).
  const NoiseModel model = NoiseModel::car({-3.0, -2.0}, 0.5);
  const GridSpec grid(6, 33);
  const int reps = 4000;
  double acc = 0.0;
  std::vector<double> inc;
  for (int r = 0; r < reps; ++r) {
    CounterRng rng(99, static_cast<std::uint64_t>(r), 0);
    noise_increments(model, grid, rng, inc);
    const double tot = std::accumulate(inc.begin(), inc.end(), 0.0);
    acc += tot * tot;
  }
  const double target = 1.0 / 6;
  const double se = target * std::sqrt(2.0 / reps);
  CHECK(std::abs(acc / reps - target) < 4.0 * se);
}

TEST_CASE("closed-form integral-functional variance") {
  auto one = [](double) { return 1.0; };
  CHECK(theoretical_zeta_variance(NoiseModel::white(), one, 1) ==
        doctest::Approx(1.0).epsilon(1e-12));
  CHECK(theoretical_zeta_variance(NoiseModel::white(), one, 4) ==
        doctest::Approx(4.0).epsilon(1e-12));
  // theta = -1, g = 1, horizon 1: 1 - e^{-1}.
  CHECK(theoretical_zeta_variance(NoiseModel::ou(-1.0), one, 1) ==
        doctest::Approx(1.0 - std::exp(-1.0)).epsilon(1e-6));
  // Horizon 4: 1 - e^{-4}; per-horizon normalization stays below lambda*.
  const double v4 = theoretical_zeta_variance(NoiseModel::ou(-1.0), one, 4);
  CHECK(v4 == doctest::Approx(1.0 - std::exp(-4.0)).epsilon(1e-6));
  CHECK(v4 / 4.0 <= 2.0);
}

TEST_CASE("empirical second-moment matrix: white noise identity") {
  const ZetaCovariance z = empirical_zeta_cov(NoiseModel::white(), 5, 2, 2000, 11);
  REQUIRE(z.k == 5);
  for (int i = 0; i < 5; ++i) {
    for (int j = 0; j < 5; ++j) {
      const double target = (i == j) ? 1.0 : 0.0;
      CHECK(std::abs(z.second_moment(i, j) - target) < 3.5 * z.se(i, j));
    }
  }
  CHECK(z.lambda_max <= 1.0 + 4.0 * z.lambda_max_se + 0.05);
}

TEST_CASE("empirical second-moment matrix: mean-reverting bound and MC match") {
  const ZetaCovariance z = empirical_zeta_cov(NoiseModel::ou(-0.5), 5, 10, 1000, 3);
  CHECK(z.lambda_max <= 2.0 + 3.0 * z.lambda_max_se);

  // Cross-check the closed form at horizon 1 against the simulator.
  const ZetaCovariance one = empirical_zeta_cov(NoiseModel::ou(-1.0), 1, 1, 4000, 17);
  CHECK(std::abs(one.second_moment(0, 0) - (1.0 - std::exp(-1.0))) <
        3.0 * one.se(0, 0));
}

TEST_CASE("empirical second-moment matrix: determinism and guards") {
  const ZetaCovariance a = empirical_zeta_cov(NoiseModel::ou(-1.0), 3, 2, 200, 5);
  const ZetaCovariance b = empirical_zeta_cov(NoiseModel::ou(-1.0), 3, 2, 200, 5);
  CHECK(a.second_moment == b.second_moment);
  CHECK(a.lambda_max == b.lambda_max);
  CHECK(a.p == b.p);
  CHECK(a.p % 2 == 1);
  CHECK_THROWS(empirical_zeta_cov(NoiseModel::white(), 3, 2, 50, 5));
}

TEST_CASE("signal increments over one period") {
  const TrigSignal s({2.0, 0.0, 3.0});  // 2 + 3 sqrt2 sin(2 pi t)
  const auto inc = signal_increments_period(s, 5);
  REQUIRE(inc.size() == 5);
  double total = 0.0;
  for (double v : inc) total += v;
  CHECK(total == doctest::Approx(2.0).epsilon(1e-12));  // mean coefficient
  CHECK(inc[0] == doctest::Approx(s.integral(0.0, 0.2)).epsilon(1e-14));
}
