// Acceptance gate: every advertised guarantee of the library, checked at its
// stated tolerance with fixed seeds. One [PASS]/[FAIL] line per criterion;
// exit status is the number of failed criteria. Single-core budget: minutes.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "perisel/basis.hpp"
#include "perisel/config.hpp"
#include "perisel/estimators.hpp"
#include "perisel/linalg.hpp"
#include "perisel/noise.hpp"
#include "perisel/quadrature.hpp"
#include "perisel/risk_lab.hpp"
#include "perisel/selection.hpp"

using namespace perisel;

namespace {

int g_failures = 0;

double now_s() {
  using clock = std::chrono::steady_clock;
  static const auto t0 = clock::now();
  return std::chrono::duration<double>(clock::now() - t0).count();
}

void report(int idx, const char* name, bool ok, const std::string& detail) {
  std::printf("[%s] criterion %d: %s — %s (t=%.1fs)\n", ok ? "PASS" : "FAIL",
              idx, name, detail.c_str(), now_s());
  std::fflush(stdout);
  if (!ok) ++g_failures;
}

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
  char buf[160];
  std::snprintf(buf, sizeof(buf), f, a, b, c);
  return buf;
}

SignalSpec spec_zero() { return SignalSpec{}; }

SignalSpec spec_coeffs(std::vector<double> c) {
  SignalSpec s;
  s.kind = SignalSpec::Kind::Coeffs;
  s.coeffs = std::move(c);
  return s;
}

SignalSpec spec_boundary(double beta, double r) {
  SignalSpec s;
  s.kind = SignalSpec::Kind::SobolevBoundary;
  s.beta = beta;
  s.r = r;
  return s;
}

// ---- criterion 1: penalty calibration constants ---------------------------
void criterion_constants() {
  const double l_star = 1.0 / (std::exp(1.0) - 1.0);
  const PenaltyParams p = solve_constants(2.0, l_star);
  const double residual = std::abs(std::log(p.z_star) - (p.z_star - 2.0));
  bool ok = residual < 1e-12;
  ok = ok && std::abs(p.z_star - 3.1461932206205825) < 1e-12;
  ok = ok && std::abs(p.rho / 36.8971 - 1.0) < 1e-3;
  ok = ok && std::abs(p.tau1 / 53.3391 - 1.0) < 1e-3;
  ok = ok && std::abs(p.tau0 / 13.6504 - 1.0) < 1e-3;
  ok = ok && std::abs(ModelFamily::ordered(40).l_star() - l_star) < 1e-12;
  report(1, "penalty constants (z*, rho, tau0, tau1, l*)", ok,
         fmt("z*=%.16f rho=%.4f tau0=%.4f", p.z_star, p.rho, p.tau0) +
             fmt(" tau1=%.4f |ln z - (z-2)|=%.1e", p.tau1, residual));
}

// ---- criterion 2: variance proportionality of the noise functionals -------
void criterion_zeta() {
  bool ok = true;
  double worst = -1e300;
  std::string worst_at;
  std::uint64_t seed = 1000;
  for (double theta : {0.0, -0.5, -2.0}) {
    for (int k : {5, 20}) {
      for (int n : {10, 50}) {
        const ZetaCovariance z =
            empirical_zeta_cov(NoiseModel::ou(theta), k, n, 10000, seed++);
        const double excess = z.lambda_max - 2.0 - 3.0 * z.lambda_max_se;
        if (excess > worst) {
          worst = excess;
          worst_at = fmt("theta=%g k=%.0f n=%.0f", theta, k, n);
        }
        ok = ok && excess <= 0.0;
      }
    }
  }
  // Exact covariance functional: theta = -1, g = 1, horizon 1 -> 1 - 1/e.
  auto one = [](double) { return 1.0; };
  const double closed = theoretical_zeta_variance(NoiseModel::ou(-1.0), one, 1);
  const double target = 1.0 - std::exp(-1.0);
  ok = ok && std::abs(closed - target) < 1e-6;
  const ZetaCovariance mc = empirical_zeta_cov(NoiseModel::ou(-1.0), 1, 1, 10000, 77);
  ok = ok && std::abs(mc.second_moment(0, 0) - target) <= 3.0 * mc.se(0, 0);
  report(2, "E zeta^2 <= lambda* across the mean-reverting box", ok,
         "worst (lambda_max - 2 - 3se) = " + fmt("%.4f at ", worst) + worst_at +
             fmt("; closed-form check |%.6f - 0.632121| < 1e-6", closed));
}

// ---- criterion 3: the shrinkage risk identity ------------------------------
void criterion_stein() {
  bool ok = true;
  double worst_t = 0.0;
  std::uint64_t seed = 2000;
  for (int d : {3, 5, 9}) {
    for (int n : {50, 200}) {
      for (int with_signal : {0, 1}) {
        const TrigSignal s = with_signal ? TrigSignal({0.0, 3.0}) : TrigSignal();
        const SteinReport rep = stein_delta(s, Model::first(d), n, 10000, seed++);
        const double t = std::abs(rep.diff_mean) / rep.diff_se;
        worst_t = std::max(worst_t, t);
        ok = ok && t <= 3.0;
        if (!with_signal) ok = ok && rep.delta_direct < 0.0;
      }
    }
  }
  report(3, "paired risk-difference identity for shrinkage", ok,
         fmt("worst |diff|/se = %.2f over d in {3,5,9}, n in {50,200}, "
             "2 signals (<= 3 required)", worst_t));
}

// ---- criterion 4: oracle inequalities on the estimation grids -------------
ExperimentConfig grid_config() {
  ExperimentConfig cfg;
  cfg.signals = {spec_zero(), spec_coeffs({0.0, 3.0}), spec_boundary(2.0, 1.0)};
  cfg.noises = {NoiseModel::white(), NoiseModel::ou(-0.5)};
  cfg.kappa = 2.0;
  cfg.use_kappa_penalty = true;
  cfg.n_values = {100, 400};
  cfg.family.d_max = 12;
  cfg.replicates = 2000;
  cfg.seed = 3000;
  cfg.threads = 1;
  return cfg;
}

double min_margin(const OracleReport& rep) {
  double m = 1e300;
  for (const auto& c : rep.cells) m = std::min(m, c.margin);
  return m;
}

void criterion_oracle() {
  ExperimentConfig cont = grid_config();
  const OracleReport rc = oracle_check(cont);

  ExperimentConfig shrunk = grid_config();
  shrunk.noises = {NoiseModel::white()};
  shrunk.use_kappa_penalty = false;  // sharp lambda* = 1 for the white theorem
  shrunk.estimator = EstimatorKind::Shrunk;
  shrunk.seed = 3100;
  const OracleReport rs = oracle_check(shrunk);

  ExperimentConfig disc = grid_config();
  disc.mode = Mode::Discrete;
  disc.p_rule = PRule::SqrtOdd;
  disc.seed = 3200;
  const OracleReport rd = oracle_check(disc);

  const bool ok = rc.pass && rs.pass && rd.pass;
  report(4, "oracle inequalities (continuous LSE, shrunk, discrete)", ok,
         fmt("min margins: cont=%.4f shrunk=%.4f disc=%.4f (12/6/12 cells)",
             min_margin(rc), min_margin(rs), min_margin(rd)));
}

// ---- criterion 5: adaptive minimax-rate boundedness ------------------------
void criterion_rates() {
  bool ok = true;
  std::string detail;
  for (double beta : {1.5, 2.0}) {
    ExperimentConfig cfg;
    cfg.noises = {NoiseModel::white()};
    cfg.kappa = 2.0;
    cfg.use_kappa_penalty = true;
    // Ladder starts where the adaptive dimension has left its integer floor:
    // at n=64 with beta=2 the selected dimension is still ~1, inflating the
    // first point by a pre-asymptotic constant rather than a rate effect.
    cfg.n_values = {128, 256, 512, 1024};
    cfg.family.d_max = 0;  // auto growth
    cfg.replicates = 2000;
    cfg.seed = 4000 + static_cast<std::uint64_t>(beta * 10);
    cfg.beta = beta;
    cfg.r = 4.0;
    const RateReport rep = rate_study(cfg);
    ok = ok && rep.pass;
    detail += fmt("beta=%.1f: band=%.2f last/med=%.2f; ", beta,
                  rep.band_ratio, rep.last_over_median);
  }
  report(5, "normalized risk n^{2b/(2b+1)} E||.||^2 stays in a factor-2 band",
         ok, detail + "(band <= 2, last/median <= 1.25)");
}

// ---- criterion 6: Bayesian lower bound ------------------------------------
void criterion_lower_bound() {
  bool ok = true;
  std::string detail;
  for (int n : {256, 1024}) {
    const BayesReport rep = bayes_risk_study(n, 2.0, 1.0, 2000, 5000 + n);
    ok = ok && rep.pass && rep.cheat_violates;
    double worst = 1e300;
    for (const auto& e : rep.estimators)
      worst = std::min(worst, (e.risk - rep.bound.bound) / e.se);
    detail += fmt("n=%.0f: min (risk-bound)/se=%.1f cheat=%.2e; ",
                  static_cast<double>(n), worst, rep.cheat_risk);
  }
  // Exact monotonicities of the bound itself.
  const VanTreesBound b1 = van_trees_bound(256, 2.0, 1.0);
  ok = ok && van_trees_bound(256, 2.0, 2.0).bound > b1.bound;
  ok = ok && van_trees_bound(1024, 2.0, 1.0).bound < b1.bound;
  ok = ok && b1.m == 3 && van_trees_bound(1024, 2.0, 1.0).m == 4;
  ok = ok && van_trees_discrete(b1, 1.0, 0.5) < b1.bound;
  report(6, "honest estimators respect the Bayesian risk bound", ok,
         detail + "(>= -3 required; knows-z control must violate)");
}

// ---- criterion 7: structural identities and determinism --------------------
void criterion_structural() {
  bool ok = true;
  // Orthonormality and Parseval at 1e-8.
  double max_dev = 0.0;
  for (int j = 1; j <= 12; ++j)
    for (int k = j; k <= 12; ++k) {
      const double ip = inner_product_l2(
          [j](double t) { return TrigBasis::eval(j, t); },
          [k](double t) { return TrigBasis::eval(k, t); }, 24);
      max_dev = std::max(max_dev, std::abs(ip - (j == k ? 1.0 : 0.0)));
    }
  ok = ok && max_dev < 1e-8;
  const TrigSignal s({1.0, -2.0, 0.5, 0.0, 3.0});
  const double quad = inner_product_l2([&s](double t) { return s.value(t); },
                                       [&s](double t) { return s.value(t); }, 24);
  const double parseval_dev = std::abs(quad - s.norm_sq());
  ok = ok && parseval_dev < 1e-8;

  // Contrast identity on a simulated path.
  const SamplePath path = simulate_path(TrigSignal({0.0, 3.0}),
                                        NoiseModel::white(), GridSpec(50, 33),
                                        6000, 0);
  const Eigen::VectorXd alpha = lse_all_coefficients(path.d_y, path.grid, 5);
  const ProjectiveEstimate fit = lse_fit(path, Model::first(3));
  const double gamma_dev = std::abs(contrast_gamma(path, fit.to_signal(),
                                                   Mode::Discrete) -
                                    contrast_gamma(fit, alpha));
  ok = ok && gamma_dev < 1e-8;

  // Lyapunov residual for the second-order noise state.
  const CarState st = car_discretization(NoiseModel::car({-3.0, -2.0}, 0.5), 0.1);
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(2, 2);
  d(0, 0) = 1.0;
  const double lyap = (st.a * st.f + st.f * st.a.transpose() + d).norm();
  ok = ok && lyap < 1e-8;

  // Determinism: equal seeds, any thread count, byte-identical results.
  ExperimentConfig cfg;
  cfg.signals = {spec_coeffs({0.0, 3.0})};
  cfg.noises = {NoiseModel::ou(-1.0)};
  cfg.n_values = {100};
  cfg.family.d_max = 8;
  cfg.replicates = 300;
  cfg.seed = 6100;
  const RiskReport a = mc_risk(cfg);
  cfg.threads = 3;
  const RiskReport b = mc_risk(cfg);
  cfg.threads = 1;
  const RiskReport c = mc_risk(cfg);
  const bool det = a.cells[0].risk == b.cells[0].risk &&
                   a.cells[0].se == b.cells[0].se &&
                   a.cells[0].select_count == b.cells[0].select_count &&
                   a.cells[0].risk == c.cells[0].risk;
  ok = ok && det;
  report(7, "structural identities at 1e-8 and bitwise determinism", ok,
         fmt("orthonormality=%.1e parseval=%.1e contrast=%.1e", max_dev,
             parseval_dev, gamma_dev) +
             fmt(" lyapunov=%.1e", lyap) +
             (det ? " threads {1,3} identical" : " DETERMINISM BROKEN"));
}

// ---- criterion 8: negative controls ----------------------------------------
void criterion_negative_controls() {
  // A corrupted penalty must break at least one oracle cell.
  ExperimentConfig cfg;
  cfg.signals = {spec_zero(), spec_coeffs({0.0, 3.0})};
  cfg.noises = {NoiseModel::white()};
  cfg.n_values = {100};
  cfg.family.d_max = 10;
  cfg.replicates = 400;
  cfg.seed = 7000;
  cfg.penalty_scale = 0.01;
  const OracleReport broken = oracle_check(cfg);
  int failed_cells = 0;
  for (const auto& c : broken.cells) failed_cells += c.pass ? 0 : 1;
  bool ok = !broken.pass && failed_cells >= 1;

  // Hard rejections.
  bool rejected = true;
  try { NoiseModel::ou(0.5); rejected = false; } catch (const std::exception&) {}
  try { NoiseModel::car({1.0, -2.0}, 0.5); rejected = false; }
  catch (const std::exception&) {}
  try { GridSpec(10, 8); rejected = false; } catch (const std::exception&) {}
  ExperimentConfig even = cfg;
  even.penalty_scale = 1.0;
  even.mode = Mode::Discrete;
  even.p_rule = PRule::Fixed;
  even.p_fixed = 10;
  rejected = rejected && !validate_config(even, StudyKind::Risk).empty();
  ok = ok && rejected;
  report(8, "negative controls (corrupted penalty, invalid inputs)", ok,
         fmt("penalty_scale=0.01 broke %.0f/%.0f cells; ",
             static_cast<double>(failed_cells),
             static_cast<double>(broken.cells.size())) +
             (rejected ? "all invalid inputs rejected"
                       : "an invalid input was accepted"));
}

}  // namespace

int main() {
  std::printf("acceptance gate: fixed seeds, single process\n");
  criterion_constants();
  criterion_zeta();
  criterion_stein();
  criterion_oracle();
  criterion_rates();
  criterion_lower_bound();
  criterion_structural();
  criterion_negative_controls();
  if (g_failures == 0)
    std::printf("acceptance gate: all criteria passed (t=%.1fs)\n", now_s());
  else
    std::printf("acceptance gate: %d criterion(s) FAILED (t=%.1fs)\n",
                g_failures, now_s());
  return g_failures;
}
