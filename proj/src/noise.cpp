#include "perisel/noise.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

#include <Eigen/Eigenvalues>

#include "perisel/linalg.hpp"
#include "perisel/quadrature.hpp"

namespace perisel {

namespace {

// Stream tags keep the RNG draws of unrelated consumers disjoint.
constexpr std::uint32_t kStreamPath = 0;
constexpr std::uint32_t kStreamZeta = 1;

std::string format_label(const char* fmt, double a, double b = 0.0) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), fmt, a, b);
  return buf;
}

}  // namespace

Eigen::MatrixXd companion_matrix(const std::vector<double>& theta) {
  const int q = static_cast<int>(theta.size());
  if (q < 1) throw std::invalid_argument("companion_matrix: empty theta");
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(q, q);
  for (int j = 0; j < q; ++j) a(0, j) = theta[j];
  for (int i = 1; i < q; ++i) a(i, i - 1) = 1.0;
  return a;
}

StabilityReport stability_check(const std::vector<double>& theta, double delta) {
  if (delta <= 0.0) throw std::invalid_argument("stability_check: delta must be > 0");
  const Eigen::MatrixXd a = companion_matrix(theta);
  StabilityReport rep;
  rep.matrix_norm = a.norm();  // Frobenius
  const Eigen::EigenSolver<Eigen::MatrixXd> es(a);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("stability_check: eigensolver failed");
  double max_re = -std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    rep.eigenvalues.push_back(es.eigenvalues()(i));
    max_re = std::max(max_re, es.eigenvalues()(i).real());
  }
  rep.eig_margin = -max_re;
  rep.eig_ok = max_re <= -delta + 1e-9;
  rep.norm_ok = rep.matrix_norm <= 1.0 / delta + 1e-9;
  rep.in_k_delta = rep.eig_ok && rep.norm_ok;
  return rep;
}

NoiseModel::NoiseModel(NoiseKind kind, std::vector<double> theta, double delta,
                       std::string label)
    : kind_(kind), theta_(std::move(theta)), delta_(delta),
      label_(std::move(label)) {}

NoiseModel NoiseModel::white() { return {NoiseKind::White, {}, 0.0, "white"}; }

NoiseModel NoiseModel::ou(double theta) {
  if (!(theta <= 0.0))
    throw std::invalid_argument("ou: theta must be <= 0 (mean reverting)");
  return {NoiseKind::Ou, {theta}, 0.0, format_label("ou(theta=%g)", theta)};
}

NoiseModel NoiseModel::car(const std::vector<double>& theta, double delta) {
  if (theta.empty()) throw std::invalid_argument("car: theta must be nonempty");
  const StabilityReport rep = stability_check(theta, delta);
  if (!rep.eig_ok)
    throw std::invalid_argument(
        "car: companion spectrum must satisfy max Re lambda <= -delta "
        "(margin " + std::to_string(rep.eig_margin) + " < delta)");
  return {NoiseKind::Car, theta, delta,
          format_label("car(q=%.0f,delta=%g)",
                       static_cast<double>(theta.size()), delta)};
}

double car_lambda_star(int q, double delta) {
  if (q < 1 || delta <= 0.0)
    throw std::invalid_argument("car_lambda_star: q >= 1 and delta > 0 required");
  double f_sum = 0.0;
  double fact_sq = 1.0;   // (j!)^2
  double fact_2j = 1.0;   // (2j)!
  for (int j = 1; j <= q - 1; ++j) {
    fact_sq *= static_cast<double>(j) * j;
    fact_2j *= (2.0 * j - 1.0) * (2.0 * j);
    f_sum += fact_2j / (fact_sq * std::pow(delta, 4.0 * j));
  }
  const double f_star = q / (2.0 * delta) + (2.0 * q / std::pow(delta, 3)) * f_sum;
  double j_sum = 0.0;
  for (int j = 1; j <= q - 1; ++j)
    j_sum += std::pow(2.0, j) / std::pow(delta, 2.0 * j);
  const double j_star = 1.0 / delta + (2.0 / (delta * delta)) * j_sum;
  return (2.0 / (delta * delta)) * f_star * j_star;
}

double NoiseModel::lambda_star() const {
  switch (kind_) {
    case NoiseKind::White: return 1.0;
    case NoiseKind::Ou:    return 2.0;
    case NoiseKind::Car:   return car_lambda_star(state_dim(), delta_);
  }
  throw std::logic_error("lambda_star: bad kind");
}

StabilityReport NoiseModel::stability() const {
  if (kind_ != NoiseKind::Car)
    throw std::logic_error("stability: only defined for Car models");
  return stability_check(theta_, delta_);
}

CarState car_discretization(const NoiseModel& model, double h) {
  if (model.kind() != NoiseKind::Car)
    throw std::invalid_argument("car_discretization: Car model required");
  if (h <= 0.0) throw std::invalid_argument("car_discretization: h must be > 0");
  CarState st;
  const int q = model.state_dim();
  st.a = companion_matrix(model.theta());
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(q, q);
  d(0, 0) = 1.0;                       // noise drives the top component
  st.f = lyapunov_solve(st.a, d);
  st.exp_ah = expm(st.a * h);
  st.q_h = st.f - st.exp_ah * st.f * st.exp_ah.transpose();
  st.q_h = 0.5 * (st.q_h + st.q_h.transpose());
  st.sqrt_f = psd_sqrt(st.f);
  st.sqrt_q = psd_sqrt(st.q_h);        // condition number ~ h^{1-2q}: clamp
  return st;
}

std::vector<double> signal_increments_period(const Signal& s, int p) {
  if (p < 1) throw std::invalid_argument("signal_increments_period: p must be >= 1");
  std::vector<double> inc(p);
  for (int k = 0; k < p; ++k)
    inc[k] = s.integral(static_cast<double>(k) / p,
                        static_cast<double>(k + 1) / p);
  return inc;
}

void noise_increments(const NoiseModel& model, const GridSpec& grid,
                      CounterRng& rng, std::vector<double>& out) {
  const std::int64_t steps = grid.increments();
  const double h = grid.dt();
  out.clear();
  out.reserve(steps);
  switch (model.kind()) {
    case NoiseKind::White: {
      const double sd = std::sqrt(h);
      for (std::int64_t k = 0; k < steps; ++k) out.push_back(sd * rng.gaussian());
      return;
    }
    case NoiseKind::Ou: {
      const double theta = model.theta()[0];
      if (theta == 0.0) {  // degenerate case: the driving Wiener process itself
        const double sd = std::sqrt(h);
        for (std::int64_t k = 0; k < steps; ++k) out.push_back(sd * rng.gaussian());
        return;
      }
      const double a = std::exp(theta * h);
      const double innov_sd = std::sqrt((1.0 - a * a) / (2.0 * -theta));
      double x = rng.gaussian() / std::sqrt(2.0 * -theta);  // stationary start
      for (std::int64_t k = 0; k < steps; ++k) {
        const double next = a * x + innov_sd * rng.gaussian();
        out.push_back(next - x);
        x = next;
      }
      return;
    }
    case NoiseKind::Car: {
      const CarState st = car_discretization(model, h);
      const int q = model.state_dim();
      Eigen::VectorXd g(q);
      for (int i = 0; i < q; ++i) g(i) = rng.gaussian();
      Eigen::VectorXd x = st.sqrt_f * g;
      Eigen::VectorXd next(q);
      for (std::int64_t k = 0; k < steps; ++k) {
        for (int i = 0; i < q; ++i) g(i) = rng.gaussian();
        next.noalias() = st.exp_ah * x;
        next.noalias() += st.sqrt_q * g;
        out.push_back(next(q - 1) - x(q - 1));  // xi is the last component
        x.swap(next);
      }
      return;
    }
  }
  throw std::logic_error("noise_increments: bad kind");
}

SamplePath simulate_path(const Signal& s, const NoiseModel& model,
                         const GridSpec& grid, std::uint64_t seed,
                         std::uint64_t replicate) {
  SamplePath path{grid, {}, {}, seed, replicate, model.label(), s.label()};
  CounterRng rng(seed, replicate, kStreamPath);
  noise_increments(model, grid, rng, path.d_xi);
  const std::vector<double> sig = signal_increments_period(s, grid.p);
  path.d_y.resize(path.d_xi.size());
  for (std::size_t k = 0; k < path.d_y.size(); ++k)
    path.d_y[k] = sig[k % grid.p] + path.d_xi[k];
  return path;
}

double theoretical_zeta_variance(const NoiseModel& model,
                                 const std::function<double(double)>& g,
                                 int horizon, int max_freq) {
  if (horizon < 1)
    throw std::invalid_argument("theoretical_zeta_variance: horizon must be >= 1");
  const int per = std::max(2, (max_freq + 5) / 6);
  const double n = horizon;
  const double base = integrate([&](double t) { return g(t) * g(t); }, 0.0, n,
                                horizon * per);
  switch (model.kind()) {
    case NoiseKind::White:
      return base;
    case NoiseKind::Ou: {
      const double theta = model.theta()[0];
      if (theta == 0.0) return base;
      auto lagged = [&](double v) {
        const int panels = std::max(1, static_cast<int>(std::ceil((n - v) * per)));
        return integrate([&](double t) { return g(t) * g(t - v); }, v, n, panels);
      };
      const double outer =
          integrate([&](double v) { return std::exp(theta * v) * lagged(v); },
                    0.0, n, 2 * horizon * per);
      return theta * outer + base;
    }
    case NoiseKind::Car:
      throw std::invalid_argument(
          "theoretical_zeta_variance: no closed form for Car; use "
          "empirical_zeta_cov");
  }
  throw std::logic_error("theoretical_zeta_variance: bad kind");
}

ZetaCovariance empirical_zeta_cov(const NoiseModel& model, int k, int n,
                                  int replicates, std::uint64_t seed, int p) {
  if (k < 1 || n < 1)
    throw std::invalid_argument("empirical_zeta_cov: k >= 1 and n >= 1 required");
  if (replicates < 100)
    throw std::invalid_argument(
        "empirical_zeta_cov: replicates must be >= 100 (jackknife groups "
        "need mass; >= 1000 recommended)");
  if (p == 0) {
    p = std::max(32, 8 * (k / 2));
    if (p % 2 == 0) ++p;
  }
  const GridSpec grid(n, p);

  // phi_j(t) over one period; folding the increments into p bins turns each
  // path integral into a length-p dot product.
  Eigen::MatrixXd table(k, p);
  for (int j = 1; j <= k; ++j)
    for (int l = 1; l <= p; ++l)
      table(j - 1, l - 1) = TrigBasis::eval(j, static_cast<double>(l) / p);

  const int groups = 20;
  std::vector<Eigen::MatrixXd> group_sum(groups, Eigen::MatrixXd::Zero(k, k));
  std::vector<int> group_count(groups, 0);
  std::vector<double> dxi;
  Eigen::VectorXd bins(p), zeta(k);
  const double inv_sqrt_n = 1.0 / std::sqrt(static_cast<double>(n));
  for (int r = 0; r < replicates; ++r) {
    CounterRng rng(seed, static_cast<std::uint64_t>(r), kStreamZeta);
    noise_increments(model, grid, rng, dxi);
    bins.setZero();
    // Step s ends at t = (s+1)/p; by periodicity its basis weight is
    // phi((b+1)/p) with b = s mod p, i.e. table column b (phi(0) = phi(1)).
    for (std::int64_t step = 0; step < grid.increments(); ++step)
      bins(step % p) += dxi[static_cast<std::size_t>(step)];
    zeta.noalias() = table * bins * inv_sqrt_n;
    const int g = r * groups / replicates;
    group_sum[g].noalias() += zeta * zeta.transpose();
    ++group_count[g];
  }

  Eigen::MatrixXd total = Eigen::MatrixXd::Zero(k, k);
  for (const auto& s : group_sum) total += s;
  ZetaCovariance out;
  out.k = k;
  out.n = n;
  out.p = p;
  out.replicates = replicates;
  out.second_moment = total / replicates;
  out.lambda_max = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(
                       out.second_moment, Eigen::EigenvaluesOnly)
                       .eigenvalues()
                       .maxCoeff();

  // Delete-one-group jackknife for entrywise and eigenvalue SEs.
  std::vector<Eigen::MatrixXd> loo(groups);
  std::vector<double> loo_lmax(groups);
  Eigen::MatrixXd loo_mean = Eigen::MatrixXd::Zero(k, k);
  double loo_lmax_mean = 0.0;
  for (int g = 0; g < groups; ++g) {
    loo[g] = (total - group_sum[g]) / (replicates - group_count[g]);
    loo_lmax[g] = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(
                      loo[g], Eigen::EigenvaluesOnly)
                      .eigenvalues()
                      .maxCoeff();
    loo_mean += loo[g];
    loo_lmax_mean += loo_lmax[g];
  }
  loo_mean /= groups;
  loo_lmax_mean /= groups;
  Eigen::MatrixXd var = Eigen::MatrixXd::Zero(k, k);
  double var_lmax = 0.0;
  for (int g = 0; g < groups; ++g) {
    const Eigen::MatrixXd d = loo[g] - loo_mean;
    var += d.cwiseProduct(d);
    var_lmax += (loo_lmax[g] - loo_lmax_mean) * (loo_lmax[g] - loo_lmax_mean);
  }
  const double jk = static_cast<double>(groups - 1) / groups;
  out.se = (jk * var).cwiseSqrt();
  out.lambda_max_se = std::sqrt(jk * var_lmax);
  return out;
}

}  // namespace perisel
