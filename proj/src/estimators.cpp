#include "perisel/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "perisel/quadrature.hpp"
#include "perisel/rng.hpp"

namespace perisel {

bool Model::contains(int j) const {
  return std::binary_search(indices.begin(), indices.end(), j);
}

Model Model::first(int d) {
  if (d < 1) throw std::invalid_argument("Model::first: d must be >= 1");
  Model m;
  m.indices.resize(d);
  for (int j = 0; j < d; ++j) m.indices[j] = j + 1;
  m.name = "m" + std::to_string(d);
  return m;
}

BasisTable::BasisTable(int j_max, int p) : t_(j_max, p) {
  if (j_max < 1 || p < 1)
    throw std::invalid_argument("BasisTable: j_max >= 1 and p >= 1 required");
  for (int j = 1; j <= j_max; ++j)
    for (int c = 0; c < p; ++c)
      t_(j - 1, c) = TrigBasis::eval(j, static_cast<double>(c + 1) / p);
}

Eigen::VectorXd fold_periodic(const std::vector<double>& increments, int p) {
  if (p < 1) throw std::invalid_argument("fold_periodic: p must be >= 1");
  if (increments.size() % static_cast<std::size_t>(p) != 0)
    throw std::invalid_argument("fold_periodic: length must be a multiple of p");
  Eigen::VectorXd bins = Eigen::VectorXd::Zero(p);
  for (std::size_t s = 0; s < increments.size(); ++s)
    bins(static_cast<Eigen::Index>(s % p)) += increments[s];
  return bins;
}

Eigen::VectorXd lse_all_coefficients(const Eigen::VectorXd& bins,
                                     const BasisTable& table, int n) {
  if (bins.size() != table.p())
    throw std::invalid_argument("lse_all_coefficients: bins/table mismatch");
  if (n < 1) throw std::invalid_argument("lse_all_coefficients: n must be >= 1");
  return table.table() * bins / n;
}

Eigen::VectorXd lse_all_coefficients(const std::vector<double>& d_y,
                                     const GridSpec& grid, int j_max) {
  if (j_max > grid.p)
    throw std::invalid_argument(
        "lse_all_coefficients: j_max > p aliases distinct basis functions");
  const BasisTable table(j_max, grid.p);
  return lse_all_coefficients(fold_periodic(d_y, grid.p), table, grid.n);
}

double ProjectiveEstimate::value(double t) const {
  double acc = 0.0;
  for (std::size_t i = 0; i < indices.size(); ++i)
    acc += coeffs[i] * TrigBasis::eval(indices[i], t);
  return acc;
}

double ProjectiveEstimate::norm_sq() const {
  double acc = 0.0;
  for (double c : coeffs) acc += c * c;
  return acc;
}

TrigSignal ProjectiveEstimate::to_signal() const {
  std::vector<double> s(indices.empty() ? 0 : indices.back(), 0.0);
  for (std::size_t i = 0; i < indices.size(); ++i)
    s[indices[i] - 1] = coeffs[i];
  return TrigSignal(std::move(s), "estimate");
}

ProjectiveEstimate lse_fit(const SamplePath& path, const Model& model) {
  if (model.dim() < 1) throw std::invalid_argument("lse_fit: empty model");
  if (model.max_index() > path.grid.p)
    throw std::invalid_argument(
        "lse_fit: model index exceeds p (sampling grid aliases the basis)");
  const Eigen::VectorXd alpha =
      lse_all_coefficients(path.d_y, path.grid, model.max_index());
  ProjectiveEstimate est;
  est.indices = model.indices;
  est.kind = EstimatorKind::Lse;
  est.n = path.grid.n;
  est.p = path.grid.p;
  est.coeffs.reserve(model.dim());
  for (int j : model.indices) est.coeffs.push_back(alpha(j - 1));
  return est;
}

ProjectiveEstimate shrink_fit(ProjectiveEstimate lse, int n) {
  if (lse.kind != EstimatorKind::Lse)
    throw std::invalid_argument("shrink_fit: base must be an LSE fit");
  lse.kind = EstimatorKind::Shrunk;
  const int d = static_cast<int>(lse.coeffs.size());
  if (d <= 2) return lse;
  const double energy = n * lse.norm_sq();
  if (energy < 1e-12) return lse;  // factor would be numerically unbounded
  const double factor = 1.0 - (d - 2) / energy;
  for (double& c : lse.coeffs) c *= factor;
  return lse;
}

ProjectiveEstimate shrink_fit(const SamplePath& path, const Model& model) {
  return shrink_fit(lse_fit(path, model), path.grid.n);
}

double contrast_gamma(const SamplePath& path, const Signal& x, Mode mode,
                      int max_freq) {
  const int p = path.grid.p;
  double data_term = 0.0;
  for (std::size_t s = 0; s < path.d_y.size(); ++s) {
    const int b = static_cast<int>(s % p);
    data_term += x.value(static_cast<double>(b + 1) / p) * path.d_y[s];
  }
  data_term *= 2.0 / path.grid.n;
  double norm2;
  if (mode == Mode::Discrete) {
    norm2 = norm_p_sq(x, p);
  } else {
    if (max_freq <= 0) max_freq = std::max(1, x.max_frequency());
    norm2 = inner_product_l2([&x](double t) { return x.value(t); },
                             [&x](double t) { return x.value(t); }, max_freq);
  }
  return norm2 - data_term;
}

double contrast_gamma(const ProjectiveEstimate& x,
                      const Eigen::VectorXd& alpha_hat) {
  double acc = 0.0;
  for (std::size_t i = 0; i < x.indices.size(); ++i) {
    const int j = x.indices[i];
    if (j > alpha_hat.size())
      throw std::invalid_argument("contrast_gamma: estimate outside alpha_hat range");
    acc += x.coeffs[i] * (x.coeffs[i] - 2.0 * alpha_hat(j - 1));
  }
  return acc;
}

Eigen::VectorXd discrete_projection(const Signal& s, int j_max, int p) {
  if (j_max < 1 || j_max > p)
    throw std::invalid_argument("discrete_projection: need 1 <= j_max <= p");
  Eigen::VectorXd out(j_max);
  std::vector<double> sv(p);
  for (int l = 1; l <= p; ++l) sv[l - 1] = s.value(static_cast<double>(l) / p);
  for (int j = 1; j <= j_max; ++j) {
    double acc = 0.0;
    for (int l = 1; l <= p; ++l)
      acc += sv[l - 1] * TrigBasis::eval(j, static_cast<double>(l) / p);
    out(j - 1) = acc / p;
  }
  return out;
}

SteinReport stein_delta(const TrigSignal& s, const Model& m, int n,
                        int replicates, std::uint64_t seed) {
  const int d = m.dim();
  if (d < 1) throw std::invalid_argument("stein_delta: empty model");
  if (n < 1 || replicates < 2)
    throw std::invalid_argument("stein_delta: n >= 1, replicates >= 2 required");
  SteinReport zero;
  zero.d = d;
  zero.n = n;
  zero.replicates = replicates;
  if (d <= 2) return zero;  // v = 0: both deltas vanish identically

  std::vector<double> alpha(d);
  for (int i = 0; i < d; ++i) alpha[i] = s.coeff(m.indices[i]);
  const double sd = 1.0 / std::sqrt(static_cast<double>(n));

  double s_dir = 0.0, s2_dir = 0.0;
  double s_st = 0.0, s2_st = 0.0;
  double s_df = 0.0, s2_df = 0.0;
  std::vector<double> hat(d);
  for (int r = 0; r < replicates; ++r) {
    CounterRng rng(seed, static_cast<std::uint64_t>(r), 2);
    double norm2 = 0.0;
    for (int j = 0; j < d; ++j) {
      hat[j] = alpha[j] + sd * rng.gaussian();
      norm2 += hat[j] * hat[j];
    }
    const double factor =
        n * norm2 < 1e-12 ? 1.0 : 1.0 - (d - 2) / (n * norm2);
    double risk_lse = 0.0, risk_js = 0.0;
    for (int j = 0; j < d; ++j) {
      const double e = hat[j] - alpha[j];
      risk_lse += e * e;
      const double ej = factor * hat[j] - alpha[j];
      risk_js += ej * ej;
    }
    const double direct = risk_js - risk_lse;
    const double stein =
        -static_cast<double>(d - 2) * (d - 2) /
        (static_cast<double>(n) * n * norm2);
    const double diff = direct - stein;
    s_dir += direct;  s2_dir += direct * direct;
    s_st += stein;    s2_st += stein * stein;
    s_df += diff;     s2_df += diff * diff;
  }
  auto finish = [replicates](double s, double s2, double& mean, double& se) {
    mean = s / replicates;
    const double var = std::max(0.0, (s2 - s * s / replicates) / (replicates - 1));
    se = std::sqrt(var / replicates);
  };
  SteinReport rep;
  rep.d = d;
  rep.n = n;
  rep.replicates = replicates;
  finish(s_dir, s2_dir, rep.delta_direct, rep.se_direct);
  finish(s_st, s2_st, rep.delta_stein, rep.se_stein);
  finish(s_df, s2_df, rep.diff_mean, rep.diff_se);
  return rep;
}

}  // namespace perisel
