#include "perisel/selection.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "perisel/quadrature.hpp"

namespace perisel {

double ModelFamily::l_star() const {
  double acc = 0.0;
  for (std::size_t i = 0; i < models.size(); ++i)
    acc += std::exp(-weights[i] * models[i].dim());
  return acc;
}

int ModelFamily::max_index() const {
  int mx = 0;
  for (const Model& m : models) mx = std::max(mx, m.max_index());
  return mx;
}

ModelFamily ModelFamily::ordered(int d_max) {
  if (d_max < 1) throw std::invalid_argument("ModelFamily::ordered: d_max >= 1");
  ModelFamily fam;
  for (int d = 1; d <= d_max; ++d) {
    fam.models.push_back(Model::first(d));
    fam.weights.push_back(1.0);
  }
  return fam;
}

ModelFamily ModelFamily::general(std::vector<Model> models,
                                 std::vector<double> weights) {
  if (models.empty() || models.size() != weights.size())
    throw std::invalid_argument("ModelFamily::general: models/weights mismatch");
  if (models.size() > 4096)
    throw std::invalid_argument(
        "ModelFamily::general: exhaustive enumeration capped at 4096 models");
  for (const Model& m : models) {
    if (m.indices.empty())
      throw std::invalid_argument("ModelFamily::general: empty model");
    for (std::size_t i = 0; i + 1 < m.indices.size(); ++i)
      if (m.indices[i] >= m.indices[i + 1])
        throw std::invalid_argument(
            "ModelFamily::general: indices must be strictly increasing");
    if (m.indices.front() < 1)
      throw std::invalid_argument("ModelFamily::general: indices are 1-based");
  }
  for (double w : weights)
    if (!(w >= 1.0))
      throw std::invalid_argument("ModelFamily::general: weights must be >= 1");
  ModelFamily fam;
  fam.models = std::move(models);
  fam.weights = std::move(weights);
  return fam;
}

double solve_z_star() {
  // ln z - (z - 2): decreasing on (1, inf) past z = 1, one root above 2.
  static const double z = [] {
    double lo = 2.0, hi = 10.0, x = 3.0;
    for (int it = 0; it < 100; ++it) {
      const double f = std::log(x) - (x - 2.0);
      if (std::abs(f) < 1e-13) break;
      if (f > 0.0) lo = x; else hi = x;
      const double step = f / (1.0 / x - 1.0);  // Newton
      double next = x - step;
      if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
      x = next;
    }
    return x;
  }();
  return z;
}

PenaltyParams solve_constants(double lambda_star, const ModelFamily& family,
                              double scale) {
  return solve_constants(lambda_star, family.l_star(), scale);
}

PenaltyParams solve_constants(double lambda_star, double l_star, double scale) {
  if (!(lambda_star > 0.0) || !(l_star > 0.0) || !(scale > 0.0))
    throw std::invalid_argument("solve_constants: positive inputs required");
  PenaltyParams p;
  p.z_star = solve_z_star();
  p.scale = scale;
  p.lambda_star_used = scale * lambda_star;
  p.rho = 4.0 * p.lambda_star_used * p.z_star * p.z_star / (p.z_star - 1.0);
  p.tau0 = 16.0 * l_star * p.z_star / (p.z_star - 1.0);
  p.tau1 = 3.0 + 16.0 * p.z_star;
  p.l_star = l_star;
  return p;
}

double penalty(const PenaltyParams& params, double l_m, int d_m, int n) {
  if (n < 1 || d_m < 1 || !(l_m >= 1.0))
    throw std::invalid_argument("penalty: requires n >= 1, d_m >= 1, l_m >= 1");
  return params.rho * l_m * d_m / n;
}

SelectionResult select_from_coefficients(const Eigen::VectorXd& alpha_hat,
                                         const ModelFamily& family,
                                         const PenaltyParams& params, int n,
                                         EstimatorKind kind) {
  if (family.size() == 0) throw std::invalid_argument("select: empty family");
  if (family.max_index() > alpha_hat.size())
    throw std::invalid_argument("select: family needs more coefficients");
  SelectionResult res;
  res.params = params;
  res.criterion.resize(family.size());
  res.penalty_values.resize(family.size());
  double best = std::numeric_limits<double>::infinity();
  double best_factor = 1.0;
  for (int i = 0; i < family.size(); ++i) {
    const Model& m = family.models[i];
    const int d = m.dim();
    double energy = 0.0;
    for (int j : m.indices) energy += alpha_hat(j - 1) * alpha_hat(j - 1);
    // Shrinkage first, contrast second: with c = f alpha_hat on m,
    // gamma = (f^2 - 2f) sum alpha_hat_j^2 (f = 1 for the plain LSE).
    double f = 1.0;
    if (kind == EstimatorKind::Shrunk && d >= 3 && n * energy >= 1e-12)
      f = 1.0 - (d - 2) / (n * energy);
    const double fit = (f * f - 2.0 * f) * energy;
    const double pen = penalty(params, family.weights[i], d, n);
    const double crit = fit + pen;
    res.criterion[i] = crit;
    res.penalty_values[i] = pen;
    bool take = crit < best;
    if (!take && crit == best && res.selected >= 0) {
      const Model& cur = family.models[res.selected];
      take = d < cur.dim() || (d == cur.dim() && m.indices < cur.indices);
    }
    if (take) {
      best = crit;
      best_factor = f;
      res.selected = i;
    }
  }
  res.model = family.models[res.selected];
  res.estimate.indices = res.model.indices;
  res.estimate.kind = kind;
  res.estimate.n = n;
  for (int j : res.model.indices)
    res.estimate.coeffs.push_back(best_factor * alpha_hat(j - 1));
  return res;
}

SelectionResult select(const SamplePath& path, const ModelFamily& family,
                       const PenaltyParams& params, EstimatorKind kind) {
  const int j_max = family.max_index();
  if (j_max > path.grid.p)
    throw std::invalid_argument(
        "select: family max index exceeds p (grid aliases the basis)");
  const Eigen::VectorXd alpha =
      lse_all_coefficients(path.d_y, path.grid, j_max);
  SelectionResult res =
      select_from_coefficients(alpha, family, params, path.grid.n, kind);
  res.estimate.p = path.grid.p;
  return res;
}

OracleTerms oracle_terms(OracleForm form, const std::vector<double>& base,
                         const ModelFamily& family, const PenaltyParams& params,
                         int n, double h_p) {
  if (static_cast<int>(base.size()) != family.size())
    throw std::invalid_argument("oracle_terms: base/family size mismatch");
  if (n < 1) throw std::invalid_argument("oracle_terms: n must be >= 1");
  const double lam = params.lambda_star_used;
  const double z = params.z_star;
  OracleTerms out;
  out.per_model.resize(base.size());
  for (int i = 0; i < family.size(); ++i) {
    const double d = family.models[i].dim();
    const double l = family.weights[i];
    double v = 0.0;
    switch (form) {
      case OracleForm::RiskBased:
        v = 3.0 * base[i] + 16.0 * lam * z * d * l / n;
        break;
      case OracleForm::BiasBased:
        v = 3.0 * base[i] + params.tau1 * lam * d * l / n;
        break;
      case OracleForm::ShrunkRiskBased:
        v = 3.0 * base[i] + 32.0 * z * lam * d * l / n;
        break;
      case OracleForm::DiscreteRiskBased:
        v = 7.0 * base[i] + 32.0 * lam * z * l * d / n;
        break;
      case OracleForm::DiscreteBiasBased:
        v = 7.0 * base[i] + 7.0 * d * h_p +
            lam * (7.0 + 32.0 * z * l) * d / n;
        break;
    }
    out.per_model[i] = v;
  }
  out.infimum = *std::min_element(out.per_model.begin(), out.per_model.end());
  switch (form) {
    case OracleForm::RiskBased:
    case OracleForm::BiasBased:
      out.remainder = lam * params.tau0 / n;
      break;
    case OracleForm::ShrunkRiskBased:
      out.remainder = 2.0 * lam * params.tau0 / n;
      break;
    case OracleForm::DiscreteRiskBased:
    case OracleForm::DiscreteBiasBased:
      out.remainder = 8.0 * h_p + 2.0 * params.tau0 * lam / n;
      break;
  }
  out.rhs = out.infimum + out.remainder;
  return out;
}

OracleTerms oracle_bias_terms(const Signal& s, const ModelFamily& family,
                              const PenaltyParams& params, int n, Mode mode,
                              int p) {
  const int j_max = family.max_index();
  Eigen::VectorXd alpha(j_max);
  double norm2;
  double h_p = 0.0;
  if (mode == Mode::Discrete) {
    if (p < 1 || p % 2 == 0)
      throw std::invalid_argument("oracle_bias_terms: discrete mode needs odd p");
    alpha = discrete_projection(s, j_max, p);
    norm2 = norm_p_sq(s, p);
    h_p = h_p_distortion(s, p);
  } else if (const auto* trig = dynamic_cast<const TrigSignal*>(&s)) {
    for (int j = 1; j <= j_max; ++j) alpha(j - 1) = trig->coeff(j);
    norm2 = trig->norm_sq();
  } else {
    const int mf = std::max(1, s.max_frequency());
    for (int j = 1; j <= j_max; ++j)
      alpha(j - 1) = inner_product_l2(
          [&s](double t) { return s.value(t); },
          [j](double t) { return TrigBasis::eval(j, t); },
          std::max(mf, TrigBasis::frequency(j)));
    norm2 = inner_product_l2([&s](double t) { return s.value(t); },
                             [&s](double t) { return s.value(t); }, mf);
  }
  std::vector<double> bias(family.size());
  for (int i = 0; i < family.size(); ++i) {
    double captured = 0.0;
    for (int j : family.models[i].indices)
      captured += alpha(j - 1) * alpha(j - 1);
    bias[i] = std::max(0.0, norm2 - captured);
  }
  const OracleForm form = mode == Mode::Discrete ? OracleForm::DiscreteBiasBased
                                                 : OracleForm::BiasBased;
  return oracle_terms(form, bias, family, params, n, h_p);
}

}  // namespace perisel
