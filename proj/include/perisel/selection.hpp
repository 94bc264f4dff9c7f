#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "perisel/estimators.hpp"

namespace perisel {

/// A finite family of candidate models with prior weights l_m >= 1. The
/// weight sum l* = sum_m exp(-l_m d_m) controls the remainder term of every
/// oracle inequality, so it is computed once and carried along. General
/// families are enumerated exhaustively and capped at 4096 members.
struct ModelFamily {
  std::vector<Model> models;
  std::vector<double> weights;

  double l_star() const;
  int max_index() const;
  int size() const { return static_cast<int>(models.size()); }

  /// Nested family {1}, {1,2}, ..., {1..d_max} with unit weights.
  static ModelFamily ordered(int d_max);
  static ModelFamily general(std::vector<Model> models,
                             std::vector<double> weights);
};

/// z* solves ln z = z - 2 on (2, 10); all penalty constants derive from it.
double solve_z_star();

/// Penalty calibration:
///   rho  = 4 lambda z*^2 / (z* - 1)       (penalty coefficient)
///   tau1 = 3 + 16 z*                      (bias-form per-model constant)
///   tau0 = 16 l* z* / (z* - 1)            (remainder constant)
/// `scale` rescales the lambda actually used (negative controls corrupt the
/// penalty and the certified bound consistently through it).
struct PenaltyParams {
  double z_star = 0.0;
  double lambda_star_used = 0.0;
  double rho = 0.0;
  double tau0 = 0.0;
  double tau1 = 0.0;
  double l_star = 0.0;
  double scale = 1.0;
};

PenaltyParams solve_constants(double lambda_star, double l_star,
                              double scale = 1.0);
PenaltyParams solve_constants(double lambda_star, const ModelFamily& family,
                              double scale = 1.0);

/// P_n(m) = rho l_m d_m / n.
double penalty(const PenaltyParams& params, double l_m, int d_m, int n);

/// Penalized estimation over the family: minimizes gamma(fit on m) + P_n(m),
/// where the fit is the LSE or its per-model shrinkage (shrinkage is applied
/// before the contrast is evaluated). For the LSE the criterion collapses to
/// -sum_{j in m} alpha_hat_j^2 + P_n(m). Ties break to the smaller
/// dimension, then lexicographic index order.
struct SelectionResult {
  int selected = -1;                  // position in family
  Model model;
  ProjectiveEstimate estimate;        // chosen-kind fit on the selected model
  std::vector<double> criterion;      // gamma + penalty, family order
  std::vector<double> penalty_values; // P_n(m), family order
  PenaltyParams params;
};

SelectionResult select_from_coefficients(const Eigen::VectorXd& alpha_hat,
                                         const ModelFamily& family,
                                         const PenaltyParams& params, int n,
                                         EstimatorKind kind = EstimatorKind::Lse);
SelectionResult select(const SamplePath& path, const ModelFamily& family,
                       const PenaltyParams& params,
                       EstimatorKind kind = EstimatorKind::Lse);

/// The five certified oracle-inequality shapes. `base` carries the
/// model-indexed risk or squared bias the form is built on.
enum class OracleForm {
  RiskBased,          // 3 E||S~_m - S||^2 + 16 lambda z* d l / n
  BiasBased,          // 3 ||S_m - S||^2 + tau1 lambda d l / n
  ShrunkRiskBased,    // 3 E||S*_m - S||^2 + 32 z* lambda d l / n
  DiscreteRiskBased,  // 7 E||.||_p^2 + 32 lambda z* d l / n
  DiscreteBiasBased,  // 7 ||S_mp - S||_p^2 + 7 d H_p + lambda (7 + 32 z* l) d / n
};

struct OracleTerms {
  std::vector<double> per_model;
  double infimum = 0.0;
  double remainder = 0.0;  // additive tail: tau0-type term (+ H_p terms)
  double rhs = 0.0;        // infimum + remainder
};

/// h_p enters only the discrete forms (sampling distortion H_p(S)).
OracleTerms oracle_terms(OracleForm form, const std::vector<double>& base,
                         const ModelFamily& family, const PenaltyParams& params,
                         int n, double h_p = 0.0);

/// Bias-form terms straight from a signal: squared projection biases are
/// computed exactly from coefficients (trig signals) or by quadrature, in
/// the continuous or p-sampled geometry. Emits BiasBased or
/// DiscreteBiasBased accordingly; p is required in discrete mode.
OracleTerms oracle_bias_terms(const Signal& s, const ModelFamily& family,
                              const PenaltyParams& params, int n, Mode mode,
                              int p = 0);

}  // namespace perisel
