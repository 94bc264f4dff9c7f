#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "perisel/basis.hpp"
#include "perisel/noise.hpp"

namespace perisel {

enum class EstimatorKind { Lse, Shrunk };

/// Norm convention for contrasts and risks: quadrature L2[0,1] or the
/// p-point sampling norm. Experiments fix one mode globally; the two are
/// never mixed within a run.
enum class Mode { Continuous, Discrete };

/// A candidate model: a finite set of basis indices (1-based, strictly
/// increasing). The nested family {1..d} is the ordered case.
struct Model {
  std::vector<int> indices;
  std::string name;

  int dim() const { return static_cast<int>(indices.size()); }
  int max_index() const { return indices.empty() ? 0 : indices.back(); }
  bool contains(int j) const;
  static Model first(int d);  // {1, ..., d}
};

/// phi_j((c+1)/p) for j = 1..j_max (rows), c = 0..p-1 (columns). Column c is
/// the weight of fold bin c: increment step s (ending at t = (s+1)/p) folds
/// into bin s mod p, and phi(0) = phi(1) closes the period.
class BasisTable {
 public:
  BasisTable(int j_max, int p);
  const Eigen::MatrixXd& table() const { return t_; }
  int j_max() const { return static_cast<int>(t_.rows()); }
  int p() const { return static_cast<int>(t_.cols()); }

 private:
  Eigen::MatrixXd t_;
};

/// Sums increments into p bins by step index mod p.
Eigen::VectorXd fold_periodic(const std::vector<double>& increments, int p);

/// All coefficient estimates alpha_hat_j = (1/n) sum_k phi_j(t_k) dy_k for
/// j = 1..j_max. Exact-variance geometry requires j_max <= p (odd p keeps
/// phi_1..phi_p orthonormal under the sampling inner product).
Eigen::VectorXd lse_all_coefficients(const std::vector<double>& d_y,
                                     const GridSpec& grid, int j_max);
Eigen::VectorXd lse_all_coefficients(const Eigen::VectorXd& bins,
                                     const BasisTable& table, int n);

/// A fitted projective estimate sum_{j in m} c_j phi_j.
struct ProjectiveEstimate {
  std::vector<int> indices;
  std::vector<double> coeffs;
  EstimatorKind kind = EstimatorKind::Lse;
  int n = 0;
  int p = 0;

  double value(double t) const;
  double norm_sq() const;  // continuous (Parseval) squared norm
  TrigSignal to_signal() const;
};

/// Least-squares fit on a model: keeps the alpha_hat entries of m.
/// Requires max_index(m) <= p (no aliasing on the sampling grid).
ProjectiveEstimate lse_fit(const SamplePath& path, const Model& model);

/// James-Stein shrinkage of an LSE fit: c* = (1 - (d-2)/(n ||c||^2)) c for
/// d >= 3; identity for d <= 2 or when n ||c||^2 underflows (< 1e-12).
ProjectiveEstimate shrink_fit(ProjectiveEstimate lse, int n);
ProjectiveEstimate shrink_fit(const SamplePath& path, const Model& model);

/// Empirical contrast gamma_n(x) = ||x||^2 - (2/n) sum_k x(t_k) dy_k.
/// Continuous mode takes ||x||^2 by quadrature; discrete mode uses ||x||_p^2.
double contrast_gamma(const SamplePath& path, const Signal& x, Mode mode,
                      int max_freq = 0);

/// Same contrast restricted to the basis span, where ||x||^2 and the data
/// term collapse to coefficient sums; minimized over a model's span exactly
/// at the LSE.
double contrast_gamma(const ProjectiveEstimate& x,
                      const Eigen::VectorXd& alpha_hat);

/// Discrete projection coefficients alpha_{j,p} = (S, phi_j)_p, j = 1..j_max.
Eigen::VectorXd discrete_projection(const Signal& s, int j_max, int p);

/// Paired Monte Carlo check of the shrinkage risk identity under white
/// noise, where the model-m coefficient estimates are exactly
/// alpha + N(0, I/n) (Wiener isometry on an orthonormal span):
///   E[||S* - S_m||^2 - ||S^ - S_m||^2]  =  E[L(alpha_hat)],
///   L(u) = -(d-2)^2 / (n^2 ||u||^2).
/// d <= 2 yields an identically-zero report (no shrinkage applied).
struct SteinReport {
  int d = 0;
  int n = 0;
  int replicates = 0;
  double delta_direct = 0.0;  // mean risk difference
  double se_direct = 0.0;
  double delta_stein = 0.0;   // mean of L(alpha_hat)
  double se_stein = 0.0;
  double diff_mean = 0.0;     // paired difference, expected 0
  double diff_se = 0.0;
};

SteinReport stein_delta(const TrigSignal& s, const Model& m, int n,
                        int replicates, std::uint64_t seed);

}  // namespace perisel
