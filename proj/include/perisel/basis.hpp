#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

namespace perisel {

/// Trigonometric basis of L2[0,1]:
///   phi_1 = 1;  for j >= 2, phi_j(x) = sqrt(2) Tr_j(2 pi [j/2] x),
/// Tr_j = cos for even j, sin for odd j. Orthonormal; frequency(j) = [j/2].
struct TrigBasis {
  static int frequency(int j);
  static double eval(int j, double t);
  /// Antiderivative on the real line: d/dt antiderivative(j, t) = eval(j, t).
  static double antiderivative(int j, double t);
};

/// A 1-periodic signal: pointwise values plus exact integrals of the periodic
/// extension (used to build observation increments without quadrature error).
class Signal {
 public:
  virtual ~Signal() = default;
  virtual double value(double t) const = 0;
  virtual double integral(double a, double b) const = 0;
  /// Largest frequency carried (resolution hint for simulation grids).
  virtual int max_frequency() const = 0;
  const std::string& label() const { return label_; }

 protected:
  explicit Signal(std::string label) : label_(std::move(label)) {}
  std::string label_;
};

/// Finite trigonometric-coefficient signal S = sum_j s_j phi_j.
class TrigSignal final : public Signal {
 public:
  TrigSignal() : Signal("zero") {}
  explicit TrigSignal(std::vector<double> coeffs, std::string label = "signal");

  double value(double t) const override;
  double integral(double a, double b) const override;
  int max_frequency() const override;

  const std::vector<double>& coeffs() const { return s_; }
  /// Coefficient s_j (1-based); 0 beyond the stored range.
  double coeff(int j) const;
  int j_max() const { return static_cast<int>(s_.size()); }
  /// Parseval: squared L2[0,1] norm = sum of squared coefficients.
  double norm_sq() const;

 private:
  std::vector<double> s_;
};

/// Compactly supported bump kernel V(u) = c (1-u^2)^5 on [-1,1] with
/// int V^2 = 1; C^4-smooth at the endpoints and polynomial inside, so
/// integrals are exact closed forms.
double bump_kernel(double u);
/// Antiderivative of bump_kernel with W(-1) = 0, clamped outside [-1,1].
double bump_kernel_antiderivative(double u);

struct BumpFamilySpec {
  int m = 0;                // number of bumps; half-width h = 1/(2m)
  double delta = 0.0;       // amplitude box: |z_i| <= delta
  std::vector<double> z;    // length m
};

/// S_z(t) = sum_j z_j V((t - a_j)/h), a_j = (2j-1)/(2m), h = 1/(2m).
/// Bumps tile [0,1] with disjoint interiors.
class BumpSignal final : public Signal {
 public:
  explicit BumpSignal(BumpFamilySpec spec, std::string label = "bump");

  double value(double t) const override;
  double integral(double a, double b) const override;
  int max_frequency() const override;

  const BumpFamilySpec& spec() const { return spec_; }
  double half_width() const { return h_; }
  double center(int j) const { return (2.0 * j - 1.0) * h_; }  // 1-based

 private:
  double integral_within_period(double a, double b) const;  // 0 <= a <= b <= 1
  BumpFamilySpec spec_;
  double h_;
  double period_integral_;
};

BumpSignal bump_signal(const BumpFamilySpec& spec);

/// Tail energies of a finite-coefficient signal.
struct FourierAnalysis {
  std::vector<double> coeffs;        // s_1..s_{j_max}
  std::vector<double> tail_energy;   // tail_energy[i] = sum_{j >= i+1} s_j^2
  /// true iff max_{1<=k<=j_max} k^{2 beta} * tail_energy[k-1] <= r^2.
  bool sobolev_check(double beta, double r) const;
};

FourierAnalysis fourier_analyze(const TrigSignal& s, int j_max);

/// Boundary-of-class signal: s_j proportional to j^{-beta-1/2}, scaled so the
/// largest k^{2 beta} tail energy equals exactly r^2.
TrigSignal sobolev_boundary_signal(double beta, double r, int j_max);
/// Random member with the boundary scaling: the j^{-beta-1/2} profile times
/// seeded signed uniform factors in [0.2, 1], rescaled to the class boundary.
TrigSignal sobolev_random_signal(double beta, double r, int j_max,
                                 std::uint64_t seed);

/// Observation grid: t_k = k/p for k = 0..n*p. p must be odd, which keeps the
/// first p basis functions orthonormal under the discrete inner product.
struct GridSpec {
  int n;
  int p;
  GridSpec(int n_, int p_);
  double dt() const { return 1.0 / p; }
  std::int64_t increments() const { return static_cast<std::int64_t>(n) * p; }
};

/// Discrete geometry on p samples per period: (x,z)_p = (1/p) sum x(t_j)z(t_j).
double inner_product_p(const Signal& x, const Signal& z, int p);
double norm_p_sq(const Signal& x, int p);

/// Sampling distortion H_p(S) = (1/p) sum_l h_l^2 with
/// h_l = p * int_{t_{l-1}}^{t_l} (S(t) - S(t_l)) dt; 0 for constants, and
/// O(p^-2) for smooth S.
double h_p_distortion(const Signal& s, int p);

/// Smoothness-to-Fourier-tail constant
///   c*(beta) = 1 + 2^beta + pi^4 9^beta I_num(alpha) / (8 I_den),
/// I_num = int_0^inf u^{alpha-3} sin^4(pi u) du (beta = k + alpha, k = floor),
/// I_den = int_0^{1/2} u^{-4} sin^4(pi u) du. The u->0 singularity is
/// removable (sin^4 ~ u^4) and handled by series substitution below 1e-3.
double lemma_smoothness_constant(double beta);

}  // namespace perisel
