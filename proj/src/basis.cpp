#include "perisel/basis.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <stdexcept>

#include "perisel/quadrature.hpp"
#include "perisel/rng.hpp"

namespace perisel {

namespace {
constexpr double kSqrt2 = 1.4142135623730950488;
constexpr double kTwoPi = 6.2831853071795864769;
}  // namespace

int TrigBasis::frequency(int j) {
  if (j < 1) throw std::out_of_range("TrigBasis: index must be >= 1");
  return j / 2;
}

double TrigBasis::eval(int j, double t) {
  if (j < 1) throw std::out_of_range("TrigBasis: index must be >= 1");
  if (j == 1) return 1.0;
  const double arg = kTwoPi * (j / 2) * t;
  return (j % 2 == 0) ? kSqrt2 * std::cos(arg) : kSqrt2 * std::sin(arg);
}

double TrigBasis::antiderivative(int j, double t) {
  if (j < 1) throw std::out_of_range("TrigBasis: index must be >= 1");
  if (j == 1) return t;
  const double w = kTwoPi * (j / 2);
  return (j % 2 == 0) ? kSqrt2 * std::sin(w * t) / w
                      : -kSqrt2 * std::cos(w * t) / w;
}

TrigSignal::TrigSignal(std::vector<double> coeffs, std::string label)
    : Signal(std::move(label)), s_(std::move(coeffs)) {
  for (double c : s_)
    if (!std::isfinite(c))
      throw std::invalid_argument("TrigSignal: non-finite coefficient");
}

double TrigSignal::value(double t) const {
  double acc = 0.0;
  for (std::size_t j = 0; j < s_.size(); ++j)
    if (s_[j] != 0.0) acc += s_[j] * TrigBasis::eval(static_cast<int>(j) + 1, t);
  return acc;
}

double TrigSignal::integral(double a, double b) const {
  double acc = 0.0;
  for (std::size_t j = 0; j < s_.size(); ++j) {
    if (s_[j] == 0.0) continue;
    const int idx = static_cast<int>(j) + 1;
    acc += s_[j] * (TrigBasis::antiderivative(idx, b) -
                    TrigBasis::antiderivative(idx, a));
  }
  return acc;
}

int TrigSignal::max_frequency() const {
  for (int j = j_max(); j >= 1; --j)
    if (s_[j - 1] != 0.0) return TrigBasis::frequency(j);
  return 0;
}

double TrigSignal::coeff(int j) const {
  if (j < 1) throw std::out_of_range("TrigSignal: index must be >= 1");
  return j <= j_max() ? s_[j - 1] : 0.0;
}

double TrigSignal::norm_sq() const {
  double acc = 0.0;
  for (double c : s_) acc += c * c;
  return acc;
}

namespace {

// (1 - u^2)^5 expanded; P is its antiderivative.
double bump_poly(double u) {
  const double u2 = u * u;
  const double w = 1.0 - u2;
  return w * w * w * w * w;
}

double bump_poly_antiderivative(double u) {
  const double u2 = u * u;
  return u * (1.0 + u2 * (-5.0 / 3.0 + u2 * (2.0 + u2 * (-10.0 / 7.0 +
                u2 * (5.0 / 9.0 - u2 / 11.0)))));
}

double bump_norm_constant() {
  // c with int_{-1}^{1} (c (1-u^2)^5)^2 du = 1; the integral is
  // 2 * prod_{i=1..10} 2i/(2i+1).
  static const double c = [] {
    double prod = 2.0;
    for (int i = 1; i <= 10; ++i) prod *= (2.0 * i) / (2.0 * i + 1.0);
    return 1.0 / std::sqrt(prod);
  }();
  return c;
}

}  // namespace

double bump_kernel(double u) {
  if (u <= -1.0 || u >= 1.0) return 0.0;
  return bump_norm_constant() * bump_poly(u);
}

double bump_kernel_antiderivative(double u) {
  const double uc = std::clamp(u, -1.0, 1.0);
  return bump_norm_constant() *
         (bump_poly_antiderivative(uc) - bump_poly_antiderivative(-1.0));
}

BumpSignal::BumpSignal(BumpFamilySpec spec, std::string label)
    : Signal(std::move(label)), spec_(std::move(spec)) {
  if (spec_.m < 1) throw std::invalid_argument("BumpSignal: m must be >= 1");
  if (static_cast<int>(spec_.z.size()) != spec_.m)
    throw std::invalid_argument("BumpSignal: z must have length m");
  for (double zi : spec_.z)
    if (!std::isfinite(zi) || std::abs(zi) > spec_.delta + 1e-12)
      throw std::invalid_argument("BumpSignal: |z_i| must be <= delta");
  h_ = 0.5 / spec_.m;
  double total = 0.0;
  for (double zi : spec_.z) total += zi;
  period_integral_ = total * h_ * bump_kernel_antiderivative(1.0);
}

double BumpSignal::value(double t) const {
  double x = t - std::floor(t);
  // Bump j (1-based) covers [(j-1)/m, j/m].
  int j = std::min(static_cast<int>(x * spec_.m), spec_.m - 1);
  const double u = (x - center(j + 1)) / h_;
  return spec_.z[j] * bump_kernel(u);
}

double BumpSignal::integral_within_period(double a, double b) const {
  assert(a >= -1e-12 && b <= 1.0 + 1e-12 && a <= b + 1e-12);
  const int j_lo = std::max(0, static_cast<int>(std::floor(a * spec_.m)));
  const int j_hi = std::min(spec_.m - 1, static_cast<int>(std::ceil(b * spec_.m)));
  double acc = 0.0;
  for (int j = j_lo; j <= j_hi; ++j) {
    const double lo = std::max(a, static_cast<double>(j) / spec_.m);
    const double hi = std::min(b, static_cast<double>(j + 1) / spec_.m);
    if (hi <= lo) continue;
    const double c = center(j + 1);
    acc += spec_.z[j] * h_ *
           (bump_kernel_antiderivative((hi - c) / h_) -
            bump_kernel_antiderivative((lo - c) / h_));
  }
  return acc;
}

double BumpSignal::integral(double a, double b) const {
  if (b < a) return -integral(b, a);
  // F(t) = floor(t) * (integral over one period) + integral over [0, frac(t)].
  auto cumulative = [this](double t) {
    const double fl = std::floor(t);
    return fl * period_integral_ + integral_within_period(0.0, t - fl);
  };
  return cumulative(b) - cumulative(a);
}

int BumpSignal::max_frequency() const { return 4 * spec_.m; }

BumpSignal bump_signal(const BumpFamilySpec& spec) { return BumpSignal(spec); }

FourierAnalysis fourier_analyze(const TrigSignal& s, int j_max) {
  if (j_max < 1) throw std::invalid_argument("fourier_analyze: j_max must be >= 1");
  if (s.j_max() > j_max)
    throw std::invalid_argument(
        "fourier_analyze: signal has coefficients beyond j_max");
  FourierAnalysis out;
  out.coeffs.resize(j_max, 0.0);
  for (int j = 1; j <= s.j_max(); ++j) out.coeffs[j - 1] = s.coeff(j);
  out.tail_energy.assign(j_max, 0.0);
  double acc = 0.0;
  for (int j = j_max; j >= 1; --j) {
    acc += out.coeffs[j - 1] * out.coeffs[j - 1];
    out.tail_energy[j - 1] = acc;
  }
  return out;
}

bool FourierAnalysis::sobolev_check(double beta, double r) const {
  if (beta <= 0.0 || r <= 0.0)
    throw std::invalid_argument("sobolev_check: beta and r must be positive");
  for (std::size_t k = 1; k <= tail_energy.size(); ++k)
    if (std::pow(static_cast<double>(k), 2.0 * beta) * tail_energy[k - 1] >
        r * r)
      return false;
  return true;
}

namespace {

// Shared scaling for the Sobolev-class constructors: rescales `profile` so
// max_k k^{2 beta} varsigma_k equals exactly r^2.
TrigSignal scale_to_class_boundary(std::vector<double> profile, double beta,
                                   double r, std::string label) {
  const int j = static_cast<int>(profile.size());
  double worst = 0.0;
  double tail = 0.0;
  for (int k = j; k >= 1; --k) {
    tail += profile[k - 1] * profile[k - 1];
    worst = std::max(worst, std::pow(static_cast<double>(k), 2.0 * beta) * tail);
  }
  const double scale = r / std::sqrt(worst);
  for (double& c : profile) c *= scale;
  return TrigSignal(std::move(profile), std::move(label));
}

}  // namespace

TrigSignal sobolev_boundary_signal(double beta, double r, int j_max) {
  if (beta <= 0.0 || r <= 0.0 || j_max < 1)
    throw std::invalid_argument("sobolev_boundary_signal: bad parameters");
  std::vector<double> s(j_max);
  for (int j = 1; j <= j_max; ++j)
    s[j - 1] = std::pow(static_cast<double>(j), -beta - 0.5);
  return scale_to_class_boundary(std::move(s), beta, r, "sobolev_boundary");
}

TrigSignal sobolev_random_signal(double beta, double r, int j_max,
                                 std::uint64_t seed) {
  if (beta <= 0.0 || r <= 0.0 || j_max < 1)
    throw std::invalid_argument("sobolev_random_signal: bad parameters");
  CounterRng rng(seed, 0, 0x50B0u);
  std::vector<double> s(j_max);
  for (int j = 1; j <= j_max; ++j) {
    const double mag = 0.2 + 0.8 * rng.uniform();
    const double sign = (rng.next_u32() & 1u) ? 1.0 : -1.0;
    s[j - 1] = sign * mag * std::pow(static_cast<double>(j), -beta - 0.5);
  }
  return scale_to_class_boundary(std::move(s), beta, r, "sobolev_random");
}

GridSpec::GridSpec(int n_, int p_) : n(n_), p(p_) {
  if (n < 1) throw std::invalid_argument("GridSpec: n must be >= 1");
  if (p < 1 || p % 2 == 0)
    throw std::invalid_argument("GridSpec: p is a given odd number (got even or < 1)");
}

double inner_product_p(const Signal& x, const Signal& z, int p) {
  if (p < 1) throw std::invalid_argument("inner_product_p: p must be >= 1");
  double acc = 0.0;
  for (int j = 1; j <= p; ++j) {
    const double t = static_cast<double>(j) / p;
    const double xv = x.value(t);
    const double zv = z.value(t);
    if (!std::isfinite(xv) || !std::isfinite(zv))
      throw std::domain_error("inner_product_p: non-finite signal value");
    acc += xv * zv;
  }
  return acc / p;
}

double norm_p_sq(const Signal& x, int p) { return inner_product_p(x, x, p); }

double h_p_distortion(const Signal& s, int p) {
  if (p < 1) throw std::invalid_argument("h_p_distortion: p must be >= 1");
  const GaussLegendre& rule = GaussLegendre::k64();
  double acc = 0.0;
  for (int l = 1; l <= p; ++l) {
    const double lo = static_cast<double>(l - 1) / p;
    const double hi = static_cast<double>(l) / p;
    const double s_right = s.value(hi);
    // h_l = p * int_{lo}^{hi} (S - S(t_l)) dt, fixed-order rule per subinterval.
    const double mid = 0.5 * (lo + hi);
    const double half = 0.5 * (hi - lo);
    double integ = 0.0;
    for (std::size_t i = 0; i < rule.node.size(); ++i)
      integ += rule.weight[i] * s.value(mid + half * rule.node[i]);
    integ *= half;
    const double h_l = p * integ - s_right;
    if (!std::isfinite(h_l))
      throw std::domain_error("h_p_distortion: non-finite signal value");
    acc += h_l * h_l;
  }
  return acc / p;
}

namespace {

// int_0^eps u^{a-3} sin^4(pi u) du by the expansion
// sin^4(x) = x^4 - (2/3)x^6 + (1/5)x^8 - ... ; relative error ~ (pi eps)^6.
double num_head_series(double alpha, double eps) {
  const double pi2 = M_PI * M_PI;
  const double p4 = pi2 * pi2;
  return p4 * std::pow(eps, alpha + 2.0) / (alpha + 2.0) -
         (2.0 / 3.0) * p4 * pi2 * std::pow(eps, alpha + 4.0) / (alpha + 4.0) +
         (1.0 / 5.0) * p4 * p4 * std::pow(eps, alpha + 6.0) / (alpha + 6.0);
}

double sin4(double x) {
  const double s = std::sin(x);
  return s * s * s * s;
}

}  // namespace

double lemma_smoothness_constant(double beta) {
  if (beta <= 0.0 || !std::isfinite(beta))
    throw std::invalid_argument("lemma_smoothness_constant: beta must be > 0");
  const double alpha = beta - std::floor(beta);  // k = floor(beta), 0 <= alpha < 1

  const double eps = 1e-3;
  auto num_f = [alpha](double u) { return std::pow(u, alpha - 3.0) * sin4(M_PI * u); };

  // Numerator: series head + dyadic panels to 1 + unit panels to K + analytic
  // 3/8 tail (the oscillatory tail vanishes to O(K^{alpha-4}) at integer K).
  double i_num = num_head_series(alpha, eps);
  for (double lo = eps; lo < 1.0; lo *= 2.0)
    i_num += integrate(num_f, lo, std::min(2.0 * lo, 1.0), 2);
  const int big_k = 2048;
  for (int k = 1; k < big_k; ++k)
    i_num += integrate(num_f, k, k + 1.0, 1);
  i_num += (3.0 / 8.0) * std::pow(static_cast<double>(big_k), alpha - 2.0) /
           (2.0 - alpha);

  // Denominator: same removable singularity with alpha-3 replaced by -4+4.
  auto den_f = [](double u) { return std::pow(u, -4.0) * sin4(M_PI * u); };
  const double pi2 = M_PI * M_PI;
  const double p4 = pi2 * pi2;
  double i_den = p4 * (eps - (2.0 * pi2 / 9.0) * eps * eps * eps +
                       (p4 / 25.0) * std::pow(eps, 5.0));
  for (double lo = eps; lo < 0.5; lo *= 2.0)
    i_den += integrate(den_f, lo, std::min(2.0 * lo, 0.5), 2);

  return 1.0 + std::pow(2.0, beta) +
         p4 * std::pow(9.0, beta) * i_num / (8.0 * i_den);
}

}  // namespace perisel
