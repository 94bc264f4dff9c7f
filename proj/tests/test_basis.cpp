#include <cmath>
#include <vector>

#include "doctest.h"
#include "perisel/basis.hpp"
#include "perisel/quadrature.hpp"

using namespace perisel;

namespace {
const double kSqrt2 = std::sqrt(2.0);
}

TEST_CASE("trig basis values and frequencies") {
  CHECK(TrigBasis::eval(1, 0.37) == 1.0);
  CHECK(TrigBasis::eval(2, 0.25) ==
        doctest::Approx(kSqrt2 * std::cos(M_PI / 2)).epsilon(1e-14));
  CHECK(TrigBasis::eval(3, 0.25) == doctest::Approx(kSqrt2).epsilon(1e-14));
  CHECK(TrigBasis::eval(4, 0.25) ==
        doctest::Approx(kSqrt2 * std::cos(M_PI)).epsilon(1e-14));
  CHECK(TrigBasis::eval(5, 0.125) == doctest::Approx(kSqrt2).epsilon(1e-14));
  CHECK(TrigBasis::frequency(1) == 0);
  CHECK(TrigBasis::frequency(2) == 1);
  CHECK(TrigBasis::frequency(3) == 1);
  CHECK(TrigBasis::frequency(8) == 4);
  CHECK(TrigBasis::frequency(9) == 4);
  CHECK_THROWS(TrigBasis::eval(0, 0.5));
}

TEST_CASE("antiderivative differentiates back to the basis") {
  const double eps = 1e-6;
  for (int j = 1; j <= 9; ++j) {
    for (double t : {0.13, 0.5, 0.77}) {
      const double num =
          (TrigBasis::antiderivative(j, t + eps) - TrigBasis::antiderivative(j, t - eps)) /
          (2 * eps);
      CHECK(num == doctest::Approx(TrigBasis::eval(j, t)).epsilon(1e-7));
    }
  }
}

TEST_CASE("continuous orthonormality to 1e-10") {
  for (int j = 1; j <= 12; ++j) {
    for (int k = j; k <= 12; ++k) {
      const double ip = inner_product_l2(
          [j](double t) { return TrigBasis::eval(j, t); },
          [k](double t) { return TrigBasis::eval(k, t); },
          2 * std::max(TrigBasis::frequency(j), TrigBasis::frequency(k)) + 1);
      CHECK(std::abs(ip - (j == k ? 1.0 : 0.0)) < 1e-10);
    }
  }
}

TEST_CASE("sampling geometry is orthonormal for odd p") {
  const int p = 11;
  std::vector<double> e2{0, 1}, e3{0, 0, 1};
  const TrigSignal phi2(e2), phi3(e3);
  CHECK(inner_product_p(phi2, phi3, p) == doctest::Approx(0.0).epsilon(1e-12));
  for (int j = 1; j <= p; ++j) {
    std::vector<double> c(j, 0.0);
    c[j - 1] = 1.0;
    CHECK(norm_p_sq(TrigSignal(c), p) == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("trig signal evaluation, Parseval and periodic integrals") {
  const TrigSignal s({2.0, 0.0, 0.0, 0.0, 3.0});  // 2 phi_1 + 3 phi_5
  CHECK(s.value(0.2) ==
        doctest::Approx(2.0 + 3.0 * kSqrt2 * std::sin(4 * M_PI * 0.2)).epsilon(1e-13));
  CHECK(s.norm_sq() == doctest::Approx(13.0).epsilon(1e-14));
  auto f = [&s](double t) { return s.value(t); };
  CHECK(inner_product_l2(f, f, 2 * s.max_frequency()) ==
        doctest::Approx(13.0).epsilon(1e-12));
  CHECK(s.coeff(5) == 3.0);
  CHECK(s.coeff(6) == 0.0);
  CHECK(s.max_frequency() == 2);
  // Periodic extension: integral over [0.9, 2.3] = full period + [0.9, 1.3].
  const double direct = integrate(f, 0.9, 1.0, 2) + integrate(f, 0.0, 0.3, 2) + 2.0;
  CHECK(s.integral(0.9, 2.3) == doctest::Approx(direct).epsilon(1e-12));
}

TEST_CASE("grid validation") {
  CHECK_THROWS_WITH_AS(GridSpec(10, 8), doctest::Contains("odd"),
                       std::invalid_argument);
  CHECK_THROWS(GridSpec(0, 11));
  const GridSpec g(10, 11);
  CHECK(g.increments() == 110);
  CHECK(g.dt() == doctest::Approx(1.0 / 11));
}

TEST_CASE("bump kernel normalization and antiderivative") {
  CHECK(bump_kernel(1.0) == 0.0);
  CHECK(bump_kernel(-1.0) == 0.0);
  CHECK(bump_kernel(1.5) == 0.0);
  auto k2 = [](double u) { double v = bump_kernel(u); return v * v; };
  CHECK(integrate(k2, -1.0, 1.0, 8) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(bump_kernel_antiderivative(-1.0) == doctest::Approx(0.0));
  CHECK(bump_kernel_antiderivative(-2.0) == doctest::Approx(0.0));
  const double eps = 1e-6;
  for (double u : {-0.6, 0.0, 0.4}) {
    const double num = (bump_kernel_antiderivative(u + eps) -
                        bump_kernel_antiderivative(u - eps)) / (2 * eps);
    CHECK(num == doctest::Approx(bump_kernel(u)).epsilon(1e-7));
  }
  CHECK(bump_kernel_antiderivative(2.0) ==
        doctest::Approx(bump_kernel_antiderivative(1.0)));
}

TEST_CASE("bump signals: disjoint supports, exact norm and integrals") {
  BumpFamilySpec spec;
  spec.m = 3;
  spec.delta = 0.5;
  spec.z = {0.5, -0.2, 0.3};
  const BumpSignal s(spec);
  const double h = s.half_width();
  CHECK(h == doctest::Approx(1.0 / 6));
  // Exact norm h * sum z^2 against quadrature.
  auto f = [&s](double t) { return s.value(t); };
  const double quad = integrate([&](double t) { return f(t) * f(t); }, 0.0, 1.0, 24);
  CHECK(quad == doctest::Approx(h * (0.25 + 0.04 + 0.09)).epsilon(1e-12));
  // Zeros at the tile boundaries.
  CHECK(s.value(0.0) == 0.0);
  CHECK(std::abs(s.value(1.0 / 3)) < 1e-15);
  CHECK(s.value(s.center(2)) == doctest::Approx(-0.2 * bump_kernel(0.0)));
  // Exact integral against quadrature, with periodic wrap.
  CHECK(s.integral(0.9, 1.3) ==
        doctest::Approx(integrate(f, 0.9, 1.0, 8) + integrate(f, 0.0, 0.3, 8))
            .epsilon(1e-10));
  // Amplitude box validation.
  BumpFamilySpec bad = spec;
  bad.z = {0.6, 0.0, 0.0};
  CHECK_THROWS(BumpSignal(bad));
  bad = spec;
  bad.z = {0.1, 0.1};
  CHECK_THROWS(BumpSignal(bad));
}

TEST_CASE("fourier analysis tails and class membership") {
  const TrigSignal s({1.0, 2.0, 3.0});
  const FourierAnalysis fa = fourier_analyze(s, 5);
  REQUIRE(fa.tail_energy.size() == 5);
  CHECK(fa.tail_energy[0] == doctest::Approx(14.0));
  CHECK(fa.tail_energy[1] == doctest::Approx(13.0));
  CHECK(fa.tail_energy[2] == doctest::Approx(9.0));
  CHECK(fa.tail_energy[3] == doctest::Approx(0.0));
  // max_k k^2 tail_energy[k-1]: k=1 -> 14, k=2 -> 52, k=3 -> 81; max is 81.
  CHECK(fa.sobolev_check(1.0, 9.01));
  CHECK_FALSE(fa.sobolev_check(1.0, 8.99));
  CHECK_THROWS(fourier_analyze(s, 2));  // j_max below the stored range
}

TEST_CASE("boundary signal attains the class boundary exactly") {
  for (double beta : {1.5, 2.0, 3.0}) {
    const TrigSignal s = sobolev_boundary_signal(beta, 1.0, 64);
    const FourierAnalysis fa = fourier_analyze(s, 64);
    double worst = 0.0;
    for (int k = 1; k <= 64; ++k)
      worst = std::max(worst, std::pow(k, 2 * beta) * fa.tail_energy[k - 1]);
    CHECK(worst == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(fa.sobolev_check(beta, 1.0 + 1e-9));
    CHECK_FALSE(fa.sobolev_check(beta, 0.999));
  }
}

TEST_CASE("random class member is seeded and stays in the class") {
  const TrigSignal a = sobolev_random_signal(2.0, 1.0, 32, 7);
  const TrigSignal b = sobolev_random_signal(2.0, 1.0, 32, 7);
  const TrigSignal c = sobolev_random_signal(2.0, 1.0, 32, 8);
  CHECK(a.coeffs() == b.coeffs());
  CHECK(a.coeffs() != c.coeffs());
  CHECK(fourier_analyze(a, 32).sobolev_check(2.0, 1.0 + 1e-9));
  CHECK(fourier_analyze(c, 32).sobolev_check(2.0, 1.0 + 1e-9));
}

TEST_CASE("sampling distortion H_p oracles") {
  const TrigSignal s({0.0, 3.0});
  CHECK(h_p_distortion(s, 11) ==
        doctest::Approx(0.7209044941924381).epsilon(1e-10));
  CHECK(h_p_distortion(s, 22) ==
        doctest::Approx(0.1826957490727008).epsilon(1e-10));
  CHECK(h_p_distortion(s, 33) ==
        doctest::Approx(0.0814028514760019).epsilon(1e-10));
  const TrigSignal mixed({2.0, 0.0, 0.0, 0.0, 3.0});
  CHECK(h_p_distortion(mixed, 11) ==
        doctest::Approx(2.7303280621042044).epsilon(1e-10));
  // Refining the design shrinks the distortion.
  CHECK(h_p_distortion(s, 22) < h_p_distortion(s, 11));
  CHECK(h_p_distortion(s, 44) < h_p_distortion(s, 22));
}

TEST_CASE("smoothness constant against high-precision oracles") {
  // Reference values computed independently at 40-digit precision.
  CHECK(lemma_smoothness_constant(1.5) ==
        doctest::Approx(44.914987338985873).epsilon(1e-6));
  CHECK(lemma_smoothness_constant(2.0) ==
        doctest::Approx(223.77537945484790).epsilon(1e-6));
  CHECK(lemma_smoothness_constant(3.0) ==
        doctest::Approx(1977.9784150936311).epsilon(1e-6));
  CHECK_THROWS(lemma_smoothness_constant(0.0));
  CHECK_THROWS(lemma_smoothness_constant(-1.0));
}
