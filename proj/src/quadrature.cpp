#include "perisel/quadrature.hpp"

#include <cmath>
#include <stdexcept>

namespace perisel {

GaussLegendre::GaussLegendre(int n) {
  if (n < 1) throw std::invalid_argument("GaussLegendre: n must be >= 1");
  node.resize(n);
  weight.resize(n);
  const int half = (n + 1) / 2;
  for (int i = 0; i < half; ++i) {
    // Tricomi initial guess, then Newton on P_n(x) = 0.
    double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    node[i] = -x;
    node[n - 1 - i] = x;
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    weight[i] = w;
    weight[n - 1 - i] = w;
  }
}

const GaussLegendre& GaussLegendre::k64() {
  static const GaussLegendre rule(64);
  return rule;
}

double integrate(const std::function<double(double)>& f, double a, double b,
                 int panels, const GaussLegendre& rule) {
  if (panels < 1) throw std::invalid_argument("integrate: panels must be >= 1");
  const double hp = (b - a) / panels;
  double total = 0.0;
  for (int s = 0; s < panels; ++s) {
    const double lo = a + s * hp;
    const double mid = lo + 0.5 * hp;
    double acc = 0.0;
    for (std::size_t i = 0; i < rule.node.size(); ++i)
      acc += rule.weight[i] * f(mid + 0.5 * hp * rule.node[i]);
    total += 0.5 * hp * acc;
  }
  return total;
}

double inner_product_l2(const std::function<double(double)>& f,
                        const std::function<double(double)>& g, int max_freq) {
  const int panels = std::max(4, (max_freq + 5) / 6);
  return integrate([&](double t) { return f(t) * g(t); }, 0.0, 1.0, panels);
}

}  // namespace perisel
