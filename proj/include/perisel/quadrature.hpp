#pragma once

#include <functional>
#include <vector>

namespace perisel {

/// Gauss-Legendre rule on [-1, 1]. Nodes/weights computed once by Newton
/// iteration on the Legendre recurrence (machine accurate for n <= 128).
struct GaussLegendre {
  std::vector<double> node;
  std::vector<double> weight;

  explicit GaussLegendre(int n);

  /// Shared 64-node rule; exact for polynomial degree <= 127.
  static const GaussLegendre& k64();
};

/// Composite integration of f over [a, b] with `panels` equal subintervals.
double integrate(const std::function<double(double)>& f, double a, double b,
                 int panels = 1, const GaussLegendre& rule = GaussLegendre::k64());

/// L2[0,1] inner product of two 1-periodic callables. `max_freq` picks the
/// panel count so oscillatory integrands keep >= 8 nodes per oscillation.
double inner_product_l2(const std::function<double(double)>& f,
                        const std::function<double(double)>& g, int max_freq);

}  // namespace perisel
