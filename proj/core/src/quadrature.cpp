#include "pco/quadrature.hpp"

#include <numbers>
#include <stdexcept>

namespace pco::quad {

void gauss_legendre_rule(std::size_t points, std::span<double> nodes, std::span<double> weights) {
  if (points == 0 || nodes.size() < points || weights.size() < points)
    throw std::invalid_argument("gauss_legendre_rule: bad sizes");
  const std::size_t half = (points + 1) / 2;
  for (std::size_t i = 0; i < half; ++i) {
    // Tricomi initial guess for the i-th largest root.
    double x = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) /
                        (static_cast<double>(points) + 0.5));
    double derivative = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0;
      double p1 = x;
      for (std::size_t k = 2; k <= points; ++k) {
        const double kk = static_cast<double>(k);
        const double p2 = ((2.0 * kk - 1.0) * x * p1 - (kk - 1.0) * p0) / kk;
        p0 = p1;
        p1 = p2;
      }
      const double n = static_cast<double>(points);
      derivative = n * (x * p1 - p0) / (x * x - 1.0);
      const double step = p1 / derivative;
      x -= step;
      if (std::abs(step) < 1e-16) break;
    }
    const double w = 2.0 / ((1.0 - x * x) * derivative * derivative);
    nodes[i] = x;
    nodes[points - 1 - i] = -x;
    weights[i] = w;
    weights[points - 1 - i] = w;
  }
  if (points % 2 == 1) nodes[half - 1] = 0.0;
}

const GaussLegendreRule& gauss_legendre_64() {
  static const GaussLegendreRule rule = [] {
    GaussLegendreRule r;
    gauss_legendre_rule(kNodes, r.nodes, r.weights);
    return r;
  }();
  return rule;
}

}  // namespace pco::quad
