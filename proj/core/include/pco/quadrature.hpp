#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

namespace pco::quad {

inline constexpr std::size_t kNodes = 64;

/// Gauss-Legendre nodes and weights on [-1, 1].
struct GaussLegendreRule {
  std::array<double, kNodes> nodes{};
  std::array<double, kNodes> weights{};
};

const GaussLegendreRule& gauss_legendre_64();

/// Fixed-order Gauss-Legendre with `points` nodes on [-1, 1] (points >= 1).
/// Computed by Newton iteration on the Legendre recurrence.
void gauss_legendre_rule(std::size_t points, std::span<double> nodes,
                         std::span<double> weights);

struct Options {
  double rel_tol = 1e-10;
  double abs_tol = 1e-15;
  int max_depth = 40;
};

/// Single 64-node panel on [a, b].
template <class F>
double panel(const F& f, double a, double b) {
  const auto& rule = gauss_legendre_64();
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  double sum = 0.0;
  for (std::size_t k = 0; k < kNodes; ++k) sum += rule.weights[k] * f(mid + half * rule.nodes[k]);
  return sum * half;
}

namespace detail {
template <class F>
double adaptive(const F& f, double a, double b, double whole, const Options& opt, int depth) {
  const double mid = 0.5 * (a + b);
  const double left = panel(f, a, mid);
  const double right = panel(f, mid, b);
  const double refined = left + right;
  if (depth >= opt.max_depth ||
      std::abs(refined - whole) <= std::max(opt.rel_tol * std::abs(refined), opt.abs_tol)) {
    return refined;
  }
  return adaptive(f, a, mid, left, opt, depth + 1) + adaptive(f, mid, b, right, opt, depth + 1);
}
}  // namespace detail

/// Composite adaptive Gauss-Legendre integral of f over [a, b].
///
/// Panels are split in halves until two successive refinements agree to
/// rel_tol (or abs_tol near zero). `breakpoints` strictly inside (a, b) seed
/// the initial panels; pass kink locations of piecewise-smooth integrands.
template <class F>
double integrate(const F& f, double a, double b, std::span<const double> breakpoints = {},
                 const Options& opt = {}) {
  if (!(b > a)) return 0.0;
  std::vector<double> cuts;
  cuts.reserve(breakpoints.size() + 2);
  cuts.push_back(a);
  for (double c : breakpoints)
    if (c > a && c < b) cuts.push_back(c);
  cuts.push_back(b);
  std::sort(cuts.begin() + 1, cuts.end() - 1);
  double total = 0.0;
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
    const double lo = cuts[k];
    const double hi = cuts[k + 1];
    if (!(hi > lo)) continue;
    total += detail::adaptive(f, lo, hi, panel(f, lo, hi), opt, 0);
  }
  return total;
}

}  // namespace pco::quad
