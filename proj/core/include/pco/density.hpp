#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "pco/kernels.hpp"
#include "pco/rng.hpp"
#include "pco/sample.hpp"

namespace pco {

struct NormalComponent {
  double weight;
  double mean;
  double sd;
};

/// Univariate test density: a normal mixture or a uniform law.
class Marginal {
 public:
  static Marginal mixture(std::vector<NormalComponent> components);
  static Marginal uniform(double lo, double hi);

  bool is_uniform() const { return components_.empty(); }
  std::span<const NormalComponent> components() const { return components_; }
  double lo() const { return lo_; }
  double hi() const { return hi_; }

  double pdf(double x) const;
  double cdf(double x) const;
  double sup_bound() const;
  double l2_norm_sq() const;
  double draw(Engine& rng) const;
  /// Interval holding all but ~1e-15 of the mass.
  std::pair<double, double> effective_support() const;
  /// (K_h * f)(x).
  double smoothed(const Kernel& k, double h, double x) const;

 private:
  std::vector<NormalComponent> components_;
  double lo_ = 0.0;
  double hi_ = 0.0;
};

/// Test density on R^d with independent marginals (d = 1 for the named laws).
class Density {
 public:
  static Density standard_normal();
  static Density normal(double mean, double sd);
  static Density gaussian_mixture(std::vector<NormalComponent> components);
  static Density uniform(double lo = 0.0, double hi = 1.0);
  /// Marron-Wand claw: 0.5 N(0,1) + sum_{l=0..4} 0.1 N(l/2 - 1, 0.1^2).
  static Density claw();
  static Density product(std::vector<Density> factors);
  /// "standard_normal", "claw", "uniform[:lo:hi]", "normal:<mean>:<sd>",
  /// "mixture:<w>,<m>,<s>;<w>,<m>,<s>...", or '*'-joined factors for d > 1.
  static Density parse(std::string_view id);

  std::size_t dim() const { return marginals_.size(); }
  const std::string& id() const { return id_; }
  std::span<const Marginal> marginals() const { return marginals_; }

  double operator()(std::span<const double> x) const;
  double sup_bound() const;
  double l2_norm_sq() const;
  Sample sample(std::size_t n, Engine& rng) const;
  /// (K_h * f)(x) for a product kernel: closed form for Gaussian kernels,
  /// adaptive quadrature otherwise.
  double smoothed(const ProductKernel& k, const Bandwidth& h, std::span<const double> x) const;
  /// Probability mass outside the box [lo_k, hi_k].
  double mass_outside(std::span<const double> lo, std::span<const double> hi) const;

 private:
  Density(std::string id, std::vector<Marginal> marginals);

  std::string id_;
  std::vector<Marginal> marginals_;
};

}  // namespace pco
