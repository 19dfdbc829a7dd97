#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "pco/density.hpp"
#include "pco/kernels.hpp"
#include "pco/sample.hpp"

namespace pco {

/// fhat_h(x) = (1/n) sum_i K_h(x - X_i) at each row of `points`
/// (row-major, d values per point). Compensated left-to-right sum over i.
std::vector<double> evaluate(const Sample& sample, const ProductKernel& k, const Bandwidth& h,
                             std::span<const double> points);
double evaluate_at(const Sample& sample, const ProductKernel& k, const Bandwidth& h, std::span<const double> x);

/// Tensor grid of uniformly spaced axes.
class EvaluationGrid {
 public:
  EvaluationGrid(std::vector<double> lo, std::vector<double> hi, std::size_t points_per_axis);
  /// [min_k - reach, max_k + reach] on every axis.
  static EvaluationGrid covering(const Sample& sample, double reach, std::size_t points_per_axis = 1024);

  std::size_t dim() const { return lo_.size(); }
  std::size_t points_per_axis() const { return m_; }
  std::size_t size() const;
  std::span<const double> lo() const { return lo_; }
  std::span<const double> hi() const { return hi_; }
  double spacing(std::size_t axis) const { return (hi_[axis] - lo_[axis]) / static_cast<double>(m_ - 1); }
  double coordinate(std::size_t axis, std::size_t index) const;
  /// Point with flat index `flat` (last axis fastest).
  std::vector<double> point(std::size_t flat) const;
  /// Row-major coordinates of every grid point.
  std::vector<double> points() const;
  /// Tensor trapezoid-rule integral of a function tabulated on the grid.
  double integrate(std::span<const double> values) const;

  friend bool operator==(const EvaluationGrid&, const EvaluationGrid&) = default;

 private:
  std::vector<double> lo_;
  std::vector<double> hi_;
  std::size_t m_;
};

/// A kernel estimate tabulated on an evaluation grid.
class DensityEstimate {
 public:
  DensityEstimate(const Sample& sample, ProductKernel k, Bandwidth h, EvaluationGrid grid);

  const ProductKernel& kernel() const { return kernel_; }
  const Bandwidth& bandwidth() const { return h_; }
  const EvaluationGrid& grid() const { return grid_; }
  std::span<const double> values() const { return values_; }
  std::size_t sample_size() const { return n_; }

 private:
  ProductKernel kernel_;
  Bandwidth h_;
  EvaluationGrid grid_;
  std::size_t n_;
  std::vector<double> values_;
};

/// Grid approximation of ||a - b||^2 for estimates on the same grid.
double grid_l2_distance_sq(const DensityEstimate& a, const DensityEstimate& b);

/// f_h = K_h * f at each row of `points`.
std::vector<double> population_smoothing(const Density& f, const ProductKernel& k, const Bandwidth& h,
                                         std::span<const double> points);

}  // namespace pco
