#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace pco {

/// n observations in R^d, stored row-major in input order.
class Sample {
 public:
  /// Throws std::invalid_argument unless n >= 1, d >= 1 and every value is finite.
  Sample(std::vector<double> row_major, std::size_t dim);

  static Sample univariate(std::vector<double> values);
  static Sample from_rows(const std::vector<std::vector<double>>& rows);

  std::size_t size() const { return values_.size() / dim_; }
  std::size_t dim() const { return dim_; }
  std::span<const double> point(std::size_t i) const { return {values_.data() + i * dim_, dim_}; }
  std::span<const double> data() const { return values_; }

  double min(std::size_t axis) const;
  double max(std::size_t axis) const;

  /// Concatenation of two samples of equal dimension.
  friend Sample concat(const Sample& a, const Sample& b);

 private:
  std::vector<double> values_;
  std::size_t dim_;
};

}  // namespace pco
