#include "pco/sample.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace pco {

Sample::Sample(std::vector<double> row_major, std::size_t dim) : values_(std::move(row_major)), dim_(dim) {
  if (dim_ == 0) throw std::invalid_argument("Sample: dimension must be >= 1");
  if (values_.empty()) throw std::invalid_argument("Sample: at least one observation required");
  if (values_.size() % dim_ != 0) throw std::invalid_argument("Sample: value count not a multiple of dimension");
  for (double v : values_)
    if (!std::isfinite(v)) throw std::invalid_argument("Sample: non-finite value");
}

Sample Sample::univariate(std::vector<double> values) { return Sample(std::move(values), 1); }

Sample Sample::from_rows(const std::vector<std::vector<double>>& rows) {
  if (rows.empty()) throw std::invalid_argument("Sample: at least one observation required");
  const std::size_t d = rows.front().size();
  std::vector<double> flat;
  flat.reserve(rows.size() * d);
  for (const auto& r : rows) {
    if (r.size() != d) throw std::invalid_argument("Sample: ragged rows");
    flat.insert(flat.end(), r.begin(), r.end());
  }
  return Sample(std::move(flat), d);
}

double Sample::min(std::size_t axis) const {
  if (axis >= dim_) throw std::out_of_range("Sample::min: axis out of range");
  double m = values_[axis];
  for (std::size_t i = 1; i < size(); ++i) m = std::min(m, values_[i * dim_ + axis]);
  return m;
}

double Sample::max(std::size_t axis) const {
  if (axis >= dim_) throw std::out_of_range("Sample::max: axis out of range");
  double m = values_[axis];
  for (std::size_t i = 1; i < size(); ++i) m = std::max(m, values_[i * dim_ + axis]);
  return m;
}

Sample concat(const Sample& a, const Sample& b) {
  if (a.dim() != b.dim()) throw std::invalid_argument("concat: dimension mismatch");
  std::vector<double> v(a.values_);
  v.insert(v.end(), b.values_.begin(), b.values_.end());
  return Sample(std::move(v), a.dim());
}

}  // namespace pco
