#include "pco/kde.hpp"

#include <stdexcept>

#include "pco/kahan.hpp"

namespace pco {

namespace {

void check_dims(const Sample& sample, const ProductKernel& k, const Bandwidth& h) {
  if (k.dim() != sample.dim() || h.dim() != sample.dim())
    throw std::invalid_argument("kernel estimate: sample, kernel and bandwidth dimensions differ");
}

}  // namespace

double evaluate_at(const Sample& sample, const ProductKernel& k, const Bandwidth& h, std::span<const double> x) {
  check_dims(sample, k, h);
  if (x.size() != sample.dim()) throw std::invalid_argument("evaluate: point dimension mismatch");
  const std::size_t d = sample.dim();
  std::vector<double> diff(d);
  KahanSum acc;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const auto xi = sample.point(i);
    for (std::size_t j = 0; j < d; ++j) diff[j] = x[j] - xi[j];
    acc.add(k.scaled(diff, h));
  }
  return acc.value() / static_cast<double>(sample.size());
}

std::vector<double> evaluate(const Sample& sample, const ProductKernel& k, const Bandwidth& h,
                             std::span<const double> points) {
  const std::size_t d = sample.dim();
  if (points.size() % d != 0) throw std::invalid_argument("evaluate: point buffer not a multiple of dimension");
  std::vector<double> out(points.size() / d);
  for (std::size_t p = 0; p < out.size(); ++p) out[p] = evaluate_at(sample, k, h, points.subspan(p * d, d));
  return out;
}

EvaluationGrid::EvaluationGrid(std::vector<double> lo, std::vector<double> hi, std::size_t points_per_axis)
    : lo_(std::move(lo)), hi_(std::move(hi)), m_(points_per_axis) {
  if (lo_.empty() || lo_.size() != hi_.size()) throw std::invalid_argument("EvaluationGrid: bad bounds");
  if (m_ < 2) throw std::invalid_argument("EvaluationGrid: need at least 2 points per axis");
  for (std::size_t k = 0; k < lo_.size(); ++k)
    if (!(hi_[k] > lo_[k])) throw std::invalid_argument("EvaluationGrid: need lo < hi on every axis");
}

EvaluationGrid EvaluationGrid::covering(const Sample& sample, double reach, std::size_t points_per_axis) {
  std::vector<double> lo(sample.dim());
  std::vector<double> hi(sample.dim());
  for (std::size_t k = 0; k < sample.dim(); ++k) {
    lo[k] = sample.min(k) - reach;
    hi[k] = sample.max(k) + reach;
  }
  return EvaluationGrid(std::move(lo), std::move(hi), points_per_axis);
}

std::size_t EvaluationGrid::size() const {
  std::size_t s = 1;
  for (std::size_t k = 0; k < dim(); ++k) s *= m_;
  return s;
}

double EvaluationGrid::coordinate(std::size_t axis, std::size_t index) const {
  if (index + 1 == m_) return hi_[axis];
  return lo_[axis] + spacing(axis) * static_cast<double>(index);
}

std::vector<double> EvaluationGrid::point(std::size_t flat) const {
  std::vector<double> x(dim());
  for (std::size_t k = dim(); k-- > 0;) {
    x[k] = coordinate(k, flat % m_);
    flat /= m_;
  }
  return x;
}

std::vector<double> EvaluationGrid::points() const {
  std::vector<double> out;
  out.reserve(size() * dim());
  for (std::size_t p = 0; p < size(); ++p) {
    const auto x = point(p);
    out.insert(out.end(), x.begin(), x.end());
  }
  return out;
}

double EvaluationGrid::integrate(std::span<const double> values) const {
  if (values.size() != size()) throw std::invalid_argument("EvaluationGrid::integrate: value count mismatch");
  double cell = 1.0;
  for (std::size_t k = 0; k < dim(); ++k) cell *= spacing(k);
  KahanSum acc;
  for (std::size_t p = 0; p < values.size(); ++p) {
    double w = 1.0;
    std::size_t flat = p;
    for (std::size_t k = 0; k < dim(); ++k) {
      const std::size_t idx = flat % m_;
      flat /= m_;
      if (idx == 0 || idx + 1 == m_) w *= 0.5;
    }
    acc.add(w * values[p]);
  }
  return acc.value() * cell;
}

DensityEstimate::DensityEstimate(const Sample& sample, ProductKernel k, Bandwidth h, EvaluationGrid grid)
    : kernel_(std::move(k)), h_(std::move(h)), grid_(std::move(grid)), n_(sample.size()) {
  check_dims(sample, kernel_, h_);
  if (grid_.dim() != sample.dim()) throw std::invalid_argument("DensityEstimate: grid dimension mismatch");
  const std::size_t d = sample.dim();
  const std::size_t m = grid_.points_per_axis();
  // Per-axis factor tables K_{h_k}(g - X_ik); the product kernel factorises.
  std::vector<std::vector<double>> factor(d, std::vector<double>(sample.size() * m));
  for (std::size_t k = 0; k < d; ++k)
    for (std::size_t i = 0; i < sample.size(); ++i)
      for (std::size_t g = 0; g < m; ++g)
        factor[k][i * m + g] = kernel_.axis()((grid_.coordinate(k, g) - sample.point(i)[k]) / h_[k]) / h_[k];

  // Rows run over the leading d-1 axes; the last axis is contiguous.
  const std::size_t total = grid_.size();
  const std::size_t rows = total / m;
  std::vector<KahanSum> acc(total);
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const double* last = factor[d - 1].data() + i * m;
    for (std::size_t r = 0; r < rows; ++r) {
      std::size_t flat = r;
      double prefix = 1.0;
      for (std::size_t k = d - 1; k-- > 0;) {
        prefix *= factor[k][i * m + flat % m];
        flat /= m;
      }
      if (prefix == 0.0) continue;
      KahanSum* row = acc.data() + r * m;
      for (std::size_t g = 0; g < m; ++g) row[g].add(prefix * last[g]);
    }
  }
  values_.resize(total);
  const double inv_n = 1.0 / static_cast<double>(sample.size());
  for (std::size_t p = 0; p < total; ++p) values_[p] = acc[p].value() * inv_n;
}

double grid_l2_distance_sq(const DensityEstimate& a, const DensityEstimate& b) {
  if (!(a.grid() == b.grid())) throw std::invalid_argument("grid_l2_distance_sq: estimates on different grids");
  std::vector<double> sq(a.values().size());
  for (std::size_t p = 0; p < sq.size(); ++p) {
    const double diff = a.values()[p] - b.values()[p];
    sq[p] = diff * diff;
  }
  return a.grid().integrate(sq);
}

std::vector<double> population_smoothing(const Density& f, const ProductKernel& k, const Bandwidth& h,
                                         std::span<const double> points) {
  const std::size_t d = f.dim();
  if (points.size() % d != 0) throw std::invalid_argument("population_smoothing: point buffer mismatch");
  std::vector<double> out(points.size() / d);
  for (std::size_t p = 0; p < out.size(); ++p) out[p] = f.smoothed(k, h, points.subspan(p * d, d));
  return out;
}

}  // namespace pco
