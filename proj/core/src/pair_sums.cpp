#include "pco/pair_sums.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <stdexcept>

#include "pco/kahan.hpp"

namespace pco {

namespace {

constexpr double kInvSqrt2Pi = 0.3989422804014327;
// Pairs farther apart than this (in units of sqrt(2) sigma) contribute
// below exp(-42.25) each and are skipped.
constexpr double kWindow = 6.5;
constexpr std::size_t kHermiteTerms = 26;
// Relative costs of one exp-and-add versus one box/target Hermite evaluation.
constexpr double kDirectCost = 1.0;
constexpr double kFastCost = 5.5;
constexpr double kTranslateCost = 28.0;

double direct_sum_1d(std::span<const double> x, double sigma) {
  const std::size_t n = x.size();
  const double reach = kWindow * std::numbers::sqrt2 * sigma;
  const double c = -0.5 / (sigma * sigma);
  KahanSum total;
  std::size_t end = 0;
  for (std::size_t i = 0; i < n; ++i) {
    end = std::max(end, i + 1);
    while (end < n && x[end] - x[i] <= reach) ++end;
    KahanSum row;
    for (std::size_t j = i + 1; j < end; ++j) {
      const double d = x[j] - x[i];
      row.add(std::exp(c * d * d));
    }
    total.add(row.value());
  }
  return static_cast<double>(n) + 2.0 * total.value();
}

struct Box {
  double centre;
  std::array<double, kHermiteTerms> moments;
};

// Boxes of unit width in u = (x - x_0) / (sqrt(2) sigma); source offsets from
// the centre are at most 1/2, which bounds the Hermite tail term by
// 1.09 * 2^{-p/2} / sqrt(p!).
std::vector<Box> build_boxes(std::span<const double> u) {
  std::vector<Box> boxes;
  long current = std::numeric_limits<long>::min();
  for (double ui : u) {
    const long b = static_cast<long>(std::floor(ui));
    if (b != current) {
      current = b;
      boxes.push_back(Box{static_cast<double>(b) + 0.5, {}});
    }
    auto& box = boxes.back();
    const double s = ui - box.centre;
    double term = 1.0;
    for (std::size_t k = 0; k < kHermiteTerms; ++k) {
      box.moments[k] += term;
      term *= s / static_cast<double>(k + 1);
    }
  }
  return boxes;
}

// Taylor coefficients, about the centre of a target box, of the field of the
// source boxes within reach: B_m = (-1)^m / m! * sum_k A_k h_{k+m}(c_T - c_S).
std::array<double, kHermiteTerms> taylor_coefficients(double centre, const std::vector<Box>& boxes, std::size_t lo,
                                                      std::size_t hi) {
  std::array<double, kHermiteTerms> out{};
  std::array<double, 2 * kHermiteTerms - 1> h{};
  for (std::size_t b = lo; b < hi; ++b) {
    const double s0 = centre - boxes[b].centre;
    h[0] = std::exp(-s0 * s0);
    h[1] = 2.0 * s0 * h[0];
    for (std::size_t j = 1; j + 1 < h.size(); ++j) h[j + 1] = 2.0 * s0 * h[j] - 2.0 * static_cast<double>(j) * h[j - 1];
    const auto& a = boxes[b].moments;
    for (std::size_t m = 0; m < kHermiteTerms; ++m) {
      double acc = 0.0;
      for (std::size_t k = 0; k < kHermiteTerms; ++k) acc += a[k] * h[k + m];
      out[m] += acc;
    }
  }
  double factor = 1.0;
  for (std::size_t m = 0; m < kHermiteTerms; ++m) {
    out[m] *= factor;
    factor *= -1.0 / static_cast<double>(m + 1);
  }
  return out;
}

double hermite_field(double u, const std::vector<Box>& boxes, std::size_t lo, std::size_t hi) {
  double acc = 0.0;
  for (std::size_t b = lo; b < hi; ++b) {
    const double t = u - boxes[b].centre;
    const auto& a = boxes[b].moments;
    double h_prev = std::exp(-t * t);
    double h_cur = 2.0 * t * h_prev;
    double partial = a[0] * h_prev + a[1] * h_cur;
    for (std::size_t k = 1; k + 1 < kHermiteTerms; ++k) {
      const double h_next = 2.0 * t * h_cur - 2.0 * static_cast<double>(k) * h_prev;
      partial += a[k + 1] * h_next;
      h_prev = h_cur;
      h_cur = h_next;
    }
    acc += partial;
  }
  return acc;
}

// Targets are the sources themselves, grouped by box. Crowded target boxes
// translate the source expansions into one Taylor series; sparse ones
// evaluate every source expansion directly.
double fast_sum_1d(std::span<const double> x, double sigma) {
  const std::size_t n = x.size();
  const double scale = 1.0 / (std::numbers::sqrt2 * sigma);
  std::vector<double> u(n);
  for (std::size_t i = 0; i < n; ++i) u[i] = (x[i] - x[0]) * scale;
  const auto boxes = build_boxes(u);
  const double reach = kWindow + 0.5;
  KahanSum total;
  std::size_t lo = 0;
  std::size_t hi = 0;
  std::size_t i = 0;
  for (const auto& target : boxes) {
    std::size_t end = i;
    while (end < n && u[end] < target.centre + 0.5) ++end;
    while (lo < boxes.size() && boxes[lo].centre < target.centre - reach - 0.5) ++lo;
    hi = std::max(hi, lo);
    while (hi < boxes.size() && boxes[hi].centre <= target.centre + reach + 0.5) ++hi;
    if (end - i > kHermiteTerms) {
      const auto coef = taylor_coefficients(target.centre, boxes, lo, hi);
      for (; i < end; ++i) {
        const double tau = u[i] - target.centre;
        double v = coef[kHermiteTerms - 1];
        for (std::size_t m = kHermiteTerms - 1; m-- > 0;) v = v * tau + coef[m];
        total.add(v);
      }
    } else {
      for (; i < end; ++i) total.add(hermite_field(u[i], boxes, lo, hi));
    }
  }
  return total.value();
}

// Estimated work of the two strategies, counted in exp-evaluations.
bool prefer_fast(std::span<const double> x, double sigma) {
  const std::size_t n = x.size();
  if (n < 64) return false;
  const double reach = kWindow * std::numbers::sqrt2 * sigma;
  double direct = 0.0;
  std::size_t end = 0;
  for (std::size_t i = 0; i < n; ++i) {
    end = std::max(end, i + 1);
    while (end < n && x[end] - x[i] <= reach) ++end;
    direct += static_cast<double>(end - i - 1);
  }
  // Mirror fast_sum_1d: per target box, either one translation per source
  // box in reach (about kTranslateCost expansion evaluations each) plus one
  // Taylor series per target, or one expansion per source box per target.
  const double box_width = std::numbers::sqrt2 * sigma;
  std::vector<double> centres;
  std::vector<std::size_t> counts;
  long current = std::numeric_limits<long>::min();
  for (double xi : x) {
    const long b = static_cast<long>(std::floor((xi - x[0]) / box_width));
    if (b != current) {
      current = b;
      centres.push_back(static_cast<double>(b) + 0.5);
      counts.push_back(0);
    }
    ++counts.back();
  }
  const double box_reach = kWindow + 1.0;
  double fast = static_cast<double>(n) * 2.0;
  std::size_t lo = 0;
  std::size_t hi = 0;
  for (std::size_t c = 0; c < centres.size(); ++c) {
    while (lo < centres.size() && centres[lo] < centres[c] - box_reach) ++lo;
    hi = std::max(hi, lo);
    while (hi < centres.size() && centres[hi] <= centres[c] + box_reach) ++hi;
    const auto sources = static_cast<double>(hi - lo);
    const auto targets = static_cast<double>(counts[c]);
    fast += counts[c] > kHermiteTerms ? sources * kTranslateCost + targets : targets * sources;
  }
  return fast * kFastCost < direct * kDirectCost;
}

}  // namespace

// ---- AxisProfile ---------------------------------------------------------------

AxisProfile AxisProfile::gaussian_mixture(std::vector<GaussianTerm> terms) {
  if (terms.empty()) throw std::invalid_argument("AxisProfile: empty Gaussian mixture");
  for (const auto& t : terms)
    if (!(t.sigma > 0.0)) throw std::invalid_argument("AxisProfile: sigma must be positive");
  AxisProfile p;
  p.terms_ = std::move(terms);
  p.support_ = std::numeric_limits<double>::infinity();
  return p;
}

AxisProfile AxisProfile::compact(std::function<double(double)> f, double support) {
  if (!f || !(support > 0.0) || !std::isfinite(support))
    throw std::invalid_argument("AxisProfile: compact profile needs a function and finite support");
  AxisProfile p;
  p.f_ = std::move(f);
  p.support_ = support;
  return p;
}

double AxisProfile::operator()(double t) const {
  if (!is_gaussian()) return std::abs(t) < support_ ? f_(t) : 0.0;
  double v = 0.0;
  for (const auto& term : terms_) {
    const double z = t / term.sigma;
    v += term.weight * kInvSqrt2Pi / term.sigma * std::exp(-0.5 * z * z);
  }
  return v;
}

AxisProfile convolution_profile(const Kernel& k, double a, double b) {
  if (k.family() == KernelFamily::gaussian) {
    // Merge component pairs that share a width.
    std::map<double, double> by_sigma;
    for (const auto& cp : k.components())
      for (const auto& cq : k.components()) {
        const double sa = a * cp.scale;
        const double sb = b * cq.scale;
        by_sigma[std::sqrt(sa * sa + sb * sb)] += cp.weight * cq.weight;
      }
    std::vector<GaussianTerm> terms;
    for (const auto& [sigma, weight] : by_sigma) terms.push_back({weight, sigma});
    return AxisProfile::gaussian_mixture(std::move(terms));
  }
  return AxisProfile::compact([k, a, b](double t) { return axis_convolution(k, a, b, t); },
                              (a + b) * k.support_radius());
}

AxisProfile scaled_kernel_profile(const Kernel& k, double h) {
  if (k.family() == KernelFamily::gaussian) {
    std::vector<GaussianTerm> terms;
    for (const auto& c : k.components()) terms.push_back({c.weight, h * c.scale});
    return AxisProfile::gaussian_mixture(std::move(terms));
  }
  return AxisProfile::compact([k, h](double t) { return k(t / h) / h; }, h * k.support_radius());
}

// ---- 1-D Gaussian sums -----------------------------------------------------------

double gaussian_exp_sum_1d(std::span<const double> sorted, double sigma, GaussSumMethod method) {
  if (!(sigma > 0.0)) throw std::invalid_argument("gaussian_exp_sum_1d: sigma must be positive");
  if (sorted.empty()) return 0.0;
  bool fast = method == GaussSumMethod::fast;
  if (method == GaussSumMethod::automatic) fast = prefer_fast(sorted, sigma);
  return fast ? fast_sum_1d(sorted, sigma) : direct_sum_1d(sorted, sigma);
}

// ---- PairSummer -------------------------------------------------------------------

PairSummer::PairSummer(const Sample& sample) : n_(sample.size()), d_(sample.dim()) {
  std::vector<std::size_t> order(n_);
  for (std::size_t i = 0; i < n_; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const auto pa = sample.point(a);
    const auto pb = sample.point(b);
    return std::lexicographical_compare(pa.begin(), pa.end(), pb.begin(), pb.end());
  });
  sorted_.reserve(n_ * d_);
  first_.reserve(n_);
  for (std::size_t i : order) {
    const auto p = sample.point(i);
    sorted_.insert(sorted_.end(), p.begin(), p.end());
    first_.push_back(p[0]);
  }
}

double PairSummer::gaussian_exp_sum(std::span<const double> sigmas, GaussSumMethod method) const {
  if (sigmas.size() != d_) throw std::invalid_argument("gaussian_exp_sum: dimension mismatch");
  if (d_ == 1) return gaussian_exp_sum_1d(first_, sigmas[0], method);

  std::vector<double> coef(d_);
  for (std::size_t k = 0; k < d_; ++k) coef[k] = -0.5 / (sigmas[k] * sigmas[k]);
  const double reach = kWindow * std::numbers::sqrt2 * sigmas[0];
  KahanSum total;
  std::size_t end = 0;
  for (std::size_t i = 0; i < n_; ++i) {
    end = std::max(end, i + 1);
    while (end < n_ && first_[end] - first_[i] <= reach) ++end;
    const double* xi = sorted_.data() + i * d_;
    KahanSum row;
    for (std::size_t j = i + 1; j < end; ++j) {
      const double* xj = sorted_.data() + j * d_;
      double arg = 0.0;
      for (std::size_t k = 0; k < d_; ++k) {
        const double diff = xj[k] - xi[k];
        arg += coef[k] * diff * diff;
      }
      row.add(std::exp(arg));
    }
    total.add(row.value());
  }
  return static_cast<double>(n_) + 2.0 * total.value();
}

double PairSummer::compact_sum(std::span<const AxisProfile> axes) const {
  const double reach = axes[0].support();
  double diagonal = 1.0;
  for (const auto& a : axes) diagonal *= a(0.0);
  KahanSum total;
  std::size_t end = 0;
  for (std::size_t i = 0; i < n_; ++i) {
    end = std::max(end, i + 1);
    while (end < n_ && first_[end] - first_[i] < reach) ++end;
    const double* xi = sorted_.data() + i * d_;
    KahanSum row;
    for (std::size_t j = i + 1; j < end; ++j) {
      const double* xj = sorted_.data() + j * d_;
      double v = 1.0;
      for (std::size_t k = 0; k < d_ && v != 0.0; ++k) v *= axes[k](xj[k] - xi[k]);
      row.add(v);
    }
    total.add(row.value());
  }
  return static_cast<double>(n_) * diagonal + 2.0 * total.value();
}

double PairSummer::sum(std::span<const AxisProfile> axes) const {
  if (axes.size() != d_) throw std::invalid_argument("PairSummer::sum: one profile per axis required");
  const bool gaussian = axes[0].is_gaussian();
  for (const auto& a : axes)
    if (a.is_gaussian() != gaussian)
      throw std::invalid_argument("PairSummer::sum: cannot mix Gaussian and compact profiles");
  if (!gaussian) return compact_sum(axes);

  // Expand the product of per-axis mixtures into Gaussian products and merge
  // combinations that share every width.
  std::map<std::vector<double>, double> combos;
  std::vector<double> sigmas(d_);
  auto expand = [&](auto&& self, std::size_t axis, double weight) -> void {
    if (axis == d_) {
      combos[sigmas] += weight;
      return;
    }
    for (const auto& term : axes[axis].terms()) {
      sigmas[axis] = term.sigma;
      self(self, axis + 1, weight * term.weight * kInvSqrt2Pi / term.sigma);
    }
  };
  expand(expand, 0, 1.0);
  KahanSum total;
  for (const auto& [s, weight] : combos)
    if (weight != 0.0) total.add(weight * gaussian_exp_sum(s));
  return total.value();
}

double convolution_pair_sum(const PairSummer& pairs, const ProductKernel& k, const Bandwidth& a,
                            const Bandwidth& b) {
  if (a.dim() != k.dim() || b.dim() != k.dim() || pairs.dim() != k.dim())
    throw std::invalid_argument("convolution_pair_sum: dimension mismatch");
  std::vector<AxisProfile> axes;
  axes.reserve(k.dim());
  for (std::size_t j = 0; j < k.dim(); ++j) axes.push_back(convolution_profile(k.axis(), a[j], b[j]));
  return pairs.sum(axes);
}

double kernel_pair_sum(const PairSummer& pairs, const ProductKernel& k, const Bandwidth& h) {
  if (h.dim() != k.dim() || pairs.dim() != k.dim())
    throw std::invalid_argument("kernel_pair_sum: dimension mismatch");
  std::vector<AxisProfile> axes;
  axes.reserve(k.dim());
  for (std::size_t j = 0; j < k.dim(); ++j) axes.push_back(scaled_kernel_profile(k.axis(), h[j]));
  return pairs.sum(axes);
}

}  // namespace pco
