#include "pco/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <charconv>
#include <limits>
#include <numbers>
#include <stdexcept>

#include <boost/math/special_functions/binomial.hpp>
#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/roots.hpp>

#include "pco/quadrature.hpp"

namespace pco {

namespace {

constexpr double kInvSqrt2Pi = 0.3989422804014327;  // 1/sqrt(2 pi)
constexpr double kGaussianTruncation = 12.0;

double gaussian_density(double t, double sigma) {
  const double z = t / sigma;
  return kInvSqrt2Pi / sigma * std::exp(-0.5 * z * z);
}

double epanechnikov_scaled(double x, double p) {
  const double u = x / p;
  return std::abs(u) < 1.0 ? 0.75 * (1.0 - u * u) / p : 0.0;
}

// Integral of E_p(x) E_q(x - t): the integrand is a degree-4 polynomial on
// the overlap of the two supports, so 3-point Gauss-Legendre is exact.
double epanechnikov_convolution(double p, double q, double t) {
  t = std::abs(t);
  const double lo = std::max(-p, t - q);
  const double hi = std::min(p, t + q);
  if (!(hi > lo)) return 0.0;
  static constexpr double kNode = 0.7745966692414834;  // sqrt(3/5)
  static constexpr double kOuter = 5.0 / 9.0;
  static constexpr double kCentre = 8.0 / 9.0;
  const double mid = 0.5 * (lo + hi);
  const double half = 0.5 * (hi - lo);
  auto f = [&](double x) {
    const double u = x / p;
    const double v = (x - t) / q;
    return (1.0 - u * u) * (1.0 - v * v);
  };
  const double sum = kOuter * (f(mid - half * kNode) + f(mid + half * kNode)) + kCentre * f(mid);
  return 0.5625 / (p * q) * sum * half;
}

double base_convolution(KernelFamily family, double p, double q, double t) {
  if (family == KernelFamily::gaussian) return gaussian_density(t, std::sqrt(p * p + q * q));
  return epanechnikov_convolution(p, q, t);
}

void check_positive(double h, const char* what) {
  if (!(h > 0.0) || !std::isfinite(h))
    throw std::invalid_argument(std::string(what) + ": bandwidth components must be positive and finite");
}

void check_dims(const ProductKernel& k, const Bandwidth& h, const char* what) {
  if (h.dim() != k.dim())
    throw std::invalid_argument(std::string(what) + ": bandwidth dimension " + std::to_string(h.dim()) +
                                " does not match kernel dimension " + std::to_string(k.dim()));
}

}  // namespace

// ---- Bandwidth ---------------------------------------------------------------

Bandwidth::Bandwidth(double h) : h_{h} { check_positive(h, "Bandwidth"); }

Bandwidth::Bandwidth(std::vector<double> components) : h_(std::move(components)) {
  if (h_.empty()) throw std::invalid_argument("Bandwidth: at least one component required");
  for (double h : h_) check_positive(h, "Bandwidth");
}

double Bandwidth::volume() const {
  double v = 1.0;
  for (double h : h_) v *= h;
  return v;
}

bool Bandwidth::coordinatewise_le(const Bandwidth& other) const {
  if (other.dim() != dim()) throw std::invalid_argument("Bandwidth: dimension mismatch");
  for (std::size_t j = 0; j < dim(); ++j)
    if (h_[j] > other.h_[j]) return false;
  return true;
}

Bandwidth coordinatewise_max(const Bandwidth& a, const Bandwidth& b) {
  if (a.dim() != b.dim()) throw std::invalid_argument("coordinatewise_max: dimension mismatch");
  std::vector<double> out(a.dim());
  for (std::size_t j = 0; j < a.dim(); ++j) out[j] = std::max(a[j], b[j]);
  return Bandwidth(std::move(out));
}

// ---- Kernel ------------------------------------------------------------------

Kernel::Kernel(KernelFamily family, int order, std::vector<KernelComponent> components)
    : family_(family), order_(order), components_(std::move(components)) {
  l2sq_ = axis_convolution(*this, 1.0, 1.0, 0.0);
  if (components_.size() == 1) {
    l1_ = 1.0;
    sup_ = family_ == KernelFamily::gaussian ? kInvSqrt2Pi : 0.75;
    return;
  }

  // Signed combination: locate sign changes on [0, R] so |K| is integrated
  // panel by panel, then maximise |K| from a scan refined by Brent.
  const double radius = effective_radius();
  const auto& self = *this;
  constexpr int kScan = 8000;
  std::vector<double> breaks = kinks(1.0);
  double best_u = 0.0;
  double best = std::abs(self(0.0));
  double prev_u = 0.0;
  double prev = self(0.0);
  for (int i = 1; i <= kScan; ++i) {
    const double u = radius * i / kScan;
    const double val = self(u);
    if (std::abs(val) > best) {
      best = std::abs(val);
      best_u = u;
    }
    if ((prev < 0.0) != (val < 0.0) && prev != 0.0 && val != 0.0) {
      boost::uintmax_t iters = 200;
      auto tol = boost::math::tools::eps_tolerance<double>(52);
      auto root = boost::math::tools::toms748_solve(
          [&](double x) { return self(x); }, prev_u, u, prev, val, tol, iters);
      const double r = 0.5 * (root.first + root.second);
      breaks.push_back(r);
      breaks.push_back(-r);
    }
    prev_u = u;
    prev = val;
  }
  l1_ = quad::integrate([&](double u) { return std::abs(self(u)); }, -radius, radius, breaks,
                        quad::Options{1e-13, 1e-16, 40});
  const double step = radius / kScan;
  const double lo = std::max(0.0, best_u - step);
  const double hi = std::min(radius, best_u + step);
  auto refined = boost::math::tools::brent_find_minima([&](double u) { return -std::abs(self(u)); },
                                                       lo, hi, 52);
  sup_ = std::max(best, -refined.second);
}

Kernel Kernel::gaussian() { return Kernel(KernelFamily::gaussian, 2, {{1.0, 1.0}}); }

Kernel Kernel::epanechnikov() { return Kernel(KernelFamily::epanechnikov, 2, {{1.0, 1.0}}); }

Kernel Kernel::parse(std::string_view id) {
  if (id == "gaussian") return gaussian();
  if (id == "epanechnikov") return epanechnikov();
  constexpr std::string_view prefix = "order:";
  if (id.starts_with(prefix)) {
    const auto rest = id.substr(prefix.size());
    const auto colon = rest.find(':');
    if (colon != std::string_view::npos) {
      int l = 0;
      const auto digits = rest.substr(0, colon);
      const auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), l);
      if (ec == std::errc() && ptr == digits.data() + digits.size())
        return build_order_l_kernel(parse(rest.substr(colon + 1)), l);
    }
  }
  throw std::invalid_argument("unknown kernel id '" + std::string(id) +
                              "' (expected gaussian, epanechnikov or order:<l>:<base>)");
}

std::string Kernel::id() const {
  const std::string base = family_ == KernelFamily::gaussian ? "gaussian" : "epanechnikov";
  if (components_.size() == 1) return base;
  return "order:" + std::to_string(order_) + ":" + base;
}

double Kernel::operator()(double u) const {
  double sum = 0.0;
  for (const auto& c : components_) {
    const double s = c.scale;
    sum += c.weight * (family_ == KernelFamily::gaussian ? gaussian_density(u, s)
                                                         : epanechnikov_scaled(u, s));
  }
  return sum;
}

double Kernel::max_scale() const {
  double s = 0.0;
  for (const auto& c : components_) s = std::max(s, c.scale);
  return s;
}

double Kernel::support_radius() const {
  return family_ == KernelFamily::gaussian ? std::numeric_limits<double>::infinity() : max_scale();
}

double Kernel::effective_radius() const {
  return family_ == KernelFamily::gaussian ? kGaussianTruncation * max_scale() : max_scale();
}

std::vector<double> Kernel::kinks(double h) const {
  std::vector<double> out;
  if (family_ == KernelFamily::gaussian) return out;
  for (const auto& c : components_) {
    out.push_back(-h * c.scale);
    out.push_back(h * c.scale);
  }
  return out;
}

Kernel build_order_l_kernel(const Kernel& base, int l) {
  if (l < 2) throw std::invalid_argument("build_order_l_kernel: order must be >= 2");
  if (base.components().size() != 1)
    throw std::invalid_argument("build_order_l_kernel: base must be a plain gaussian or epanechnikov kernel");
  // Odd moments vanish by symmetry; the even moments k <= l-1 vanish once
  // m exceeds the largest of them, since sum_i C(m,i)(-1)^i i^k = 0 for k < m.
  const int largest_even = ((l - 1) / 2) * 2;
  const int m = largest_even + 1;
  std::vector<KernelComponent> comps;
  for (int i = 1; i <= m; ++i) {
    const double sign = (i % 2 == 1) ? 1.0 : -1.0;
    comps.push_back({sign * boost::math::binomial_coefficient<double>(m, i), static_cast<double>(i)});
  }
  return Kernel(base.family(), l, std::move(comps));
}

// ---- ProductKernel -------------------------------------------------------------

ProductKernel::ProductKernel(Kernel axis, std::size_t dim) : axis_(std::move(axis)), dim_(dim) {
  if (dim_ == 0) throw std::invalid_argument("ProductKernel: dimension must be >= 1");
}

double ProductKernel::operator()(std::span<const double> u) const {
  if (u.size() != dim_) throw std::invalid_argument("ProductKernel: point dimension mismatch");
  double v = 1.0;
  for (double x : u) v *= axis_(x);
  return v;
}

double ProductKernel::scaled(std::span<const double> x, const Bandwidth& h) const {
  double v = 1.0;
  for (std::size_t j = 0; j < dim_; ++j) v *= axis_(x[j] / h[j]) / h[j];
  return v;
}

double ProductKernel::l1_norm() const { return std::pow(axis_.l1_norm(), static_cast<double>(dim_)); }
double ProductKernel::sup_norm() const { return std::pow(axis_.sup_norm(), static_cast<double>(dim_)); }
double ProductKernel::l2_norm_sq() const { return std::pow(axis_.l2_norm_sq(), static_cast<double>(dim_)); }

// ---- norms and inner products ----------------------------------------------------

double axis_convolution(const Kernel& k, double a, double b, double t) {
  // C(a, b, t) = C(b, a, t) for symmetric kernels; fix the order so the
  // floating-point result is symmetric too.
  if (a > b) std::swap(a, b);
  double sum = 0.0;
  for (const auto& cp : k.components())
    for (const auto& cq : k.components())
      sum += cp.weight * cq.weight * base_convolution(k.family(), a * cp.scale, b * cq.scale, t);
  return sum;
}

double kernel_l2_norm_scaled(const ProductKernel& k, const Bandwidth& h) {
  check_dims(k, h, "kernel_l2_norm_scaled");
  return k.l2_norm_sq() / h.volume();
}

double cross_inner(const ProductKernel& k, const Bandwidth& h, const Bandwidth& h2) {
  check_dims(k, h, "cross_inner");
  check_dims(k, h2, "cross_inner");
  if (h == h2) return kernel_l2_norm_scaled(k, h);
  double v = 1.0;
  for (std::size_t j = 0; j < k.dim(); ++j) v *= axis_convolution(k.axis(), h[j], h2[j], 0.0);
  return v;
}

double diff_l2_norm(const ProductKernel& k, const Bandwidth& h, const Bandwidth& hmin) {
  check_dims(k, h, "diff_l2_norm");
  check_dims(k, hmin, "diff_l2_norm");
  if (h == hmin) return 0.0;
  return kernel_l2_norm_scaled(k, hmin) + kernel_l2_norm_scaled(k, h) - 2.0 * cross_inner(k, h, hmin);
}

// ---- PairInteraction --------------------------------------------------------------

PairInteraction::PairInteraction(const ProductKernel& k, const Bandwidth& h, const Bandwidth& hmin)
    : kernel_(k), h_(h), hmin_(hmin) {
  check_dims(k, h, "pair_interaction");
  check_dims(k, hmin, "pair_interaction");
}

double PairInteraction::product(std::size_t which, std::span<const double> t) const {
  double v = 1.0;
  for (std::size_t j = 0; j < kernel_.dim(); ++j) {
    const double a = which == 2 ? hmin_[j] : h_[j];
    const double b = which == 0 ? h_[j] : hmin_[j];
    v *= axis_convolution(kernel_.axis(), a, b, t[j]);
  }
  return v;
}

double PairInteraction::operator()(std::span<const double> t) const {
  if (t.size() != kernel_.dim()) throw std::invalid_argument("pair_interaction: point dimension mismatch");
  if (h_ == hmin_) return 0.0;
  return product(0, t) - 2.0 * product(1, t) + product(2, t);
}

double pair_interaction(const ProductKernel& k, const Bandwidth& h, const Bandwidth& hmin,
                        std::span<const double> t) {
  return PairInteraction(k, h, hmin)(t);
}

}  // namespace pco
