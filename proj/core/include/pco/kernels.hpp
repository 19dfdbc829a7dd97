#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace pco {

/// Positive per-axis smoothing scales h_1..h_d.
class Bandwidth {
 public:
  explicit Bandwidth(double h);
  explicit Bandwidth(std::vector<double> components);

  std::size_t dim() const { return h_.size(); }
  double operator[](std::size_t j) const { return h_[j]; }
  std::span<const double> components() const { return h_; }
  /// Product of the components.
  double volume() const;
  bool coordinatewise_le(const Bandwidth& other) const;

  friend bool operator==(const Bandwidth&, const Bandwidth&) = default;

 private:
  std::vector<double> h_;
};

/// Coordinatewise maximum h v h'.
Bandwidth coordinatewise_max(const Bandwidth& a, const Bandwidth& b);

enum class KernelFamily { gaussian, epanechnikov };

/// One rescaled copy of the base kernel: weight * B(u / scale) / scale.
struct KernelComponent {
  double weight;
  double scale;
};

/// Symmetric univariate kernel, written as a finite signed combination of
/// rescaled copies of a base family. Plain Gaussian and Epanechnikov kernels
/// have a single unit component; higher-order kernels built by
/// build_order_l_kernel have several.
class Kernel {
 public:
  static Kernel gaussian();
  static Kernel epanechnikov();
  /// Accepts "gaussian", "epanechnikov" and "order:<l>:<base>".
  static Kernel parse(std::string_view id);

  KernelFamily family() const { return family_; }
  /// Moments 1..order-1 vanish.
  int order() const { return order_; }
  std::span<const KernelComponent> components() const { return components_; }
  std::string id() const;

  double operator()(double u) const;

  double l1_norm() const { return l1_; }
  double sup_norm() const { return sup_; }
  /// Squared L2 norm.
  double l2_norm_sq() const { return l2sq_; }

  /// K vanishes outside [-radius, radius]; infinite for Gaussian kernels.
  double support_radius() const;
  /// Truncation radius for integrals over the real line.
  double effective_radius() const;
  /// Points where K_h fails to be smooth (empty for Gaussian kernels).
  std::vector<double> kinks(double h) const;
  double max_scale() const;
  bool nonnegative() const { return components_.size() == 1; }

 private:
  friend Kernel build_order_l_kernel(const Kernel& base, int l);
  Kernel(KernelFamily family, int order, std::vector<KernelComponent> components);

  KernelFamily family_;
  int order_;
  std::vector<KernelComponent> components_;
  double l1_ = 0.0;
  double sup_ = 0.0;
  double l2sq_ = 0.0;
};

/// Kernel with vanishing moments of orders 1..l-1 built from a plain
/// Gaussian or Epanechnikov base as sum_i C(m,i) (-1)^{i+1} K(u/i)/i.
/// Throws std::invalid_argument for l < 2 or a non-plain base.
Kernel build_order_l_kernel(const Kernel& base, int l);

/// d-variate product kernel K(u_1)...K(u_d) with one shared axis factor.
class ProductKernel {
 public:
  explicit ProductKernel(Kernel axis, std::size_t dim = 1);

  const Kernel& axis() const { return axis_; }
  std::size_t dim() const { return dim_; }

  double operator()(std::span<const double> u) const;
  /// K_h(x) = K(x_1/h_1, ..., x_d/h_d) / (h_1...h_d).
  double scaled(std::span<const double> x, const Bandwidth& h) const;

  double l1_norm() const;
  double sup_norm() const;
  double l2_norm_sq() const;

 private:
  Kernel axis_;
  std::size_t dim_;
};

/// Exact 1-D cross-convolution C(a, b, t) = integral of K_a(x) K_b(x - t) dx.
/// Closed form for Gaussian kernels; Gauss-Legendre on each overlap panel
/// (exact for the piecewise polynomials) for Epanechnikov kernels.
double axis_convolution(const Kernel& k, double a, double b, double t);

/// ||K_h||^2 = ||K||^2 / (h_1...h_d).
double kernel_l2_norm_scaled(const ProductKernel& k, const Bandwidth& h);
/// <K_h, K_h2>; symmetric, and equal to kernel_l2_norm_scaled when h == h2.
double cross_inner(const ProductKernel& k, const Bandwidth& h, const Bandwidth& h2);
/// ||K_hmin - K_h||^2.
double diff_l2_norm(const ProductKernel& k, const Bandwidth& h, const Bandwidth& hmin);

/// G(t) = C(h,h,t) - 2 C(h,hmin,t) + C(hmin,hmin,t) with per-axis products.
/// Summed over all observation pairs it gives n^2 ||fhat_h - fhat_hmin||^2.
class PairInteraction {
 public:
  PairInteraction(const ProductKernel& k, const Bandwidth& h, const Bandwidth& hmin);

  double operator()(std::span<const double> t) const;

 private:
  double product(std::size_t which, std::span<const double> t) const;

  ProductKernel kernel_;
  Bandwidth h_;
  Bandwidth hmin_;
};

double pair_interaction(const ProductKernel& k, const Bandwidth& h, const Bandwidth& hmin,
                        std::span<const double> t);

}  // namespace pco
