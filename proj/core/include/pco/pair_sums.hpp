#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "pco/kernels.hpp"
#include "pco/sample.hpp"

namespace pco {

/// weight * phi_sigma(t), phi_sigma the centred normal density.
struct GaussianTerm {
  double weight;
  double sigma;
};

/// Even function of a single coordinate difference, in one of two forms the
/// pair-sum engine knows how to sum: a Gaussian mixture, or an arbitrary
/// function vanishing outside [-support, support].
class AxisProfile {
 public:
  static AxisProfile gaussian_mixture(std::vector<GaussianTerm> terms);
  static AxisProfile compact(std::function<double(double)> f, double support);

  bool is_gaussian() const { return !terms_.empty(); }
  std::span<const GaussianTerm> terms() const { return terms_; }
  double support() const { return support_; }
  double operator()(double t) const;

 private:
  std::vector<GaussianTerm> terms_;
  std::function<double(double)> f_;
  double support_ = 0.0;
};

/// Profile of t -> C(a, b, t) = (K_a * K_b)(t).
AxisProfile convolution_profile(const Kernel& k, double a, double b);
/// Profile of t -> K_h(t).
AxisProfile scaled_kernel_profile(const Kernel& k, double h);

enum class GaussSumMethod { automatic, direct, fast };

/// Sum over all ordered pairs (diagonal included) of exp(-(x_i-x_j)^2/(2 sigma^2))
/// for ascending `sorted`.
///
/// Terms below exp(-42) are dropped, so the relative error is at most
/// n * 5e-19. The fast path is a Hermite-expansion Gauss transform on unit
/// boxes (26 terms, truncation below 1e-17 per source); `automatic` picks
/// whichever of the two has the lower estimated cost.
double gaussian_exp_sum_1d(std::span<const double> sorted, double sigma,
                           GaussSumMethod method = GaussSumMethod::automatic);

/// Pairwise sums over a sample: sum_{i,j} prod_k g_k(X_ik - X_jk).
///
/// Observations are sorted lexicographically once at construction and every
/// sum runs over that order, so results are exactly invariant under
/// permutation of the input sample.
class PairSummer {
 public:
  explicit PairSummer(const Sample& sample);

  std::size_t size() const { return n_; }
  std::size_t dim() const { return d_; }

  /// All ordered pairs including i == j. Profiles must be all Gaussian or all compact.
  double sum(std::span<const AxisProfile> axes) const;

  /// sum_{i,j} exp(-sum_k (X_ik - X_jk)^2 / (2 sigma_k^2)).
  double gaussian_exp_sum(std::span<const double> sigmas,
                          GaussSumMethod method = GaussSumMethod::automatic) const;

 private:
  double compact_sum(std::span<const AxisProfile> axes) const;

  std::size_t n_;
  std::size_t d_;
  std::vector<double> sorted_;  // row-major
  std::vector<double> first_;   // first coordinate of each sorted row
};

/// sum_{i,j} prod_k C(a_k, b_k, X_ik - X_jk).
double convolution_pair_sum(const PairSummer& pairs, const ProductKernel& k, const Bandwidth& a,
                            const Bandwidth& b);
/// sum_{i,j} K_h(X_i - X_j).
double kernel_pair_sum(const PairSummer& pairs, const ProductKernel& k, const Bandwidth& h);

}  // namespace pco
