#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "pco/selection.hpp"

namespace pco {

enum class BaselineMethod { lepski, gl, lscv };

BaselineMethod parse_baseline_method(std::string_view name);

struct BaselineSpec {
  BaselineMethod method = BaselineMethod::gl;
  double kappa1 = 1.2;
  /// Defaults to 2 * kappa1.
  std::optional<double> kappa2;

  double effective_kappa2() const { return kappa2.value_or(2.0 * kappa1); }
};

struct BaselineResult {
  std::size_t index = 0;
  Bandwidth bandwidth{1.0};
  /// Per grid element: the quantity the rule minimises (GL, LSCV) or the
  /// worst excess max_{h' < h} (||fhat_h' - fhat_h||^2 - V(h')) (Lepski).
  std::vector<double> criterion;
};

/// D(i, j) = ||fhat_{h'} - fhat_{h v h'}||^2 with h = grid[i], h' = grid[j].
class GlDistances {
 public:
  GlDistances(std::size_t size, std::vector<double> values) : g_(size), values_(std::move(values)) {}
  std::size_t size() const { return g_; }
  double operator()(std::size_t i, std::size_t j) const { return values_[i * g_ + j]; }

 private:
  std::size_t g_;
  std::vector<double> values_;
};

GlDistances compute_gl_distances(const Sample& sample, const ProductKernel& k, const BandwidthGrid& grid,
                                 std::size_t threads = 1);

/// Largest h with ||fhat_h' - fhat_h||^2 <= kappa1 ||K_h'||^2 / n for every
/// grid h' < h; hmin when no larger h qualifies. Univariate grids only.
BaselineResult lepski_select(const Sample& sample, const ProductKernel& k, const BandwidthGrid& grid,
                             const BaselineSpec& spec, std::size_t threads = 1);

/// argmin_h { sup_{h'} (D(h, h') - V1(h'))_+ + V2(h) } with V1 = kappa1 ||K_h'||^2 / n
/// and V2 = kappa2 ||K_h||^2 / n.
BaselineResult gl_select(const Sample& sample, const ProductKernel& k, const BandwidthGrid& grid,
                         const BaselineSpec& spec, std::size_t threads = 1);
/// Same rule with explicit V1, V2 values per grid element.
BaselineResult gl_select_with(const GlDistances& distances, const ProductKernel& k, const BandwidthGrid& grid,
                              std::size_t n, std::span<const double> v1, std::span<const double> v2);

/// Least-squares cross-validation: ||fhat_h||^2 - (2/n) sum_i fhat_h^{(-i)}(X_i).
/// Throws std::invalid_argument for n < 2.
BaselineResult lscv_select(const Sample& sample, const ProductKernel& k, const BandwidthGrid& grid,
                           std::size_t threads = 1);

BaselineResult baseline_select(const Sample& sample, const ProductKernel& k, const BandwidthGrid& grid,
                               const BaselineSpec& spec, std::size_t threads = 1);

}  // namespace pco
