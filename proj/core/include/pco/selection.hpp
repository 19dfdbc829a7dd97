#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "pco/kernels.hpp"
#include "pco/sample.hpp"

namespace pco {

/// Finite set of candidate bandwidths, sorted by volume (then
/// lexicographically), whose first element is the coordinatewise minimum.
class BandwidthGrid {
 public:
  static constexpr std::size_t kMaxElements = 100000;

  /// Throws std::invalid_argument if the list is empty, mixes dimensions,
  /// holds duplicates, exceeds kMaxElements, or does not contain its
  /// coordinatewise minimum.
  explicit BandwidthGrid(std::vector<Bandwidth> elements);

  /// `count` log-spaced values from hmin to hmax inclusive.
  static BandwidthGrid geometric(double hmin, double hmax, std::size_t count);
  static std::vector<double> geometric_axis(double hmin, double hmax, std::size_t count);
  /// Cartesian product H_1 x ... x H_d.
  static BandwidthGrid product(const std::vector<std::vector<double>>& axes);

  std::size_t size() const { return elements_.size(); }
  std::size_t dim() const { return elements_.front().dim(); }
  const Bandwidth& operator[](std::size_t i) const { return elements_[i]; }
  std::span<const Bandwidth> elements() const { return elements_; }
  const Bandwidth& hmin() const { return elements_.front(); }
  static constexpr std::size_t hmin_index() { return 0; }
  /// Coordinatewise maximum over the grid.
  Bandwidth hmax() const;
  /// Index of an element, or size() if absent.
  std::size_t find(const Bandwidth& h) const;

  /// Empty when volume(hmin) >= ||K||_inf ||K||_1 / n.
  std::vector<std::string> admissibility_warnings(const ProductKernel& k, std::size_t n) const;

 private:
  std::vector<Bandwidth> elements_;
};

enum class PenaltyMode { family, minimal, optimal };

struct PenaltySpec {
  PenaltyMode mode = PenaltyMode::family;
  double lambda = 1.0;
};

/// family: (lambda ||K_h||^2 - ||K_hmin - K_h||^2) / n
/// minimal: (2 <K_h, K_hmin> - ||K_h||^2) / n
/// optimal: 2 <K_h, K_hmin> / n
double penalty(const PenaltySpec& spec, const ProductKernel& k, const Bandwidth& h, const Bandwidth& hmin,
               std::size_t n);

/// (self - 2 cross + base) / n^2 for pair sums S(h,h), S(h,h'), S(h',h'), with
/// values within -1e-10 (relative to base / n^2) of zero clamped to 0.
double distance_from_pair_sums(double self, double cross, double base, std::size_t n);

/// ||fhat_h - fhat_hmin||^2, summed exactly over observation pairs.
double comparison_term(const Sample& sample, const ProductKernel& k, const Bandwidth& h, const Bandwidth& hmin);

/// Pair sums S(a, b) = sum_{i,j} prod_k C(a_k, b_k, X_ik - X_jk) against hmin
/// for every grid element, and the comparison terms they give.
struct ComparisonProfile {
  ProductKernel kernel;
  BandwidthGrid grid;
  std::size_t n = 0;
  std::vector<double> self_sums;   // S(h, h)
  std::vector<double> cross_sums;  // S(h, hmin)
  std::vector<double> comparisons;
};

ComparisonProfile compute_comparisons(const Sample& sample, const ProductKernel& k, const BandwidthGrid& grid,
                                      std::size_t threads = 1);

struct CriterionRow {
  Bandwidth h;
  double comparison;
  double penalty;
  double total;
};

struct CriterionTable {
  std::vector<CriterionRow> rows;
  std::size_t selected = 0;
  std::size_t hmin_index = 0;
  std::vector<std::string> warnings;

  const Bandwidth& selected_bandwidth() const { return rows.at(selected).h; }
};

/// Index minimising `totals`. Values within 1e-12 * scale of the minimum count
/// as tied, and ties go to the largest volume (the latest index in grid order).
std::size_t argmin_largest_volume(const BandwidthGrid& grid, std::span<const double> totals, double scale);

CriterionTable select_from_profile(const ComparisonProfile& profile, const PenaltySpec& spec);
/// Selection with caller-supplied penalty values, one per grid element.
CriterionTable select_with_penalties(const ComparisonProfile& profile, std::span<const double> penalties);
CriterionTable select_bandwidth(const Sample& sample, const ProductKernel& k, const BandwidthGrid& grid,
                                const PenaltySpec& spec, std::size_t threads = 1);

/// True iff every total equals comparison + penalty to 1e-12 and the hmin
/// row has a zero comparison term. Throws std::invalid_argument on an empty table.
bool criterion_identity_check(const CriterionTable& table);

}  // namespace pco
