#include "pco/selection.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "pco/pair_sums.hpp"
#include "pco/parallel.hpp"

namespace pco {

namespace {

constexpr double kClamp = 1e-10;
constexpr double kTieTolerance = 1e-12;

bool grid_order(const Bandwidth& a, const Bandwidth& b) {
  const double va = a.volume();
  const double vb = b.volume();
  if (va != vb) return va < vb;
  const auto ca = a.components();
  const auto cb = b.components();
  return std::lexicographical_compare(ca.begin(), ca.end(), cb.begin(), cb.end());
}

}  // namespace

// ---- BandwidthGrid ---------------------------------------------------------------

BandwidthGrid::BandwidthGrid(std::vector<Bandwidth> elements) : elements_(std::move(elements)) {
  if (elements_.empty()) throw std::invalid_argument("BandwidthGrid: empty grid");
  if (elements_.size() > kMaxElements)
    throw std::invalid_argument("BandwidthGrid: " + std::to_string(elements_.size()) + " elements exceed the cap of " +
                                std::to_string(kMaxElements));
  const std::size_t d = elements_.front().dim();
  for (const auto& h : elements_)
    if (h.dim() != d) throw std::invalid_argument("BandwidthGrid: elements of different dimensions");
  std::sort(elements_.begin(), elements_.end(), grid_order);
  for (std::size_t i = 1; i < elements_.size(); ++i)
    if (elements_[i] == elements_[i - 1]) throw std::invalid_argument("BandwidthGrid: duplicate bandwidth");
  std::vector<double> lo(elements_.front().components().begin(), elements_.front().components().end());
  for (const auto& h : elements_)
    for (std::size_t j = 0; j < d; ++j) lo[j] = std::min(lo[j], h[j]);
  if (!(elements_.front() == Bandwidth(lo)))
    throw std::invalid_argument("BandwidthGrid: the coordinatewise minimum is not a grid element");
}

std::vector<double> BandwidthGrid::geometric_axis(double hmin, double hmax, std::size_t count) {
  if (count == 0) throw std::invalid_argument("geometric grid: count must be >= 1");
  if (!(hmin > 0.0) || !std::isfinite(hmax) || !(hmax >= hmin))
    throw std::invalid_argument("geometric grid: need 0 < hmin <= hmax");
  if (count == 1) {
    if (hmin != hmax) throw std::invalid_argument("geometric grid: a single point requires hmin == hmax");
    return {hmin};
  }
  if (hmin == hmax) throw std::invalid_argument("geometric grid: hmin == hmax requires count == 1");
  std::vector<double> out(count);
  const double ratio = std::log(hmax / hmin);
  for (std::size_t k = 0; k < count; ++k)
    out[k] = hmin * std::exp(ratio * static_cast<double>(k) / static_cast<double>(count - 1));
  out.front() = hmin;
  out.back() = hmax;
  return out;
}

BandwidthGrid BandwidthGrid::geometric(double hmin, double hmax, std::size_t count) {
  std::vector<Bandwidth> hs;
  for (double h : geometric_axis(hmin, hmax, count)) hs.emplace_back(h);
  return BandwidthGrid(std::move(hs));
}

BandwidthGrid BandwidthGrid::product(const std::vector<std::vector<double>>& axes) {
  if (axes.empty()) throw std::invalid_argument("BandwidthGrid::product: no axes");
  std::size_t total = 1;
  for (const auto& a : axes) {
    if (a.empty()) throw std::invalid_argument("BandwidthGrid::product: empty axis");
    if (total > kMaxElements / a.size())
      throw std::invalid_argument("BandwidthGrid::product: grid exceeds the cap of " + std::to_string(kMaxElements) +
                                  " elements");
    total *= a.size();
  }
  std::vector<Bandwidth> hs;
  hs.reserve(total);
  std::vector<double> h(axes.size());
  for (std::size_t flat = 0; flat < total; ++flat) {
    std::size_t rest = flat;
    for (std::size_t j = axes.size(); j-- > 0;) {
      h[j] = axes[j][rest % axes[j].size()];
      rest /= axes[j].size();
    }
    hs.emplace_back(h);
  }
  return BandwidthGrid(std::move(hs));
}

Bandwidth BandwidthGrid::hmax() const {
  std::vector<double> hi(elements_.front().components().begin(), elements_.front().components().end());
  for (const auto& h : elements_)
    for (std::size_t j = 0; j < dim(); ++j) hi[j] = std::max(hi[j], h[j]);
  return Bandwidth(std::move(hi));
}

std::size_t BandwidthGrid::find(const Bandwidth& h) const {
  const auto it = std::lower_bound(elements_.begin(), elements_.end(), h, grid_order);
  return (it != elements_.end() && *it == h) ? static_cast<std::size_t>(it - elements_.begin()) : size();
}

std::vector<std::string> BandwidthGrid::admissibility_warnings(const ProductKernel& k, std::size_t n) const {
  if (n == 0) throw std::invalid_argument("admissibility check: n must be >= 1");
  const double bound = k.sup_norm() * k.l1_norm() / static_cast<double>(n);
  const double vol = hmin().volume();
  if (vol >= bound * (1.0 - 1e-12)) return {};
  std::ostringstream os;
  os.precision(17);
  os << "hmin volume " << vol << " is below ||K||_inf*||K||_1/n = " << bound;
  return {os.str()};
}

// ---- penalties and comparisons --------------------------------------------------------

double distance_from_pair_sums(double self, double cross, double base, std::size_t n) {
  const double nn = static_cast<double>(n) * static_cast<double>(n);
  const double v = (self - 2.0 * cross + base) / nn;
  // Rounding noise when h is close to hmin.
  return (v < 0.0 && v >= -kClamp * std::max(1.0, base / nn)) ? 0.0 : v;
}

double penalty(const PenaltySpec& spec, const ProductKernel& k, const Bandwidth& h, const Bandwidth& hmin,
               std::size_t n) {
  if (n == 0) throw std::invalid_argument("penalty: n must be >= 1");
  const double nd = static_cast<double>(n);
  switch (spec.mode) {
    case PenaltyMode::family:
      return (spec.lambda * kernel_l2_norm_scaled(k, h) - diff_l2_norm(k, h, hmin)) / nd;
    case PenaltyMode::minimal:
      return (2.0 * cross_inner(k, h, hmin) - kernel_l2_norm_scaled(k, h)) / nd;
    case PenaltyMode::optimal:
      return 2.0 * cross_inner(k, h, hmin) / nd;
  }
  throw std::invalid_argument("penalty: unknown mode");
}

double comparison_term(const Sample& sample, const ProductKernel& k, const Bandwidth& h, const Bandwidth& hmin) {
  if (sample.dim() != k.dim() || h.dim() != k.dim() || hmin.dim() != k.dim())
    throw std::invalid_argument("comparison_term: dimension mismatch");
  if (h == hmin) return 0.0;
  const PairSummer pairs(sample);
  return distance_from_pair_sums(convolution_pair_sum(pairs, k, h, h), convolution_pair_sum(pairs, k, h, hmin),
                              convolution_pair_sum(pairs, k, hmin, hmin), sample.size());
}

ComparisonProfile compute_comparisons(const Sample& sample, const ProductKernel& k, const BandwidthGrid& grid,
                                      std::size_t threads) {
  if (sample.dim() != k.dim() || grid.dim() != k.dim())
    throw std::invalid_argument("compute_comparisons: sample, kernel and grid dimensions differ");
  const PairSummer pairs(sample);
  const std::size_t g = grid.size();
  ComparisonProfile p{k, grid, sample.size(), std::vector<double>(g), std::vector<double>(g), std::vector<double>(g)};
  const Bandwidth& hmin = grid.hmin();
  parallel_for(g, threads, [&](std::size_t i) {
    p.self_sums[i] = convolution_pair_sum(pairs, k, grid[i], grid[i]);
    if (i == BandwidthGrid::hmin_index()) return;
    p.cross_sums[i] = convolution_pair_sum(pairs, k, grid[i], hmin);
  });
  p.cross_sums[0] = p.self_sums[0];
  const double base = p.self_sums[0];
  for (std::size_t i = 0; i < g; ++i)
    p.comparisons[i] = i == 0 ? 0.0 : distance_from_pair_sums(p.self_sums[i], p.cross_sums[i], base, p.n);
  return p;
}

// ---- selection ---------------------------------------------------------------------

std::size_t argmin_largest_volume(const BandwidthGrid& grid, std::span<const double> totals, double scale) {
  if (totals.size() != grid.size() || totals.empty())
    throw std::invalid_argument("argmin: one value per grid element required");
  double best = totals[0];
  for (double t : totals) {
    if (std::isnan(t)) throw std::invalid_argument("argmin: NaN criterion value");
    best = std::min(best, t);
  }
  const double tol = kTieTolerance * std::abs(scale);
  std::size_t pick = 0;
  double pick_volume = -1.0;
  for (std::size_t i = 0; i < totals.size(); ++i) {
    if (totals[i] > best + tol) continue;
    const double v = grid[i].volume();
    if (v >= pick_volume) {
      pick = i;
      pick_volume = v;
    }
  }
  return pick;
}

CriterionTable select_with_penalties(const ComparisonProfile& profile, std::span<const double> penalties) {
  const std::size_t g = profile.grid.size();
  if (penalties.size() != g) throw std::invalid_argument("select_with_penalties: one penalty per grid element required");
  CriterionTable table;
  table.hmin_index = BandwidthGrid::hmin_index();
  table.rows.reserve(g);
  std::vector<double> totals(g);
  for (std::size_t i = 0; i < g; ++i) {
    totals[i] = profile.comparisons[i] + penalties[i];
    table.rows.push_back({profile.grid[i], profile.comparisons[i], penalties[i], totals[i]});
  }
  const double scale = kernel_l2_norm_scaled(profile.kernel, profile.grid.hmin()) / static_cast<double>(profile.n);
  table.selected = argmin_largest_volume(profile.grid, totals, scale);
  table.warnings = profile.grid.admissibility_warnings(profile.kernel, profile.n);
  return table;
}

CriterionTable select_from_profile(const ComparisonProfile& profile, const PenaltySpec& spec) {
  std::vector<double> pens(profile.grid.size());
  for (std::size_t i = 0; i < pens.size(); ++i)
    pens[i] = penalty(spec, profile.kernel, profile.grid[i], profile.grid.hmin(), profile.n);
  return select_with_penalties(profile, pens);
}

CriterionTable select_bandwidth(const Sample& sample, const ProductKernel& k, const BandwidthGrid& grid,
                                const PenaltySpec& spec, std::size_t threads) {
  return select_from_profile(compute_comparisons(sample, k, grid, threads), spec);
}

bool criterion_identity_check(const CriterionTable& table) {
  if (table.rows.empty()) throw std::invalid_argument("criterion_identity_check: empty table");
  if (table.hmin_index >= table.rows.size()) return false;
  if (table.rows[table.hmin_index].comparison != 0.0) return false;
  for (const auto& r : table.rows) {
    const double scale = std::max(1.0, std::abs(r.comparison) + std::abs(r.penalty));
    if (!(std::abs(r.total - (r.comparison + r.penalty)) <= 1e-12 * scale)) return false;
  }
  return true;
}

}  // namespace pco
