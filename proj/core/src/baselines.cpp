#include "pco/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>
#include <string>

#include "pco/error.hpp"
#include "pco/pair_sums.hpp"
#include "pco/parallel.hpp"

namespace pco {

namespace {

using Key = std::vector<double>;

Key key_of(const Bandwidth& h) { return Key(h.components().begin(), h.components().end()); }

void check_dims(const Sample& sample, const ProductKernel& k, const BandwidthGrid& grid, const char* what) {
  if (sample.dim() != k.dim() || grid.dim() != k.dim())
    throw std::invalid_argument(std::string(what) + ": sample, kernel and grid dimensions differ");
}

void check_kappa(double kappa, const char* what) {
  if (!(kappa >= 0.0) || !std::isfinite(kappa))
    throw std::invalid_argument(std::string(what) + " must be finite and non-negative");
}

double criterion_scale(const ProductKernel& k, const BandwidthGrid& grid, std::size_t n) {
  return kernel_l2_norm_scaled(k, grid.hmin()) / static_cast<double>(n);
}

}  // namespace

BaselineMethod parse_baseline_method(std::string_view name) {
  if (name == "lepski") return BaselineMethod::lepski;
  if (name == "gl") return BaselineMethod::gl;
  if (name == "lscv") return BaselineMethod::lscv;
  throw std::invalid_argument("unknown baseline method '" + std::string(name) + "'");
}

GlDistances compute_gl_distances(const Sample& sample, const ProductKernel& k, const BandwidthGrid& grid,
                                 std::size_t threads) {
  check_dims(sample, k, grid, "compute_gl_distances");
  const std::size_t g = grid.size();
  const PairSummer pairs(sample);

  // Every distinct bandwidth involved, with its self pair sum.
  std::map<Key, std::size_t> slot;
  std::vector<Bandwidth> involved;
  auto intern = [&](const Bandwidth& h) {
    auto [it, inserted] = slot.emplace(key_of(h), involved.size());
    if (inserted) involved.push_back(h);
    return it->second;
  };
  for (std::size_t i = 0; i < g; ++i) intern(grid[i]);
  struct Task {
    std::size_t i, j, joint;
  };
  std::vector<Task> tasks;
  for (std::size_t i = 0; i < g; ++i)
    for (std::size_t j = 0; j < g; ++j) {
      const Bandwidth joint = coordinatewise_max(grid[i], grid[j]);
      if (joint == grid[j]) continue;
      tasks.push_back({i, j, intern(joint)});
    }
  // Cross sums depend only on (joint, h').
  std::map<std::pair<std::size_t, std::size_t>, std::size_t> cross_slot;
  std::vector<std::pair<std::size_t, std::size_t>> cross_pairs;
  for (const auto& t : tasks) {
    const auto key = std::make_pair(t.joint, slot.at(key_of(grid[t.j])));
    if (cross_slot.emplace(key, cross_pairs.size()).second) cross_pairs.push_back(key);
  }

  std::vector<double> self(involved.size());
  std::vector<double> cross(cross_pairs.size());
  const std::size_t jobs = involved.size() + cross_pairs.size();
  parallel_for(jobs, threads, [&](std::size_t q) {
    if (q < involved.size()) {
      self[q] = convolution_pair_sum(pairs, k, involved[q], involved[q]);
    } else {
      const auto [joint, small] = cross_pairs[q - involved.size()];
      cross[q - involved.size()] = convolution_pair_sum(pairs, k, involved[joint], involved[small]);
    }
  });

  std::vector<double> values(g * g, 0.0);
  for (const auto& t : tasks) {
    const std::size_t small = slot.at(key_of(grid[t.j]));
    const double c = cross[cross_slot.at({t.joint, small})];
    values[t.i * g + t.j] = distance_from_pair_sums(self[t.joint], c, self[small], sample.size());
  }
  return GlDistances(g, std::move(values));
}

BaselineResult lepski_select(const Sample& sample, const ProductKernel& k, const BandwidthGrid& grid,
                             const BaselineSpec& spec, std::size_t threads) {
  check_dims(sample, k, grid, "lepski_select");
  if (grid.dim() != 1) throw UnsupportedError("lepski_select: the ordered rule needs a univariate grid");
  check_kappa(spec.kappa1, "lepski_select: kappa1");
  const std::size_t g = grid.size();
  const std::size_t n = sample.size();
  const auto dist = compute_gl_distances(sample, k, grid, threads);
  BaselineResult r;
  r.criterion.assign(g, 0.0);
  std::vector<bool> ok(g, true);
  for (std::size_t i = 0; i < g; ++i) {
    double worst = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < i; ++j) {
      const double v = spec.kappa1 * kernel_l2_norm_scaled(k, grid[j]) / static_cast<double>(n);
      const double excess = dist(i, j) - v;
      worst = std::max(worst, excess);
      if (excess > 0.0) ok[i] = false;
    }
    r.criterion[i] = i == 0 ? 0.0 : worst;
  }
  r.index = 0;
  for (std::size_t i = g; i-- > 0;)
    if (ok[i]) {
      r.index = i;
      break;
    }
  r.bandwidth = grid[r.index];
  return r;
}

BaselineResult gl_select_with(const GlDistances& distances, const ProductKernel& k, const BandwidthGrid& grid,
                              std::size_t n, std::span<const double> v1, std::span<const double> v2) {
  const std::size_t g = grid.size();
  if (distances.size() != g || v1.size() != g || v2.size() != g)
    throw std::invalid_argument("gl_select: one value per grid element required");
  BaselineResult r;
  r.criterion.resize(g);
  for (std::size_t i = 0; i < g; ++i) {
    double a = 0.0;
    for (std::size_t j = 0; j < g; ++j) a = std::max(a, distances(i, j) - v1[j]);
    r.criterion[i] = a + v2[i];
  }
  r.index = argmin_largest_volume(grid, r.criterion, criterion_scale(k, grid, n));
  r.bandwidth = grid[r.index];
  return r;
}

BaselineResult gl_select(const Sample& sample, const ProductKernel& k, const BandwidthGrid& grid,
                         const BaselineSpec& spec, std::size_t threads) {
  check_dims(sample, k, grid, "gl_select");
  check_kappa(spec.kappa1, "gl_select: kappa1");
  check_kappa(spec.effective_kappa2(), "gl_select: kappa2");
  const std::size_t g = grid.size();
  const double nd = static_cast<double>(sample.size());
  std::vector<double> v1(g);
  std::vector<double> v2(g);
  for (std::size_t i = 0; i < g; ++i) {
    const double var = kernel_l2_norm_scaled(k, grid[i]) / nd;
    v1[i] = spec.kappa1 * var;
    v2[i] = spec.effective_kappa2() * var;
  }
  return gl_select_with(compute_gl_distances(sample, k, grid, threads), k, grid, sample.size(), v1, v2);
}

BaselineResult lscv_select(const Sample& sample, const ProductKernel& k, const BandwidthGrid& grid,
                           std::size_t threads) {
  check_dims(sample, k, grid, "lscv_select");
  const std::size_t n = sample.size();
  if (n < 2) throw std::invalid_argument("lscv_select: at least 2 observations required");
  const std::size_t g = grid.size();
  const PairSummer pairs(sample);
  const double nd = static_cast<double>(n);
  BaselineResult r;
  r.criterion.resize(g);
  const std::vector<double> origin(k.dim(), 0.0);
  parallel_for(g, threads, [&](std::size_t i) {
    const double norm_sq = convolution_pair_sum(pairs, k, grid[i], grid[i]) / (nd * nd);
    const double off_diagonal = kernel_pair_sum(pairs, k, grid[i]) - nd * k.scaled(origin, grid[i]);
    r.criterion[i] = norm_sq - 2.0 * off_diagonal / (nd * (nd - 1.0));
  });
  r.index = argmin_largest_volume(grid, r.criterion, criterion_scale(k, grid, n));
  r.bandwidth = grid[r.index];
  return r;
}

BaselineResult baseline_select(const Sample& sample, const ProductKernel& k, const BandwidthGrid& grid,
                               const BaselineSpec& spec, std::size_t threads) {
  switch (spec.method) {
    case BaselineMethod::lepski:
      return lepski_select(sample, k, grid, spec, threads);
    case BaselineMethod::gl:
      return gl_select(sample, k, grid, spec, threads);
    case BaselineMethod::lscv:
      return lscv_select(sample, k, grid, threads);
  }
  throw std::invalid_argument("baseline_select: unknown method");
}

}  // namespace pco
