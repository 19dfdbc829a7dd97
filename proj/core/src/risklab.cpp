#include "pco/risklab.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <stdexcept>
#include <tuple>

#include "pco/error.hpp"
#include "pco/kahan.hpp"
#include "pco/parallel.hpp"
#include "pco/rng.hpp"
#include "format.hpp"

namespace pco {

namespace {

constexpr double kCoverageLimit = 1e-3;

double quantile_sorted(const std::vector<double>& s, double q) {
  const double pos = q * static_cast<double>(s.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, s.size() - 1);
  return s[lo] + (pos - static_cast<double>(lo)) * (s[hi] - s[lo]);
}

// ||fhat_h - f||^2 from the self pair sum S(h,h).
double ise_from_self_sum(const Sample& sample, const ProductKernel& k, const Bandwidth& h, double self_sum,
                         const Density& f) {
  const double nd = static_cast<double>(sample.size());
  KahanSum cross;
  for (std::size_t j = 0; j < sample.size(); ++j) cross.add(f.smoothed(k, h, sample.point(j)));
  return self_sum / (nd * nd) - 2.0 * cross.value() / nd + f.l2_norm_sq();
}

std::vector<double> grid_ise(const Sample& sample, const ProductKernel& k, const BandwidthGrid& grid,
                             const std::vector<double>& self_sums, const Density& f) {
  std::vector<double> out(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) out[i] = ise_from_self_sum(sample, k, grid[i], self_sums[i], f);
  return out;
}

std::size_t select_index(const MethodSpec& m, const Sample& sample, const ProductKernel& k, const ComparisonProfile& profile) {
  switch (m.kind) {
    case MethodSpec::Kind::pco:
      return select_from_profile(profile, m.penalty).selected;
    case MethodSpec::Kind::lepski:
      return lepski_select(sample, k, profile.grid, m.baseline).index;
    case MethodSpec::Kind::gl:
      return gl_select(sample, k, profile.grid, m.baseline).index;
    case MethodSpec::Kind::lscv:
      return lscv_select(sample, k, profile.grid).index;
  }
  throw std::invalid_argument("unknown method");
}

void check_density(const Density& f, const ProductKernel& k, const BandwidthGrid& grid) {
  if (f.dim() != k.dim() || grid.dim() != k.dim())
    throw std::invalid_argument("experiment: density, kernel and grid dimensions differ");
}

}  // namespace

double ise(const DensityEstimate& estimate, const Density& f) {
  const auto& grid = estimate.grid();
  if (grid.dim() != f.dim()) throw std::invalid_argument("ise: dimension mismatch");
  const double outside = f.mass_outside(grid.lo(), grid.hi());
  if (outside > kCoverageLimit)
    throw CoverageError("ise: " + detail::shortest(outside) + " of the target mass lies outside the evaluation grid");
  std::vector<double> sq(grid.size());
  for (std::size_t p = 0; p < sq.size(); ++p) {
    const double diff = estimate.values()[p] - f(grid.point(p));
    sq[p] = diff * diff;
  }
  return grid.integrate(sq);
}

double exact_ise(const Sample& sample, const ProductKernel& k, const Bandwidth& h, const Density& f) {
  if (sample.dim() != k.dim() || h.dim() != k.dim() || f.dim() != k.dim())
    throw std::invalid_argument("exact_ise: dimension mismatch");
  const PairSummer pairs(sample);
  return ise_from_self_sum(sample, k, h, convolution_pair_sum(pairs, k, h, h), f);
}

BandwidthGrid default_grid(const ProductKernel& k, std::size_t n, std::size_t count, double hmax) {
  if (n == 0) throw std::invalid_argument("default_grid: n must be >= 1");
  const double bound = k.sup_norm() * k.l1_norm() / static_cast<double>(n);
  const double lo = std::max(std::pow(bound, 1.0 / static_cast<double>(k.dim())), 1e-4);
  if (!(hmax > lo)) throw std::invalid_argument("default_grid: hmax must exceed the lower grid bound " + detail::shortest(lo));
  const auto axis = BandwidthGrid::geometric_axis(lo, hmax, count);
  return BandwidthGrid::product(std::vector<std::vector<double>>(k.dim(), axis));
}

// ---- methods and summaries ----------------------------------------------------------

MethodSpec MethodSpec::parse(std::string_view id) {
  MethodSpec m;
  if (id == "pco") return m;
  if (id.starts_with("pco:")) {
    const auto num = id.substr(4);
    double lambda = 0.0;
    const auto [ptr, ec] = std::from_chars(num.data(), num.data() + num.size(), lambda);
    if (ec != std::errc() || ptr != num.data() + num.size() || !std::isfinite(lambda))
      throw std::invalid_argument("method '" + std::string(id) + "': bad lambda");
    m.penalty.lambda = lambda;
    return m;
  }
  m.baseline.method = parse_baseline_method(id);
  switch (m.baseline.method) {
    case BaselineMethod::lepski:
      m.kind = Kind::lepski;
      break;
    case BaselineMethod::gl:
      m.kind = Kind::gl;
      break;
    case BaselineMethod::lscv:
      m.kind = Kind::lscv;
      break;
  }
  return m;
}

std::string MethodSpec::name() const {
  switch (kind) {
    case Kind::pco:
      return "pco:" + detail::shortest(penalty.lambda);
    case Kind::lepski:
      return "lepski";
    case Kind::gl:
      return "gl";
    case Kind::lscv:
      return "lscv";
  }
  return "unknown";
}

Summary summarize(std::vector<double> values) {
  if (values.empty()) throw std::invalid_argument("summarize: no values");
  Summary s;
  KahanSum sum;
  for (double v : values) sum.add(v);
  s.mean = sum.value() / static_cast<double>(values.size());
  KahanSum dev;
  for (double v : values) dev.add((v - s.mean) * (v - s.mean));
  s.sd = values.size() > 1 ? std::sqrt(dev.value() / static_cast<double>(values.size() - 1)) : 0.0;
  std::sort(values.begin(), values.end());
  s.median = quantile_sorted(values, 0.5);
  s.q10 = quantile_sorted(values, 0.1);
  s.q90 = quantile_sorted(values, 0.9);
  return s;
}

double median(std::vector<double> values) { return summarize(std::move(values)).median; }

// ---- oracle experiment ---------------------------------------------------------------

RiskReport oracle_experiment(const Density& f, std::size_t n, const ProductKernel& k, const BandwidthGrid& grid,
                             const std::vector<MethodSpec>& methods, std::size_t reps, std::uint64_t seed,
                             std::size_t threads) {
  if (reps < 50) throw std::invalid_argument("oracle_experiment: reps must be >= 50");
  if (n < 2) throw std::invalid_argument("oracle_experiment: n must be >= 2");
  check_density(f, k, grid);
  const std::size_t g = grid.size();
  const std::size_t mcount = methods.size();
  std::vector<double> ise_by_h(reps * g);
  std::vector<std::size_t> picks(reps * mcount);

  parallel_for(reps, threads, [&](std::size_t r) {
    auto rng = make_stream(seed, r);
    const Sample sample = f.sample(n, rng);
    const auto profile = compute_comparisons(sample, k, grid);
    const auto row = grid_ise(sample, k, grid, profile.self_sums, f);
    std::copy(row.begin(), row.end(), ise_by_h.begin() + static_cast<std::ptrdiff_t>(r * g));
    for (std::size_t m = 0; m < mcount; ++m) picks[r * mcount + m] = select_index(methods[m], sample, k, profile);
  });

  RiskReport report{f.id(), n, reps, seed, grid, std::move(ise_by_h), {}, 0, grid[0], {}};
  std::vector<double> means(g);
  for (std::size_t i = 0; i < g; ++i) {
    std::vector<double> col(reps);
    for (std::size_t r = 0; r < reps; ++r) col[r] = report.ise_by_h[r * g + i];
    report.per_bandwidth.push_back(summarize(std::move(col)));
    means[i] = report.per_bandwidth.back().mean;
  }
  report.oracle_index = static_cast<std::size_t>(std::min_element(means.begin(), means.end()) - means.begin());
  report.oracle_bandwidth = grid[report.oracle_index];

  for (std::size_t m = 0; m < mcount; ++m) {
    MethodOutcome out;
    out.method = methods[m];
    for (std::size_t r = 0; r < reps; ++r) {
      const std::size_t pick = picks[r * mcount + m];
      const auto first = report.ise_by_h.begin() + static_cast<std::ptrdiff_t>(r * g);
      const double best = *std::min_element(first, first + static_cast<std::ptrdiff_t>(g));
      const double value = report.ise_by_h[r * g + pick];
      out.selected.push_back(pick);
      out.ise.push_back(value);
      out.ratio.push_back(value / best);
    }
    out.ise_summary = summarize(out.ise);
    out.ratio_summary = summarize(out.ratio);
    out.mean_ratio = out.ise_summary.mean / means[report.oracle_index];
    report.methods.push_back(std::move(out));
  }
  return report;
}

void write_risk_csv(std::ostream& out, const RiskReport& report) {
  const std::size_t d = report.grid.dim();
  const std::size_t g = report.grid.size();
  out << "method,lambda";
  for (std::size_t j = 1; j <= d; ++j) out << ",h_" << j;
  out << ",rep,ise\n";
  auto row = [&](const std::string& method, const std::string& lambda, const Bandwidth& h, std::size_t rep,
                 double value) {
    out << method << ',' << lambda;
    for (double c : h.components()) out << ',' << detail::shortest(c);
    out << ',' << rep << ',' << detail::shortest(value) << '\n';
  };
  for (std::size_t r = 0; r < report.reps; ++r)
    for (std::size_t i = 0; i < g; ++i) row("grid", "", report.grid[i], r, report.ise_by_h[r * g + i]);
  for (const auto& m : report.methods) {
    const std::string name = m.method.kind == MethodSpec::Kind::pco ? "pco" : m.method.name();
    const std::string lambda = m.method.kind == MethodSpec::Kind::pco ? detail::shortest(m.method.penalty.lambda) : "";
    for (std::size_t r = 0; r < report.reps; ++r) row(name, lambda, report.grid[m.selected[r]], r, m.ise[r]);
  }
}

// ---- lambda sweeps ---------------------------------------------------------------------

LambdaSweep lambda_sweep(const Density& f, std::size_t n, const ProductKernel& k, const BandwidthGrid& grid,
                         const std::vector<double>& lambdas, std::size_t reps, std::uint64_t seed,
                         std::size_t threads) {
  if (reps == 0) throw std::invalid_argument("lambda_sweep: reps must be >= 1");
  if (lambdas.empty()) throw std::invalid_argument("lambda_sweep: empty lambda list");
  check_density(f, k, grid);
  LambdaSweep sweep{lambdas, grid, std::vector<std::vector<std::size_t>>(reps), std::vector<std::optional<double>>(reps)};
  parallel_for(reps, threads, [&](std::size_t r) {
    auto rng = make_stream(seed, r);
    const auto profile = compute_comparisons(f.sample(n, rng), k, grid);
    std::vector<double> volumes;
    for (double lambda : lambdas) {
      const auto pick = select_from_profile(profile, PenaltySpec{PenaltyMode::family, lambda}).selected;
      sweep.selected[r].push_back(pick);
      volumes.push_back(grid[pick].volume());
    }
    sweep.lambda_crit[r] = detect_jump(lambdas, volumes);
  });
  return sweep;
}

std::vector<MinimalPenaltyRow> minimal_penalty_experiment(const Density& f, std::size_t n, const ProductKernel& k,
                                                          const BandwidthGrid& grid, const std::vector<double>& lambdas,
                                                          std::size_t reps, std::uint64_t seed, std::size_t threads) {
  for (double l : lambdas)
    if (!(l < 0.0)) throw std::invalid_argument("minimal_penalty_experiment: every lambda must be negative");
  const auto sweep = lambda_sweep(f, n, k, grid, lambdas, reps, seed, threads);
  std::vector<MinimalPenaltyRow> rows;
  const double base = grid.hmin().volume();
  for (std::size_t l = 0; l < lambdas.size(); ++l) {
    const double factor = 2.1 - 1.0 / lambdas[l];
    std::size_t hits = 0;
    for (std::size_t r = 0; r < reps; ++r)
      if (grid[sweep.selected[r][l]].volume() <= factor * base * (1.0 + 1e-12)) ++hits;
    rows.push_back({lambdas[l], factor, static_cast<double>(hits) / static_cast<double>(reps)});
  }
  return rows;
}

// ---- rates -------------------------------------------------------------------------------

std::pair<double, double> least_squares_line(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("least_squares_line: need >= 2 paired points");
  const double m = static_cast<double>(x.size());
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= m;
  my /= m;
  double sxy = 0.0;
  double sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  if (sxx == 0.0) throw std::invalid_argument("least_squares_line: x values are all equal");
  const double slope = sxy / sxx;
  return {slope, my - slope * mx};
}

RateResult rate_experiment(const Density& f, double beta, const ProductKernel& k, const std::vector<std::size_t>& n_list,
                           std::size_t reps, std::uint64_t seed, std::size_t threads, double hmax) {
  if (n_list.size() < 4) throw std::invalid_argument("rate_experiment: n_list needs at least 4 values");
  for (std::size_t i = 0; i < n_list.size(); ++i)
    if (n_list[i] < 2) throw std::invalid_argument("rate_experiment: every n must be >= 2");
  const double ratio = static_cast<double>(n_list[1]) / static_cast<double>(n_list[0]);
  if (!(ratio > 1.0)) throw std::invalid_argument("rate_experiment: n_list must be increasing");
  for (std::size_t i = 1; i < n_list.size(); ++i) {
    const double r = static_cast<double>(n_list[i]) / static_cast<double>(n_list[i - 1]);
    if (std::abs(r / ratio - 1.0) > 1e-9) throw std::invalid_argument("rate_experiment: n_list must be geometric");
  }
  if (!(static_cast<double>(k.axis().order()) > beta))
    throw std::invalid_argument("rate_experiment: kernel order must exceed the smoothness beta");
  if (reps == 0) throw std::invalid_argument("rate_experiment: reps must be >= 1");
  if (f.dim() != k.dim()) throw std::invalid_argument("rate_experiment: density and kernel dimensions differ");

  RateResult result;
  result.n_list = n_list;
  std::vector<double> lx;
  std::vector<double> ly;
  for (std::size_t t = 0; t < n_list.size(); ++t) {
    const std::size_t n = n_list[t];
    const auto grid = default_grid(k, n, 30, hmax);
    std::vector<double> values(reps);
    // Distinct stream block per sample size.
    const std::uint64_t block = static_cast<std::uint64_t>(t) << 32;
    parallel_for(reps, threads, [&](std::size_t r) {
      auto rng = make_stream(seed, block + r);
      const Sample sample = f.sample(n, rng);
      const auto profile = compute_comparisons(sample, k, grid);
      const std::size_t pick = select_from_profile(profile, PenaltySpec{}).selected;
      values[r] = ise_from_self_sum(sample, k, grid[pick], profile.self_sums[pick], f);
    });
    result.median_ise.push_back(median(values));
    lx.push_back(std::log(static_cast<double>(n)));
    ly.push_back(std::log(result.median_ise.back()));
  }
  std::tie(result.slope, result.intercept) = least_squares_line(lx, ly);
  return result;
}

}  // namespace pco
