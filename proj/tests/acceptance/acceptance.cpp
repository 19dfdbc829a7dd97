// Acceptance suite: one PASS/FAIL line per criterion.
//
//   pco_acceptance [--threads N] [--only K]

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "pco/calibration.hpp"
#include "pco/gwn.hpp"
#include "pco/kde.hpp"
#include "pco/risklab.hpp"
#include "pco/rng.hpp"
#include "pco/selection.hpp"

namespace {

using namespace pco;

struct Outcome {
  bool pass;
  std::string detail;
};

std::size_t g_threads = 1;

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

// ---- 1 ---------------------------------------------------------------------------

Outcome kernel_analytics() {
  const std::vector<double> hs{0.01, 0.1, 1.0, 10.0};
  double worst = 0.0;
  int checks = 0;
  for (const auto& kernel : {Kernel::gaussian(), Kernel::epanechnikov()}) {
    const ProductKernel k(kernel);
    for (double h : hs) {
      worst = std::max(worst, oracle::rel_err(kernel_l2_norm_scaled(k, Bandwidth(h)), oracle::l2_sq(kernel, h)));
      ++checks;
      for (double h2 : hs) {
        worst = std::max(worst, oracle::rel_err(cross_inner(k, Bandwidth(h), Bandwidth(h2)), oracle::inner(kernel, h, h2)));
        ++checks;
        if (h2 == h) continue;
        worst = std::max(worst, oracle::rel_err(diff_l2_norm(k, Bandwidth(h), Bandwidth(h2)), oracle::diff_sq(kernel, h, h2)));
        ++checks;
      }
    }
  }
  return {worst <= 1e-8, fmt("%d closed-form values, worst relative error %.3g (limit 1e-8)", checks, worst)};
}

// ---- 2 ---------------------------------------------------------------------------

Outcome criterion_oracle() {
  double worst = 0.0;
  auto rng = make_stream(20240601, 0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const std::vector<Density> targets{Density::standard_normal(), Density::claw(),
                                     Density::gaussian_mixture({{0.4, -1.0, 0.4}, {0.6, 1.0, 0.8}})};
  for (int fx = 0; fx < 20; ++fx) {
    const std::size_t d = 1 + (fx / 2) % 2;
    const Kernel kernel = fx % 2 == 0 ? Kernel::gaussian() : Kernel::epanechnikov();
    const ProductKernel k(kernel, d);
    const std::size_t n = 8 + static_cast<std::size_t>(unit(rng) * 56.0);
    std::vector<Density> factors;
    for (std::size_t j = 0; j < d; ++j) factors.push_back(targets[static_cast<std::size_t>(unit(rng) * 3)]);
    const Density f = Density::product(factors);
    auto srng = make_stream(20240601, 1 + fx);
    const Sample s = f.sample(n, srng);
    std::vector<double> hv(d), mv(d);
    for (std::size_t j = 0; j < d; ++j) {
      mv[j] = 0.08 + 0.12 * unit(rng);
      hv[j] = mv[j] * (1.5 + 6.0 * unit(rng));
    }
    const Bandwidth h(hv), hmin(mv);
    double reach = 0.0;
    for (double v : hv) reach = std::max(reach, v);
    reach *= kernel.family() == KernelFamily::gaussian ? 8.0 : 1.0;
    const auto grid = EvaluationGrid::covering(s, reach, d == 1 ? (1 << 15) + 1 : 2049);
    const double want = grid_l2_distance_sq(DensityEstimate(s, k, h, grid), DensityEstimate(s, k, hmin, grid));
    const double got = comparison_term(s, k, h, hmin);
    worst = std::max(worst, oracle::rel_err(got, want));
  }
  return {worst <= 1e-4, fmt("20 fixtures, worst relative gap %.3g (limit 1e-4)", worst)};
}

// ---- 3 ---------------------------------------------------------------------------

Outcome argmin_invariance() {
  int mismatches = 0;
  auto rng = make_stream(777, 0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int fx = 0; fx < 50; ++fx) {
    const std::size_t d = 1 + fx % 2;
    const ProductKernel k(fx % 3 == 0 ? Kernel::epanechnikov() : Kernel::gaussian(), d);
    const std::size_t n = 20 + static_cast<std::size_t>(unit(rng) * 180.0);
    auto srng = make_stream(777, 1 + fx);
    const Density f = d == 1 ? Density::claw() : Density::parse("standard_normal*claw");
    const Sample s = f.sample(n, srng);
    const auto axis = BandwidthGrid::geometric_axis(0.5 / static_cast<double>(n), 1.0, d == 1 ? 30 : 8);
    const auto grid = BandwidthGrid::product(std::vector<std::vector<double>>(d, axis));
    const auto profile = compute_comparisons(s, k, grid, g_threads);
    const double lambda = -1.0 + 4.0 * unit(rng);
    const auto base = select_from_profile(profile, {PenaltyMode::family, lambda});
    const double scale = kernel_l2_norm_scaled(k, grid.hmin()) / static_cast<double>(n);
    const double shift = (unit(rng) - 0.5) * 20.0 * scale;
    std::vector<double> shifted;
    for (const auto& r : base.rows) shifted.push_back(r.penalty + shift);
    if (select_with_penalties(profile, shifted).selected != base.selected) ++mismatches;
    if (select_from_profile(profile, {PenaltyMode::family, 1.0}).selected !=
        select_from_profile(profile, {PenaltyMode::optimal, 0.0}).selected)
      ++mismatches;
    if (select_from_profile(profile, {PenaltyMode::family, 0.0}).selected !=
        select_from_profile(profile, {PenaltyMode::minimal, 0.0}).selected)
      ++mismatches;
  }
  return {mismatches == 0, fmt("50 fixtures x 3 invariances, %d mismatches", mismatches)};
}

// ---- 4 ---------------------------------------------------------------------------

BandwidthGrid boundary_grid(const ProductKernel& k, std::size_t n) {
  return BandwidthGrid::geometric(k.sup_norm() * k.l1_norm() / static_cast<double>(n), 1.0, 30);
}

Outcome phase_transition() {
  const ProductKernel k(Kernel::gaussian());
  const std::size_t n = 2000;
  const auto grid = boundary_grid(k, n);
  const auto sweep = lambda_sweep(Density::standard_normal(), n, k, grid, {-0.5, 1.0}, 100, 4001, g_threads);
  const double hmin = grid.hmin()[0];
  int low = 0, high = 0;
  for (const auto& sel : sweep.selected) {
    if (grid[sel[0]][0] <= 4.1 * hmin) ++low;
    if (grid[sel[1]][0] >= 10.0 * hmin) ++high;
  }
  const double fl = low / 100.0, fh = high / 100.0;
  return {fl >= 0.9 && fh >= 0.9,
          fmt("lambda=-0.5: freq(h <= 4.1 hmin)=%.2f; lambda=1: freq(h >= 10 hmin)=%.2f (limits 0.9)", fl, fh)};
}

// ---- 5 ---------------------------------------------------------------------------

Outcome calibration() {
  const ProductKernel k(Kernel::gaussian());
  const std::size_t n = 2000;
  const auto grid = boundary_grid(k, n);
  const auto lambdas = default_lambda_grid();
  const auto sweep = lambda_sweep(Density::standard_normal(), n, k, grid, lambdas, 100, 5001, g_threads);
  int inside = 0;
  for (const auto& c : sweep.lambda_crit)
    if (c && *c >= -0.5 && *c <= 0.5) ++inside;
  const double freq = inside / 100.0;

  // Synthetic step profiles: one jump of a given ratio at a known lambda*,
  // small wobble elsewhere.
  int cases = 0, recovered = 0;
  const double spacing = lambdas[1] - lambdas[0];
  auto rng = make_stream(5002, 0);
  std::uniform_real_distribution<double> wobble(1.0, 1.25);
  for (double ratio : {5.0, 7.5, 20.0, 1e3, 1e6}) {
    for (std::size_t at = 0; at + 1 < lambdas.size(); ++at) {
      std::vector<double> vol(lambdas.size());
      vol[0] = 1e-4;
      for (std::size_t j = 1; j < vol.size(); ++j) vol[j] = vol[j - 1] * (j == at + 1 ? ratio : wobble(rng));
      const double truth = 0.5 * (lambdas[at] + lambdas[at + 1]);
      const auto got = detect_jump(lambdas, vol);
      ++cases;
      if (got && std::abs(*got - truth) <= spacing) ++recovered;
    }
  }
  return {freq >= 0.8 && recovered == cases,
          fmt("freq(lambda_crit in [-0.5,0.5])=%.2f (limit 0.8); step fixtures recovered %d/%d", freq, recovered, cases)};
}

// ---- 6 ---------------------------------------------------------------------------

Outcome oracle_ratio() {
  const ProductKernel k(Kernel::gaussian());
  const std::size_t n = 1000;
  const auto grid = default_grid(k, n);
  const std::vector<MethodSpec> methods{MethodSpec::parse("pco:1"), MethodSpec::parse("pco:5")};
  bool ok = true;
  std::string detail;
  for (const auto& f : {Density::standard_normal(), Density::gaussian_mixture({{0.5, -1.5, 0.6}, {0.5, 1.5, 0.6}})}) {
    const auto rep = oracle_experiment(f, n, k, grid, methods, 100, 6001, g_threads);
    const double r1 = rep.methods[0].ratio_summary.median;
    const double r5 = rep.methods[1].ratio_summary.median;
    ok = ok && r1 <= 1.5 && r1 <= r5;
    detail += fmt("%s: median ratio lambda=1 %.3f, lambda=5 %.3f; ", f.id().c_str(), r1, r5);
  }
  return {ok, detail + "(limits: <= 1.5, lambda=1 <= lambda=5)"};
}

// ---- 7 ---------------------------------------------------------------------------

Outcome rate_slope() {
  const ProductKernel k(Kernel::parse("order:4:gaussian"));
  const auto r = rate_experiment(Density::standard_normal(), 2.0, k, {250, 500, 1000, 2000, 4000}, 100, 7001, g_threads);
  std::string medians;
  for (double m : r.median_ise) medians += fmt("%.3g ", m);
  return {r.slope >= -0.95 && r.slope <= -0.65,
          fmt("slope %.3f (limits [-0.95, -0.65]); median ISE %s", r.slope, medians.c_str())};
}

// ---- 8 ---------------------------------------------------------------------------

Outcome sequence_model() {
  const std::size_t N = 500;
  const double eps = 1.0 / std::sqrt(500.0);
  const double eps2 = eps * eps;
  const auto model = gwn::SequenceModel::zero(N, eps);
  const auto rows = gwn::phase_diagram(model, {0.5, 2.0}, 200, 8001, g_threads);
  const bool a = rows[0].frequency_half >= 0.9;
  const bool b = rows[0].mean_risk >= 0.1125 * N * eps2;
  const bool c = rows[1].mean_selected <= 10.0;
  const bool d = rows[1].mean_risk <= 20.0 * eps2;
  const auto id0 = gwn::risk_identity_check(model, 50, 400, 8002);
  const auto id1 = gwn::risk_identity_check(gwn::SequenceModel::power(N, 1.0, eps), 10, 400, 8003);
  return {a && b && c && d && id0.holds && id1.holds,
          fmt("lambda=0.5: freq(D>=125)=%.3f, risk/(N eps^2)=%.4f; lambda=2: mean D=%.2f, risk/eps^2=%.2f; "
              "identity |z|=%.2f, %.2f",
              rows[0].frequency_half, rows[0].mean_risk / (N * eps2), rows[1].mean_selected, rows[1].mean_risk / eps2,
              std::abs(id0.mean - id0.expected) / id0.standard_error, std::abs(id1.mean - id1.expected) / id1.standard_error)};
}

// ---- 9 ---------------------------------------------------------------------------

std::string risk_csv(std::size_t threads) {
  const ProductKernel k(Kernel::gaussian());
  const auto grid = default_grid(k, 300);
  const auto rep = oracle_experiment(Density::claw(), 300, k, grid,
                                     {MethodSpec::parse("pco"), MethodSpec::parse("lscv"), MethodSpec::parse("gl")}, 50, 9001,
                                     threads);
  std::ostringstream os;
  write_risk_csv(os, rep);
  return os.str();
}

std::string gwn_csv(std::size_t threads) {
  std::ostringstream os;
  gwn::write_phase_csv(os, gwn::phase_diagram(gwn::SequenceModel::power(300, 0.7, 0.05), default_lambda_grid(0.0, 3.0, 13), 60,
                                              9002, threads));
  return os.str();
}

Outcome determinism() {
  const auto a = risk_csv(1), b = risk_csv(1), c = risk_csv(std::max<std::size_t>(3, g_threads));
  const auto x = gwn_csv(1), y = gwn_csv(1), z = gwn_csv(std::max<std::size_t>(3, g_threads));
  const bool same = a == b && x == y;
  const bool threads_same = a == c && x == z;
  return {same && threads_same, fmt("rerun identical: %s; multi-threaded identical: %s (%zu + %zu bytes)", same ? "yes" : "no",
                                    threads_same ? "yes" : "no", a.size(), x.size())};
}

}  // namespace

int main(int argc, char** argv) {
  int only = 0;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--threads" && i + 1 < argc) {
      g_threads = static_cast<std::size_t>(std::strtoul(argv[++i], nullptr, 10));
    } else if (arg == "--only" && i + 1 < argc) {
      only = std::atoi(argv[++i]);
    } else {
      std::fprintf(stderr, "usage: %s [--threads N] [--only K]\n", argv[0]);
      return 2;
    }
  }
  struct Criterion {
    std::string name;
    std::function<Outcome()> check;
    double time_limit;  // seconds; 0 = none
  };
  const std::vector<Criterion> criteria{
      {"kernel analytics vs quadrature", kernel_analytics, 1.0},
      {"comparison term vs grid quadrature", criterion_oracle, 30.0},
      {"argmin invariances", argmin_invariance, 0.0},
      {"minimal-penalty phase transition", phase_transition, 0.0},
      {"penalty calibration", calibration, 0.0},
      {"oracle ratio", oracle_ratio, 0.0},
      {"rate slope, order-4 kernel", rate_slope, 900.0},
      {"Gaussian sequence model", sequence_model, 0.0},
      {"determinism", determinism, 0.0},
  };
  int failed = 0;
  for (std::size_t c = 0; c < criteria.size(); ++c) {
    if (only && static_cast<int>(c + 1) != only) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome out{false, ""};
    try {
      out = criteria[c].check();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::string timing = fmt("%.1f s", secs);
    if (criteria[c].time_limit > 0.0) {
      timing += fmt(" (limit %.0f s)", criteria[c].time_limit);
      if (secs > criteria[c].time_limit) out.pass = false;
    }
    if (!out.pass) ++failed;
    std::printf("%s %zu %s: %s [%s, threads=%zu]\n", out.pass ? "PASS" : "FAIL", c + 1, criteria[c].name.c_str(),
                out.detail.c_str(), timing.c_str(), g_threads);
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
