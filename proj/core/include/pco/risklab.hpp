#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "pco/baselines.hpp"
#include "pco/calibration.hpp"
#include "pco/density.hpp"
#include "pco/kde.hpp"
#include "pco/pair_sums.hpp"
#include "pco/selection.hpp"

namespace pco {

/// Trapezoid quadrature of (fhat - f)^2 over the estimate's grid. Throws
/// CoverageError when f puts more than 1e-3 of its mass outside the grid.
double ise(const DensityEstimate& estimate, const Density& f);

/// ||fhat_h - f||^2 = S(h,h)/n^2 - (2/n) sum_i f_h(X_i) + ||f||^2, with
/// f_h = K_h * f; no grid involved.
double exact_ise(const Sample& sample, const ProductKernel& k, const Bandwidth& h, const Density& f);

/// Geometric grid of `count` points from max(||K||_inf ||K||_1 / n, 1e-4) to hmax
/// (per axis, with the bound taken to the power 1/d, for d > 1).
BandwidthGrid default_grid(const ProductKernel& k, std::size_t n, std::size_t count = 30, double hmax = 1.0);

/// A selection rule evaluated in the Monte Carlo experiments.
struct MethodSpec {
  enum class Kind { pco, lepski, gl, lscv };
  Kind kind = Kind::pco;
  PenaltySpec penalty;
  BaselineSpec baseline;

  /// "pco" (lambda 1), "pco:<lambda>", "lepski", "gl", "lscv".
  static MethodSpec parse(std::string_view id);
  std::string name() const;
};

struct Summary {
  double mean = 0.0;
  double median = 0.0;
  double q10 = 0.0;
  double q90 = 0.0;
  double sd = 0.0;
};

Summary summarize(std::vector<double> values);
double median(std::vector<double> values);

struct MethodOutcome {
  MethodSpec method;
  std::vector<std::size_t> selected;  // per replication
  std::vector<double> ise;            // per replication
  /// ISE(selected) / min_h ISE(h), per replication; >= 1 by construction.
  std::vector<double> ratio;
  Summary ise_summary;
  Summary ratio_summary;
  /// mean ISE(selected) / mean ISE(oracle bandwidth).
  double mean_ratio = 0.0;
};

struct RiskReport {
  std::string density;
  std::size_t n = 0;
  std::size_t reps = 0;
  std::uint64_t seed = 0;
  BandwidthGrid grid;
  /// ise_by_h[r * grid.size() + i] = ISE of bandwidth i in replication r.
  std::vector<double> ise_by_h;
  std::vector<Summary> per_bandwidth;
  std::size_t oracle_index = 0;
  Bandwidth oracle_bandwidth{1.0};
  std::vector<MethodOutcome> methods;
};

/// Seeded Monte Carlo over `reps` replications; replication r draws from
/// make_stream(seed, r). Throws std::invalid_argument for reps < 50.
RiskReport oracle_experiment(const Density& f, std::size_t n, const ProductKernel& k, const BandwidthGrid& grid,
                             const std::vector<MethodSpec>& methods, std::size_t reps, std::uint64_t seed,
                             std::size_t threads = 1);

/// Long-format CSV: method,lambda,h_1..h_d,rep,ise. Rows for method "grid"
/// hold the ISE of every bandwidth.
void write_risk_csv(std::ostream& out, const RiskReport& report);

/// Family-mode selections for each lambda on every replication.
struct LambdaSweep {
  std::vector<double> lambdas;
  BandwidthGrid grid;
  /// selected[r][l]: grid index chosen for lambdas[l] in replication r.
  std::vector<std::vector<std::size_t>> selected;
  /// Per replication, the detected transition over this lambda grid.
  std::vector<std::optional<double>> lambda_crit;
};

LambdaSweep lambda_sweep(const Density& f, std::size_t n, const ProductKernel& k, const BandwidthGrid& grid,
                         const std::vector<double>& lambdas, std::size_t reps, std::uint64_t seed,
                         std::size_t threads = 1);

struct MinimalPenaltyRow {
  double lambda;
  /// 2.1 - 1/lambda.
  double factor;
  /// Share of replications with volume(selected) <= factor * volume(hmin).
  double frequency;
};

/// Throws std::invalid_argument if any lambda >= 0.
std::vector<MinimalPenaltyRow> minimal_penalty_experiment(const Density& f, std::size_t n, const ProductKernel& k,
                                                          const BandwidthGrid& grid, const std::vector<double>& lambdas,
                                                          std::size_t reps, std::uint64_t seed,
                                                          std::size_t threads = 1);

struct RateResult {
  std::vector<std::size_t> n_list;
  std::vector<double> median_ise;
  double slope = 0.0;
  double intercept = 0.0;
};

/// Least-squares slope of log median ISE of the PCO (lambda = 1) estimate
/// against log n, on default_grid(k, n, 30, hmax) for each n. Requires a
/// geometric n_list of at least 4 values and kernel order > beta.
RateResult rate_experiment(const Density& f, double beta, const ProductKernel& k, const std::vector<std::size_t>& n_list,
                           std::size_t reps, std::uint64_t seed, std::size_t threads = 1, double hmax = 1.0);

/// Slope and intercept of the least-squares line through (x, y).
std::pair<double, double> least_squares_line(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace pco
