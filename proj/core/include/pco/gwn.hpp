#pragma once

#include <cstddef>
#include <cstdint>
#include <ostream>
#include <span>
#include <string_view>
#include <vector>

#include "pco/rng.hpp"

namespace pco::gwn {

/// Observations xi_j = theta_j + epsilon z_j, j = 1..N.
struct SequenceModel {
  std::vector<double> theta;
  double epsilon = 1.0;

  std::size_t size() const { return theta.size(); }

  static SequenceModel zero(std::size_t N, double epsilon);
  /// theta_j = j^{-a}.
  static SequenceModel power(std::size_t N, double a, double epsilon);
  /// "zero" or "power:<a>".
  static SequenceModel parse(std::string_view theta, std::size_t N, double epsilon);
};

struct SequenceRun {
  std::vector<double> xi;
  /// crit[D - 1] = -sum_{j <= D} xi_j^2 + lambda D epsilon^2.
  std::vector<double> crit;
  /// In [1, N]; ties go to the smallest D.
  std::size_t selected = 1;
  /// sum_{j <= D} (xi_j - theta_j)^2 + sum_{j > D} theta_j^2 at D = selected.
  double risk = 0.0;
};

/// Criterion, selection and risk for given observations.
SequenceRun evaluate(const SequenceModel& model, double lambda, std::vector<double> xi);
std::vector<double> observe(const SequenceModel& model, Engine& rng);
SequenceRun run_once(const SequenceModel& model, double lambda, std::uint64_t seed);

/// Realized loss of the projection estimator on the first D coordinates.
double projection_risk(const SequenceModel& model, std::span<const double> xi, std::size_t D);

struct RiskIdentityResult {
  double mean;
  double standard_error;
  /// sum_{j > D} theta_j^2 + D epsilon^2.
  double expected;
  /// |mean - expected| <= 4 standard errors.
  bool holds;
};

/// Throws std::invalid_argument unless 1 <= D <= N and reps >= 50.
RiskIdentityResult risk_identity_check(const SequenceModel& model, std::size_t D, std::size_t reps, std::uint64_t seed);

struct PhaseRow {
  double lambda;
  double mean_selected;
  double mean_risk;
  /// Share of replications with selected >= (1 - lambda) N / 2.
  double frequency_half;
};

/// Replication r uses make_stream(seed, r) and the same noise for every
/// lambda. The lambda grid must contain values below and above 1.
std::vector<PhaseRow> phase_diagram(const SequenceModel& model, const std::vector<double>& lambdas, std::size_t reps,
                                    std::uint64_t seed, std::size_t threads = 1);

/// CSV with header lambda,mean_D,mean_risk,freq_half.
void write_phase_csv(std::ostream& out, const std::vector<PhaseRow>& rows);

}  // namespace pco::gwn
