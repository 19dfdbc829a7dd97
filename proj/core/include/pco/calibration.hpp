#pragma once

#include <cstddef>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <vector>

#include "pco/selection.hpp"

namespace pco {

struct CalibrationTrace {
  std::vector<double> lambdas;
  std::vector<Bandwidth> selected;
  std::vector<double> volumes;
  std::optional<double> lambda_crit;
  std::optional<double> recommended_lambda;
  /// Largest ratio of consecutive selected volumes.
  double jump = 1.0;
};

class CalibrationFailed : public std::runtime_error {
 public:
  explicit CalibrationFailed(CalibrationTrace trace);
  const CalibrationTrace& trace() const { return trace_; }

 private:
  CalibrationTrace trace_;
};

inline constexpr double kJumpThreshold = 5.0;

/// `count` equispaced values on [lo, hi]; the default is 31 points on [-1, 2].
std::vector<double> default_lambda_grid(double lo = -1.0, double hi = 2.0, std::size_t count = 31);

/// Family-mode selection for each lambda. Lambdas must be strictly
/// increasing, at least 5 of them, and cover [-1, 2]. Fills lambda_crit and
/// recommended_lambda when a jump is detected.
CalibrationTrace scan_lambda(const ComparisonProfile& profile, const std::vector<double>& lambdas);
CalibrationTrace scan_lambda(const Sample& sample, const ProductKernel& k, const BandwidthGrid& grid,
                             const std::vector<double>& lambdas, std::size_t threads = 1);

/// Midpoint of the consecutive lambda pair with the largest volume ratio,
/// if that ratio reaches kJumpThreshold. Also stores the ratio in trace.jump.
std::optional<double> detect_jump(CalibrationTrace& trace);
std::optional<double> detect_jump(const std::vector<double>& lambdas, const std::vector<double>& volumes,
                                  double* jump = nullptr);

/// Family mode with lambda = lambda_crit + 1. Throws CalibrationFailed when no
/// transition is found.
PenaltySpec recommend(const CalibrationTrace& trace);

/// CSV with header lambda,h_1..h_d,volume.
void write_trace_csv(std::ostream& out, const CalibrationTrace& trace);

}  // namespace pco
