#include "pco/calibration.hpp"

#include <string>

#include "format.hpp"

namespace pco {

CalibrationFailed::CalibrationFailed(CalibrationTrace trace)
    : std::runtime_error("calibration: no phase transition detected (largest volume ratio " + detail::shortest(trace.jump) +
                         " below " + detail::shortest(kJumpThreshold) + ")"),
      trace_(std::move(trace)) {}

std::vector<double> default_lambda_grid(double lo, double hi, std::size_t count) {
  if (count < 2 || !(hi > lo)) throw std::invalid_argument("lambda grid: need count >= 2 and lo < hi");
  std::vector<double> out(count);
  for (std::size_t k = 0; k < count; ++k)
    out[k] = lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(count - 1);
  return out;
}

std::optional<double> detect_jump(const std::vector<double>& lambdas, const std::vector<double>& volumes,
                                  double* jump) {
  if (lambdas.size() != volumes.size()) throw std::invalid_argument("detect_jump: length mismatch");
  double best = 1.0;
  std::size_t at = 0;
  for (std::size_t k = 0; k + 1 < lambdas.size(); ++k) {
    const double ratio = volumes[k + 1] / volumes[k];
    if (ratio > best) {
      best = ratio;
      at = k;
    }
  }
  if (jump) *jump = best;
  if (best < kJumpThreshold) return std::nullopt;
  return 0.5 * (lambdas[at] + lambdas[at + 1]);
}

std::optional<double> detect_jump(CalibrationTrace& trace) {
  return detect_jump(trace.lambdas, trace.volumes, &trace.jump);
}

CalibrationTrace scan_lambda(const ComparisonProfile& profile, const std::vector<double>& lambdas) {
  if (lambdas.empty()) throw std::invalid_argument("scan_lambda: empty lambda list");
  if (lambdas.size() < 5) throw std::invalid_argument("scan_lambda: at least 5 lambda values required");
  for (std::size_t k = 1; k < lambdas.size(); ++k)
    if (!(lambdas[k] > lambdas[k - 1])) throw std::invalid_argument("scan_lambda: lambdas must be strictly increasing");
  if (lambdas.front() > -1.0 || lambdas.back() < 2.0)
    throw std::invalid_argument("scan_lambda: lambdas must cover [-1, 2]");
  CalibrationTrace trace;
  trace.lambdas = lambdas;
  for (double lambda : lambdas) {
    const auto table = select_from_profile(profile, PenaltySpec{PenaltyMode::family, lambda});
    trace.selected.push_back(table.selected_bandwidth());
    trace.volumes.push_back(table.selected_bandwidth().volume());
  }
  trace.lambda_crit = detect_jump(trace);
  if (trace.lambda_crit) trace.recommended_lambda = *trace.lambda_crit + 1.0;
  return trace;
}

CalibrationTrace scan_lambda(const Sample& sample, const ProductKernel& k, const BandwidthGrid& grid,
                             const std::vector<double>& lambdas, std::size_t threads) {
  if (lambdas.empty()) throw std::invalid_argument("scan_lambda: empty lambda list");
  return scan_lambda(compute_comparisons(sample, k, grid, threads), lambdas);
}

PenaltySpec recommend(const CalibrationTrace& trace) {
  if (!trace.lambda_crit) throw CalibrationFailed(trace);
  return PenaltySpec{PenaltyMode::family, *trace.lambda_crit + 1.0};
}

void write_trace_csv(std::ostream& out, const CalibrationTrace& trace) {
  const std::size_t d = trace.selected.empty() ? 1 : trace.selected.front().dim();
  out << "lambda";
  for (std::size_t j = 1; j <= d; ++j) out << ",h_" << j;
  out << ",volume\n";
  for (std::size_t k = 0; k < trace.lambdas.size(); ++k) {
    out << detail::shortest(trace.lambdas[k]);
    for (double h : trace.selected[k].components()) out << ',' << detail::shortest(h);
    out << ',' << detail::shortest(trace.volumes[k]) << '\n';
  }
}

}  // namespace pco
