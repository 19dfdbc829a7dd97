#include "pco/gwn.hpp"

#include <charconv>
#include <cmath>
#include <random>
#include <stdexcept>
#include <string>

#include "pco/kahan.hpp"
#include "pco/parallel.hpp"
#include "format.hpp"

namespace pco::gwn {

namespace {

void check_model(const SequenceModel& m) {
  if (m.theta.empty()) throw std::invalid_argument("sequence model: N must be >= 1");
  if (!(m.epsilon > 0.0) || !std::isfinite(m.epsilon)) throw std::invalid_argument("sequence model: epsilon must be > 0");
}

}  // namespace

SequenceModel SequenceModel::zero(std::size_t N, double epsilon) {
  SequenceModel m{std::vector<double>(N, 0.0), epsilon};
  check_model(m);
  return m;
}

SequenceModel SequenceModel::power(std::size_t N, double a, double epsilon) {
  SequenceModel m{std::vector<double>(N), epsilon};
  for (std::size_t j = 0; j < N; ++j) m.theta[j] = std::pow(static_cast<double>(j + 1), -a);
  check_model(m);
  return m;
}

SequenceModel SequenceModel::parse(std::string_view theta, std::size_t N, double epsilon) {
  if (theta == "zero") return zero(N, epsilon);
  if (theta.starts_with("power:")) {
    const auto num = theta.substr(6);
    double a = 0.0;
    const auto [ptr, ec] = std::from_chars(num.data(), num.data() + num.size(), a);
    if (ec == std::errc() && ptr == num.data() + num.size() && std::isfinite(a)) return power(N, a, epsilon);
  }
  throw std::invalid_argument("theta profile '" + std::string(theta) + "' (expected zero or power:<a>)");
}

double projection_risk(const SequenceModel& model, std::span<const double> xi, std::size_t D) {
  KahanSum risk;
  for (std::size_t j = 0; j < model.size(); ++j) {
    const double e = j < D ? xi[j] - model.theta[j] : model.theta[j];
    risk.add(e * e);
  }
  return risk.value();
}

SequenceRun evaluate(const SequenceModel& model, double lambda, std::vector<double> xi) {
  check_model(model);
  if (xi.size() != model.size()) throw std::invalid_argument("evaluate: observation count differs from N");
  SequenceRun run;
  run.xi = std::move(xi);
  run.crit.resize(model.size());
  const double eps2 = model.epsilon * model.epsilon;
  KahanSum energy;
  double best = 0.0;
  for (std::size_t D = 1; D <= model.size(); ++D) {
    energy.add(run.xi[D - 1] * run.xi[D - 1]);
    const double c = -energy.value() + lambda * static_cast<double>(D) * eps2;
    run.crit[D - 1] = c;
    if (D == 1 || c < best) {
      best = c;
      run.selected = D;
    }
  }
  run.risk = projection_risk(model, run.xi, run.selected);
  return run;
}

std::vector<double> observe(const SequenceModel& model, Engine& rng) {
  check_model(model);
  std::normal_distribution<double> z(0.0, 1.0);
  std::vector<double> xi(model.size());
  for (std::size_t j = 0; j < model.size(); ++j) xi[j] = model.theta[j] + model.epsilon * z(rng);
  return xi;
}

SequenceRun run_once(const SequenceModel& model, double lambda, std::uint64_t seed) {
  auto rng = make_stream(seed, 0);
  return evaluate(model, lambda, observe(model, rng));
}

RiskIdentityResult risk_identity_check(const SequenceModel& model, std::size_t D, std::size_t reps, std::uint64_t seed) {
  check_model(model);
  if (D < 1 || D > model.size()) throw std::invalid_argument("risk_identity_check: need 1 <= D <= N");
  if (reps < 50) throw std::invalid_argument("risk_identity_check: reps must be >= 50");
  KahanSum sum;
  KahanSum sum_sq;
  for (std::size_t r = 0; r < reps; ++r) {
    auto rng = make_stream(seed, r);
    const double risk = projection_risk(model, observe(model, rng), D);
    sum.add(risk);
    sum_sq.add(risk * risk);
  }
  const double m = static_cast<double>(reps);
  const double mean = sum.value() / m;
  const double var = std::max(0.0, (sum_sq.value() - m * mean * mean) / (m - 1.0));
  const double se = std::sqrt(var / m);
  KahanSum tail;
  for (std::size_t j = D; j < model.size(); ++j) tail.add(model.theta[j] * model.theta[j]);
  const double expected = tail.value() + static_cast<double>(D) * model.epsilon * model.epsilon;
  return {mean, se, expected, std::abs(mean - expected) <= 4.0 * se};
}

std::vector<PhaseRow> phase_diagram(const SequenceModel& model, const std::vector<double>& lambdas, std::size_t reps,
                                    std::uint64_t seed, std::size_t threads) {
  check_model(model);
  if (reps == 0) throw std::invalid_argument("phase_diagram: reps must be >= 1");
  if (lambdas.empty()) throw std::invalid_argument("phase_diagram: empty lambda grid");
  bool below = false;
  bool above = false;
  for (double l : lambdas) {
    below = below || l < 1.0;
    above = above || l > 1.0;
  }
  if (!below || !above) throw std::invalid_argument("phase_diagram: lambda grid must span values below and above 1");

  const std::size_t L = lambdas.size();
  std::vector<std::size_t> selected(reps * L);
  std::vector<double> risk(reps * L);
  parallel_for(reps, threads, [&](std::size_t r) {
    auto rng = make_stream(seed, r);
    const auto xi = observe(model, rng);
    for (std::size_t l = 0; l < L; ++l) {
      const auto run = evaluate(model, lambdas[l], xi);
      selected[r * L + l] = run.selected;
      risk[r * L + l] = run.risk;
    }
  });

  std::vector<PhaseRow> rows;
  const double N = static_cast<double>(model.size());
  for (std::size_t l = 0; l < L; ++l) {
    KahanSum d_sum;
    KahanSum r_sum;
    std::size_t hits = 0;
    for (std::size_t r = 0; r < reps; ++r) {
      d_sum.add(static_cast<double>(selected[r * L + l]));
      r_sum.add(risk[r * L + l]);
      if (static_cast<double>(selected[r * L + l]) >= (1.0 - lambdas[l]) * N / 2.0) ++hits;
    }
    const double m = static_cast<double>(reps);
    rows.push_back({lambdas[l], d_sum.value() / m, r_sum.value() / m, static_cast<double>(hits) / m});
  }
  return rows;
}

void write_phase_csv(std::ostream& out, const std::vector<PhaseRow>& rows) {
  out << "lambda,mean_D,mean_risk,freq_half\n";
  for (const auto& r : rows)
    out << detail::shortest(r.lambda) << ',' << detail::shortest(r.mean_selected) << ',' << detail::shortest(r.mean_risk) << ',' << detail::shortest(r.frequency_half)
        << '\n';
}

}  // namespace pco::gwn
