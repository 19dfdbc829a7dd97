#include "pco/density.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include "pco/error.hpp"
#include "pco/quadrature.hpp"
#include "format.hpp"

namespace pco {

namespace {

constexpr double kInvSqrt2Pi = 0.3989422804014327;

double normal_pdf(double x, double mean, double sd) {
  const double z = (x - mean) / sd;
  return kInvSqrt2Pi / sd * std::exp(-0.5 * z * z);
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

double parse_number(std::string_view text, std::string_view context) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size())
    throw ParseError("density '" + std::string(context) + "': cannot parse number '" + std::string(text) + "'");
  return v;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.push_back(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

}  // namespace

// ---- Marginal ------------------------------------------------------------------

Marginal Marginal::mixture(std::vector<NormalComponent> components) {
  if (components.empty()) throw std::invalid_argument("mixture: at least one component required");
  double total = 0.0;
  for (const auto& c : components) {
    if (!(c.weight > 0.0) || !(c.sd > 0.0) || !std::isfinite(c.mean))
      throw std::invalid_argument("mixture: weights and sds must be positive, means finite");
    total += c.weight;
  }
  if (std::abs(total - 1.0) > 1e-9) throw std::invalid_argument("mixture: weights must sum to 1");
  Marginal m;
  m.components_ = std::move(components);
  return m;
}

Marginal Marginal::uniform(double lo, double hi) {
  if (!(hi > lo) || !std::isfinite(lo) || !std::isfinite(hi))
    throw std::invalid_argument("uniform: need finite lo < hi");
  Marginal m;
  m.lo_ = lo;
  m.hi_ = hi;
  return m;
}

double Marginal::pdf(double x) const {
  if (is_uniform()) return (x >= lo_ && x <= hi_) ? 1.0 / (hi_ - lo_) : 0.0;
  double v = 0.0;
  for (const auto& c : components_) v += c.weight * normal_pdf(x, c.mean, c.sd);
  return v;
}

double Marginal::cdf(double x) const {
  if (is_uniform()) return std::clamp((x - lo_) / (hi_ - lo_), 0.0, 1.0);
  double v = 0.0;
  for (const auto& c : components_) v += c.weight * normal_cdf((x - c.mean) / c.sd);
  return v;
}

double Marginal::sup_bound() const {
  if (is_uniform()) return 1.0 / (hi_ - lo_);
  double v = 0.0;
  for (const auto& c : components_) v += c.weight * kInvSqrt2Pi / c.sd;
  return v;
}

double Marginal::l2_norm_sq() const {
  if (is_uniform()) return 1.0 / (hi_ - lo_);
  double v = 0.0;
  for (const auto& a : components_)
    for (const auto& b : components_)
      v += a.weight * b.weight * normal_pdf(a.mean, b.mean, std::sqrt(a.sd * a.sd + b.sd * b.sd));
  return v;
}

double Marginal::draw(Engine& rng) const {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  if (is_uniform()) return lo_ + (hi_ - lo_) * unit(rng);
  std::size_t pick = 0;
  if (components_.size() > 1) {
    const double u = unit(rng);
    double acc = 0.0;
    pick = components_.size() - 1;
    for (std::size_t c = 0; c < components_.size(); ++c) {
      acc += components_[c].weight;
      if (u < acc) {
        pick = c;
        break;
      }
    }
  }
  std::normal_distribution<double> normal(components_[pick].mean, components_[pick].sd);
  return normal(rng);
}

std::pair<double, double> Marginal::effective_support() const {
  if (is_uniform()) return {lo_, hi_};
  double lo = components_[0].mean;
  double hi = lo;
  for (const auto& c : components_) {
    lo = std::min(lo, c.mean - 8.5 * c.sd);
    hi = std::max(hi, c.mean + 8.5 * c.sd);
  }
  return {lo, hi};
}

double Marginal::smoothed(const Kernel& k, double h, double x) const {
  if (k.family() == KernelFamily::gaussian) {
    double v = 0.0;
    for (const auto& kc : k.components()) {
      const double s = h * kc.scale;
      if (is_uniform()) {
        v += kc.weight * (normal_cdf((x - lo_) / s) - normal_cdf((x - hi_) / s)) / (hi_ - lo_);
      } else {
        for (const auto& c : components_)
          v += kc.weight * c.weight * normal_pdf(x, c.mean, std::sqrt(c.sd * c.sd + s * s));
      }
    }
    return v;
  }
  // Compact kernel: integrate K_h(x - y) f(y) over the kernel's support.
  const double reach = h * k.support_radius();
  double lo = x - reach;
  double hi = x + reach;
  std::vector<double> breaks;
  for (double kink : k.kinks(h)) breaks.push_back(x + kink);
  if (is_uniform()) {
    lo = std::max(lo, lo_);
    hi = std::min(hi, hi_);
  }
  return quad::integrate([&](double y) { return k((x - y) / h) / h * pdf(y); }, lo, hi, breaks,
                         quad::Options{1e-11, 1e-15, 40});
}

// ---- Density ---------------------------------------------------------------------

Density::Density(std::string id, std::vector<Marginal> marginals)
    : id_(std::move(id)), marginals_(std::move(marginals)) {}

Density Density::standard_normal() { return Density("standard_normal", {Marginal::mixture({{1.0, 0.0, 1.0}})}); }

Density Density::normal(double mean, double sd) {
  return Density("normal:" + detail::shortest(mean) + ":" + detail::shortest(sd), {Marginal::mixture({{1.0, mean, sd}})});
}

Density Density::gaussian_mixture(std::vector<NormalComponent> components) {
  std::string id = "mixture:";
  for (std::size_t c = 0; c < components.size(); ++c) {
    if (c) id += ';';
    id += detail::shortest(components[c].weight) + "," + detail::shortest(components[c].mean) + "," +
          detail::shortest(components[c].sd);
  }
  return Density(id, {Marginal::mixture(std::move(components))});
}

Density Density::uniform(double lo, double hi) {
  const std::string id = (lo == 0.0 && hi == 1.0) ? "uniform" : "uniform:" + detail::shortest(lo) + ":" + detail::shortest(hi);
  return Density(id, {Marginal::uniform(lo, hi)});
}

Density Density::claw() {
  std::vector<NormalComponent> comps{{0.5, 0.0, 1.0}};
  for (int l = 0; l <= 4; ++l) comps.push_back({0.1, l / 2.0 - 1.0, 0.1});
  return Density("claw", {Marginal::mixture(std::move(comps))});
}

Density Density::product(std::vector<Density> factors) {
  if (factors.empty()) throw std::invalid_argument("product density: no factors");
  std::string id;
  std::vector<Marginal> marginals;
  for (auto& f : factors) {
    if (!id.empty()) id += '*';
    id += f.id_;
    marginals.insert(marginals.end(), f.marginals_.begin(), f.marginals_.end());
  }
  return Density(id, std::move(marginals));
}

Density Density::parse(std::string_view id) {
  if (id.find('*') != std::string_view::npos) {
    std::vector<Density> factors;
    for (auto part : split(id, '*')) factors.push_back(parse(part));
    return product(std::move(factors));
  }
  if (id == "standard_normal") return standard_normal();
  if (id == "claw") return claw();
  if (id == "uniform") return uniform();
  const auto parts = split(id, ':');
  if (parts[0] == "uniform" && parts.size() == 3)
    return uniform(parse_number(parts[1], id), parse_number(parts[2], id));
  if (parts[0] == "normal" && parts.size() == 3)
    return normal(parse_number(parts[1], id), parse_number(parts[2], id));
  if (parts[0] == "mixture" && parts.size() == 2) {
    std::vector<NormalComponent> comps;
    for (auto comp : split(parts[1], ';')) {
      const auto fields = split(comp, ',');
      if (fields.size() != 3) throw ParseError("density '" + std::string(id) + "': components are <w>,<mean>,<sd>");
      comps.push_back({parse_number(fields[0], id), parse_number(fields[1], id), parse_number(fields[2], id)});
    }
    return gaussian_mixture(std::move(comps));
  }
  throw std::invalid_argument("unknown density id '" + std::string(id) + "'");
}

double Density::operator()(std::span<const double> x) const {
  if (x.size() != dim()) throw std::invalid_argument("Density: point dimension mismatch");
  double v = 1.0;
  for (std::size_t k = 0; k < dim(); ++k) v *= marginals_[k].pdf(x[k]);
  return v;
}

double Density::sup_bound() const {
  double v = 1.0;
  for (const auto& m : marginals_) v *= m.sup_bound();
  return v;
}

double Density::l2_norm_sq() const {
  double v = 1.0;
  for (const auto& m : marginals_) v *= m.l2_norm_sq();
  return v;
}

Sample Density::sample(std::size_t n, Engine& rng) const {
  if (n == 0) throw std::invalid_argument("Density::sample: n must be >= 1");
  std::vector<double> values(n * dim());
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < dim(); ++k) values[i * dim() + k] = marginals_[k].draw(rng);
  return Sample(std::move(values), dim());
}

double Density::smoothed(const ProductKernel& k, const Bandwidth& h, std::span<const double> x) const {
  if (k.dim() != dim() || h.dim() != dim() || x.size() != dim())
    throw std::invalid_argument("Density::smoothed: dimension mismatch");
  double v = 1.0;
  for (std::size_t j = 0; j < dim(); ++j) v *= marginals_[j].smoothed(k.axis(), h[j], x[j]);
  return v;
}

double Density::mass_outside(std::span<const double> lo, std::span<const double> hi) const {
  double inside = 1.0;
  for (std::size_t k = 0; k < dim(); ++k) inside *= marginals_[k].cdf(hi[k]) - marginals_[k].cdf(lo[k]);
  return std::max(0.0, 1.0 - inside);
}

}  // namespace pco
