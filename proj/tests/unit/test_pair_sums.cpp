#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "pco/pair_sums.hpp"
#include "pco/rng.hpp"

namespace {

using namespace pco;

std::vector<double> normal_points(std::size_t n, double sd, std::uint64_t seed) {
  auto rng = make_stream(seed, 0);
  std::normal_distribution<double> z(0.0, sd);
  std::vector<double> x(n);
  for (auto& v : x) v = z(rng);
  return x;
}

Sample normal_sample(std::size_t n, std::size_t d, std::uint64_t seed) {
  auto rng = make_stream(seed, 1);
  std::normal_distribution<double> z(0.0, 1.0);
  std::vector<double> x(n * d);
  for (auto& v : x) v = z(rng);
  return Sample(std::move(x), d);
}

double brute_exp_sum(const std::vector<double>& x, double sigma) {
  long double total = 0.0L;
  for (double a : x)
    for (double b : x) total += std::exp(-(a - b) * (a - b) / (2.0 * sigma * sigma));
  return static_cast<double>(total);
}

TEST(GaussianSum, DirectAndFastAgreeWithBruteForce) {
  for (std::size_t n : {1u, 2u, 65u, 700u, 3000u}) {
    auto x = normal_points(n, 1.0, n);
    std::sort(x.begin(), x.end());
    for (double sigma : {1e-4, 3e-3, 0.05, 0.4, 2.0, 30.0}) {
      const double want = brute_exp_sum(x, sigma);
      const double direct = gaussian_exp_sum_1d(x, sigma, GaussSumMethod::direct);
      const double fast = gaussian_exp_sum_1d(x, sigma, GaussSumMethod::fast);
      const double automatic = gaussian_exp_sum_1d(x, sigma);
      EXPECT_LT(oracle::rel_err(direct, want), 1e-12) << "n=" << n << " sigma=" << sigma;
      EXPECT_LT(oracle::rel_err(fast, want), 1e-12) << "n=" << n << " sigma=" << sigma;
      EXPECT_TRUE(automatic == direct || automatic == fast);
    }
  }
}

TEST(GaussianSum, FastPathOnClusteredAndSpreadData) {
  std::vector<double> x;
  for (int c = 0; c < 5; ++c)
    for (double v : normal_points(300, 0.01, 40 + c)) x.push_back(v + 100.0 * c);
  std::sort(x.begin(), x.end());
  for (double sigma : {0.002, 0.05, 1.0, 80.0}) {
    const double want = brute_exp_sum(x, sigma);
    EXPECT_LT(oracle::rel_err(gaussian_exp_sum_1d(x, sigma, GaussSumMethod::fast), want), 1e-12) << sigma;
  }
}

TEST(GaussianSum, RejectsBadSigma) {
  const std::vector<double> x{0.0, 1.0};
  EXPECT_THROW(gaussian_exp_sum_1d(x, 0.0), std::invalid_argument);
  EXPECT_EQ(gaussian_exp_sum_1d(std::vector<double>{}, 1.0), 0.0);
}

TEST(PairSummer, GaussianProfilesMatchBruteForce) {
  for (std::size_t d : {1u, 2u}) {
    const auto s = normal_sample(150, d, 3 + d);
    const PairSummer pairs(s);
    for (const char* id : {"gaussian", "order:4:gaussian"}) {
      const ProductKernel k(Kernel::parse(id), d);
      const Bandwidth a(std::vector<double>(d, 0.3));
      std::vector<double> bv{0.05};
      if (d == 2) bv.push_back(0.11);
      const Bandwidth b(bv);
      const double got = convolution_pair_sum(pairs, k, a, b);
      const double want = oracle::brute_pair_sum(s, [&](const std::vector<double>& t) {
        double v = 1.0;
        for (std::size_t j = 0; j < d; ++j) v *= axis_convolution(k.axis(), a[j], b[j], t[j]);
        return v;
      });
      EXPECT_LT(oracle::rel_err(got, want), 1e-12) << id << " d=" << d;
      const double kp = kernel_pair_sum(pairs, k, b);
      const double kwant = oracle::brute_pair_sum(s, [&](const std::vector<double>& t) { return k.scaled(t, b); });
      EXPECT_LT(oracle::rel_err(kp, kwant), 1e-12) << id << " d=" << d;
    }
  }
}

TEST(PairSummer, CompactProfilesMatchBruteForce) {
  for (std::size_t d : {1u, 2u}) {
    const auto s = normal_sample(120, d, 9 + d);
    const PairSummer pairs(s);
    for (const char* id : {"epanechnikov", "order:4:epanechnikov"}) {
      const ProductKernel k(Kernel::parse(id), d);
      const Bandwidth a(std::vector<double>(d, 0.4));
      const Bandwidth b(std::vector<double>(d, 0.07));
      const double got = convolution_pair_sum(pairs, k, a, b);
      const double want = oracle::brute_pair_sum(s, [&](const std::vector<double>& t) {
        double v = 1.0;
        for (std::size_t j = 0; j < d; ++j) v *= axis_convolution(k.axis(), a[j], b[j], t[j]);
        return v;
      });
      EXPECT_LT(oracle::rel_err(got, want), 1e-12) << id << " d=" << d;
      const double kp = kernel_pair_sum(pairs, k, a);
      const double kwant = oracle::brute_pair_sum(s, [&](const std::vector<double>& t) { return k.scaled(t, a); });
      EXPECT_LT(oracle::rel_err(kp, kwant), 1e-12) << id << " d=" << d;
    }
  }
}

TEST(PairSummer, ExactlyInvariantUnderPermutation) {
  for (std::size_t d : {1u, 2u}) {
    const auto s = normal_sample(400, d, 21);
    std::vector<std::size_t> order(s.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::shuffle(order.begin(), order.end(), make_stream(5, 5));
    std::vector<double> permuted;
    for (std::size_t i : order) permuted.insert(permuted.end(), s.point(i).begin(), s.point(i).end());
    const Sample t(permuted, d);
    for (const char* id : {"gaussian", "epanechnikov"}) {
      const ProductKernel k(Kernel::parse(id), d);
      const Bandwidth a(std::vector<double>(d, 0.2));
      const Bandwidth b(std::vector<double>(d, 0.01));
      EXPECT_EQ(convolution_pair_sum(PairSummer(s), k, a, b), convolution_pair_sum(PairSummer(t), k, a, b));
    }
  }
}

TEST(PairSummer, RejectsMismatchedProfiles) {
  const auto s = normal_sample(10, 2, 1);
  const PairSummer pairs(s);
  const std::vector<AxisProfile> one{scaled_kernel_profile(Kernel::gaussian(), 1.0)};
  EXPECT_THROW(pairs.sum(one), std::invalid_argument);
  const std::vector<AxisProfile> mixed{scaled_kernel_profile(Kernel::gaussian(), 1.0),
                                       scaled_kernel_profile(Kernel::epanechnikov(), 1.0)};
  EXPECT_THROW(pairs.sum(mixed), std::invalid_argument);
  EXPECT_THROW(AxisProfile::gaussian_mixture({}), std::invalid_argument);
}

}  // namespace
