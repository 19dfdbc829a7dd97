#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "pco/kernels.hpp"

namespace {

using namespace pco;

std::vector<Kernel> all_kernels() {
  return {Kernel::gaussian(), Kernel::epanechnikov(), Kernel::parse("order:4:gaussian"),
          Kernel::parse("order:4:epanechnikov"), Kernel::parse("order:6:gaussian")};
}

ProductKernel pk(const Kernel& k, std::size_t d = 1) { return ProductKernel(k, d); }

TEST(Bandwidth, RejectsNonPositiveAndNonFinite) {
  EXPECT_THROW(Bandwidth(0.0), std::invalid_argument);
  EXPECT_THROW(Bandwidth(-1.0), std::invalid_argument);
  EXPECT_THROW(Bandwidth(std::nan("")), std::invalid_argument);
  const double inf = std::numeric_limits<double>::infinity();
  EXPECT_THROW((void)Bandwidth(inf), std::invalid_argument);
  EXPECT_THROW(Bandwidth(std::vector<double>{}), std::invalid_argument);
  EXPECT_THROW(Bandwidth(std::vector<double>{0.1, 0.0}), std::invalid_argument);
}

TEST(Bandwidth, VolumeOrderAndMax) {
  const Bandwidth a({0.1, 0.4});
  const Bandwidth b({0.2, 0.3});
  EXPECT_DOUBLE_EQ(a.volume(), 0.1 * 0.4);
  EXPECT_FALSE(a.coordinatewise_le(b));
  EXPECT_TRUE(Bandwidth({0.1, 0.3}).coordinatewise_le(b));
  EXPECT_EQ(coordinatewise_max(a, b), Bandwidth({0.2, 0.4}));
  EXPECT_THROW(coordinatewise_max(a, Bandwidth(0.1)), std::invalid_argument);
}

TEST(Kernel, ParseIds) {
  EXPECT_EQ(Kernel::parse("gaussian").id(), "gaussian");
  EXPECT_EQ(Kernel::parse("epanechnikov").id(), "epanechnikov");
  EXPECT_EQ(Kernel::parse("order:4:gaussian").id(), "order:4:gaussian");
  EXPECT_EQ(Kernel::parse("order:4:gaussian").order(), 4);
  EXPECT_EQ(Kernel::parse("order:2:epanechnikov").id(), "epanechnikov");
  for (const char* bad : {"", "cosine", "order:", "order:x:gaussian", "order:4:", "order:1:gaussian", "order:4:order:4:gaussian"})
    EXPECT_THROW(Kernel::parse(bad), std::invalid_argument) << bad;
}

TEST(Kernel, SymmetricAndNormalised) {
  for (const auto& k : all_kernels()) {
    for (double u = 0.0; u <= 4.0; u += 0.0371) EXPECT_EQ(k(u), k(-u)) << k.id();
    const auto w = oracle::window(k, 1.0);
    const double mass = oracle::integrate([&](double u) { return k(u); }, w.lo, w.hi, w.breaks);
    EXPECT_NEAR(mass, 1.0, 1e-8) << k.id();
  }
}

TEST(Kernel, CachedScalarsMatchQuadrature) {
  for (const auto& k : all_kernels()) {
    const auto w = oracle::window(k, 1.0);
    // Sign changes of the higher-order kernels, located on a fine scan.
    std::vector<double> br = w.breaks;
    double prev = k(w.lo);
    for (double u = w.lo; u <= w.hi; u += 1e-4) {
      const double v = k(u);
      if ((v < 0) != (prev < 0)) br.push_back(u);
      prev = v;
    }
    const double l1 = oracle::integrate([&](double u) { return std::abs(k(u)); }, w.lo, w.hi, br);
    const double l2 = oracle::integrate([&](double u) { return k(u) * k(u); }, w.lo, w.hi, w.breaks);
    double sup = 0.0;
    for (double u = w.lo; u <= w.hi; u += 1e-5) sup = std::max(sup, std::abs(k(u)));
    EXPECT_LT(oracle::rel_err(k.l1_norm(), l1), 1e-8) << k.id();
    EXPECT_LT(oracle::rel_err(k.l2_norm_sq(), l2), 1e-8) << k.id();
    EXPECT_LT(oracle::rel_err(k.sup_norm(), sup), 1e-8) << k.id();
    EXPECT_GE(k.sup_norm(), sup) << k.id();
  }
}

TEST(Kernel, PlainKernelConstants) {
  EXPECT_NEAR(Kernel::gaussian().l2_norm_sq(), 1.0 / (2.0 * std::sqrt(std::numbers::pi)), 1e-15);
  EXPECT_NEAR(Kernel::epanechnikov().l2_norm_sq(), 0.6, 1e-15);
  EXPECT_DOUBLE_EQ(Kernel::gaussian().sup_norm(), 1.0 / std::sqrt(2.0 * std::numbers::pi));
  EXPECT_DOUBLE_EQ(Kernel::epanechnikov().sup_norm(), 0.75);
  EXPECT_DOUBLE_EQ(Kernel::epanechnikov()(1.0), 0.0);
  EXPECT_TRUE(Kernel::gaussian().nonnegative());
  EXPECT_FALSE(Kernel::parse("order:4:gaussian").nonnegative());
}

TEST(OrderKernel, OrderTwoIsTheBase) {
  const auto k = build_order_l_kernel(Kernel::gaussian(), 2);
  for (double u : {0.0, 0.3, 1.7}) EXPECT_EQ(k(u), Kernel::gaussian()(u));
  const auto e = build_order_l_kernel(Kernel::epanechnikov(), 2);
  EXPECT_EQ(e.components().size(), 1u);
}

TEST(OrderKernel, MomentsVanish) {
  for (const auto& base : {Kernel::gaussian(), Kernel::epanechnikov()}) {
    for (int l : {3, 4, 5, 6}) {
      const auto k = build_order_l_kernel(base, l);
      EXPECT_NEAR(oracle::moment(k, 0), 1.0, 1e-8) << k.id();
      for (int p = 1; p < l; ++p) EXPECT_NEAR(oracle::moment(k, p), 0.0, 1e-6) << k.id() << " moment " << p;
    }
  }
  // The order-4 Gaussian construction is a true order-4 kernel: its fourth moment is non-zero.
  EXPECT_GT(std::abs(oracle::moment(Kernel::parse("order:4:gaussian"), 4)), 1.0);
}

TEST(OrderKernel, RejectsBadArguments) {
  EXPECT_THROW(build_order_l_kernel(Kernel::gaussian(), 1), std::invalid_argument);
  EXPECT_THROW(build_order_l_kernel(Kernel::gaussian(), -3), std::invalid_argument);
  EXPECT_THROW(build_order_l_kernel(Kernel::parse("order:4:gaussian"), 4), std::invalid_argument);
}

TEST(KernelNorms, DocumentedValues) {
  const auto g = pk(Kernel::gaussian());
  const auto e = pk(Kernel::epanechnikov());
  EXPECT_NEAR(kernel_l2_norm_scaled(g, Bandwidth(1.0)), 0.2820948, 1e-7);
  EXPECT_NEAR(kernel_l2_norm_scaled(e, Bandwidth(1.0)), 0.6, 1e-12);
  EXPECT_NEAR(cross_inner(g, Bandwidth(0.5), Bandwidth(0.1)), 0.782390, 1e-6);
  EXPECT_NEAR(cross_inner(g, Bandwidth(0.5), Bandwidth(0.1)), 1.0 / std::sqrt(2.0 * std::numbers::pi * 0.26), 1e-15);
  EXPECT_NEAR(cross_inner(e, Bandwidth(1.0), Bandwidth(1.0)), 0.6, 1e-12);
  EXPECT_NEAR(diff_l2_norm(g, Bandwidth(0.5), Bandwidth(0.1)), 1.820358, 1e-6);
  EXPECT_EQ(diff_l2_norm(e, Bandwidth(1.0), Bandwidth(1.0)), 0.0);
  EXPECT_EQ(diff_l2_norm(g, Bandwidth(0.3), Bandwidth(0.3)), 0.0);
}

TEST(KernelNorms, ScalingLawAndConsistency) {
  for (const auto& k : all_kernels()) {
    const auto p = pk(k);
    for (double h : {0.01, 0.1, 0.5, 1.0, 10.0}) {
      EXPECT_LT(oracle::rel_err(kernel_l2_norm_scaled(p, Bandwidth(h)) * h, k.l2_norm_sq()), 1e-12);
      EXPECT_LT(oracle::rel_err(kernel_l2_norm_scaled(p, Bandwidth(0.5 * h)), 2.0 * kernel_l2_norm_scaled(p, Bandwidth(h))),
                1e-12);
      EXPECT_LT(oracle::rel_err(cross_inner(p, Bandwidth(h), Bandwidth(h)), kernel_l2_norm_scaled(p, Bandwidth(h))), 1e-10);
    }
  }
}

TEST(KernelNorms, SymmetricAndNonNegative) {
  const std::vector<double> hs{0.003, 0.01, 0.05, 0.1, 0.2, 0.21, 0.5, 1.0, 3.0};
  for (const auto& k : all_kernels()) {
    const auto p = pk(k);
    for (double a : hs)
      for (double b : hs) {
        EXPECT_EQ(cross_inner(p, Bandwidth(a), Bandwidth(b)), cross_inner(p, Bandwidth(b), Bandwidth(a)));
        EXPECT_GE(diff_l2_norm(p, Bandwidth(a), Bandwidth(b)), -1e-12);
      }
  }
}

TEST(KernelNorms, AgreeWithQuadratureAcrossScales) {
  for (const auto& k : {Kernel::gaussian(), Kernel::epanechnikov(), Kernel::parse("order:4:gaussian")}) {
    const auto p = pk(k);
    for (double h : {0.01, 0.1, 1.0, 10.0}) {
      const double h2 = 0.37 * h;
      EXPECT_LT(oracle::rel_err(kernel_l2_norm_scaled(p, Bandwidth(h)), oracle::l2_sq(k, h)), 1e-8) << k.id() << " " << h;
      EXPECT_LT(oracle::rel_err(cross_inner(p, Bandwidth(h), Bandwidth(h2)), oracle::inner(k, h, h2)), 1e-8);
      EXPECT_LT(oracle::rel_err(diff_l2_norm(p, Bandwidth(h), Bandwidth(h2)), oracle::diff_sq(k, h, h2)), 1e-8);
    }
  }
}

TEST(KernelNorms, DimensionMismatchThrows) {
  const auto p = pk(Kernel::gaussian(), 2);
  EXPECT_THROW(kernel_l2_norm_scaled(p, Bandwidth(1.0)), std::invalid_argument);
  EXPECT_THROW(cross_inner(p, Bandwidth({1.0, 1.0}), Bandwidth(1.0)), std::invalid_argument);
  EXPECT_THROW(diff_l2_norm(p, Bandwidth(1.0), Bandwidth({1.0, 1.0})), std::invalid_argument);
  EXPECT_THROW(pair_interaction(p, Bandwidth({1.0, 1.0}), Bandwidth({0.5, 0.5}), std::vector<double>{0.0}),
               std::invalid_argument);
}

TEST(ProductKernel, FactorisesOverAxes) {
  for (const auto& k : all_kernels()) {
    const auto p2 = pk(k, 2);
    const Bandwidth h({0.3, 0.7});
    const Bandwidth hm({0.1, 0.2});
    EXPECT_LT(oracle::rel_err(p2.l1_norm(), k.l1_norm() * k.l1_norm()), 1e-10);
    EXPECT_LT(oracle::rel_err(p2.sup_norm(), k.sup_norm() * k.sup_norm()), 1e-10);
    EXPECT_LT(oracle::rel_err(kernel_l2_norm_scaled(p2, h),
                              kernel_l2_norm_scaled(pk(k), Bandwidth(0.3)) * kernel_l2_norm_scaled(pk(k), Bandwidth(0.7))),
              1e-10);
    EXPECT_LT(oracle::rel_err(cross_inner(p2, h, hm), cross_inner(pk(k), Bandwidth(0.3), Bandwidth(0.1)) *
                                                          cross_inner(pk(k), Bandwidth(0.7), Bandwidth(0.2))),
              1e-10);
    const std::vector<double> x{0.05, -0.1};
    EXPECT_LT(oracle::rel_err(p2.scaled(x, h), k(0.05 / 0.3) / 0.3 * k(-0.1 / 0.7) / 0.7), 1e-14);
  }
  const auto p1 = pk(Kernel::gaussian(), 1);
  EXPECT_EQ(p1(std::vector<double>{0.4}), Kernel::gaussian()(0.4));
  EXPECT_THROW(ProductKernel(Kernel::gaussian(), 0), std::invalid_argument);
}

TEST(PairInteraction, ParsevalAndDecay) {
  for (const auto& k : all_kernels()) {
    const auto p = pk(k);
    const std::vector<double> zero{0.0};
    const double g0 = pair_interaction(p, Bandwidth(0.5), Bandwidth(0.1), zero);
    EXPECT_LT(oracle::rel_err(g0, diff_l2_norm(p, Bandwidth(0.5), Bandwidth(0.1))), 1e-8) << k.id();
    EXPECT_EQ(pair_interaction(p, Bandwidth(0.2), Bandwidth(0.2), zero), 0.0);
    if (k.nonnegative())
      EXPECT_LT(std::abs(pair_interaction(p, Bandwidth(0.5), Bandwidth(0.1), std::vector<double>{10.0})), 1e-8);
  }
  const std::vector<double> zero{0.0};
  EXPECT_NEAR(pair_interaction(pk(Kernel::gaussian()), Bandwidth(0.5), Bandwidth(0.1), zero), 1.820358, 1e-6);
}

TEST(PairInteraction, MatchesConvolutionOracle) {
  for (const auto& k : {Kernel::gaussian(), Kernel::epanechnikov(), Kernel::parse("order:4:epanechnikov")}) {
    for (double t : {0.0, 0.05, 0.13, 0.4, 0.69}) {
      const double want = oracle::convolution(k, 0.5, 0.5, t) - 2.0 * oracle::convolution(k, 0.5, 0.1, t) +
                          oracle::convolution(k, 0.1, 0.1, t);
      const double got = pair_interaction(pk(k), Bandwidth(0.5), Bandwidth(0.1), std::vector<double>{t});
      EXPECT_NEAR(got, want, 1e-10 * axis_convolution(k, 0.1, 0.1, 0.0)) << k.id() << " t=" << t;
    }
  }
}

TEST(AxisConvolution, MatchesQuadrature) {
  for (const auto& k : all_kernels())
    for (double a : {0.1, 0.8})
      for (double b : {0.1, 0.35})
        for (double t : {0.0, 0.07, 0.3, 0.9}) {
          const double want = oracle::convolution(k, a, b, t);
          EXPECT_NEAR(axis_convolution(k, a, b, t), want, 1e-10 * std::max(1.0, std::abs(want))) << k.id();
          EXPECT_NEAR(axis_convolution(k, a, b, t), axis_convolution(k, b, a, t), 1e-12 * std::max(1.0, std::abs(want)));
        }
}

}  // namespace
