#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "fbmchar/kernels.hpp"
#include "fbmchar/quadrature.hpp"

using namespace fbm;
using boost::math::quadrature::tanh_sinh;

namespace {

// int_u^b s^{H-1/2} (s-u)^{H-3/2} ds via s = u + (b-u) x^{1/(H-1/2)}, which turns
// (s-u)^{H-3/2} ds into a constant multiple of dx.
double singular_f_oracle(double u, double b, double h) {
  const double e = h - 0.5;
  tanh_sinh<double> integrator;
  const double inner = integrator.integrate(
      [&](double x) { return std::pow(u + (b - u) * std::pow(x, 1.0 / e), e); }, 0.0, 1.0);
  return std::pow(b - u, e) / e * inner;
}

// int_s^t u^{H-3/2} (u-s)^{H-1/2} du = s^{2H-1} B(1-2H, H+1/2) (1 - I_{s/t}(1-2H, H+1/2)).
double z_correction_closed_form(double t, double s, double h) {
  const double a = 1.0 - 2.0 * h, b = h + 0.5;
  return std::pow(s, 2.0 * h - 1.0) * boost::math::beta(a, b) * boost::math::ibetac(a, b, s / t);
}

}  // namespace

TEST(Molchan, Examples) {
  EXPECT_DOUBLE_EQ(molchan_kernel(1, 0.5, HurstIndex(0.5)), 1.0);
  EXPECT_NEAR(molchan_kernel(1, 0.5, HurstIndex(0.25)), std::sqrt(0.5), 1e-15);
  EXPECT_NEAR(molchan_kernel(1, 0.5, HurstIndex(0.75)), std::sqrt(2.0), 1e-14);
  EXPECT_THROW(molchan_kernel(1, 0.0, HurstIndex(0.3)), InvalidArgument);
  EXPECT_THROW(molchan_kernel(1, 1.0, HurstIndex(0.3)), InvalidArgument);
  for (double s : {0.01, 0.3, 0.99}) EXPECT_EQ(molchan_kernel(1, s, HurstIndex(0.5)), 1.0);
}

TEST(Molchan, EndpointBehaviour) {
  // diverges at the endpoints iff H > 1/2
  EXPECT_GT(molchan_kernel(1, 1e-12, HurstIndex(0.75)), 100.0);
  EXPECT_LT(molchan_kernel(1, 1e-12, HurstIndex(0.25)), 1e-2);
}

TEST(BetaB1, Examples) {
  EXPECT_NEAR(beta_b1(HurstIndex(0.75)), std::numbers::pi * std::sqrt(2.0), 1e-12);
  EXPECT_NEAR(beta_b1(HurstIndex(0.9)), 3.3033, 1e-4);
  EXPECT_NEAR(beta_b1(HurstIndex(0.9)), boost::math::beta(0.4, 0.6), 1e-12);
  EXPECT_THROW(beta_b1(HurstIndex(0.5)), InvalidArgument);
  EXPECT_THROW(beta_b1(HurstIndex(0.3)), InvalidArgument);
}

TEST(AbelConst, Examples) {
  EXPECT_DOUBLE_EQ(abel_const(HurstIndex(0.5)), 1.0);
  EXPECT_NEAR(abel_const(HurstIndex(0.3)), abel_const(HurstIndex(0.7)), 1e-14);
  const double oracle = 1.0 / (boost::math::tgamma(1.25) * boost::math::tgamma(0.75));
  EXPECT_NEAR(abel_const(HurstIndex(0.75)), oracle, 1e-13);
  EXPECT_NEAR(abel_const(HurstIndex(0.75)), 0.9003, 1e-4);
}

TEST(AbelConst, GammaProductIsOne) {
  for (int i = 1; i <= 9; ++i) {
    const double h = 0.1 * i;
    const double prod = abel_const(HurstIndex(h)) * boost::math::tgamma(h + 0.5) * boost::math::tgamma(1.5 - h);
    EXPECT_NEAR(prod, 1.0, 1e-12) << "H=" << h;
  }
}

TEST(KernelConstants, Fields) {
  const auto hi = KernelConstants::compute(HurstIndex(0.75));
  ASSERT_TRUE(hi.b1.has_value());
  EXPECT_GT(*hi.b1, 0.0);
  EXPECT_GT(hi.abel_c, 0.0);
  EXPECT_GT(hi.molchan_bracket_c, 0.0);
  const auto lo = KernelConstants::compute(HurstIndex(0.25));
  EXPECT_FALSE(lo.b1.has_value());
  EXPECT_EQ(KernelConstants::compute(HurstIndex(0.5)).molchan_bracket_c, 1.0);
}

TEST(RepXM, ClosedFormAtOrigin) {
  const HurstIndex h(0.75);
  EXPECT_NEAR(repxm_kernel(1.0, 0.0, h), std::sqrt(2.0) / std::numbers::pi, 1e-12);
  // general t: t^{2H-1} / ((2H-1) B1)
  EXPECT_NEAR(repxm_kernel(3.0, 0.0, h), std::pow(3.0, 0.5) / (0.5 * beta_b1(h)), 1e-12);
}

TEST(RepXM, MatchesSubstitutionOracle) {
  for (double hv : {0.55, 0.75, 0.95}) {
    const HurstIndex h(hv);
    for (double u : {0.5, 0.1, 0.97}) {
      const double want = singular_f_oracle(u, 1.0, hv) / beta_b1(h);
      EXPECT_NEAR(repxm_kernel(1.0, u, h) / want, 1.0, 1e-8) << "H=" << hv << " u=" << u;
    }
  }
}

TEST(RepXM, VanishesAtDiagonalUnderBound) {
  const HurstIndex h(0.75);
  for (double gap : {1e-2, 1e-4, 1e-6}) {
    const double u = 1.0 - gap;
    const double bound = std::pow(gap, 0.25) / (0.25 * beta_b1(h));
    const double v = repxm_kernel(1.0, u, h);
    EXPECT_GT(v, 0.0);
    EXPECT_LE(v, bound * (1 + 1e-12));
  }
}

TEST(RepXM, RisesThenFallsInU) {
  // Not monotone: the kernel grows from u=0 up to an interior maximum, then
  // decays to 0 at u=t. Checked on a 50-point grid against quadrature.
  const double h = 0.75;
  const HurstIndex hi(h);
  tanh_sinh<double> integrator;
  std::vector<double> vals;
  for (int i = 0; i < 50; ++i) {
    const double u = i / 50.0;
    // s = u + (1-u) r^4 removes the (s-u)^{H-3/2} singularity
    const double want = integrator.integrate(
                            [&](double r) {
                              const double w = (1.0 - u) * r * r * r * r;
                              if (w <= 0.0) return 0.0;
                              return std::pow(u + w, h - 0.5) * std::pow(w, h - 1.5) * 4.0 * (1.0 - u) * r * r * r;
                            },
                            0.0, 1.0) /
                        beta_b1(hi);
    vals.push_back(repxm_kernel(1.0, u, hi));
    EXPECT_NEAR(vals.back() / want, 1.0, 1e-8) << "u=" << u;
  }
  const auto peak = std::max_element(vals.begin(), vals.end()) - vals.begin();
  EXPECT_GT(peak, 0);
  EXPECT_LT(peak, 49);
  for (std::size_t i = 1; i < vals.size(); ++i) {
    if (static_cast<std::ptrdiff_t>(i) <= peak) {
      EXPECT_GT(vals[i], vals[i - 1]) << i;
    } else {
      EXPECT_LT(vals[i], vals[i - 1]) << i;
    }
  }
}

TEST(RepXM, Domain) {
  EXPECT_THROW(repxm_kernel(1.0, 1.0, HurstIndex(0.75)), InvalidArgument);
  EXPECT_THROW(repxm_kernel(1.0, 0.5, HurstIndex(0.5)), InvalidArgument);
  EXPECT_NO_THROW(repxm_kernel(1.0, 0.5, HurstIndex(0.51)));
}

TEST(ZKernel, MatchesClosedFormOracle) {
  const double t = 1.0, s = 0.5, h = 0.25;
  const double lead = std::pow(s / t, 0.5 - h) * std::pow(t - s, h - 0.5);
  const double want = lead - (h - 0.5) * std::pow(s, 0.5 - h) * z_correction_closed_form(t, s, h);
  EXPECT_NEAR(z_kernel(t, s, HurstIndex(h)) / want, 1.0, 1e-8);
  for (double hv : {0.05, 0.4, 0.49}) {
    for (double sv : {0.01, 0.3, 0.9}) {
      const double l = std::pow(sv, 0.5 - hv) * std::pow(1 - sv, hv - 0.5);
      const double w = l - (hv - 0.5) * std::pow(sv, 0.5 - hv) * z_correction_closed_form(1, sv, hv);
      EXPECT_NEAR(z_kernel(1, sv, HurstIndex(hv)) / w, 1.0, 1e-8) << "H=" << hv << " s=" << sv;
    }
  }
}

TEST(ZKernel, LimitsAndDomain) {
  EXPECT_NEAR(z_kernel(1, 0.5, HurstIndex(0.5 - 1e-7)), 1.0, 1e-12);
  // leading term dominates near the diagonal and is positive
  const double near = z_kernel(1, 1 - 1e-8, HurstIndex(0.25));
  EXPECT_GT(near, 0.9 * std::pow(1e-8, -0.25));
  EXPECT_THROW(z_kernel(1, 0.5, HurstIndex(0.5)), InvalidArgument);
  EXPECT_THROW(z_kernel(1, 1.0, HurstIndex(0.25)), InvalidArgument);
  EXPECT_THROW(z_kernel(1, 0.0, HurstIndex(0.25)), InvalidArgument);
  EXPECT_NO_THROW(z_kernel(1, 0.5, HurstIndex(0.49)));
}

TEST(PartitionF, MatchesOracle) {
  const PartitionContext ctx(TimeGrid(1.0, 4), 3);
  const double h = 0.75, s = 0.25;
  tanh_sinh<double> integrator;
  const double want = integrator.integrate(
      [&](double u) { return std::pow(u, h - 0.5) * std::pow(u - s, h - 1.5); }, 0.5, 0.75);
  EXPECT_NEAR(partition_kernel_f(ctx, s, HurstIndex(h)) / want, 1.0, 1e-8);
  EXPECT_THROW(partition_kernel_f(ctx, 0.5, HurstIndex(h)), InvalidArgument);
}

TEST(PartitionF, UpperBoundAtRandomPoints) {
  std::mt19937_64 rng(11);
  const TimeGrid grid(1.0, 64);
  const HurstIndex h(0.75);
  std::uniform_int_distribution<std::size_t> kd(2, 64);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int i = 0; i < 100; ++i) {
    const PartitionContext ctx(grid, kd(rng));
    const double s = ctx.left() * unif(rng);
    EXPECT_LE(partition_kernel_f(ctx, s, h), f_upper_bound(ctx, s, h) * (1 + 1e-12));
  }
}

TEST(PartitionF, LowerBoundOnThirdCellBack) {
  std::mt19937_64 rng(12);
  const TimeGrid grid(1.0, 64);
  const HurstIndex h(0.75);
  std::uniform_int_distribution<std::size_t> kd(3, 64);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int i = 0; i < 100; ++i) {
    const PartitionContext ctx(grid, kd(rng));
    const double u = grid.time(ctx.k() - 3) + grid.step() * unif(rng);
    if (u <= 0.0) continue;
    const double f = partition_kernel_f(ctx, u, h);
    EXPECT_GE(f * f, f_squared_lower_bound(ctx, u, h) * (1 - 1e-12));
  }
}

TEST(PartitionG, Examples) {
  const HurstIndex h(0.75);
  const PartitionContext ctx(TimeGrid(1.0, 4), 4);
  EXPECT_EQ(partition_kernel_g_p(ctx, 1.0, h, PartitionKernel::G), 0.0);
  EXPECT_LT(partition_kernel_g_p(ctx, 1.0 - 1e-12, h, PartitionKernel::G), 1e-2);
  const double want = singular_f_oracle(0.8, 1.0, 0.75);
  EXPECT_NEAR(partition_kernel_g_p(ctx, 0.8, h, PartitionKernel::G) / want, 1.0, 1e-8);
  EXPECT_THROW(partition_kernel_g_p(ctx, 0.7, h, PartitionKernel::G), InvalidArgument);
}

TEST(PartitionP, BoundAtRandomPoints) {
  std::mt19937_64 rng(13);
  const TimeGrid grid(1.0, 64);
  const HurstIndex h(0.25);
  std::uniform_int_distribution<std::size_t> kd(3, 64);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int i = 0; i < 100; ++i) {
    const PartitionContext ctx(grid, kd(rng));
    const double s = grid.time(ctx.k() - 2) * unif(rng);
    if (s <= 0.0) continue;
    EXPECT_LE(partition_kernel_g_p(ctx, s, h, PartitionKernel::P), p_upper_bound(ctx, s, h) * (1 + 1e-12));
  }
  const PartitionContext ctx(grid, 10);
  EXPECT_THROW(partition_kernel_g_p(ctx, ctx.left(), h, PartitionKernel::P), InvalidArgument);
  EXPECT_THROW(partition_kernel_g_p(ctx, 0.1, HurstIndex(0.75), PartitionKernel::P), InvalidArgument);
}

TEST(PartitionP, MatchesOracle) {
  const PartitionContext ctx(TimeGrid(1.0, 8), 5);
  const double h = 0.3, s = 0.2;
  tanh_sinh<double> integrator;
  const double want = integrator.integrate(
      [&](double u) { return std::pow(s / u, 0.5 - h) * std::pow(u - s, h - 1.5); }, ctx.left(), ctx.right());
  EXPECT_NEAR(partition_kernel_g_p(ctx, s, HurstIndex(h), PartitionKernel::P) / want, 1.0, 1e-8);
}

TEST(ShiftedSums, FirstInequality) {
  const TimeGrid grid(1.0, 64);
  std::mt19937_64 rng(14);
  std::uniform_int_distribution<std::size_t> id(1, 62);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int i = 0; i < 200; ++i) {
    const HurstIndex h(0.02 + 0.96 * unif(rng));
    const std::size_t ns = id(rng);
    const double s = grid.time(ns);
    const double u = s * unif(rng);
    const double lhs = shifted_power_sum(grid, ns + 2, u, h);
    const double rhs = shifted_power_sum_bound(grid, s + grid.step() - u, h);
    EXPECT_LE(lhs, rhs * (1 + 1e-12));
  }
}

TEST(ShiftedSums, IndexedInequality) {
  const TimeGrid grid(1.0, 64);
  std::mt19937_64 rng(15);
  std::uniform_int_distribution<std::size_t> id(0, 62);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int i = 0; i < 200; ++i) {
    const HurstIndex h(0.02 + 0.96 * unif(rng));
    const std::size_t idx = id(rng);
    const double u = grid.time(idx) * unif(rng);
    const double lhs = shifted_power_sum(grid, idx + 2, u, h);
    const double rhs = shifted_power_sum_bound(grid, grid.time(idx + 1) - u, h);
    EXPECT_LE(lhs, rhs * (1 + 1e-12));
  }
}

TEST(Quadrature, NodeDoublingChangesKernelsLittle) {
  // the kernels use the default node count; compare against twice as many
  const HurstIndex hi(0.75), lo(0.25);
  const double r1 = repxm_kernel(1.0, 0.3, hi);
  const double r2 = quad::power_product_integral(0.3, 1.0, 0.3, 0.25, -0.75, 2 * quad::kDefaultNodes) / beta_b1(hi);
  EXPECT_NEAR(r1 / r2, 1.0, 1e-8);
  const double z1 = z_kernel(1.0, 0.3, lo);
  const double lead = std::pow(0.3, 0.25) * std::pow(0.7, -0.25);
  const double z2 = lead + 0.25 * std::pow(0.3, 0.25) *
                               quad::power_product_integral(0.3, 1.0, 0.3, -1.25, -0.25, 2 * quad::kDefaultNodes);
  EXPECT_NEAR(z1 / z2, 1.0, 1e-8);
}

TEST(BracketConstant, MonteCarloFreeSanity) {
  // exact at H = 1/2, positive and finite elsewhere
  EXPECT_EQ(molchan_bracket_constant(HurstIndex(0.5)), 1.0);
  for (double h : {0.1, 0.25, 0.7, 0.9}) {
    const double c = molchan_bracket_constant(HurstIndex(h));
    EXPECT_TRUE(std::isfinite(c));
    EXPECT_GT(c, 0.0);
  }
}
