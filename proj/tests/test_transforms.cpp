#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "fbmchar/estimators.hpp"
#include "fbmchar/fbm_gen.hpp"
#include "fbmchar/kernels.hpp"
#include "fbmchar/transforms.hpp"

using namespace fbm;

namespace {

SamplePath linear(std::size_t n, PathRole role, double t = 1.0) {
  return SamplePath::from_function(TimeGrid(t, n), [](double s) { return s; }, role);
}

double max_abs_diff(const SamplePath& a, const SamplePath& b) {
  double m = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) m = std::max(m, std::abs(a[k] - b[k]));
  return m;
}

double rel_l2(const SamplePath& approx, const SamplePath& exact) {
  double num = 0.0, den = 0.0;
  for (std::size_t k = 0; k < exact.size(); ++k) {
    num += (approx[k] - exact[k]) * (approx[k] - exact[k]);
    den += exact[k] * exact[k];
  }
  return std::sqrt(num / den);
}

SamplePath fbm_path(std::size_t n, double h, std::uint64_t seed = 42) {
  return generate_davies_harte(TimeGrid(1.0, n), HurstIndex(h), seed, 1).paths[0];
}

}  // namespace

TEST(RsIntegrate, UnitIntegrandIsIdentity) {
  const auto x = fbm_path(256, 0.4);
  const auto y = rs_integrate([](double) { return 1.0; }, x);
  EXPECT_LT(max_abs_diff(y, x), 1e-13);
  EXPECT_EQ(y.role(), PathRole::Other);
}

TEST(RsIntegrate, DeterministicQuadrature) {
  const auto x = linear(1000, PathRole::X);
  const auto y = rs_integrate([](double s) { return s; }, x);
  EXPECT_NEAR(y.back(), 0.5, 2.0 / 1000);
  const auto yl = rs_integrate([](double s) { return s; }, x, Scheme::Left);
  EXPECT_NEAR(yl.back(), 0.5, 2.0 / 1000);
  EXPECT_LT(yl.back(), 0.5);
}

TEST(RsIntegrate, Linearity) {
  const auto x = fbm_path(128, 0.6);
  auto f = [](double s) { return std::sin(s); };
  auto g = [](double s) { return s * s; };
  const auto lhs = rs_integrate([&](double s) { return 2 * f(s) + 3 * g(s); }, x);
  const auto a = rs_integrate(f, x);
  const auto b = rs_integrate(g, x);
  for (std::size_t k = 0; k < x.size(); ++k) EXPECT_NEAR(lhs[k], 2 * a[k] + 3 * b[k], 1e-13);
}

TEST(RsIntegrate, NonFiniteIntegrandNamesNode) {
  const auto x = linear(4, PathRole::X);
  try {
    rs_integrate([](double s) { return std::pow(s, -0.5); }, x, Scheme::Left);
    FAIL() << "expected NumericError";
  } catch (const NumericError& e) {
    EXPECT_NE(std::string(e.what()).find("s = 0"), std::string::npos) << e.what();
  }
}

TEST(YProcess, Examples) {
  const auto x = fbm_path(512, 0.5);
  EXPECT_EQ(max_abs_diff(y_process(x, HurstIndex(0.5)), x), 0.0);

  const HurstIndex h(0.75);
  const auto y = y_process(linear(4096, PathRole::X), h);
  EXPECT_NEAR(y.back() / (1.0 / 0.75), 1.0, 0.02);
  EXPECT_EQ(y.role(), PathRole::Y);
}

TEST(YProcess, RoundTrip) {
  const HurstIndex h(0.7);
  const auto x = fbm_path(4096, 0.7);
  EXPECT_LT(max_abs_diff(x_from_y(y_process(x, h), h), x), 1e-3);
}

TEST(Martingale, HalfIsIdentity) {
  const auto x = fbm_path(1024, 0.5);
  const auto m = fundamental_martingale(x, HurstIndex(0.5));
  EXPECT_LT(max_abs_diff(m, x), 1e-12);
  EXPECT_EQ(m.role(), PathRole::M);
}

TEST(Martingale, LinearPathClosedForm) {
  const HurstIndex h(0.75);
  const double want = boost::math::beta(0.75, 0.75);
  EXPECT_NEAR(want, boost::math::tgamma(0.75) * boost::math::tgamma(0.75) / boost::math::tgamma(1.5), 1e-14);
  const auto m = fundamental_martingale(linear(4096, PathRole::X), h);
  EXPECT_NEAR(m.back() / want, 1.0, 0.02);
  // every grid time follows B(3/2-H, 3/2-H) t^{2-2H}
  EXPECT_NEAR(m[2048] / (want * std::pow(0.5, 0.5)), 1.0, 0.02);
}

TEST(Martingale, YRouteAgrees) {
  for (double hv : {0.3, 0.7}) {
    const HurstIndex h(hv);
    const auto x = fbm_path(2048, hv);
    EXPECT_LT(max_abs_diff(fundamental_martingale_via_y(x, h), fundamental_martingale(x, h)), 1e-10);
  }
}

TEST(Martingale, VarianceExponent) {
  const HurstIndex h(0.7);
  const auto ens = generate_davies_harte(TimeGrid(1.0, 1024), h, 42, 500);
  const auto ms = map_paths(ens.paths, [&](const SamplePath& x) { return fundamental_martingale(x, h); });
  std::vector<double> ts, vs;
  for (std::size_t k = 102; k <= 1024; k += 2) {
    std::vector<double> col;
    for (const auto& m : ms) col.push_back(m[k]);
    ts.push_back(ens.grid.time(k));
    vs.push_back(variance_estimate(col).value);
  }
  EXPECT_NEAR(powerlaw_fit(ts, vs).exponent, 0.6, 0.1);
}

TEST(WProcess, Examples) {
  const auto m = fbm_path(512, 0.5).with_role(PathRole::M);
  EXPECT_EQ(max_abs_diff(w_process(m, HurstIndex(0.5)), m), 0.0);

  const HurstIndex h(0.3);
  const auto mm = fundamental_martingale(fbm_path(512, 0.3), h);
  const auto w = w_process(mm, h);
  const auto bw = empirical_bracket(w);
  const auto inc = mm.increments();
  double acc = 0.0;
  for (std::size_t j = 0; j < inc.size(); ++j) {
    acc += std::pow(mm.grid().midpoint(j + 1), 2 * h.value() - 1) * inc[j] * inc[j];
    EXPECT_NEAR(bw.values[j + 1], acc, 1e-12 * std::max(1.0, acc));
  }
}

TEST(WProcess, VarianceLinearInTime) {
  const HurstIndex h(0.3);
  const auto ens = generate_davies_harte(TimeGrid(1.0, 1024), h, 43, 500);
  const auto ws = map_paths(ens.paths, [&](const SamplePath& x) { return w_process(fundamental_martingale(x, h), h); });
  std::vector<double> ts, vs;
  for (std::size_t k = 102; k <= 1024; k += 2) {
    std::vector<double> col;
    for (const auto& w : ws) col.push_back(w[k]);
    ts.push_back(ens.grid.time(k));
    vs.push_back(variance_estimate(col).value);
  }
  EXPECT_NEAR(powerlaw_fit(ts, vs).exponent, 1.0, 0.1);
}

TEST(Abel, Examples) {
  const auto m = fbm_path(512, 0.5).with_role(PathRole::M);
  EXPECT_EQ(max_abs_diff(y_from_m_abel(m, HurstIndex(0.5)), m), 0.0);

  const HurstIndex h(0.75);
  const auto y = y_from_m_abel(linear(4096, PathRole::M), h);
  EXPECT_NEAR(y.back() / (abel_const(h) / 1.25), 1.0, 0.02);
}

TEST(Abel, RecoversYFromM) {
  const HurstIndex h(0.7);
  const auto x = fbm_path(4096, 0.7);
  const auto y = y_process(x, h);
  const auto y2 = y_from_m_abel(fundamental_martingale(x, h), h);
  EXPECT_LT(rel_l2(y2, y), 0.05);
}

TEST(XFromM, LinearMartingaleClosedForm) {
  const HurstIndex h(0.75);
  const double want = 1.0 / (2 * 0.75 * 0.25 * beta_b1(h));
  EXPECT_NEAR(want, 0.6002, 1e-4);
  EXPECT_NEAR(x_from_m_high(linear(4096, PathRole::M), h).back() / want, 1.0, 0.02);
}

TEST(XFromM, RoundTrip) {
  const HurstIndex h(0.75);
  const auto x4 = fbm_path(4096, 0.75);
  const auto x8 = fbm_path(8192, 0.75);
  const double e4 = rel_l2(x_from_m_high(fundamental_martingale(x4, h), h), x4);
  const double e8 = rel_l2(x_from_m_high(fundamental_martingale(x8, h), h), x8);
  EXPECT_LT(e4, 0.05);
  EXPECT_LT(e8, e4);
}

TEST(XFromM, Boundary) {
  const auto m = linear(64, PathRole::M);
  EXPECT_NO_THROW(x_from_m_high(m, HurstIndex(0.51)));
  EXPECT_THROW(x_from_m_high(m, HurstIndex(0.5)), InvalidArgument);
}

TEST(XFromW, RoundTripDecreasing) {
  const HurstIndex h(0.25);
  double prev = std::numeric_limits<double>::infinity();
  for (std::size_t n : {1024u, 2048u, 4096u}) {
    const auto x = fbm_path(n, 0.25);
    const double e = rel_l2(x_from_w_low(w_process(fundamental_martingale(x, h), h), h), x);
    if (n == 4096) {
      EXPECT_LT(e, 0.10);
    }
    EXPECT_LT(e, prev) << "n=" << n;
    prev = e;
  }
}

TEST(XFromW, LinearDriverMatchesKernelQuadrature) {
  // X_1 = abel_const(H) int_0^1 z(1, s) ds for W_t = t
  const HurstIndex h(0.25);
  boost::math::quadrature::tanh_sinh<double> integrator;
  // s = v^4 and s = 1 - v^4 absorb the endpoint singularities
  const double left = integrator.integrate(
      [&](double v) {
        const double s = v * v * v * v;
        return z_kernel(1.0, s, h) * 4.0 * v * v * v;
      },
      1e-50, std::pow(0.5, 0.25));  // the skipped piece below s=1e-200 is O(1e-150)
  const double right = integrator.integrate(
      [&](double v) {
        const double s = 1.0 - v * v * v * v;
        return s >= 1.0 ? 0.0 : z_kernel(1.0, s, h) * 4.0 * v * v * v;
      },
      0.0, std::pow(0.5, 0.25));
  const double integral = left + right;
  const double want = abel_const(h) * integral;
  EXPECT_NEAR(x_from_w_low(linear(4096, PathRole::W), h).back() / want, 1.0, 0.02);
}

TEST(XFromW, Boundary) {
  const auto w = linear(64, PathRole::W);
  EXPECT_NO_THROW(x_from_w_low(w, HurstIndex(0.49)));
  EXPECT_THROW(x_from_w_low(w, HurstIndex(0.5)), InvalidArgument);
}

TEST(Bracket, Properties) {
  const auto x = fbm_path(512, 0.3);
  const auto b = empirical_bracket(x);
  EXPECT_EQ(b.values[0], 0.0);
  for (std::size_t k = 1; k < b.values.size(); ++k) EXPECT_GE(b.values[k], b.values[k - 1]);
  const auto b3 = empirical_bracket(x.scaled(3.0));
  for (std::size_t k = 0; k < b.values.size(); ++k) EXPECT_NEAR(b3.values[k], 9.0 * b.values[k], 1e-12 * b3.values[k]);
}

TEST(Bracket, MeanMatchesVariance) {
  const HurstIndex h(0.7);
  const auto ens = generate_davies_harte(TimeGrid(1.0, 4096), h, 42, 500);
  const auto ms = map_paths(ens.paths, [&](const SamplePath& x) { return fundamental_martingale(x, h); });
  std::vector<double> end, br;
  for (const auto& m : ms) {
    end.push_back(m.back());
    br.push_back(empirical_bracket(m).values.back());
  }
  const auto var = variance_estimate(end);
  const auto mb = mean_estimate(br);
  EXPECT_LT(std::abs(mb.value - var.value), 3.0 * std::hypot(mb.std_error, var.std_error));
}

TEST(Collapse, AllTransformsIdentityAtHalf) {
  const HurstIndex h(0.5);
  const auto x = fbm_path(1024, 0.5);
  const auto m = fundamental_martingale(x, h);
  EXPECT_LT(max_abs_diff(m, x), 1e-12);
  EXPECT_LT(max_abs_diff(w_process(m, h), x), 1e-12);
  EXPECT_LT(max_abs_diff(y_from_m_abel(m, h), x), 1e-12);
  EXPECT_LT(max_abs_diff(y_process(x, h), x), 1e-12);
  EXPECT_LT(max_abs_diff(x_from_y(x.with_role(PathRole::Y), h), x), 1e-12);
  EXPECT_LT(max_abs_diff(x_from_m_high(m, HurstIndex(0.5 + 1e-8)), x), 1e-12);
  EXPECT_LT(max_abs_diff(x_from_w_low(x.with_role(PathRole::W), HurstIndex(0.5 - 1e-8)), x), 1e-12);
}

TEST(Linearity, TransformsAreLinear) {
  const auto p = fbm_path(512, 0.3, 1);
  const auto q = fbm_path(512, 0.3, 2);
  std::vector<double> comb(p.size());
  for (std::size_t k = 0; k < comb.size(); ++k) comb[k] = 2.0 * p[k] - 0.5 * q[k];
  const SamplePath pq(p.grid(), comb);
  for (double hv : {0.25, 0.75}) {
    const HurstIndex h(hv);
    const auto mp = fundamental_martingale(p, h), mq = fundamental_martingale(q, h);
    const auto mc = fundamental_martingale(pq, h);
    for (std::size_t k = 0; k < comb.size(); ++k) EXPECT_NEAR(mc[k], 2.0 * mp[k] - 0.5 * mq[k], 1e-12);
    const auto inverse = [&](const SamplePath& m) {
      return hv > 0.5 ? x_from_m_high(m, h) : x_from_w_low(w_process(m, h), h);
    };
    const auto ip = inverse(mp), iq = inverse(mq), ic = inverse(mc);
    for (std::size_t k = 0; k < comb.size(); ++k) EXPECT_NEAR(ic[k], 2.0 * ip[k] - 0.5 * iq[k], 1e-11);
  }
}

TEST(Refinement, SmoothInputsConvergeAtLeastFactor) {
  const HurstIndex h(0.75);
  const double m_exact = boost::math::beta(0.75, 0.75);
  const double x_exact = 1.0 / (2 * 0.75 * 0.25 * beta_b1(h));
  const double y_exact = 1.0 / 0.75;
  double em = 0, ex = 0, ey = 0;
  for (std::size_t n : {512u, 1024u, 2048u}) {
    const double nm = std::abs(fundamental_martingale(linear(n, PathRole::X), h).back() - m_exact);
    const double nx = std::abs(x_from_m_high(linear(n, PathRole::M), h).back() - x_exact);
    const double ny = std::abs(y_process(linear(n, PathRole::X), h).back() - y_exact);
    if (n > 512) {
      EXPECT_GE(em / nm, 1.5) << "n=" << n;
      EXPECT_GE(ex / nx, 1.5) << "n=" << n;
      EXPECT_GE(ey / ny, 1.5) << "n=" << n;
    }
    em = nm;
    ex = nx;
    ey = ny;
  }
}

TEST(Refinement, RoundTripContractsOnFixedDriver) {
  const HurstIndex h(0.75);
  const auto fine = fbm_path(4096, 0.75, 7);
  double prev = std::numeric_limits<double>::infinity();
  for (std::size_t factor : {4u, 2u, 1u}) {
    const auto x = fine.coarsened(factor);
    const double e = rel_l2(x_from_m_high(fundamental_martingale(x, h), h), x);
    EXPECT_LT(e, prev) << "n=" << x.grid().steps();
    prev = e;
  }
}

TEST(Roles, MismatchRejected) {
  const auto x = linear(16, PathRole::X);
  EXPECT_THROW(w_process(x, HurstIndex(0.3)), InvalidArgument);
  EXPECT_THROW(fundamental_martingale(x.with_role(PathRole::M), HurstIndex(0.3)), InvalidArgument);
  EXPECT_NO_THROW(fundamental_martingale(x.with_role(PathRole::Other), HurstIndex(0.3)));
}
