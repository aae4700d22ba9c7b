#include "fbmchar/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <vector>

#include "fbmchar/fbm_gen.hpp"
#include "fbmchar/quadrature.hpp"
#include "fftw_support.hpp"

namespace fbm {

namespace {

[[noreturn]] void domain_error(const char* what, double t, double s, HurstIndex h) {
  std::ostringstream os;
  os << what << " (t = " << t << ", s = " << s << ", H = " << h.value() << ")";
  throw InvalidArgument(os.str());
}

void require_high(HurstIndex h, const char* name) {
  if (!(h.value() > 0.5)) {
    std::ostringstream os;
    os << name << " requires H > 1/2, got H = " << h.value();
    throw InvalidArgument(os.str());
  }
}

void require_low(HurstIndex h, const char* name) {
  if (!(h.value() < 0.5)) {
    std::ostringstream os;
    os << name << " requires H < 1/2, got H = " << h.value();
    throw InvalidArgument(os.str());
  }
}

// h^{2H} w' T w for the midpoint discretization of M_1 on n cells, with T the
// fGn autocovariance Toeplitz matrix. T w is computed by circulant embedding.
double discrete_molchan_variance(std::size_t n, HurstIndex hurst) {
  const double h = hurst.value();
  const std::size_t m = 2 * n;
  auto real = detail::make_real_buffer(m);
  auto spec_c = detail::make_complex_buffer(m / 2 + 1);
  auto spec_w = detail::make_complex_buffer(m / 2 + 1);

  std::vector<double> w(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double s = (static_cast<double>(j) + 0.5) / static_cast<double>(n);
    w[j] = std::pow(s * (1.0 - s), 0.5 - h);
  }

  auto r2c = detail::plan_r2c(m, real.get(), spec_c.get());
  for (std::size_t k = 0; k < m; ++k) real[k] = 0.0;
  for (std::size_t k = 0; k < n; ++k) real[k] = fgn_autocovariance(k, hurst);
  for (std::size_t k = 1; k < n; ++k) real[m - k] = real[k];
  fftw_execute_dft_r2c(r2c.get(), real.get(), spec_c.get());

  for (std::size_t k = 0; k < m; ++k) real[k] = k < n ? w[k] : 0.0;
  fftw_execute_dft_r2c(r2c.get(), real.get(), spec_w.get());
  for (std::size_t k = 0; k <= m / 2; ++k) {
    const double a = spec_c[k][0], b = spec_c[k][1];
    const double c = spec_w[k][0], d = spec_w[k][1];
    spec_w[k][0] = a * c - b * d;
    spec_w[k][1] = a * d + b * c;
  }
  auto c2r = detail::plan_c2r(m, spec_w.get(), real.get());
  fftw_execute(c2r.get());

  double quad_form = 0.0;
  for (std::size_t k = 0; k < n; ++k) quad_form += w[k] * real[k];
  quad_form /= static_cast<double>(m);
  return quad_form * std::pow(static_cast<double>(n), -2.0 * h);
}

}  // namespace

PartitionContext::PartitionContext(TimeGrid grid, std::size_t k) : grid_(grid), k_(k) {
  if (k == 0 || k > grid.steps()) {
    throw InvalidArgument("partition index k = " + std::to_string(k) + " outside 1.." +
                          std::to_string(grid.steps()));
  }
}

double molchan_kernel(double t, double s, HurstIndex hurst) {
  if (!(s > 0.0 && s < t)) domain_error("molchan_kernel needs 0 < s < t", t, s, hurst);
  const double e = 0.5 - hurst.value();
  return std::pow(s, e) * std::pow(t - s, e);
}

double beta_b1(HurstIndex hurst) {
  require_high(hurst, "B(H-1/2, 3/2-H)");
  // The arguments sum to 1, so Euler's reflection formula is exact.
  return std::numbers::pi / std::sin(std::numbers::pi * (hurst.value() - 0.5));
}

double abel_const(HurstIndex hurst) {
  const double h = hurst.value();
  return 1.0 / (std::tgamma(h + 0.5) * std::tgamma(1.5 - h));
}

double molchan_bracket_constant(HurstIndex hurst) {
  if (hurst.value() == 0.5) return 1.0;
  constexpr std::size_t coarse = std::size_t{1} << 14;
  constexpr std::size_t fine = std::size_t{1} << 16;
  const double v_coarse = discrete_molchan_variance(coarse, hurst);
  const double v_fine = discrete_molchan_variance(fine, hurst);
  // Discretization error decays like n^{-(3/2-H)}.
  const double ratio = std::pow(static_cast<double>(fine / coarse), 1.5 - hurst.value());
  return v_fine + (v_fine - v_coarse) / (ratio - 1.0);
}

KernelConstants KernelConstants::compute(HurstIndex hurst) {
  std::optional<double> b1;
  if (hurst.value() > 0.5) b1 = beta_b1(hurst);
  return KernelConstants{hurst, b1, abel_const(hurst), molchan_bracket_constant(hurst)};
}

double repxm_kernel(double t, double u, HurstIndex hurst) {
  require_high(hurst, "repxm_kernel");
  if (!(u >= 0.0 && u < t)) domain_error("repxm_kernel needs 0 <= u < t", t, u, hurst);
  if (hurst.near_half(kHalfTolerance)) return 1.0;
  const double h = hurst.value();
  return quad::power_product_integral(u, t, u, h - 0.5, h - 1.5) / beta_b1(hurst);
}

double z_kernel(double t, double s, HurstIndex hurst) {
  require_low(hurst, "z_kernel");
  if (!(s > 0.0 && s < t)) domain_error("z_kernel needs 0 < s < t", t, s, hurst);
  if (hurst.near_half(kHalfTolerance)) return 1.0;
  const double h = hurst.value();
  const double lead = std::pow(s / t, 0.5 - h) * std::pow(t - s, h - 0.5);
  const double tail = quad::power_product_integral(s, t, s, h - 1.5, h - 0.5);
  return lead - (h - 0.5) * std::pow(s, 0.5 - h) * tail;
}

double partition_kernel_f(const PartitionContext& ctx, double s, HurstIndex hurst) {
  require_high(hurst, "partition_kernel_f");
  if (!(s >= 0.0 && s < ctx.left())) {
    domain_error("partition_kernel_f needs 0 <= s < t_{k-1}", ctx.left(), s, hurst);
  }
  const double h = hurst.value();
  return quad::power_product_integral(ctx.left(), ctx.right(), s, h - 0.5, h - 1.5);
}

double partition_kernel_g_p(const PartitionContext& ctx, double s, HurstIndex hurst,
                            PartitionKernel which) {
  const double h = hurst.value();
  if (which == PartitionKernel::G) {
    require_high(hurst, "partition_kernel g");
    if (!(s >= ctx.left() && s <= ctx.right())) {
      domain_error("partition_kernel g needs t_{k-1} <= s <= t_k", ctx.right(), s, hurst);
    }
    return quad::power_product_integral(s, ctx.right(), s, h - 0.5, h - 1.5);
  }
  require_low(hurst, "partition_kernel p");
  if (!(s > 0.0 && s < ctx.left())) {
    domain_error("partition_kernel p needs 0 < s < t_{k-1}", ctx.left(), s, hurst);
  }
  return std::pow(s, 0.5 - h) *
         quad::power_product_integral(ctx.left(), ctx.right(), s, h - 0.5, h - 1.5);
}

double f_upper_bound(const PartitionContext& ctx, double s, HurstIndex hurst) {
  const double h = hurst.value();
  return std::pow(ctx.right(), h - 0.5) * std::pow(ctx.left() - s, h - 1.5) * ctx.width();
}

double f_squared_lower_bound(const PartitionContext& ctx, double u, HurstIndex hurst) {
  const double h = hurst.value();
  const double t = ctx.grid().horizon();
  const double n = static_cast<double>(ctx.grid().steps());
  return std::pow(3.0, 2.0 * h - 3.0) * std::pow(t, 2.0 * h - 1.0) * std::pow(n, 1.0 - 2.0 * h) *
         std::pow(u, 2.0 * h - 1.0);
}

double p_upper_bound(const PartitionContext& ctx, double s, HurstIndex hurst) {
  const double h = hurst.value();
  const double width = ctx.width();
  return std::min(std::pow(ctx.left() - s, h - 1.5) * width,
                  std::pow(width, h - 0.5) / (0.5 - h));
}

double shifted_power_sum(const TimeGrid& grid, std::size_t first, double u, HurstIndex hurst) {
  if (first == 0 || grid.time(first - 1) <= u) {
    throw InvalidArgument("shifted_power_sum needs t_{first-1} > u");
  }
  const double e = 2.0 * hurst.value() - 3.0;
  double sum = 0.0;
  for (std::size_t k = first; k <= grid.steps(); ++k) sum += std::pow(grid.time(k - 1) - u, e);
  return sum;
}

double shifted_power_sum_bound(const TimeGrid& grid, double x, HurstIndex hurst) {
  const double h = hurst.value();
  const double n = static_cast<double>(grid.steps());
  return std::pow(x, 2.0 * h - 3.0) +
         n / ((2.0 - 2.0 * h) * grid.horizon()) * std::pow(x, 2.0 * h - 2.0);
}

}  // namespace fbm
