#pragma once

#include <cstddef>
#include <optional>

#include "fbmchar/types.hpp"

namespace fbm {

/// Closeness to 1/2 below which kernels switch to their H = 1/2 identity form.
inline constexpr double kHalfTolerance = 1e-6;

/// Cell k (1-based) of a uniform partition.
class PartitionContext {
 public:
  PartitionContext(TimeGrid grid, std::size_t k);

  const TimeGrid& grid() const noexcept { return grid_; }
  std::size_t k() const noexcept { return k_; }
  double left() const noexcept { return grid_.time(k_ - 1); }   // t_{k-1}
  double right() const noexcept { return grid_.time(k_); }      // t_k
  double width() const noexcept { return grid_.step(); }        // t/n

 private:
  TimeGrid grid_;
  std::size_t k_;
};

/// s^{1/2-H} (t-s)^{1/2-H}, the integrand of the fundamental martingale.
double molchan_kernel(double t, double s, HurstIndex hurst);

/// B(H - 1/2, 3/2 - H) = pi / sin(pi (H - 1/2)); requires H > 1/2.
double beta_b1(HurstIndex hurst);

/// 1 / (Gamma(H + 1/2) Gamma(3/2 - H)), the Abel inversion constant.
double abel_const(HurstIndex hurst);

/// Var(M_1) for M_t = int_0^t s^{1/2-H} (t-s)^{1/2-H} dX_s, so that the
/// bracket of M is c_H t^{2-2H}. Computed from the exact variance of the
/// discretized integral on two fine grids plus one Richardson step.
double molchan_bracket_constant(HurstIndex hurst);

struct KernelConstants {
  HurstIndex hurst;
  std::optional<double> b1;  // only for H > 1/2
  double abel_c;
  double molchan_bracket_c;

  static KernelConstants compute(HurstIndex hurst);
};

/// (1/B1) int_u^t s^{H-1/2} (s-u)^{H-3/2} ds, the kernel expressing X through M
/// for H > 1/2. Requires 0 <= u < t.
double repxm_kernel(double t, double u, HurstIndex hurst);

/// (s/t)^{1/2-H} (t-s)^{H-1/2} - (H-1/2) s^{1/2-H} int_s^t u^{H-3/2} (u-s)^{H-1/2} du,
/// the kernel expressing X through W for H < 1/2. Requires 0 < s < t.
double z_kernel(double t, double s, HurstIndex hurst);

/// f_k(s) = int_{t_{k-1}}^{t_k} u^{H-1/2} (u-s)^{H-3/2} du for H > 1/2, 0 <= s < t_{k-1}.
double partition_kernel_f(const PartitionContext& ctx, double s, HurstIndex hurst);

enum class PartitionKernel { G, P };

/// G: g_k(s) = int_s^{t_k} u^{H-1/2} (u-s)^{H-3/2} du for H > 1/2, t_{k-1} <= s <= t_k.
/// P: p_k(s) = int_{t_{k-1}}^{t_k} (s/u)^{1/2-H} (u-s)^{H-3/2} du for H < 1/2, 0 < s < t_{k-1}.
double partition_kernel_g_p(const PartitionContext& ctx, double s, HurstIndex hurst,
                            PartitionKernel which);

/// t_k^{H-1/2} (t_{k-1}-s)^{H-3/2} t/n, an upper bound of f_k(s).
double f_upper_bound(const PartitionContext& ctx, double s, HurstIndex hurst);

/// 3^{2H-3} t^{2H-1} n^{1-2H} u^{2H-1}, a lower bound of f_k(u)^2 for u in (t_{k-3}, t_{k-2}).
double f_squared_lower_bound(const PartitionContext& ctx, double u, HurstIndex hurst);

/// min((t_{k-1}-s)^{H-3/2} t/n, (t/n)^{H-1/2} / (1/2-H)), an upper bound of
/// p_k(s) for s <= t_{k-2}.
double p_upper_bound(const PartitionContext& ctx, double s, HurstIndex hurst);

/// sum_{k=first}^{n} (t_{k-1} - u)^{2H-3}, with t_{first-1} > u.
double shifted_power_sum(const TimeGrid& grid, std::size_t first, double u, HurstIndex hurst);

/// x^{2H-3} + n/((2-2H) t) x^{2H-2}: the bound on shifted_power_sum(first) with
/// x = t_{first-1} - u.
double shifted_power_sum_bound(const TimeGrid& grid, double x, HurstIndex hurst);

}  // namespace fbm
