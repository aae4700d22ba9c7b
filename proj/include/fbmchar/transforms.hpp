#pragma once

#include <functional>
#include <span>
#include <vector>

#include "fbmchar/types.hpp"

namespace fbm {

/// Cumulative discrete bracket sum_{j<=k} (P_{t_j} - P_{t_{j-1}})^2.
struct BracketPath {
  TimeGrid grid;
  std::vector<double> values;
};

enum class Scheme { Left, Midpoint };

/// Pathwise Riemann-Stieltjes sums sum_j f(s_j) (P_{t_j} - P_{t_{j-1}}) with s_j
/// the left endpoint or midpoint of cell j. Throws NumericError naming the
/// first node where f is not finite.
SamplePath rs_integrate(const std::function<double(double)>& f, const SamplePath& path,
                        Scheme scheme = Scheme::Midpoint);

/// Y_t = int_0^t s^{1/2-H} dX_s.
SamplePath y_process(const SamplePath& x, HurstIndex hurst);

/// X_t = int_0^t s^{H-1/2} dY_s, the inverse of y_process.
SamplePath x_from_y(const SamplePath& y, HurstIndex hurst);

/// Fundamental martingale M_t = int_0^t s^{1/2-H} (t-s)^{1/2-H} dX_s at every
/// grid time. The s-factor is taken at cell midpoints; the (t-s)-factor is
/// averaged exactly over each cell. Within 1e-6 of H = 1/2 all kernels are 1
/// and the forward transforms return their input unchanged.
SamplePath fundamental_martingale(const SamplePath& x, HurstIndex hurst);

/// Same process through the Y route, M_t = int_0^t (t-s)^{1/2-H} dY_s.
SamplePath fundamental_martingale_via_y(const SamplePath& x, HurstIndex hurst);

/// W_t = int_0^t s^{H-1/2} dM_s with midpoint weights.
SamplePath w_process(const SamplePath& m, HurstIndex hurst);

/// Abel inversion Y_t = abel_const(H) int_0^t (t-s)^{H-1/2} dM_s.
SamplePath y_from_m_abel(const SamplePath& m, HurstIndex hurst);

/// X_t = int_0^t repxm_kernel(t, u) dM_u for H > 1/2, midpoint nodes u_j.
/// Kernel rows are built incrementally from the per-cell integrals f_k and g_k,
/// convolved by FFT, one convolution per node of a fixed 16-point rule.
SamplePath x_from_m_high(const SamplePath& m, HurstIndex hurst);

/// X_t = abel_const(H) int_0^t z(t, s) dW_s for H < 1/2, midpoint nodes s_j.
SamplePath x_from_w_low(const SamplePath& w, HurstIndex hurst);

BracketPath empirical_bracket(const SamplePath& path);

/// Applies `f` to every path; paths are processed in parallel.
std::vector<SamplePath> map_paths(std::span<const SamplePath> paths,
                                  const std::function<SamplePath(const SamplePath&)>& f);

}  // namespace fbm
