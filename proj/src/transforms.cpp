#include "fbmchar/transforms.hpp"

#include <cmath>
#include <exception>
#include <optional>
#include <sstream>

#include "fbmchar/kernels.hpp"
#include "fbmchar/quadrature.hpp"
#include "fftw_support.hpp"

namespace fbm {

namespace {

constexpr std::size_t kCellNodes = 16;
constexpr std::size_t kDirectConvolutionLimit = 128;

std::vector<double> midpoints(const TimeGrid& grid) {
  std::vector<double> s(grid.steps());
  for (std::size_t j = 0; j < s.size(); ++j) s[j] = grid.midpoint(j + 1);
  return s;
}

SamplePath from_cumulative(const TimeGrid& grid, const std::vector<double>& increments, PathRole role) {
  std::vector<double> v(increments.size() + 1, 0.0);
  for (std::size_t k = 0; k < increments.size(); ++k) v[k + 1] = v[k] + increments[k];
  return SamplePath(grid, std::move(v), role);
}

// Cell averages of (t_m - s)^e over cell j, indexed by d = m - j:
// h^e ((d+1)^{e+1} - d^{e+1}) / (e+1). Exactly 1 for e = 0.
std::vector<double> lag_averages(std::size_t n, double h, double e) {
  std::vector<double> a(n);
  const double scale = std::pow(h, e);
  for (std::size_t d = 0; d < n; ++d) {
    const double dd = static_cast<double>(d);
    a[d] = scale * (std::pow(dd + 1.0, e + 1.0) - std::pow(dd, e + 1.0)) / (e + 1.0);
  }
  return a;
}

// out_m = sum_{j=1}^m lag[m-j] * in_j for m = 1..n (1-based cells, 0-based storage).
// Short inputs are summed directly, longer ones through a zero-padded real FFT.
std::vector<double> causal_convolution(const std::vector<double>& lag, const std::vector<double>& in) {
  const std::size_t n = in.size();
  std::vector<double> out(n, 0.0);
  if (n < kDirectConvolutionLimit) {
    for (std::size_t m = 0; m < n; ++m) {
      double acc = 0.0;
      for (std::size_t j = 0; j <= m; ++j) acc += lag[m - j] * in[j];
      out[m] = acc;
    }
    return out;
  }
  std::size_t size = 1;
  while (size < 2 * n) size <<= 1;
  const std::size_t bins = size / 2 + 1;
  auto buf = detail::make_real_buffer(size);
  auto a = detail::make_complex_buffer(bins);
  auto b = detail::make_complex_buffer(bins);
  auto r2c = detail::plan_r2c(size, buf.get(), a.get());
  auto c2r = detail::plan_c2r(size, a.get(), buf.get());

  for (std::size_t k = 0; k < size; ++k) buf[k] = k < n ? lag[k] : 0.0;
  fftw_execute_dft_r2c(r2c.get(), buf.get(), a.get());
  for (std::size_t k = 0; k < size; ++k) buf[k] = k < n ? in[k] : 0.0;
  fftw_execute_dft_r2c(r2c.get(), buf.get(), b.get());
  for (std::size_t k = 0; k < bins; ++k) {
    const double re = a[k][0] * b[k][0] - a[k][1] * b[k][1];
    const double im = a[k][0] * b[k][1] + a[k][1] * b[k][0];
    a[k][0] = re;
    a[k][1] = im;
  }
  fftw_execute_dft_c2r(c2r.get(), a.get(), buf.get());
  const double scale = 1.0 / static_cast<double>(size);
  for (std::size_t k = 0; k < n; ++k) out[k] = buf[k] * scale;
  return out;
}

// Incremental builder for kernels of the form
//   K(t_m, c_j) = partial_j + sum_{k=j+1}^{m} int_{cell k} u^p (u - c_j)^q du,
// where c_j is the midpoint of cell j and partial_j the integral from c_j to t_j.
// Returns r_m = sum_{j<=m} K(t_m, c_j) v_j - sum_{j<=m-1} K(t_{m-1}, c_j) v_j, that is
//   r_m = partial_m v_m + sum_{j<m} (int_{cell m} u^p (u - c_j)^q du) v_j.
// Within a cell the 16-point Gauss-Legendre nodes sit at u = t_{m-1} + h (1 + x_i)/2,
// so u - c_j = h (m - j + x_i / 2) depends on m - j only.
std::vector<double> cellwise_kernel_increments(const TimeGrid& grid, double p, double q,
                                               const std::vector<double>& v) {
  const std::size_t n = grid.steps();
  const double h = grid.step();
  const quad::Rule& rule = quad::gauss_legendre(kCellNodes);

  // For node i, conv_i[m] = sum_{j<m} (h (m - j + x_i / 2))^q v_j; lag[0] = 0 drops j = m.
  std::vector<double> lag(n, 0.0);
  std::vector<double> r(n, 0.0);
  for (std::size_t i = 0; i < kCellNodes; ++i) {
    for (std::size_t d = 1; d < n; ++d) {
      lag[d] = std::pow(h * (static_cast<double>(d) + 0.5 * rule.nodes[i]), q);
    }
    const auto conv = causal_convolution(lag, v);
    for (std::size_t m = 2; m <= n; ++m) {
      const double u = grid.time(m - 1) + 0.5 * h * (1.0 + rule.nodes[i]);
      r[m - 1] += 0.5 * h * rule.weights[i] * std::pow(u, p) * conv[m - 1];
    }
  }
  for (std::size_t m = 1; m <= n; ++m) {
    const double c = grid.midpoint(m);
    r[m - 1] += quad::power_product_integral(c, grid.time(m), c, p, q, kCellNodes) * v[m - 1];
  }
  return r;
}

void require_role(const SamplePath& path, PathRole role, const char* op) {
  if (path.role() != role && path.role() != PathRole::Other) {
    std::ostringstream os;
    os << op << " expects a path of role " << to_string(role) << ", got " << to_string(path.role());
    throw InvalidArgument(os.str());
  }
}

SamplePath weighted_midpoint_sum(const SamplePath& path, double exponent, PathRole role) {
  const auto dp = path.increments();
  const auto s = midpoints(path.grid());
  std::vector<double> inc(dp.size());
  for (std::size_t j = 0; j < dp.size(); ++j) inc[j] = std::pow(s[j], exponent) * dp[j];
  return from_cumulative(path.grid(), inc, role);
}

}  // namespace

SamplePath rs_integrate(const std::function<double(double)>& f, const SamplePath& path, Scheme scheme) {
  const auto& grid = path.grid();
  const auto dp = path.increments();
  std::vector<double> inc(dp.size());
  for (std::size_t j = 0; j < dp.size(); ++j) {
    const double node = scheme == Scheme::Left ? grid.time(j) : grid.midpoint(j + 1);
    const double fv = f(node);
    if (!std::isfinite(fv)) {
      std::ostringstream os;
      os << "integrand is not finite at node s = " << node << " (cell " << j + 1 << ")";
      throw NumericError(os.str());
    }
    inc[j] = fv * dp[j];
  }
  return from_cumulative(grid, inc, PathRole::Other);
}

SamplePath y_process(const SamplePath& x, HurstIndex hurst) {
  require_role(x, PathRole::X, "y_process");
  if (hurst.near_half(kHalfTolerance)) return x.with_role(PathRole::Y);
  return weighted_midpoint_sum(x, 0.5 - hurst.value(), PathRole::Y);
}

SamplePath x_from_y(const SamplePath& y, HurstIndex hurst) {
  require_role(y, PathRole::Y, "x_from_y");
  if (hurst.near_half(kHalfTolerance)) return y.with_role(PathRole::X);
  return weighted_midpoint_sum(y, hurst.value() - 0.5, PathRole::X);
}

SamplePath fundamental_martingale(const SamplePath& x, HurstIndex hurst) {
  require_role(x, PathRole::X, "fundamental_martingale");
  if (hurst.near_half(kHalfTolerance)) return x.with_role(PathRole::M);
  const auto& grid = x.grid();
  const double e = 0.5 - hurst.value();
  const auto dx = x.increments();
  const auto s = midpoints(grid);
  std::vector<double> weighted(dx.size());
  for (std::size_t j = 0; j < dx.size(); ++j) weighted[j] = std::pow(s[j], e) * dx[j];
  const auto level = causal_convolution(lag_averages(grid.steps(), grid.step(), e), weighted);
  std::vector<double> v(grid.size(), 0.0);
  for (std::size_t m = 0; m < level.size(); ++m) v[m + 1] = level[m];
  return SamplePath(grid, std::move(v), PathRole::M);
}

SamplePath fundamental_martingale_via_y(const SamplePath& x, HurstIndex hurst) {
  if (hurst.near_half(kHalfTolerance)) return x.with_role(PathRole::M);
  const SamplePath y = y_process(x, hurst);
  const auto& grid = y.grid();
  const auto level = causal_convolution(lag_averages(grid.steps(), grid.step(), 0.5 - hurst.value()),
                                        y.increments());
  std::vector<double> v(grid.size(), 0.0);
  for (std::size_t m = 0; m < level.size(); ++m) v[m + 1] = level[m];
  return SamplePath(grid, std::move(v), PathRole::M);
}

SamplePath w_process(const SamplePath& m, HurstIndex hurst) {
  require_role(m, PathRole::M, "w_process");
  if (hurst.near_half(kHalfTolerance)) return m.with_role(PathRole::W);
  return weighted_midpoint_sum(m, hurst.value() - 0.5, PathRole::W);
}

SamplePath y_from_m_abel(const SamplePath& m, HurstIndex hurst) {
  require_role(m, PathRole::M, "y_from_m_abel");
  if (hurst.near_half(kHalfTolerance)) return m.with_role(PathRole::Y);
  const auto& grid = m.grid();
  const double c = abel_const(hurst);
  const auto level = causal_convolution(lag_averages(grid.steps(), grid.step(), hurst.value() - 0.5),
                                        m.increments());
  std::vector<double> v(grid.size(), 0.0);
  for (std::size_t k = 0; k < level.size(); ++k) v[k + 1] = c * level[k];
  return SamplePath(grid, std::move(v), PathRole::Y);
}

SamplePath x_from_m_high(const SamplePath& m, HurstIndex hurst) {
  if (!(hurst.value() > 0.5)) {
    std::ostringstream os;
    os << "x_from_m_high requires H > 1/2, got H = " << hurst.value();
    throw InvalidArgument(os.str());
  }
  require_role(m, PathRole::M, "x_from_m_high");
  if (hurst.near_half(kHalfTolerance)) return m.with_role(PathRole::X);
  const double h = hurst.value();
  const auto inc = cellwise_kernel_increments(m.grid(), h - 0.5, h - 1.5, m.increments());
  const double b1 = beta_b1(hurst);
  std::vector<double> dx(inc.size());
  for (std::size_t k = 0; k < inc.size(); ++k) dx[k] = inc[k] / b1;
  return from_cumulative(m.grid(), dx, PathRole::X);
}

SamplePath x_from_w_low(const SamplePath& w, HurstIndex hurst) {
  if (!(hurst.value() < 0.5)) {
    std::ostringstream os;
    os << "x_from_w_low requires H < 1/2, got H = " << hurst.value();
    throw InvalidArgument(os.str());
  }
  require_role(w, PathRole::W, "x_from_w_low");
  if (hurst.near_half(kHalfTolerance)) return w.with_role(PathRole::X);
  const auto& grid = w.grid();
  const std::size_t n = grid.steps();
  const double h = hurst.value();
  const auto dw = w.increments();
  const auto s = midpoints(grid);

  // (s/t)^{1/2-H} (t-s)^{H-1/2}: the s-factor at midpoints, the (t-s)-factor averaged per cell.
  std::vector<double> weighted(n);
  for (std::size_t j = 0; j < n; ++j) weighted[j] = std::pow(s[j], 0.5 - h) * dw[j];
  const auto lead = causal_convolution(lag_averages(n, grid.step(), h - 0.5), weighted);

  // (1/2-H) s^{1/2-H} int_s^t u^{H-3/2} (u-s)^{H-1/2} du, accumulated cell by cell.
  const auto tail_inc = cellwise_kernel_increments(grid, h - 1.5, h - 0.5, weighted);

  const double c = abel_const(hurst);
  std::vector<double> v(grid.size(), 0.0);
  double tail = 0.0;
  for (std::size_t m = 1; m <= n; ++m) {
    tail += tail_inc[m - 1];
    const double tm = grid.time(m);
    v[m] = c * (std::pow(tm, h - 0.5) * lead[m - 1] + (0.5 - h) * tail);
  }
  return SamplePath(grid, std::move(v), PathRole::X);
}

BracketPath empirical_bracket(const SamplePath& path) {
  BracketPath b{path.grid(), std::vector<double>(path.size(), 0.0)};
  for (std::size_t k = 1; k < path.size(); ++k) {
    const double d = path[k] - path[k - 1];
    b.values[k] = b.values[k - 1] + d * d;
  }
  return b;
}

std::vector<SamplePath> map_paths(std::span<const SamplePath> paths,
                                  const std::function<SamplePath(const SamplePath&)>& f) {
  std::vector<std::optional<SamplePath>> out(paths.size());
  std::exception_ptr error;
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(paths.size()); ++i) {
    try {
      out[static_cast<std::size_t>(i)].emplace(f(paths[static_cast<std::size_t>(i)]));
    } catch (...) {
#pragma omp critical
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);
  std::vector<SamplePath> result;
  result.reserve(out.size());
  for (auto& p : out) result.push_back(std::move(*p));
  return result;
}

}  // namespace fbm
