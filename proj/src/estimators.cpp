#include "fbmchar/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>

#include <Eigen/Dense>

namespace fbm {

bool EstimateWithCI::covers(double target, double z) const {
  return std::abs(value - target) <= half_width(z);
}

double weighted_qv(const SamplePath& path, HurstIndex hurst) {
  return weighted_qv_tail(path, hurst, 0.0);
}

double weighted_qv_tail(const SamplePath& path, HurstIndex hurst, double s) {
  const auto& grid = path.grid();
  const std::size_t n = grid.steps();
  if (n == 0) throw InvalidArgument("weighted quadratic variation needs n >= 1");
  const double t = grid.horizon();
  if (!(s >= 0.0 && s < t)) {
    std::ostringstream os;
    os << "tail split s = " << s << " must lie in [0, " << t << ")";
    throw InvalidArgument(os.str());
  }
  const double index = static_cast<double>(n) * s / t;
  const double rounded = std::round(index);
  if (std::abs(index - rounded) > 1e-9 * std::max(1.0, index)) {
    std::ostringstream os;
    os << "tail split needs n*s/t to be an integer, got n = " << n << ", s = " << s << ", t = " << t
       << "; choose n as a multiple of t/s";
    throw InvalidArgument(os.str());
  }
  const auto first = static_cast<std::size_t>(rounded);
  double sum = 0.0;
  for (std::size_t k = first + 1; k <= n; ++k) {
    const double d = path[k] - path[k - 1];
    sum += d * d;
  }
  return std::pow(static_cast<double>(n), 2.0 * hurst.value() - 1.0) * sum;
}

double p_variation(const SamplePath& path, HurstIndex hurst) {
  if (path.grid().steps() == 0) throw InvalidArgument("p-variation needs n >= 1");
  const double p = 1.0 / hurst.value();
  double sum = 0.0;
  for (std::size_t k = 1; k < path.size(); ++k) sum += std::pow(std::abs(path[k] - path[k - 1]), p);
  return sum;
}

double abs_normal_moment(double q) {
  return std::pow(2.0, 0.5 * q) * std::tgamma(0.5 * (q + 1.0)) / std::sqrt(std::numbers::pi);
}

EstimateWithCI holder_exponent_estimate(const SamplePath& path) {
  const std::size_t n = path.grid().steps();
  if (n < 64) {
    throw InvalidArgument("Hölder exponent estimate needs n >= 64, got n = " + std::to_string(n));
  }
  std::vector<double> log_scale, log_moment;
  for (std::size_t m = 1; m <= n / 16; m *= 2) {
    const std::size_t blocks = n / m;
    double acc = 0.0;
    for (std::size_t k = 0; k < blocks; ++k) acc += std::abs(path[(k + 1) * m] - path[k * m]);
    const double mean = acc / static_cast<double>(blocks);
    if (!(mean > 0.0)) {
      throw DegeneratePathError("Hölder exponent undefined: path has no variation at lag " +
                                std::to_string(m));
    }
    log_scale.push_back(std::log(static_cast<double>(m) * path.grid().step()));
    log_moment.push_back(std::log(mean));
  }
  const auto fit = ols(log_moment, {log_scale});
  return EstimateWithCI{std::clamp(fit.coefficients[1], 0.0, 1.0), fit.std_errors[1], log_scale.size()};
}

PowerLawFit powerlaw_fit(std::span<const double> times, std::span<const double> values) {
  if (times.size() != values.size() || times.size() < 2) {
    throw InvalidArgument("power-law fit needs at least two (t, value) pairs");
  }
  std::vector<double> lx(times.size()), ly(values.size());
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (!(values[i] > 0.0) || !(times[i] > 0.0)) {
      std::ostringstream os;
      os << "power-law fit needs positive ordinates, got " << values[i] << " at t = " << times[i];
      throw InvalidArgument(os.str());
    }
    lx[i] = std::log(times[i]);
    ly[i] = std::log(values[i]);
  }
  const auto fit = ols(ly, {lx});
  double rss = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    const double r = ly[i] - fit.coefficients[0] - fit.coefficients[1] * lx[i];
    rss += r * r;
  }
  return PowerLawFit{std::exp(fit.coefficients[0]), fit.coefficients[1], rss};
}

PowerLawFit powerlaw_fit(const BracketPath& bracket, double t_min, double t_max) {
  if (!(t_min > 0.0 && t_min < t_max)) {
    std::ostringstream os;
    os << "power-law fit range must satisfy 0 < t_min < t_max, got [" << t_min << ", " << t_max << "]";
    throw InvalidArgument(os.str());
  }
  const double slack = 1e-12 * t_max;
  std::vector<double> ts, vs;
  for (std::size_t k = 0; k < bracket.values.size(); ++k) {
    const double t = bracket.grid.time(k);
    if (t >= t_min - slack && t <= t_max + slack) {
      ts.push_back(t);
      vs.push_back(bracket.values[k]);
    }
  }
  return powerlaw_fit(ts, vs);
}

EstimateWithCI mean_estimate(std::span<const double> xs) {
  if (xs.empty()) throw InvalidArgument("mean of an empty sample");
  const double n = static_cast<double>(xs.size());
  const double mean = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  if (xs.size() == 1) return EstimateWithCI{mean, 0.0, 1};
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  return EstimateWithCI{mean, std::sqrt(ss / (n - 1.0) / n), xs.size()};
}

EstimateWithCI variance_estimate(std::span<const double> xs) {
  if (xs.size() < 4) throw InvalidArgument("variance estimate needs at least four samples");
  const double n = static_cast<double>(xs.size());
  const double mean = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  double m2 = 0.0, m4 = 0.0;
  for (double x : xs) {
    const double d = (x - mean) * (x - mean);
    m2 += d;
    m4 += d * d;
  }
  m2 /= n;
  m4 /= n;
  const double var = m2 * n / (n - 1.0);
  const double se2 = std::max(0.0, (m4 - (n - 3.0) / (n - 1.0) * var * var) / n);
  return EstimateWithCI{var, std::sqrt(se2), xs.size()};
}

double correlation(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size() || xs.size() < 2) {
    throw InvalidArgument("correlation needs two samples of equal size >= 2");
  }
  const double n = static_cast<double>(xs.size());
  const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
    syy += (ys[i] - my) * (ys[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) return 0.0;
  return sxy / std::sqrt(sxx * syy);
}

LinearRegression ols(std::span<const double> y, const std::vector<std::vector<double>>& regressors) {
  const auto n = static_cast<Eigen::Index>(y.size());
  const auto p = static_cast<Eigen::Index>(regressors.size() + 1);
  if (n <= p) throw InvalidArgument("regression needs more observations than coefficients");
  Eigen::MatrixXd design(n, p);
  Eigen::VectorXd rhs(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    design(i, 0) = 1.0;
    for (Eigen::Index j = 1; j < p; ++j) {
      const auto& col = regressors[static_cast<std::size_t>(j - 1)];
      if (col.size() != y.size()) throw InvalidArgument("regressor length mismatch");
      design(i, j) = col[static_cast<std::size_t>(i)];
    }
    rhs(i) = y[static_cast<std::size_t>(i)];
  }
  const Eigen::MatrixXd gram = design.transpose() * design;
  Eigen::LDLT<Eigen::MatrixXd> ldlt(gram);
  if (ldlt.info() != Eigen::Success || ldlt.rcond() < 1e-14) {
    throw NumericError("regression design matrix is singular");
  }
  const Eigen::VectorXd beta = ldlt.solve(design.transpose() * rhs);
  const Eigen::VectorXd resid = rhs - design * beta;
  const double sigma2 = resid.squaredNorm() / static_cast<double>(n - p);
  const Eigen::MatrixXd cov = ldlt.solve(Eigen::MatrixXd::Identity(p, p)) * sigma2;

  LinearRegression out;
  out.residual_variance = sigma2;
  for (Eigen::Index j = 0; j < p; ++j) {
    out.coefficients.push_back(beta(j));
    out.std_errors.push_back(std::sqrt(std::max(0.0, cov(j, j))));
  }
  return out;
}

double normal_two_sided_critical(double level) {
  if (!(level > 0.0 && level < 1.0)) throw InvalidArgument("significance level must lie in (0,1)");
  double lo = 0.0, hi = 40.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (std::erfc(mid / std::numbers::sqrt2) > level) lo = mid; else hi = mid;
  }
  return 0.5 * (lo + hi);
}

NormalityCheck normality_check(std::span<const double> xs, double level) {
  if (xs.size() < 8) throw InvalidArgument("normality check needs at least eight samples");
  const double n = static_cast<double>(xs.size());
  const double mean = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  double m2 = 0.0, m3 = 0.0, m4 = 0.0;
  for (double x : xs) {
    const double d = x - mean;
    m2 += d * d;
    m3 += d * d * d;
    m4 += d * d * d * d;
  }
  m2 /= n;
  m3 /= n;
  m4 /= n;
  NormalityCheck c;
  c.critical = normal_two_sided_critical(level);
  if (!(m2 > 0.0)) return c;  // constant sample: not normal
  c.skewness = m3 / std::pow(m2, 1.5);
  c.excess_kurtosis = m4 / (m2 * m2) - 3.0;
  const double var_skew = 6.0 * (n - 2.0) / ((n + 1.0) * (n + 3.0));
  const double mean_kurt = -6.0 / (n + 1.0);
  const double var_kurt = 24.0 * n * (n - 2.0) * (n - 3.0) / ((n + 1.0) * (n + 1.0) * (n + 3.0) * (n + 5.0));
  c.z_skewness = c.skewness / std::sqrt(var_skew);
  c.z_kurtosis = (c.excess_kurtosis - mean_kurt) / std::sqrt(var_kurt);
  c.pass = std::abs(c.z_skewness) <= c.critical && std::abs(c.z_kurtosis) <= c.critical;
  return c;
}

}  // namespace fbm
