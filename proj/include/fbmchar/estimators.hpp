#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "fbmchar/transforms.hpp"
#include "fbmchar/types.hpp"

namespace fbm {

inline constexpr double kDefaultCiMultiplier = 3.0;

struct EstimateWithCI {
  double value = 0.0;
  double std_error = 0.0;
  std::size_t n_samples = 1;

  double half_width(double z = kDefaultCiMultiplier) const { return z * std_error; }
  bool covers(double target, double z = kDefaultCiMultiplier) const;

  friend bool operator==(const EstimateWithCI&, const EstimateWithCI&) = default;
};

/// c t^alpha fitted by least squares in log-log coordinates; residual is the
/// residual sum of squares of the log fit.
struct PowerLawFit {
  double coefficient = 0.0;
  double exponent = 0.0;
  double residual = 0.0;

  friend bool operator==(const PowerLawFit&, const PowerLawFit&) = default;
};

/// n^{2H-1} sum_k (X_{t_k} - X_{t_{k-1}})^2.
double weighted_qv(const SamplePath& path, HurstIndex hurst);

/// n^{2H-1} sum_{k=ns/t+1}^{n} (X_{t_k} - X_{t_{k-1}})^2; n s / t must be an integer.
double weighted_qv_tail(const SamplePath& path, HurstIndex hurst, double s);

/// sum_k |X_{t_k} - X_{t_{k-1}}|^{1/H}.
double p_variation(const SamplePath& path, HurstIndex hurst);

/// E|Z|^q = 2^{q/2} Gamma((q+1)/2) / sqrt(pi) for standard normal Z.
double abs_normal_moment(double q);

/// Regularity exponent from the slope of log mean |X_{(k+1)m} - X_{km}| against
/// log(m t/n) over dyadic lags m = 1, 2, ..., n/16, clamped to [0, 1]. The
/// standard error is the slope's regression standard error.
/// Throws DegeneratePathError for constant paths.
EstimateWithCI holder_exponent_estimate(const SamplePath& path);

/// Log-log least squares of the bracket over grid times in [t_min, t_max].
PowerLawFit powerlaw_fit(const BracketPath& bracket, double t_min, double t_max);
PowerLawFit powerlaw_fit(std::span<const double> times, std::span<const double> values);

// Sample statistics over an ensemble.

EstimateWithCI mean_estimate(std::span<const double> xs);

/// Unbiased sample variance; the standard error uses the sample fourth moment.
EstimateWithCI variance_estimate(std::span<const double> xs);

/// Pearson correlation; 0 when either sample is constant.
double correlation(std::span<const double> xs, std::span<const double> ys);

struct LinearRegression {
  std::vector<double> coefficients;  // intercept first
  std::vector<double> std_errors;
  double residual_variance = 0.0;
};

/// Ordinary least squares of y on an intercept and the given regressors.
LinearRegression ols(std::span<const double> y, const std::vector<std::vector<double>>& regressors);

/// Moment-based normality check: z statistics of sample skewness and excess
/// kurtosis with their exact small-sample variances under normality.
struct NormalityCheck {
  double skewness = 0.0;
  double excess_kurtosis = 0.0;
  double z_skewness = 0.0;
  double z_kurtosis = 0.0;
  double critical = 0.0;
  bool pass = false;
};

NormalityCheck normality_check(std::span<const double> xs, double level = 0.01);

/// Two-sided standard normal quantile z with P(|Z| > z) = level.
double normal_two_sided_critical(double level);

}  // namespace fbm
