#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace fbm {

/// Bad input or configuration: out-of-range parameters, domain violations,
/// malformed files. The CLI maps this to exit code 2.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A computation that could not be carried out on valid input (factorization
/// failure, non-finite values). The CLI maps this to exit code 3.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised by estimators that are undefined on constant paths.
class DegeneratePathError : public NumericError {
 public:
  using NumericError::NumericError;
};

/// Self-similarity index, strictly inside (0, 1).
class HurstIndex {
 public:
  explicit HurstIndex(double value);

  double value() const noexcept { return value_; }
  operator double() const noexcept { return value_; }

  /// True when H is within `tol` of 1/2, where all transform kernels collapse.
  bool near_half(double tol = 1e-6) const noexcept;

 private:
  double value_;
};

/// Uniform partition t_k = horizon * k / steps, k = 0..steps.
class TimeGrid {
 public:
  TimeGrid(double horizon, std::size_t steps);

  double horizon() const noexcept { return horizon_; }
  std::size_t steps() const noexcept { return steps_; }
  std::size_t size() const noexcept { return steps_ + 1; }
  double step() const noexcept { return steps_ == 0 ? 0.0 : horizon_ / static_cast<double>(steps_); }
  double time(std::size_t k) const noexcept {
    if (steps_ == 0) return 0.0;
    return horizon_ * static_cast<double>(k) / static_cast<double>(steps_);
  }
  /// Midpoint of the k-th cell [t_{k-1}, t_k], k = 1..steps.
  double midpoint(std::size_t k) const noexcept {
    return horizon_ * (static_cast<double>(k) - 0.5) / static_cast<double>(steps_);
  }
  std::vector<double> times() const;

  /// Grid with every `factor`-th point; steps must be divisible by factor.
  TimeGrid coarsened(std::size_t factor) const;

  friend bool operator==(const TimeGrid&, const TimeGrid&) = default;

 private:
  double horizon_;
  std::size_t steps_;
};

enum class PathRole { X, Y, M, W, Other };

std::string_view to_string(PathRole role);
PathRole path_role_from_string(std::string_view name);

/// Level values of a process on a grid. values[0] == 0.
class SamplePath {
 public:
  SamplePath(TimeGrid grid, std::vector<double> values, PathRole role = PathRole::X);

  /// The path v(t) = f(t) sampled on the grid; f(0) must be 0.
  template <typename F>
  static SamplePath from_function(const TimeGrid& grid, F&& f, PathRole role = PathRole::X) {
    std::vector<double> v(grid.size());
    for (std::size_t k = 0; k < v.size(); ++k) v[k] = f(grid.time(k));
    return SamplePath(grid, std::move(v), role);
  }

  const TimeGrid& grid() const noexcept { return grid_; }
  std::span<const double> values() const noexcept { return values_; }
  double operator[](std::size_t k) const noexcept { return values_[k]; }
  double back() const noexcept { return values_.back(); }
  std::size_t size() const noexcept { return values_.size(); }
  PathRole role() const noexcept { return role_; }

  /// Increments X_{t_k} - X_{t_{k-1}}, k = 1..n.
  std::vector<double> increments() const;

  SamplePath scaled(double c) const;
  SamplePath with_role(PathRole role) const;
  /// Every `factor`-th value on the coarsened grid.
  SamplePath coarsened(std::size_t factor) const;
  /// Prefix on [0, t_m] as a path on the grid with horizon t_m and m steps.
  SamplePath truncated(std::size_t m) const;

 private:
  TimeGrid grid_;
  std::vector<double> values_;
  PathRole role_;
};

/// Independent paths on one grid; path i is reproducible from (seed, i).
struct PathEnsemble {
  TimeGrid grid;
  std::vector<SamplePath> paths;
  std::uint64_t seed = 0;
  HurstIndex hurst;

  std::size_t size() const noexcept { return paths.size(); }
};

}  // namespace fbm
