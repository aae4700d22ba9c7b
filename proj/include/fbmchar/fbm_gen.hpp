#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "fbmchar/types.hpp"

namespace fbm {

/// E[X_s X_t] = (t^{2H} + s^{2H} - |t-s|^{2H}) / 2.
double fbm_covariance(double s, double t, HurstIndex hurst);

/// Autocovariance at lag k of unit-spaced fractional Gaussian noise.
double fgn_autocovariance(std::size_t lag, HurstIndex hurst);

/// Covariance of (X_{t_1}, ..., X_{t_n}); t_0 = 0 is excluded.
Eigen::MatrixXd fbm_covariance_matrix(const TimeGrid& grid, HurstIndex hurst);

/// Engine for path `index` of an ensemble seeded with `seed`. Each path owns
/// its stream, so generation order and threading do not change the output.
std::mt19937_64 path_engine(std::uint64_t seed, std::uint64_t index);

enum class Generator { Cholesky, DaviesHarte };

std::string_view to_string(Generator g);
Generator generator_from_string(std::string_view name);

inline constexpr std::size_t kDefaultCholeskyCap = 4096;
inline constexpr double kCirculantTolerance = 1e-9;

/// Exact sampler through the Cholesky factor of the level covariance. O(n^3).
PathEnsemble generate_cholesky(const TimeGrid& grid, HurstIndex hurst, std::uint64_t seed,
                               std::size_t n_paths, std::size_t cap = kDefaultCholeskyCap);

/// Eigenvalues of the minimal power-of-two circulant (size >= 2n) embedding
/// the fGn autocovariance of n steps. Unclamped.
std::vector<double> circulant_eigenvalues(std::size_t steps, HurstIndex hurst);

/// Exact sampler by circulant embedding (Davies-Harte). O(n log n) per path.
/// Negative eigenvalues above -tol*max are clamped to zero; larger ones throw.
PathEnsemble generate_davies_harte(const TimeGrid& grid, HurstIndex hurst, std::uint64_t seed,
                                   std::size_t n_paths);

PathEnsemble generate(Generator g, const TimeGrid& grid, HurstIndex hurst, std::uint64_t seed,
                      std::size_t n_paths);

}  // namespace fbm
