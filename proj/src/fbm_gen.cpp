#include "fbmchar/fbm_gen.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <sstream>

#include "fftw_support.hpp"

namespace fbm {

namespace {

using detail::ComplexBuffer;
using detail::FftwPlan;
using detail::make_complex_buffer;

void require_nonnegative(double s, double t) {
  if (s < 0.0 || t < 0.0 || std::isnan(s) || std::isnan(t)) {
    std::ostringstream os;
    os << "covariance arguments must be non-negative times, got (" << s << ", " << t << ")";
    throw InvalidArgument(os.str());
  }
}

std::size_t circulant_size(std::size_t steps) {
  std::size_t m = 1;
  while (m < 2 * steps) m <<= 1;
  return m;
}

PathEnsemble empty_ensemble(const TimeGrid& grid, HurstIndex hurst, std::uint64_t seed,
                            std::size_t n_paths) {
  PathEnsemble ens{grid, {}, seed, hurst};
  ens.paths.reserve(n_paths);
  return ens;
}

}  // namespace

double fbm_covariance(double s, double t, HurstIndex hurst) {
  require_nonnegative(s, t);
  const double two_h = 2.0 * hurst.value();
  return 0.5 * (std::pow(t, two_h) + std::pow(s, two_h) - std::pow(std::abs(t - s), two_h));
}

double fgn_autocovariance(std::size_t lag, HurstIndex hurst) {
  const double two_h = 2.0 * hurst.value();
  const double k = static_cast<double>(lag);
  if (lag == 0) return 1.0;
  return 0.5 * (std::pow(k + 1.0, two_h) - 2.0 * std::pow(k, two_h) + std::pow(k - 1.0, two_h));
}

Eigen::MatrixXd fbm_covariance_matrix(const TimeGrid& grid, HurstIndex hurst) {
  const auto n = static_cast<Eigen::Index>(grid.steps());
  Eigen::MatrixXd c(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j <= i; ++j) {
      const double v = fbm_covariance(grid.time(static_cast<std::size_t>(i) + 1),
                                      grid.time(static_cast<std::size_t>(j) + 1), hurst);
      c(i, j) = v;
      c(j, i) = v;
    }
  }
  return c;
}

std::mt19937_64 path_engine(std::uint64_t seed, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
  return std::mt19937_64(seq);
}

std::string_view to_string(Generator g) {
  return g == Generator::Cholesky ? "cholesky" : "davies-harte";
}

Generator generator_from_string(std::string_view name) {
  if (name == "cholesky") return Generator::Cholesky;
  if (name == "davies-harte") return Generator::DaviesHarte;
  throw InvalidArgument("unknown generator '" + std::string(name) +
                        "' (expected cholesky or davies-harte)");
}

PathEnsemble generate_cholesky(const TimeGrid& grid, HurstIndex hurst, std::uint64_t seed,
                               std::size_t n_paths, std::size_t cap) {
  const std::size_t n = grid.steps();
  if (n > cap) {
    throw InvalidArgument("cholesky generator limited to n <= " + std::to_string(cap) + ", got n = " +
                          std::to_string(n) + "; use davies-harte");
  }
  PathEnsemble ens = empty_ensemble(grid, hurst, seed, n_paths);
  if (n == 0) {
    for (std::size_t i = 0; i < n_paths; ++i) ens.paths.emplace_back(grid, std::vector<double>{0.0});
    return ens;
  }

  Eigen::LLT<Eigen::MatrixXd> llt(fbm_covariance_matrix(grid, hurst));
  if (llt.info() != Eigen::Success) {
    std::ostringstream os;
    os << "cholesky factorization failed: covariance not numerically positive definite (H = "
       << hurst.value() << ", n = " << n << ")";
    throw NumericError(os.str());
  }
  const Eigen::MatrixXd lower = llt.matrixL();

  std::vector<std::vector<double>> values(n_paths);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n_paths); ++i) {
    auto rng = path_engine(seed, static_cast<std::uint64_t>(i));
    std::normal_distribution<double> normal;
    Eigen::VectorXd z(static_cast<Eigen::Index>(n));
    for (Eigen::Index k = 0; k < z.size(); ++k) z(k) = normal(rng);
    const Eigen::VectorXd x = lower.triangularView<Eigen::Lower>() * z;
    auto& v = values[static_cast<std::size_t>(i)];
    v.resize(n + 1);
    v[0] = 0.0;
    for (std::size_t k = 0; k < n; ++k) v[k + 1] = x(static_cast<Eigen::Index>(k));
  }
  for (auto& v : values) ens.paths.emplace_back(grid, std::move(v));
  return ens;
}

std::vector<double> circulant_eigenvalues(std::size_t steps, HurstIndex hurst) {
  if (steps == 0) throw InvalidArgument("circulant embedding needs at least one step");
  const std::size_t m = circulant_size(steps);
  ComplexBuffer in = make_complex_buffer(m);
  ComplexBuffer out = make_complex_buffer(m);
  for (std::size_t k = 0; k <= m / 2; ++k) {
    const double r = fgn_autocovariance(k, hurst);
    in[k][0] = r;
    in[k][1] = 0.0;
    if (k > 0 && k < m / 2) {
      in[m - k][0] = r;
      in[m - k][1] = 0.0;
    }
  }
  {
    FftwPlan plan = detail::plan_dft(m, in.get(), out.get(), FFTW_FORWARD);
    fftw_execute(plan.get());
  }
  std::vector<double> eig(m);
  for (std::size_t j = 0; j < m; ++j) eig[j] = out[j][0];
  return eig;
}

PathEnsemble generate_davies_harte(const TimeGrid& grid, HurstIndex hurst, std::uint64_t seed,
                                   std::size_t n_paths) {
  const std::size_t n = grid.steps();
  if (n == 0) throw InvalidArgument("davies-harte generator needs n >= 1");

  std::vector<double> eig = circulant_eigenvalues(n, hurst);
  const std::size_t m = eig.size();
  const double max_eig = *std::max_element(eig.begin(), eig.end());
  for (std::size_t j = 0; j < m; ++j) {
    if (eig[j] < -kCirculantTolerance * max_eig) {
      std::ostringstream os;
      os << "circulant embedding not non-negative definite: eigenvalue " << eig[j] << " at index "
         << j << " (H = " << hurst.value() << ", n = " << n << ")";
      throw NumericError(os.str());
    }
  }
  std::vector<double> amplitude(m);
  for (std::size_t j = 0; j < m; ++j) {
    amplitude[j] = std::sqrt(std::max(eig[j], 0.0) / static_cast<double>(m));
  }
  const double scale = std::pow(grid.step(), hurst.value());

  ComplexBuffer plan_in = make_complex_buffer(m);
  ComplexBuffer plan_out = make_complex_buffer(m);
  FftwPlan plan = detail::plan_dft(m, plan_in.get(), plan_out.get(), FFTW_FORWARD);

  PathEnsemble ens = empty_ensemble(grid, hurst, seed, n_paths);
  std::vector<std::vector<double>> values(n_paths);
#pragma omp parallel
  {
    ComplexBuffer in = make_complex_buffer(m);
    ComplexBuffer out = make_complex_buffer(m);
#pragma omp for schedule(static)
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n_paths); ++i) {
      auto rng = path_engine(seed, static_cast<std::uint64_t>(i));
      std::normal_distribution<double> normal;
      for (std::size_t j = 0; j < m; ++j) {
        in[j][0] = amplitude[j] * normal(rng);
        in[j][1] = amplitude[j] * normal(rng);
      }
      fftw_execute_dft(plan.get(), in.get(), out.get());
      auto& v = values[static_cast<std::size_t>(i)];
      v.resize(n + 1);
      v[0] = 0.0;
      double level = 0.0;
      for (std::size_t k = 0; k < n; ++k) {
        level += out[k][0];
        v[k + 1] = scale * level;
      }
    }
  }
  for (auto& v : values) ens.paths.emplace_back(grid, std::move(v));
  return ens;
}

PathEnsemble generate(Generator g, const TimeGrid& grid, HurstIndex hurst, std::uint64_t seed,
                      std::size_t n_paths) {
  return g == Generator::Cholesky ? generate_cholesky(grid, hurst, seed, n_paths)
                                  : generate_davies_harte(grid, hurst, seed, n_paths);
}

}  // namespace fbm
