#include "fbmchar/characterize.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <functional>
#include <limits>
#include <sstream>

#include "fbmchar/transforms.hpp"

namespace fbm {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct ThresholdField {
  const char* name;
  double VerifyThresholds::*member;
  double lo;
  double hi;
  bool lo_open;
};

// Admissible ranges: lo < v (or lo <= v when !lo_open), v <= hi.
constexpr ThresholdField kThresholdFields[] = {
    {"ci_multiplier", &VerifyThresholds::ci_multiplier, 0.0, 1e6, true},
    {"holder_median_tol", &VerifyThresholds::holder_median_tol, 0.0, 1.0, true},
    {"holder_band", &VerifyThresholds::holder_band, 0.0, 1.0, true},
    {"holder_fraction", &VerifyThresholds::holder_fraction, 0.0, 1.0, false},
    {"exponent_tol", &VerifyThresholds::exponent_tol, 0.0, 2.0, true},
    {"bracket_t_min", &VerifyThresholds::bracket_t_min, 0.0, 0.99, true},
    {"normality_level", &VerifyThresholds::normality_level, 0.0, 0.999, true},
    {"tail_split", &VerifyThresholds::tail_split, 0.0, 0.99, false},
    {"coarsen_factor", &VerifyThresholds::coarsen_factor, 2.0, 1024.0, false},
};

std::string format_number(double x) {
  std::ostringstream os;
  os << x;
  return os.str();
}

void require_size(const PathEnsemble& ens, const char* what) {
  const std::size_t n = ens.grid.steps();
  const std::size_t paths = ens.size();
  if (n < kMinCharacterizationSteps || paths < kMinCharacterizationPaths) {
    std::ostringstream os;
    os << what << ": ensemble too small (n = " << n << ", N = " << paths << "); needs n >= "
       << kMinCharacterizationSteps << " and N >= " << kMinCharacterizationPaths;
    throw InvalidArgument(os.str());
  }
}

// f applied to every path in parallel; the first exception is rethrown.
std::vector<double> per_path(std::span<const SamplePath> paths,
                             const std::function<double(const SamplePath&)>& f) {
  std::vector<double> out(paths.size());
  std::exception_ptr error;
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(paths.size()); ++i) {
    try {
      out[static_cast<std::size_t>(i)] = f(paths[static_cast<std::size_t>(i)]);
    } catch (...) {
#pragma omp critical
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);
  return out;
}

Statistic within_se(std::string name, const EstimateWithCI& est, double target, double z) {
  const double hw = est.half_width(z);
  Statistic s{std::move(name), est, target, target - hw, target + hw, false};
  s.pass = est.covers(target, z);
  return s;
}

Statistic within_interval(std::string name, const EstimateWithCI& est, double target, double lo,
                          double hi) {
  return Statistic{std::move(name), est, target, lo, hi, est.value >= lo && est.value <= hi};
}

Statistic failed(std::string name, double target, std::size_t n) {
  return Statistic{std::move(name), EstimateWithCI{kNaN, kNaN, std::max<std::size_t>(n, 1)}, target,
                   kNaN, kNaN, false};
}

double median(std::vector<double> xs) {
  const std::size_t mid = xs.size() / 2;
  std::nth_element(xs.begin(), xs.begin() + static_cast<std::ptrdiff_t>(mid), xs.end());
  const double upper = xs[mid];
  if (xs.size() % 2 == 1) return upper;
  return 0.5 * (upper + *std::max_element(xs.begin(), xs.begin() + static_cast<std::ptrdiff_t>(mid)));
}

std::size_t grid_index(const TimeGrid& grid, double t, const std::string& label) {
  const double x = static_cast<double>(grid.steps()) * t / grid.horizon();
  const double r = std::round(x);
  if (!(t > 0.0) || r < 1.0 || r > static_cast<double>(grid.steps()) ||
      std::abs(x - r) > 1e-9 * std::max(1.0, x)) {
    std::ostringstream os;
    os << label << ": time t = " << t << " is not a positive grid time of the grid with n = "
       << grid.steps() << ", horizon " << grid.horizon();
    throw InvalidArgument(os.str());
  }
  return static_cast<std::size_t>(r);
}

}  // namespace

std::string_view to_string(Property p) {
  switch (p) {
    case Property::A: return "a";
    case Property::B: return "b";
    case Property::C: return "c";
  }
  return "?";
}

Property property_from_string(std::string_view name) {
  if (name == "a") return Property::A;
  if (name == "b") return Property::B;
  if (name == "c") return Property::C;
  throw InvalidArgument("unknown property '" + std::string(name) + "'; expected a, b or c");
}

std::string_view to_string(Verdict v) {
  return v == Verdict::Consistent ? "consistent" : "inconsistent";
}

Verdict verdict_from_string(std::string_view name) {
  if (name == "consistent") return Verdict::Consistent;
  if (name == "inconsistent") return Verdict::Inconsistent;
  throw InvalidArgument("unknown verdict '" + std::string(name) + "'");
}

PropertyReport PropertyReport::from_statistics(Property p, std::vector<Statistic> stats) {
  const bool pass = !stats.empty() &&
                    std::all_of(stats.begin(), stats.end(), [](const Statistic& s) { return s.pass; });
  return PropertyReport{p, std::move(stats), pass};
}

std::map<std::string, double> VerifyThresholds::to_map() const {
  std::map<std::string, double> out;
  for (const auto& f : kThresholdFields) out[f.name] = this->*f.member;
  return out;
}

std::vector<std::string> VerifyThresholds::names() {
  std::vector<std::string> out;
  for (const auto& f : kThresholdFields) out.emplace_back(f.name);
  return out;
}

void VerifyThresholds::set(std::string_view name, double value) {
  for (const auto& f : kThresholdFields) {
    if (name != f.name) continue;
    const bool lo_ok = f.lo_open ? value > f.lo : value >= f.lo;
    if (!lo_ok || !(value <= f.hi)) {
      std::ostringstream os;
      os << "threshold " << name << " = " << value << " outside " << (f.lo_open ? "(" : "[") << f.lo
         << ", " << f.hi << "]";
      throw InvalidArgument(os.str());
    }
    if (name == "coarsen_factor" && value != std::floor(value)) {
      throw InvalidArgument("threshold coarsen_factor must be an integer");
    }
    this->*f.member = value;
    return;
  }
  std::string known;
  for (const auto& f : kThresholdFields) known += std::string(known.empty() ? "" : ", ") + f.name;
  throw InvalidArgument("unknown threshold '" + std::string(name) + "'; known: " + known);
}

PropertyReport test_property_a(const PathEnsemble& ens, HurstIndex hurst, const VerifyThresholds& th) {
  require_size(ens, "property (a)");
  const double h = hurst.value();
  const auto est = per_path(ens.paths, [](const SamplePath& p) {
    try {
      return holder_exponent_estimate(p).value;
    } catch (const DegeneratePathError&) {
      return kNaN;
    }
  });

  std::vector<double> valid;
  for (double e : est) {
    if (!std::isnan(e)) valid.push_back(e);
  }
  const std::size_t degenerate = est.size() - valid.size();
  const double n_all = static_cast<double>(est.size());

  std::vector<Statistic> stats;
  if (valid.size() >= 2) {
    // Asymptotic standard error of a sample median under normality.
    const auto spread = mean_estimate(valid);
    const double se = 1.2533141373155 * spread.std_error;
    stats.push_back(within_interval("holder_median", EstimateWithCI{median(valid), se, valid.size()},
                                    h, h - th.holder_median_tol, h + th.holder_median_tol));
  } else {
    stats.push_back(failed("holder_median", h, valid.size()));
  }
  std::size_t inside = 0;
  for (double e : valid) {
    if (std::abs(e - h) <= th.holder_band) ++inside;
  }
  const double frac = static_cast<double>(inside) / n_all;
  const double frac_se = std::sqrt(frac * (1.0 - frac) / n_all);
  stats.push_back(within_interval("holder_fraction_in_band", EstimateWithCI{frac, frac_se, est.size()},
                                  th.holder_fraction, th.holder_fraction, 1.0));
  stats.push_back(within_interval("degenerate_paths",
                                  EstimateWithCI{static_cast<double>(degenerate), 0.0, est.size()}, 0.0,
                                  0.0, 0.0));
  return PropertyReport::from_statistics(Property::A, std::move(stats));
}

PropertyReport test_property_b(const PathEnsemble& ens, HurstIndex hurst, const std::vector<double>& times,
                               const VerifyThresholds& th) {
  if (ens.size() < 2) throw InvalidArgument("property (b): ensemble needs at least two paths");
  const double h = hurst.value();
  const double z = th.ci_multiplier;
  const auto factor = static_cast<std::size_t>(th.coarsen_factor);
  const std::vector<double> checked = times.empty() ? std::vector<double>{ens.grid.horizon()} : times;

  std::vector<Statistic> stats;
  for (double t : checked) {
    const std::string at = "t=" + format_number(t);
    const std::size_t m = grid_index(ens.grid, t, "property (b) at " + at);
    if (m % factor != 0) {
      std::ostringstream os;
      os << "property (b) at " << at << ": " << m << " steps are not divisible by the coarsening factor "
         << factor;
      throw InvalidArgument(os.str());
    }
    const double s = th.tail_split * t;
    const double split = static_cast<double>(m) * th.tail_split;
    if (std::abs(split - std::round(split)) > 1e-9 * std::max(1.0, split)) {
      std::ostringstream os;
      os << "property (b) at " << at << ": tail split s = " << s << " needs n*s/t integer, got "
         << split << " with n = " << m << "; adjust n";
      throw InvalidArgument(os.str());
    }

    const double target = std::pow(t, 2.0 * h);
    std::vector<double> fine(ens.size()), coarse(ens.size()), tail(ens.size());
    std::exception_ptr error;
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(ens.size()); ++i) {
      try {
        const auto k = static_cast<std::size_t>(i);
        const SamplePath p = ens.paths[k].truncated(m);
        fine[k] = weighted_qv(p, hurst);
        coarse[k] = weighted_qv(p.coarsened(factor), hurst);
        tail[k] = weighted_qv_tail(p, hurst, s);
      } catch (...) {
#pragma omp critical
        if (!error) error = std::current_exception();
      }
    }
    if (error) std::rethrow_exception(error);

    stats.push_back(within_se("weighted_qv@" + at, mean_estimate(fine), target, z));

    std::vector<double> dev_fine(fine.size()), dev_coarse(coarse.size());
    for (std::size_t k = 0; k < fine.size(); ++k) {
      dev_fine[k] = std::abs(fine[k] - target);
      dev_coarse[k] = std::abs(coarse[k] - target);
    }
    const auto l1 = mean_estimate(dev_fine);
    const double l1_coarse = mean_estimate(dev_coarse).value;
    Statistic dir{"l1_deviation@" + at, l1, l1_coarse, 0.0, l1_coarse, l1.value < l1_coarse};
    stats.push_back(dir);

    const double tail_target = std::pow(t, 2.0 * h - 1.0) * (t - s);
    stats.push_back(within_se("tail_qv@" + at + ",s=" + format_number(s), mean_estimate(tail),
                              tail_target, z));
  }
  return PropertyReport::from_statistics(Property::B, std::move(stats));
}

BracketPath mean_bracket(std::span<const SamplePath> paths) {
  if (paths.empty()) throw InvalidArgument("mean bracket of an empty ensemble");
  BracketPath out{paths.front().grid(), std::vector<double>(paths.front().size(), 0.0)};
  for (const auto& p : paths) {
    if (!(p.grid() == out.grid)) throw InvalidArgument("mean bracket needs paths on one grid");
    const auto b = empirical_bracket(p);
    for (std::size_t k = 0; k < b.values.size(); ++k) out.values[k] += b.values[k];
  }
  const double inv = 1.0 / static_cast<double>(paths.size());
  for (double& v : out.values) v *= inv;
  return out;
}

PropertyReport test_property_c_on_martingale(std::span<const SamplePath> m, HurstIndex hurst,
                                             const VerifyThresholds& th) {
  if (m.size() < 8) throw InvalidArgument("property (c): ensemble needs at least eight paths");
  const double h = hurst.value();
  const double z = th.ci_multiplier;
  const TimeGrid& grid = m.front().grid();
  const std::size_t n = grid.steps();
  if (n < 4) throw InvalidArgument("property (c): grid needs at least four steps");
  const std::size_t quarter = n / 4;
  const std::size_t half = n / 2;
  const std::size_t count = m.size();
  const double big_n = static_cast<double>(count);

  std::vector<double> m_quarter(count), m_half(count), late(count), m_end(count);
  for (std::size_t i = 0; i < count; ++i) {
    m_quarter[i] = m[i][quarter];
    m_half[i] = m[i][half];
    m_end[i] = m[i][n];
    late[i] = m_end[i] - m_half[i];
  }

  std::vector<Statistic> stats;
  const double r = correlation(m_half, late);
  const double r_se = 1.0 / std::sqrt(big_n);
  stats.push_back(within_se("increment_correlation", EstimateWithCI{r, r_se, count}, 0.0, z));

  try {
    const auto fit = ols(late, {m_quarter, m_half});
    stats.push_back(within_se("regression_slope_m_quarter",
                              EstimateWithCI{fit.coefficients[1], fit.std_errors[1], count}, 0.0, z));
    stats.push_back(within_se("regression_slope_m_half",
                              EstimateWithCI{fit.coefficients[2], fit.std_errors[2], count}, 0.0, z));
  } catch (const NumericError&) {
    stats.push_back(failed("regression_slope_m_quarter", 0.0, count));
    stats.push_back(failed("regression_slope_m_half", 0.0, count));
  }

  const BracketPath bracket = mean_bracket(m);
  const double target = 2.0 - 2.0 * h;
  try {
    const auto fit = powerlaw_fit(bracket, th.bracket_t_min * grid.horizon(), grid.horizon());
    stats.push_back(within_interval("bracket_exponent", EstimateWithCI{fit.exponent, 0.0, count}, target,
                                    target - th.exponent_tol, target + th.exponent_tol));
  } catch (const InvalidArgument&) {
    stats.push_back(failed("bracket_exponent", target, count));
  }

  const double scale = bracket.values.back();
  if (scale > 0.0) {
    std::vector<double> normalized(count);
    for (std::size_t i = 0; i < count; ++i) normalized[i] = m_end[i] / std::sqrt(scale);
    const auto nc = normality_check(normalized, th.normality_level);
    if (nc.z_skewness == 0.0 && nc.z_kurtosis == 0.0 && !nc.pass) {
      stats.push_back(failed("normality_skewness_z", 0.0, count));
      stats.push_back(failed("normality_kurtosis_z", 0.0, count));
    } else {
      stats.push_back(within_interval("normality_skewness_z", EstimateWithCI{nc.z_skewness, 1.0, count},
                                      0.0, -nc.critical, nc.critical));
      stats.push_back(within_interval("normality_kurtosis_z", EstimateWithCI{nc.z_kurtosis, 1.0, count},
                                      0.0, -nc.critical, nc.critical));
    }
  } else {
    stats.push_back(failed("normality_skewness_z", 0.0, count));
    stats.push_back(failed("normality_kurtosis_z", 0.0, count));
  }
  return PropertyReport::from_statistics(Property::C, std::move(stats));
}

PropertyReport test_property_c(const PathEnsemble& ens, HurstIndex hurst, const VerifyThresholds& th) {
  require_size(ens, "property (c)");
  const auto m = map_paths(ens.paths, [hurst](const SamplePath& x) {
    return fundamental_martingale(x.with_role(PathRole::X), hurst);
  });
  return test_property_c_on_martingale(m, hurst, th);
}

CharacterizationVerdict combine_reports(double hurst, PropertyReport a, PropertyReport b, PropertyReport c,
                                        std::uint64_t seed, std::size_t steps, std::size_t paths) {
  const bool ok = a.pass && b.pass && c.pass;
  return CharacterizationVerdict{hurst,
                                 std::move(a),
                                 std::move(b),
                                 std::move(c),
                                 ok ? Verdict::Consistent : Verdict::Inconsistent,
                                 seed,
                                 steps,
                                 paths};
}

CharacterizationVerdict characterization_verdict(const PathEnsemble& ens, HurstIndex hurst,
                                                 const VerifyThresholds& th) {
  auto a = test_property_a(ens, hurst, th);
  auto b = test_property_b(ens, hurst, {}, th);
  auto c = test_property_c(ens, hurst, th);
  return combine_reports(hurst.value(), std::move(a), std::move(b), std::move(c), ens.seed,
                         ens.grid.steps(), ens.size());
}

}  // namespace fbm
