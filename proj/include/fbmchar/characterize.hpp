#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fbmchar/estimators.hpp"
#include "fbmchar/types.hpp"

namespace fbm {

enum class Property { A, B, C };

std::string_view to_string(Property p);
Property property_from_string(std::string_view name);

/// One checked statistic. `lower`/`upper` is the acceptance interval that
/// decided `pass`.
struct Statistic {
  std::string name;
  EstimateWithCI estimate;
  double target = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  bool pass = false;

  friend bool operator==(const Statistic&, const Statistic&) = default;
};

struct PropertyReport {
  Property property = Property::A;
  std::vector<Statistic> statistics;
  bool pass = false;

  /// pass is the conjunction of the statistics' flags; an empty list fails.
  static PropertyReport from_statistics(Property p, std::vector<Statistic> stats);

  friend bool operator==(const PropertyReport&, const PropertyReport&) = default;
};

enum class Verdict { Consistent, Inconsistent };

std::string_view to_string(Verdict v);
Verdict verdict_from_string(std::string_view name);

struct CharacterizationVerdict {
  double hurst = 0.5;
  PropertyReport a;
  PropertyReport b;
  PropertyReport c;
  Verdict verdict = Verdict::Inconsistent;
  std::uint64_t seed = 0;
  std::size_t steps = 0;
  std::size_t paths = 0;

  friend bool operator==(const CharacterizationVerdict&, const CharacterizationVerdict&) = default;
};

/// Pass thresholds; every field can be overridden by name.
struct VerifyThresholds {
  double ci_multiplier = kDefaultCiMultiplier;
  double holder_median_tol = 0.1;
  double holder_band = 0.15;
  double holder_fraction = 0.8;
  double exponent_tol = 0.1;
  double bracket_t_min = 0.1;  // fraction of the horizon
  double normality_level = 0.01;
  double tail_split = 0.5;     // fraction of each checked time
  double coarsen_factor = 4;

  /// Name/value pairs sorted by name.
  std::map<std::string, double> to_map() const;
  /// Throws InvalidArgument on unknown names or out-of-range values.
  void set(std::string_view name, double value);
  static std::vector<std::string> names();

  friend bool operator==(const VerifyThresholds&, const VerifyThresholds&) = default;
};

inline constexpr std::size_t kMinCharacterizationSteps = 1024;
inline constexpr std::size_t kMinCharacterizationPaths = 100;

/// Hölder regularity: median per-path estimate within holder_median_tol of H and
/// at least holder_fraction of the estimates within holder_band of H.
PropertyReport test_property_a(const PathEnsemble& ens, HurstIndex hurst,
                               const VerifyThresholds& th = {});

/// Weighted quadratic variation at each time in `times` (grid times; empty
/// means the horizon): mean within ci_multiplier SE of t^{2H}, mean absolute
/// deviation smaller than on the grid coarsened by coarsen_factor, and the tail
/// after s = tail_split * t within ci_multiplier SE of t^{2H-1}(t-s).
PropertyReport test_property_b(const PathEnsemble& ens, HurstIndex hurst,
                               const std::vector<double>& times = {},
                               const VerifyThresholds& th = {});

/// Martingale surrogates for M: increment correlation across [0,t/2] and
/// [t/2,t], regression of M_t - M_{t/2} on (M_{t/4}, M_{t/2}), bracket exponent
/// 2-2H, and normality of M_t over the root mean bracket.
PropertyReport test_property_c(const PathEnsemble& ens, HurstIndex hurst,
                               const VerifyThresholds& th = {});

/// Same as test_property_c with the martingale paths already computed.
PropertyReport test_property_c_on_martingale(std::span<const SamplePath> m, HurstIndex hurst,
                                             const VerifyThresholds& th = {});

CharacterizationVerdict combine_reports(double hurst, PropertyReport a, PropertyReport b,
                                        PropertyReport c, std::uint64_t seed, std::size_t steps,
                                        std::size_t paths);

CharacterizationVerdict characterization_verdict(const PathEnsemble& ens, HurstIndex hurst,
                                                 const VerifyThresholds& th = {});

/// Ensemble mean of the empirical brackets.
BracketPath mean_bracket(std::span<const SamplePath> paths);

}  // namespace fbm
