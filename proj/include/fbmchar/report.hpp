#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fbmchar/characterize.hpp"
#include "fbmchar/estimators.hpp"
#include "fbmchar/fbm_gen.hpp"

namespace fbm {

/// Bump on any change to the serialized layout.
inline constexpr int kReportSchemaVersion = 1;

/// Significant digits of every number written to a report or series CSV.
inline constexpr int kReportDigits = 15;

enum class Command { Generate, Transform, Estimate, Verify };

std::string_view to_string(Command c);
Command command_from_string(std::string_view name);

struct RunConfig {
  Command command = Command::Verify;
  double hurst = 0.5;
  double horizon = 1.0;
  std::size_t steps = 4096;
  std::size_t paths = 500;
  std::uint64_t seed = 42;
  Generator generator = Generator::DaviesHarte;
  std::string input;      // empty: generate the ensemble
  std::string output;     // empty: standard output
  std::string transform;  // transform command only
  VerifyThresholds thresholds;
  bool timings = false;

  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

struct NamedEstimate {
  std::string name;
  EstimateWithCI estimate;
  double target = 0.0;

  friend bool operator==(const NamedEstimate&, const NamedEstimate&) = default;
};

struct NamedFit {
  std::string name;
  PowerLawFit fit;
  double target_exponent = 0.0;

  friend bool operator==(const NamedFit&, const NamedFit&) = default;
};

/// Plot-ready two-column data, written next to the report as CSV.
struct Series {
  std::string name;
  std::string x_label;
  std::string y_label;
  std::vector<double> x;
  std::vector<double> y;

  friend bool operator==(const Series&, const Series&) = default;
};

struct ReportDocument {
  int schema_version = kReportSchemaVersion;
  RunConfig config;
  std::vector<NamedEstimate> estimates;
  std::vector<NamedFit> fits;
  std::optional<CharacterizationVerdict> verdict;
  std::vector<Series> series;
  /// Wall-clock seconds per stage; only recorded on request so that reports
  /// stay byte-identical across runs.
  std::map<std::string, double> timings;

  friend bool operator==(const ReportDocument&, const ReportDocument&) = default;
};

/// x rounded to kReportDigits significant digits.
double round_report(double x);

/// JSON text with fixed key order; numbers are rounded to kReportDigits
/// significant digits, non-finite numbers become null.
std::string to_json(const ReportDocument& doc);

/// Inverse of to_json. Throws InvalidArgument on malformed input or a
/// schema version mismatch.
ReportDocument report_from_json(std::string_view text);

/// Every number rounded as to_json would write it, so that
/// report_from_json(to_json(d)) == canonical(d).
ReportDocument canonical(ReportDocument doc);

/// Path of the CSV file holding `series` next to the report at `report_path`.
std::filesystem::path series_path(const std::filesystem::path& report_path, const Series& series);

void write_series_csv(std::ostream& out, const Series& series);

/// Writes the JSON report and one CSV per series. Throws InvalidArgument
/// naming the destination on I/O failure.
void emit_report(const ReportDocument& doc, const std::filesystem::path& path);

}  // namespace fbm
