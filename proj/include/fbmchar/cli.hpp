#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "fbmchar/report.hpp"
#include "fbmchar/types.hpp"

namespace fbm {

/// Exit codes of the command-line tool.
enum ExitCode : int {
  kExitOk = 0,
  kExitInconsistent = 1,
  kExitUsage = 2,
  kExitNumeric = 3,
};

/// Transform names accepted by `transform --transform <name>`.
std::vector<std::string> transform_names();

/// Parses `args` (without the program name) and runs the command. Reports
/// and CSV go to the --out file or to `out`; diagnostics go to `err`.
int parse_and_dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Runs an already validated configuration.
int dispatch(const RunConfig& config, std::ostream& out, std::ostream& err);

/// The ensemble a configuration refers to: read from --in, or generated.
PathEnsemble load_ensemble(const RunConfig& config);

ReportDocument estimate_report(const RunConfig& config, const PathEnsemble& ens);
ReportDocument verify_report(const RunConfig& config, const PathEnsemble& ens);

}  // namespace fbm
