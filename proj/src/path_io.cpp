#include "fbmchar/path_io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>

namespace fbm {

namespace {

std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double parse_double(std::string_view field, std::size_t line) {
  std::string s(field);
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != s.size() || !std::isfinite(v)) {
    throw InvalidArgument("path CSV line " + std::to_string(line) + ": cannot parse number '" + s + "'");
  }
  return v;
}

std::size_t parse_index(std::string_view field, std::size_t line) {
  std::size_t v = 0;
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  if (ec != std::errc() || ptr != field.data() + field.size()) {
    throw InvalidArgument("path CSV line " + std::to_string(line) + ": bad path_id '" +
                          std::string(field) + "'");
  }
  return v;
}

}  // namespace

void write_paths_csv(std::ostream& out, std::span<const SamplePath> paths) {
  out << "path_id,t,value\n";
  for (std::size_t i = 0; i < paths.size(); ++i) {
    const auto& p = paths[i];
    for (std::size_t k = 0; k < p.size(); ++k) {
      out << i << ',' << format_number(p.grid().time(k)) << ',' << format_number(p[k]) << '\n';
    }
  }
}

void write_paths_csv(const std::filesystem::path& file, std::span<const SamplePath> paths) {
  std::ofstream out(file, std::ios::binary);
  if (!out) throw InvalidArgument("cannot open '" + file.string() + "' for writing");
  write_paths_csv(out, paths);
  if (!out) throw InvalidArgument("failed writing '" + file.string() + "'");
}

std::vector<SamplePath> read_paths_csv(std::istream& in, PathRole role) {
  std::string line;
  std::size_t lineno = 1;
  if (!std::getline(in, line)) throw InvalidArgument("path CSV is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "path_id,t,value") {
    throw InvalidArgument("path CSV header must be 'path_id,t,value', got '" + line + "'");
  }

  std::vector<std::vector<double>> times;
  std::vector<std::vector<double>> values;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto c1 = line.find(',');
    const auto c2 = c1 == std::string::npos ? c1 : line.find(',', c1 + 1);
    if (c2 == std::string::npos || line.find(',', c2 + 1) != std::string::npos) {
      throw InvalidArgument("path CSV line " + std::to_string(lineno) + ": expected 3 fields");
    }
    const std::string_view sv(line);
    const std::size_t id = parse_index(sv.substr(0, c1), lineno);
    const double t = parse_double(sv.substr(c1 + 1, c2 - c1 - 1), lineno);
    const double v = parse_double(sv.substr(c2 + 1), lineno);
    if (id == times.size()) {
      times.emplace_back();
      values.emplace_back();
    } else if (id > times.size()) {
      throw InvalidArgument("path CSV line " + std::to_string(lineno) + ": path_id " +
                            std::to_string(id) + " out of order");
    }
    times[id].push_back(t);
    values[id].push_back(v);
  }
  if (times.empty()) throw InvalidArgument("path CSV contains no rows");

  const auto& t0 = times.front();
  if (t0.size() < 2) throw InvalidArgument("path CSV paths need at least two grid points");
  const std::size_t n = t0.size() - 1;
  const TimeGrid grid(t0.back(), n);
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (times[i].size() != t0.size()) {
      throw InvalidArgument("path " + std::to_string(i) + " has " + std::to_string(times[i].size()) +
                            " points, path 0 has " + std::to_string(t0.size()));
    }
    for (std::size_t k = 0; k <= n; ++k) {
      if (std::abs(times[i][k] - grid.time(k)) > 1e-9 * grid.horizon()) {
        throw InvalidArgument("path " + std::to_string(i) + ": grid is not uniform from t=0 at point " +
                              std::to_string(k));
      }
    }
  }
  std::vector<SamplePath> paths;
  paths.reserve(values.size());
  for (auto& v : values) paths.emplace_back(grid, std::move(v), role);
  return paths;
}

std::vector<SamplePath> read_paths_csv(const std::filesystem::path& file, PathRole role) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw InvalidArgument("cannot read input file '" + file.string() + "'");
  return read_paths_csv(in, role);
}

}  // namespace fbm
