#include "fbmchar/report.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <ostream>

#include "json.hpp"

namespace fbm {

namespace {

using json = nlohmann::ordered_json;

json number(double x) {
  if (!std::isfinite(x)) return nullptr;
  return round_report(x);
}

double read_number(const json& j, const char* key) {
  const auto& v = j.at(key);
  if (v.is_null()) return std::numeric_limits<double>::quiet_NaN();
  return v.get<double>();
}

json numbers(const std::vector<double>& xs) {
  json arr = json::array();
  for (double x : xs) arr.push_back(number(x));
  return arr;
}

std::vector<double> read_numbers(const json& arr) {
  std::vector<double> out;
  out.reserve(arr.size());
  for (const auto& v : arr) {
    out.push_back(v.is_null() ? std::numeric_limits<double>::quiet_NaN() : v.get<double>());
  }
  return out;
}

json estimate_fields(const EstimateWithCI& e) {
  return json{{"value", number(e.value)}, {"std_error", number(e.std_error)}, {"n_samples", e.n_samples}};
}

EstimateWithCI read_estimate(const json& j) {
  return EstimateWithCI{read_number(j, "value"), read_number(j, "std_error"),
                        j.at("n_samples").get<std::size_t>()};
}

json config_json(const RunConfig& c) {
  json th = json::object();
  for (const auto& [name, value] : c.thresholds.to_map()) th[name] = number(value);
  return json{{"command", std::string(to_string(c.command))},
              {"hurst", number(c.hurst)},
              {"t", number(c.horizon)},
              {"n", c.steps},
              {"paths", c.paths},
              {"seed", c.seed},
              {"generator", std::string(to_string(c.generator))},
              {"input", c.input},
              {"output", c.output},
              {"transform", c.transform},
              {"timings", c.timings},
              {"thresholds", th}};
}

RunConfig read_config(const json& j) {
  RunConfig c;
  c.command = command_from_string(j.at("command").get<std::string>());
  c.hurst = read_number(j, "hurst");
  c.horizon = read_number(j, "t");
  c.steps = j.at("n").get<std::size_t>();
  c.paths = j.at("paths").get<std::size_t>();
  c.seed = j.at("seed").get<std::uint64_t>();
  c.generator = generator_from_string(j.at("generator").get<std::string>());
  c.input = j.at("input").get<std::string>();
  c.output = j.at("output").get<std::string>();
  c.transform = j.at("transform").get<std::string>();
  c.timings = j.at("timings").get<bool>();
  for (const auto& [name, value] : j.at("thresholds").items()) {
    c.thresholds.set(name, value.get<double>());
  }
  return c;
}

json report_json(const PropertyReport& r) {
  json stats = json::array();
  for (const auto& s : r.statistics) {
    json js = json{{"name", s.name}};
    js.update(estimate_fields(s.estimate));
    js["target"] = number(s.target);
    js["lower"] = number(s.lower);
    js["upper"] = number(s.upper);
    js["pass"] = s.pass;
    stats.push_back(std::move(js));
  }
  return json{{"property", std::string(to_string(r.property))}, {"pass", r.pass}, {"statistics", stats}};
}

PropertyReport read_report(const json& j) {
  PropertyReport r;
  r.property = property_from_string(j.at("property").get<std::string>());
  r.pass = j.at("pass").get<bool>();
  for (const auto& js : j.at("statistics")) {
    r.statistics.push_back(Statistic{js.at("name").get<std::string>(), read_estimate(js),
                                     read_number(js, "target"), read_number(js, "lower"),
                                     read_number(js, "upper"), js.at("pass").get<bool>()});
  }
  return r;
}

json verdict_json(const CharacterizationVerdict& v) {
  return json{{"hurst", number(v.hurst)},
              {"verdict", std::string(to_string(v.verdict))},
              {"seed", v.seed},
              {"n", v.steps},
              {"paths", v.paths},
              {"properties", json::array({report_json(v.a), report_json(v.b), report_json(v.c)})}};
}

CharacterizationVerdict read_verdict(const json& j) {
  CharacterizationVerdict v;
  v.hurst = read_number(j, "hurst");
  v.verdict = verdict_from_string(j.at("verdict").get<std::string>());
  v.seed = j.at("seed").get<std::uint64_t>();
  v.steps = j.at("n").get<std::size_t>();
  v.paths = j.at("paths").get<std::size_t>();
  const auto& props = j.at("properties");
  if (props.size() != 3) throw InvalidArgument("verdict must hold three property reports");
  v.a = read_report(props[0]);
  v.b = read_report(props[1]);
  v.c = read_report(props[2]);
  return v;
}

ReportDocument parse_document(const json& j) {
  ReportDocument doc;
  doc.schema_version = j.at("schema_version").get<int>();
  if (doc.schema_version != kReportSchemaVersion) {
    throw InvalidArgument("report schema version " + std::to_string(doc.schema_version) +
                          " is not supported (expected " + std::to_string(kReportSchemaVersion) + ")");
  }
  doc.config = read_config(j.at("config"));
  const auto& results = j.at("results");
  for (const auto& e : results.at("estimates")) {
    doc.estimates.push_back(
        NamedEstimate{e.at("name").get<std::string>(), read_estimate(e), read_number(e, "target")});
  }
  for (const auto& f : results.at("fits")) {
    doc.fits.push_back(NamedFit{f.at("name").get<std::string>(),
                                PowerLawFit{read_number(f, "coefficient"), read_number(f, "exponent"),
                                            read_number(f, "residual")},
                                read_number(f, "target_exponent")});
  }
  if (!results.at("verdict").is_null()) doc.verdict = read_verdict(results.at("verdict"));
  for (const auto& s : j.at("series")) {
    doc.series.push_back(Series{s.at("name").get<std::string>(), s.at("x_label").get<std::string>(),
                                s.at("y_label").get<std::string>(), read_numbers(s.at("x")),
                                read_numbers(s.at("y"))});
  }
  if (j.contains("timings")) {
    for (const auto& [stage, secs] : j.at("timings").items()) doc.timings[stage] = secs.get<double>();
  }
  return doc;
}

void round_estimate(EstimateWithCI& e) {
  e.value = round_report(e.value);
  e.std_error = round_report(e.std_error);
}

}  // namespace

std::string_view to_string(Command c) {
  switch (c) {
    case Command::Generate: return "generate";
    case Command::Transform: return "transform";
    case Command::Estimate: return "estimate";
    case Command::Verify: return "verify";
  }
  return "?";
}

Command command_from_string(std::string_view name) {
  if (name == "generate") return Command::Generate;
  if (name == "transform") return Command::Transform;
  if (name == "estimate") return Command::Estimate;
  if (name == "verify") return Command::Verify;
  throw InvalidArgument("unknown command '" + std::string(name) + "'");
}

double round_report(double x) {
  if (!std::isfinite(x)) return x;
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.*g", kReportDigits, x);
  return std::strtod(buf, nullptr);
}

std::string to_json(const ReportDocument& doc) {
  json estimates = json::array();
  for (const auto& e : doc.estimates) {
    json je = json{{"name", e.name}};
    je.update(estimate_fields(e.estimate));
    je["target"] = number(e.target);
    estimates.push_back(std::move(je));
  }
  json fits = json::array();
  for (const auto& f : doc.fits) {
    fits.push_back(json{{"name", f.name},
                        {"coefficient", number(f.fit.coefficient)},
                        {"exponent", number(f.fit.exponent)},
                        {"residual", number(f.fit.residual)},
                        {"target_exponent", number(f.target_exponent)}});
  }
  json series = json::array();
  for (const auto& s : doc.series) {
    series.push_back(json{{"name", s.name},
                          {"x_label", s.x_label},
                          {"y_label", s.y_label},
                          {"x", numbers(s.x)},
                          {"y", numbers(s.y)}});
  }
  json root = json{{"schema_version", doc.schema_version},
                   {"config", config_json(doc.config)},
                   {"results", json{{"estimates", estimates},
                                    {"fits", fits},
                                    {"verdict", doc.verdict ? verdict_json(*doc.verdict) : json(nullptr)}}},
                   {"series", series}};
  if (!doc.timings.empty()) {
    json t = json::object();
    for (const auto& [stage, secs] : doc.timings) t[stage] = number(secs);
    root["timings"] = t;
  }
  return root.dump(2) + "\n";
}

ReportDocument report_from_json(std::string_view text) {
  try {
    return parse_document(json::parse(text));
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string("malformed report JSON: ") + e.what());
  }
}

ReportDocument canonical(ReportDocument doc) {
  auto& c = doc.config;
  c.hurst = round_report(c.hurst);
  c.horizon = round_report(c.horizon);
  for (const auto& [name, value] : c.thresholds.to_map()) c.thresholds.set(name, round_report(value));
  for (auto& e : doc.estimates) {
    round_estimate(e.estimate);
    e.target = round_report(e.target);
  }
  for (auto& f : doc.fits) {
    f.fit.coefficient = round_report(f.fit.coefficient);
    f.fit.exponent = round_report(f.fit.exponent);
    f.fit.residual = round_report(f.fit.residual);
    f.target_exponent = round_report(f.target_exponent);
  }
  if (doc.verdict) {
    doc.verdict->hurst = round_report(doc.verdict->hurst);
    for (auto* r : {&doc.verdict->a, &doc.verdict->b, &doc.verdict->c}) {
      for (auto& s : r->statistics) {
        round_estimate(s.estimate);
        s.target = round_report(s.target);
        s.lower = round_report(s.lower);
        s.upper = round_report(s.upper);
      }
    }
  }
  for (auto& s : doc.series) {
    for (double& x : s.x) x = round_report(x);
    for (double& y : s.y) y = round_report(y);
  }
  for (auto& [stage, secs] : doc.timings) secs = round_report(secs);
  return doc;
}

std::filesystem::path series_path(const std::filesystem::path& report_path, const Series& series) {
  auto p = report_path;
  p.replace_extension();
  p += "." + series.name + ".csv";
  return p;
}

void write_series_csv(std::ostream& out, const Series& series) {
  if (series.x.size() != series.y.size()) {
    throw InvalidArgument("series '" + series.name + "' has columns of different length");
  }
  out << series.x_label << ',' << series.y_label << '\n';
  char buf[80];
  for (std::size_t i = 0; i < series.x.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.*g,%.*g\n", kReportDigits, series.x[i], kReportDigits, series.y[i]);
    out << buf;
  }
}

void emit_report(const ReportDocument& doc, const std::filesystem::path& path) {
  const auto write = [](const std::filesystem::path& p, const auto& body) {
    std::ofstream out(p, std::ios::binary);
    if (!out) throw InvalidArgument("cannot open '" + p.string() + "' for writing");
    body(out);
    out.flush();
    if (!out) throw InvalidArgument("failed writing '" + p.string() + "'");
  };
  const std::string text = to_json(doc);
  write(path, [&](std::ostream& o) { o << text; });
  for (const auto& s : doc.series) {
    write(series_path(path, s), [&](std::ostream& o) { write_series_csv(o, s); });
  }
}

}  // namespace fbm
