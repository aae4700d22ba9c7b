#include "fbmchar/cli.hpp"

#include <chrono>
#include <cmath>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "fbmchar/characterize.hpp"
#include "fbmchar/estimators.hpp"
#include "fbmchar/fbm_gen.hpp"
#include "fbmchar/kernels.hpp"
#include "fbmchar/path_io.hpp"
#include "fbmchar/transforms.hpp"

namespace fbm {

namespace {

std::string format_number(double x) {
  std::ostringstream os;
  os << x;
  return os.str();
}

struct TransformSpec {
  const char* name;
  PathRole input;
  SamplePath (*apply)(const SamplePath&, HurstIndex);
};

SamplePath bracket_as_path(const SamplePath& p, HurstIndex) {
  auto b = empirical_bracket(p);
  return SamplePath(b.grid, std::move(b.values), PathRole::Other);
}

constexpr TransformSpec kTransforms[] = {
    {"martingale", PathRole::X, fundamental_martingale},
    {"martingale-via-y", PathRole::X, fundamental_martingale_via_y},
    {"y", PathRole::X, y_process},
    {"x-from-y", PathRole::Y, x_from_y},
    {"w", PathRole::M, w_process},
    {"abel", PathRole::M, y_from_m_abel},
    {"x-from-m", PathRole::M, x_from_m_high},
    {"x-from-w", PathRole::W, x_from_w_low},
    {"bracket", PathRole::Other, bracket_as_path},
};

const TransformSpec& find_transform(const std::string& name) {
  for (const auto& t : kTransforms) {
    if (name == t.name) return t;
  }
  std::string known;
  for (const auto& t : kTransforms) known += std::string(known.empty() ? "" : ", ") + t.name;
  throw InvalidArgument("unknown transform '" + name + "'; expected one of " + known);
}

// Generated fBm is X; carry it forward to the role a transform consumes.
SamplePath forward_to(const SamplePath& x, PathRole role, HurstIndex h) {
  switch (role) {
    case PathRole::X:
    case PathRole::Other: return x;
    case PathRole::Y: return y_process(x, h);
    case PathRole::M: return fundamental_martingale(x, h);
    case PathRole::W: return w_process(fundamental_martingale(x, h), h);
  }
  return x;
}

class Stopwatch {
 public:
  explicit Stopwatch(std::map<std::string, double>* sink) : sink_(sink) {}
  void lap(const std::string& stage) {
    const auto now = std::chrono::steady_clock::now();
    if (sink_) (*sink_)[stage] = std::chrono::duration<double>(now - last_).count();
    last_ = now;
  }

 private:
  std::map<std::string, double>* sink_;
  std::chrono::steady_clock::time_point last_ = std::chrono::steady_clock::now();
};

std::vector<double> per_path(const std::vector<SamplePath>& paths, double (*f)(const SamplePath&, HurstIndex),
                             HurstIndex h) {
  std::vector<double> out(paths.size());
  for (std::size_t i = 0; i < paths.size(); ++i) out[i] = f(paths[i], h);
  return out;
}

// Mean weighted quadratic variation on the grid and on successively halved grids.
Series statistic_vs_n(const PathEnsemble& ens, HurstIndex h) {
  Series s{"statistic_vs_n", "n", "mean_weighted_qv", {}, {}};
  std::vector<std::size_t> factors;
  for (std::size_t f = 16; f >= 1; f /= 2) {
    if (ens.grid.steps() % f == 0 && ens.grid.steps() / f >= 1) factors.push_back(f);
  }
  for (std::size_t f : factors) {
    double acc = 0.0;
    for (const auto& p : ens.paths) acc += weighted_qv(p.coarsened(f), h);
    s.x.push_back(static_cast<double>(ens.grid.steps() / f));
    s.y.push_back(acc / static_cast<double>(ens.size()));
  }
  return s;
}

Series bracket_vs_t(const BracketPath& b) {
  return Series{"bracket_vs_t", "t", "mean_bracket", b.grid.times(), b.values};
}

std::vector<SamplePath> martingales(const PathEnsemble& ens, HurstIndex h) {
  return map_paths(ens.paths,
                   [h](const SamplePath& x) { return fundamental_martingale(x.with_role(PathRole::X), h); });
}

void write_paths(const RunConfig& c, std::span<const SamplePath> paths, std::ostream& out) {
  if (c.output.empty()) {
    write_paths_csv(out, paths);
  } else {
    write_paths_csv(std::filesystem::path(c.output), paths);
  }
}

void write_report(const RunConfig& c, const ReportDocument& doc, std::ostream& out) {
  if (c.output.empty()) {
    out << to_json(doc);
  } else {
    emit_report(doc, c.output);
  }
}

void validate(const RunConfig& c) {
  HurstIndex{c.hurst};
  TimeGrid{c.horizon, c.steps};
  if (c.steps == 0) throw InvalidArgument("--n must be at least 1");
  if (c.paths == 0) throw InvalidArgument("--paths must be at least 1");
  if (c.command == Command::Transform) find_transform(c.transform);
}

}  // namespace

std::vector<std::string> transform_names() {
  std::vector<std::string> out;
  for (const auto& t : kTransforms) out.emplace_back(t.name);
  return out;
}

PathEnsemble load_ensemble(const RunConfig& c) {
  const HurstIndex h(c.hurst);
  if (c.input.empty()) return generate(c.generator, TimeGrid(c.horizon, c.steps), h, c.seed, c.paths);
  const std::filesystem::path file(c.input);
  if (!std::filesystem::is_regular_file(file)) {
    throw InvalidArgument("cannot read input file '" + c.input + "'");
  }
  auto paths = read_paths_csv(file, PathRole::X);
  if (paths.empty()) throw InvalidArgument("input file '" + c.input + "' holds no paths");
  TimeGrid grid = paths.front().grid();
  return PathEnsemble{grid, std::move(paths), c.seed, h};
}

ReportDocument estimate_report(const RunConfig& c, const PathEnsemble& ens) {
  const HurstIndex h(c.hurst);
  const double t = ens.grid.horizon();
  const std::size_t n = ens.grid.steps();
  ReportDocument doc;
  doc.config = c;
  Stopwatch clock(c.timings ? &doc.timings : nullptr);

  doc.estimates.push_back(
      {"weighted_qv", mean_estimate(per_path(ens.paths, weighted_qv, h)), std::pow(t, 2.0 * h)});
  if (n % 2 == 0) {
    std::vector<double> tail(ens.size());
    for (std::size_t i = 0; i < ens.size(); ++i) tail[i] = weighted_qv_tail(ens.paths[i], h, 0.5 * t);
    doc.estimates.push_back(
        {"tail_qv@s=" + format_number(0.5 * t), mean_estimate(tail), std::pow(t, 2.0 * h - 1.0) * 0.5 * t});
  }
  doc.estimates.push_back({"p_variation", mean_estimate(per_path(ens.paths, p_variation, h)),
                           abs_normal_moment(1.0 / h) * t});
  if (n >= 64) {
    std::vector<double> holder;
    for (const auto& p : ens.paths) {
      try {
        holder.push_back(holder_exponent_estimate(p).value);
      } catch (const DegeneratePathError&) {
      }
    }
    if (!holder.empty()) doc.estimates.push_back({"holder_exponent", mean_estimate(holder), h});
  }
  clock.lap("functionals");

  const auto m = martingales(ens, h);
  clock.lap("martingale");
  const BracketPath bracket = mean_bracket(m);
  if (ens.size() >= 4) {
    std::vector<double> end(m.size());
    for (std::size_t i = 0; i < m.size(); ++i) end[i] = m[i].back();
    doc.estimates.push_back({"martingale_variance", variance_estimate(end),
                             molchan_bracket_constant(h) * std::pow(t, 2.0 - 2.0 * h)});
  }
  if (n >= 10) {
    try {
      doc.fits.push_back({"mean_bracket", powerlaw_fit(bracket, c.thresholds.bracket_t_min * t, t), 2.0 - 2.0 * h});
    } catch (const InvalidArgument&) {
      // bracket vanishes somewhere in range; no fit to report
    }
  }
  doc.series.push_back(statistic_vs_n(ens, h));
  doc.series.push_back(bracket_vs_t(bracket));
  clock.lap("series");
  return doc;
}

ReportDocument verify_report(const RunConfig& c, const PathEnsemble& ens) {
  const HurstIndex h(c.hurst);
  ReportDocument doc;
  doc.config = c;
  Stopwatch clock(c.timings ? &doc.timings : nullptr);

  auto a = test_property_a(ens, h, c.thresholds);
  clock.lap("property_a");
  auto b = test_property_b(ens, h, {}, c.thresholds);
  clock.lap("property_b");
  const auto m = martingales(ens, h);
  auto pc = test_property_c_on_martingale(m, h, c.thresholds);
  clock.lap("property_c");
  doc.verdict = combine_reports(h.value(), std::move(a), std::move(b), std::move(pc), ens.seed,
                                ens.grid.steps(), ens.size());

  const double t = ens.grid.horizon();
  const BracketPath bracket = mean_bracket(m);
  try {
    doc.fits.push_back({"mean_bracket", powerlaw_fit(bracket, c.thresholds.bracket_t_min * t, t), 2.0 - 2.0 * h});
  } catch (const InvalidArgument&) {
  }
  doc.series.push_back(statistic_vs_n(ens, h));
  doc.series.push_back(bracket_vs_t(bracket));
  clock.lap("series");
  return doc;
}

int dispatch(const RunConfig& c, std::ostream& out, std::ostream& err) {
  validate(c);
  const HurstIndex h(c.hurst);
  switch (c.command) {
    case Command::Generate: {
      const auto ens = load_ensemble(c);
      write_paths(c, ens.paths, out);
      return kExitOk;
    }
    case Command::Transform: {
      const auto& spec = find_transform(c.transform);
      auto ens = load_ensemble(c);
      std::vector<SamplePath> input;
      input.reserve(ens.size());
      for (const auto& p : ens.paths) {
        input.push_back(c.input.empty() ? forward_to(p, spec.input, h) : p.with_role(spec.input));
      }
      const auto result = map_paths(input, [&](const SamplePath& p) { return spec.apply(p, h); });
      write_paths(c, result, out);
      return kExitOk;
    }
    case Command::Estimate: {
      const auto ens = load_ensemble(c);
      write_report(c, canonical(estimate_report(c, ens)), out);
      return kExitOk;
    }
    case Command::Verify: {
      const auto ens = load_ensemble(c);
      const auto doc = canonical(verify_report(c, ens));
      write_report(c, doc, out);
      const bool ok = doc.verdict && doc.verdict->verdict == Verdict::Consistent;
      if (!c.output.empty()) out << "verdict: " << to_string(doc.verdict->verdict) << "\n";
      else err << "verdict: " << to_string(doc.verdict->verdict) << "\n";
      return ok ? kExitOk : kExitInconsistent;
    }
  }
  return kExitUsage;
}

int parse_and_dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Fractional Brownian motion generation, transforms and characterization checks", "fbmchar"};
  app.require_subcommand(1, 1);

  RunConfig cfg;
  std::map<std::string, std::optional<double>> overrides;
  for (const auto& name : VerifyThresholds::names()) overrides[name];

  const auto add_common = [&](CLI::App* sub) {
    sub->add_option("--hurst", cfg.hurst, "Hurst index H in (0,1)")->required();
    sub->add_option("--t", cfg.horizon, "time horizon")->capture_default_str();
    sub->add_option("--n", cfg.steps, "grid steps")->capture_default_str();
    sub->add_option("--paths", cfg.paths, "ensemble size")->capture_default_str();
    sub->add_option("--seed", cfg.seed, "random seed")->capture_default_str();
    sub->add_option_function<std::string>(
           "--generator", [&](const std::string& g) { cfg.generator = generator_from_string(g); },
           "cholesky or davies-harte")
        ->default_str("davies-harte");
    sub->add_option("--in", cfg.input, "input path CSV (path_id,t,value) instead of generating");
    sub->add_option("--out", cfg.output, "output file (default: standard output)");
  };
  const auto add_thresholds = [&](CLI::App* sub) {
    for (auto& [name, slot] : overrides) sub->add_option("--threshold." + name, slot, "pass threshold");
    sub->add_flag("--timings", cfg.timings, "record wall-clock stage timings in the report");
  };

  auto* gen = app.add_subcommand("generate", "sample fBm paths to CSV");
  add_common(gen);
  auto* tr = app.add_subcommand("transform", "apply a path transform, write CSV");
  add_common(tr);
  cfg.transform = "martingale";
  tr->add_option("--transform", cfg.transform, "one of martingale, martingale-via-y, y, x-from-y, w, "
                                              "abel, x-from-m, x-from-w, bracket")
      ->capture_default_str();
  auto* est = app.add_subcommand("estimate", "estimate path functionals, write a JSON report");
  add_common(est);
  add_thresholds(est);
  auto* ver = app.add_subcommand("verify", "run the three-property characterization");
  add_common(ver);
  add_thresholds(ver);

  std::vector<std::string> argv_store{"fbmchar"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& a : argv_store) argv.push_back(a.data());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return kExitOk;
    }
    err << "error: " << e.what() << " (see --help)\n";
    return kExitUsage;
  } catch (const InvalidArgument& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    if (gen->parsed()) cfg.command = Command::Generate;
    if (tr->parsed()) cfg.command = Command::Transform;
    if (est->parsed()) cfg.command = Command::Estimate;
    if (ver->parsed()) cfg.command = Command::Verify;
    if (cfg.command != Command::Transform) cfg.transform.clear();
    for (const auto& [name, slot] : overrides) {
      if (slot) cfg.thresholds.set(name, *slot);
    }
    return dispatch(cfg, out, err);
  } catch (const InvalidArgument& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const NumericError& e) {
    err << "numeric error: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitNumeric;
  }
}

}  // namespace fbm
