// hospsim command-line entry point: synth, seir, run, validate.

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "hospsim/engine.hpp"
#include "hospsim/errors.hpp"
#include "hospsim/ingest.hpp"
#include "hospsim/metrics.hpp"
#include "hospsim/parameters.hpp"
#include "hospsim/seir.hpp"

namespace fs = std::filesystem;
using namespace hospsim;

namespace {

// Missing inputs are usage errors.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

fs::path resolve_bundle(const std::string& flag) {
  std::string dir = flag;
  if (dir.empty())
    if (const char* env = std::getenv("HOSPSIM_BUNDLE")) dir = env;
  if (dir.empty()) throw UsageError("no bundle directory: pass --bundle or set HOSPSIM_BUNDLE");
  if (!fs::is_directory(dir)) throw UsageError("bundle directory not found: " + dir);
  return dir;
}

void require_file(const fs::path& p) {
  if (!fs::is_regular_file(p)) throw UsageError("file not found: " + p.string());
}

struct RunFlags {
  std::string bundle;
  std::string config;
  std::string out;
  std::string forecast;
  std::string re_band;
  std::optional<std::uint64_t> seed;
  std::optional<int> horizon;
  std::optional<double> scale;
  std::optional<double> re;
  bool no_covid = false;
  bool readmission = false;
};

void add_run_flags(CLI::App* cmd, RunFlags& f) {
  cmd->add_option("--bundle", f.bundle, "Bundle directory (default $HOSPSIM_BUNDLE)");
  cmd->add_option("--config", f.config, "key = value parameter file");
  cmd->add_option("--seed", f.seed, "Random seed");
  cmd->add_option("--horizon", f.horizon, "Days to simulate")->check(CLI::NonNegativeNumber);
  cmd->add_option("--scale", f.scale, "Agents per real person")->check(CLI::PositiveNumber);
  auto* re = cmd->add_option("--re", f.re, "Input R_e")->check(CLI::NonNegativeNumber);
  cmd->add_option("--re-band", f.re_band, "Sample R_e in a band")
      ->check(CLI::IsMember({"low", "mid", "high"}))
      ->excludes(re);
  cmd->add_option("--forecast", f.forecast, "Forecast CSV replacing the SEIR step");
  cmd->add_flag("--no-covid", f.no_covid, "Disable COVID-19");
  cmd->add_flag("--readmission", f.readmission, "Enable readmissions");
}

// defaults < bundle params.cfg < --config file < flags
RunConfig build_config(const RunFlags& f, const fs::path& bundle, int default_horizon,
                       bool default_covid) {
  RunConfig c;
  c.params = bundle_parameters(bundle);
  c.horizon = default_horizon;
  c.covid = default_covid;
  std::optional<std::string> band;
  if (!f.config.empty()) {
    require_file(f.config);
    auto values = read_key_value_file(f.config);
    auto rest = apply_parameters(c.params, values);
    for (const auto& [k, v] : rest) {
      if (k == "mode") {
        if (v == "pattern") {
          c.horizon = 365;
          c.covid = false;
        } else if (v != "forecast") {
          throw ConfigError("mode must be forecast or pattern, got '" + v + "'");
        }
      }
    }
    for (const auto& [k, v] : rest) {
      try {
        if (k == "mode") continue;
        if (k == "horizon") c.horizon = std::stoi(v);
        else if (k == "seed") c.seed = std::stoull(v);
        else if (k == "scale") c.params.set("population_scale", v);
        else if (k == "covid") c.covid = (v == "true" || v == "1");
        else if (k == "input_re") c.input_re = std::stod(v);
        else if (k == "re_band") band = v;
        else if (k == "forecast") c.forecast_path = v;
        else throw ConfigError(f.config + ": unknown key '" + k + "'");
      } catch (const std::logic_error&) {
        throw ConfigError(f.config + ": bad value for '" + k + "': " + v);
      }
    }
  }
  if (f.seed) c.seed = *f.seed;
  if (f.horizon) c.horizon = *f.horizon;
  if (f.scale) c.params.population_scale = *f.scale;
  if (f.no_covid) c.covid = false;
  if (f.readmission) c.params.readmission_enabled = true;
  if (!f.forecast.empty()) c.forecast_path = f.forecast;
  if (c.forecast_path) require_file(*c.forecast_path);
  if (!f.re_band.empty()) band = f.re_band;
  if (f.re) {
    c.input_re = *f.re;
  } else if (band) {
    Rng rng = make_stream(c.seed, "re-band");
    c.input_re = sample_re(re_band(c.params.seir, *band), rng);
  }
  c.params.validate();
  return c;
}

void print_table(const PatternReport& report, const std::string& pattern) {
  for (const auto& [k, v] : report.values)
    if (std::get<0>(k) == pattern)
      std::cout << pattern << "  " << std::get<1>(k) << "  " << std::get<2>(k) << "  "
                << format_double(v) << "\n";
}

int execute(int argc, char** argv) {
  CLI::App app{"Hospital capacity agent-based simulation"};
  app.require_subcommand(1, 1);

  SyntheticSpec spec;
  std::string synth_out;
  auto* synth = app.add_subcommand("synth", "Generate a synthetic input bundle");
  synth->add_option("--out", synth_out, "Output directory")->required();
  synth->add_option("--agents", spec.n_agents, "Number of agents");
  synth->add_option("--counties", spec.n_counties, "Number of counties");
  synth->add_option("--unc", spec.unc, "UNC hospitals");
  synth->add_option("--large", spec.large, "Large non-UNC hospitals");
  synth->add_option("--small", spec.small, "Small non-UNC hospitals");
  synth->add_option("--ltach", spec.ltach, "LTACHs");
  synth->add_option("--nh", spec.nh, "Nursing homes");
  synth->add_option("--seed", spec.seed, "Generator seed");
  synth->add_option("--case-days", spec.case_days, "Days of case history");

  std::string seir_bundle, seir_out, seir_band, seir_config;
  std::optional<double> seir_re;
  std::optional<int> seir_days;
  std::uint64_t seir_seed = 1;
  auto* seir = app.add_subcommand("seir", "County SEIR forecast from the case series");
  seir->add_option("--bundle", seir_bundle, "Bundle directory (default $HOSPSIM_BUNDLE)");
  seir->add_option("--out", seir_out, "Forecast CSV")->required();
  auto* seir_re_opt = seir->add_option("--re", seir_re, "Input R_e")->check(CLI::NonNegativeNumber);
  seir->add_option("--re-band", seir_band, "Sample R_e in a band")
      ->check(CLI::IsMember({"low", "mid", "high"}))
      ->excludes(seir_re_opt);
  seir->add_option("--seed", seir_seed, "Seed for --re-band");
  seir->add_option("--days", seir_days, "Forecast days")->check(CLI::PositiveNumber);
  seir->add_option("--config", seir_config, "key = value parameter file");

  RunFlags run_flags;
  int replicates = 1, threads = 0;
  auto* run_cmd = app.add_subcommand("run", "Run the simulation");
  add_run_flags(run_cmd, run_flags);
  run_cmd->add_option("--replicates", replicates, "Independent runs, seeds seed..seed+N-1")
      ->check(CLI::PositiveNumber);
  run_cmd->add_option("--threads", threads, "Worker threads (default: all cores)");
  run_cmd->add_option("--out", run_flags.out, "Output directory")->required();

  RunFlags val_flags;
  std::string observed;
  auto* validate = app.add_subcommand("validate", "Pattern report, optionally against observed data");
  add_run_flags(validate, val_flags);
  validate->add_option("--observed", observed, "Observed pattern CSV");
  validate->add_option("--out", val_flags.out, "Output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (synth->parsed()) {
      generate_synthetic_bundle(spec, synth_out);
      std::cout << "wrote bundle " << synth_out << "\n";
      return 0;
    }

    if (seir->parsed()) {
      auto bundle = resolve_bundle(seir_bundle);
      Parameters p = bundle_parameters(bundle);
      if (!seir_config.empty()) {
        require_file(seir_config);
        auto rest = apply_parameters(p, read_key_value_file(seir_config));
        if (!rest.empty()) throw ConfigError(seir_config + ": unknown key '" + rest.begin()->first + "'");
      }
      if (seir_days) p.seir.forecast_days = *seir_days;
      double re = 1.2;
      if (seir_re) {
        re = *seir_re;
      } else if (!seir_band.empty()) {
        Rng rng = make_stream(seir_seed, "re-band");
        re = sample_re(re_band(p.seir, seir_band), rng);
      }
      require_file(bundle / BundleFiles::kCases);
      require_file(bundle / BundleFiles::kCounties);
      auto cases = load_case_series(bundle / BundleFiles::kCases);
      auto populations = load_counties(bundle / BundleFiles::kCounties);
      auto fc = forecast_state(cases, populations, p.seir, re);
      for (const auto& w : fc.warnings) std::cerr << "warning: " << w << "\n";
      write_forecast_csv(seir_out, fc);
      std::cout << "input R_e " << format_double(re) << ", state R_e " << format_double(fc.state_re)
                << ", wrote " << seir_out << "\n";
      return 0;
    }

    if (run_cmd->parsed()) {
      auto bundle = resolve_bundle(run_flags.bundle);
      auto config = build_config(run_flags, bundle, 30, true);
      const auto hash = config_hash(config, bundle);
      if (replicates == 1) {
        auto result = run(config, bundle);
        for (const auto& w : result.warnings) std::cerr << "warning: " << w << "\n";
        export_run(result, hash, run_flags.out);
      } else {
        auto results = run_replicates(config, bundle, replicates, threads);
        for (std::size_t i = 0; i < results.size(); ++i)
          export_run(results[i], hash, fs::path(run_flags.out) / ("replicate_" + std::to_string(i)));
      }
      std::cout << "wrote " << run_flags.out << "\n";
      return 0;
    }

    if (validate->parsed()) {
      auto bundle = resolve_bundle(val_flags.bundle);
      auto config = build_config(val_flags, bundle, 365, true);
      if (!observed.empty()) require_file(observed);
      auto result = run(config, bundle);
      auto report = pattern_report(result);
      if (!val_flags.out.empty()) export_run(result, config_hash(config, bundle), val_flags.out);
      print_table(report, "P1");
      print_table(report, "P2");
      if (config.covid) print_table(report, "P4");
      if (!observed.empty()) {
        auto deltas = compare_patterns(report, observed);
        double worst = 0.0;
        std::size_t matched = 0;
        for (const auto& d : deltas)
          if (d.delta) {
            ++matched;
            worst = std::max(worst, std::abs(*d.delta));
          }
        if (!val_flags.out.empty())
          write_pattern_comparison_csv(fs::path(val_flags.out) / "comparison.csv", deltas);
        std::cout << "compared " << matched << " of " << deltas.size()
                  << " rows, max |delta| " << format_double(worst) << "\n";
      }
      return 0;
    }
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return execute(argc, argv);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
