// Copyright 2026 The QCA Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "presets.hpp"
#include "qca/qca.hpp"

namespace fs = std::filesystem;

namespace {

struct CommonOptions {
  std::string config_path;
  std::string preset;
  std::string out_dir;
  std::optional<std::uint64_t> seed_override;
  int threads = 0;
};

void add_common_options(CLI::App* cmd, CommonOptions* options,
                        bool wants_experiment) {
  if (wants_experiment) {
    cmd->add_option("--config", options->config_path, "Experiment config file");
    cmd->add_option("--preset", options->preset, "Built-in preset name");
  }
  cmd->add_option("--out", options->out_dir,
                  "Output root directory (default: $QCA_OUT_DIR or ./qca_out)");
  auto* seed = cmd->add_option_function<std::uint64_t>(
      "--seed", [options](std::uint64_t v) { options->seed_override = v; },
      "Override the master seed");
  seed->expected(1);
  cmd->add_option("--threads", options->threads,
                  "Worker threads (default: machine parallelism)");
}

fs::path output_root(const CommonOptions& options) {
  if (!options.out_dir.empty()) {
    return options.out_dir;
  }
  if (const char* env = std::getenv("QCA_OUT_DIR"); env != nullptr && *env) {
    return env;
  }
  return "qca_out";
}

int thread_count(const CommonOptions& options) {
  if (options.threads > 0) {
    return options.threads;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

std::string_view preset_text(const std::string& name) {
  for (const auto& [key, text] : qca::presets::kTable) {
    if (key == name) {
      return text;
    }
  }
  std::string known;
  for (const auto& [key, text] : qca::presets::kTable) {
    known += known.empty() ? std::string(key) : ", " + std::string(key);
  }
  throw std::runtime_error("unknown preset '" + name + "' (available: " + known + ")");
}

struct LoadedExperiment {
  qca::ExperimentSpec spec;
  std::string source;  // "preset:NAME" or the config path
  std::string run_name;
};

LoadedExperiment load(const CommonOptions& options) {
  const bool has_config = !options.config_path.empty();
  const bool has_preset = !options.preset.empty();
  if (has_config == has_preset) {
    throw std::runtime_error("need exactly one of --config or --preset");
  }
  LoadedExperiment loaded;
  if (has_preset) {
    loaded.spec = qca::load_experiment(std::string(preset_text(options.preset)));
    loaded.source = "preset:" + options.preset;
    loaded.run_name = options.preset;
  } else {
    try {
      loaded.spec = qca::load_experiment_file(options.config_path);
    } catch (const qca::ConfigError& err) {
      throw qca::ConfigError(options.config_path + ": " + err.what(), 0);
    }
    loaded.source = options.config_path;
    loaded.run_name = fs::path(options.config_path).stem().string();
  }
  if (options.seed_override) {
    loaded.spec.master_seed = *options.seed_override;
  }
  for (const std::string& warning : loaded.spec.corpus_warnings) {
    std::cerr << "warning: corpus " << warning << "\n";
  }
  return loaded;
}

std::string entropy_tag(qca::GateEntropy entropy) {
  if (entropy.is_infinite()) {
    return "inf";
  }
  char buffer[32];
  std::snprintf(buffer, sizeof(buffer), "%.6g", entropy.value());
  std::string tag = buffer;
  for (char& c : tag) {
    if (c == '.') {
      c = 'p';
    }
  }
  return tag;
}

void write_file(const fs::path& path, const auto& writer) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::runtime_error("cannot open for writing: " + path.string());
  }
  writer(out);
}

int cmd_run(const CommonOptions& options) {
  LoadedExperiment loaded = load(options);
  const qca::ExperimentSpec& spec = loaded.spec;
  const int threads = thread_count(options);
  const fs::path run_dir = output_root(options) / loaded.run_name;
  fs::create_directories(run_dir);

  qca::RunManifest manifest;
  manifest.command = "run";
  manifest.source = loaded.source;
  manifest.master_seed = spec.master_seed;
  manifest.threads = threads;
  manifest.started = qca::iso_timestamp();
  manifest.config_text = spec.config_text;

  const bool single_series =
      spec.one_site_values.size() == 1 && spec.two_site_values.size() == 1;
  std::vector<std::pair<std::string, qca::AutomatonConfig>> series;
  for (const qca::GateEntropy os : spec.one_site_values) {
    for (const qca::GateEntropy ts : spec.two_site_values) {
      std::string name = "ensemble";
      if (!single_series) {
        name += "_sos" + entropy_tag(os) + "_sts" + entropy_tag(ts);
      }
      series.emplace_back(name, spec.automaton_for(os, ts));
    }
  }
  for (const auto& [name, config] : series) {
    manifest.outputs.push_back(name + ".csv");
  }
  manifest.write(run_dir / "manifest.json");

  for (const auto& [name, config] : series) {
    const qca::EnsembleStats stats = qca::ensemble_average(
        config, spec.corpus_state, spec.n_config, spec.master_seed, threads);
    write_file(run_dir / (name + ".csv"),
               [&](std::ostream& out) { qca::write_ensemble_csv(out, stats); });
    std::cout << name << ": n_config=" << spec.n_config
              << " final mean D=" << qca::format_number(stats.mean_distance.back())
              << "\n";
    for (int k = 0; k < spec.dump_trajectories; ++k) {
      qca::AutomatonConfig single = config;
      single.seed = qca::derive_stream_seed(spec.master_seed, k);
      const qca::TrajectoryRecord record =
          qca::run_trajectory(single, spec.corpus_state);
      char suffix[32];
      std::snprintf(suffix, sizeof(suffix), "_trajectory_%03d.csv", k);
      const std::string file = name + suffix;
      write_file(run_dir / file, [&](std::ostream& out) {
        qca::write_trajectory_csv(out, record, config.record_observables);
      });
      manifest.outputs.push_back(file);
    }
  }

  manifest.finished = qca::iso_timestamp();
  manifest.write(run_dir / "manifest.json");
  std::cout << "wrote " << (run_dir / "manifest.json").string() << "\n";
  return 0;
}

int cmd_scan(const CommonOptions& options) {
  LoadedExperiment loaded = load(options);
  const qca::ExperimentSpec& spec = loaded.spec;
  if (!spec.scan) {
    throw std::runtime_error("config has no [scan] section");
  }
  const qca::ScanSpec& scan_spec = *spec.scan;
  const int threads = thread_count(options);
  const fs::path run_dir = output_root(options) / loaded.run_name;
  fs::create_directories(run_dir);

  qca::RunManifest manifest;
  manifest.command = "scan";
  manifest.source = loaded.source;
  manifest.master_seed = spec.master_seed;
  manifest.threads = threads;
  manifest.started = qca::iso_timestamp();
  manifest.config_text = spec.config_text;
  manifest.outputs = {"scan.csv", "thresholds.json"};
  manifest.write(run_dir / "manifest.json");

  qca::AutomatonConfig base =
      spec.automaton_for(spec.one_site_values.front(), spec.two_site_values.front());
  const qca::ScanResult scan = qca::scan_gate_entropy(
      base, spec.corpus_state, spec.n_config, spec.master_seed, scan_spec.axis,
      scan_spec.grid, scan_spec.checkpoints, threads);
  write_file(run_dir / "scan.csv",
             [&](std::ostream& out) { qca::write_scan_csv(out, scan); });

  nlohmann::json thresholds;
  thresholds["checkpoint_step"] = scan.checkpoints.back();
  const auto report = [&](qca::ThresholdMode mode, const char* label) {
    const qca::ThresholdEstimate estimate =
        qca::detect_threshold(scan, mode, scan_spec.thresholds);
    nlohmann::json entry;
    entry["mode"] = label;
    entry["found"] = estimate.found;
    if (estimate.found) {
      entry["value"] = estimate.value;
      std::cout << label << " threshold at step " << scan.checkpoints.back()
                << ": " << qca::format_number(estimate.value) << "\n";
    } else {
      entry["value"] = nullptr;
      std::cout << label << " threshold: no crossover in range\n";
    }
    return entry;
  };
  thresholds["stagnation_D"] = report(qca::ThresholdMode::stagnation, "stagnation");
  thresholds["vanishing_I3"] = report(qca::ThresholdMode::vanishing, "vanishing");
  write_file(run_dir / "thresholds.json",
             [&](std::ostream& out) { out << thresholds.dump(2) << "\n"; });

  manifest.finished = qca::iso_timestamp();
  manifest.write(run_dir / "manifest.json");
  std::cout << "wrote " << (run_dir / "scan.csv").string() << "\n";
  return 0;
}

int cmd_fit(const std::string& input, bool two_param,
            const CommonOptions& options) {
  std::ifstream in(input);
  if (!in) {
    throw std::runtime_error("cannot open series CSV: " + input);
  }
  qca::SeriesCsv series = qca::read_series_csv(in, input);
  std::vector<double> t;
  std::vector<double> y;
  std::size_t dropped = 0;
  for (std::size_t i = 0; i < series.t.size(); ++i) {
    if (series.t[i] >= 1.0) {
      t.push_back(series.t[i]);
      y.push_back(series.y[i]);
    } else {
      ++dropped;
    }
  }
  if (dropped > 0) {
    std::cerr << "note: dropped " << dropped << " rows with t < 1\n";
  }
  if (t.size() < 4) {
    throw std::runtime_error(input + ": need at least 4 rows with t >= 1");
  }
  qca::FitOptions fit_options;
  fit_options.two_param = two_param;
  const qca::PowerLawFit fit = qca::fit_power_law(t, y, fit_options);
  if (!fit.converged) {
    std::cerr << "warning: fit did not converge to an identified optimum "
                 "(constant or degenerate series?)\n";
  }
  qca::write_fit_json(std::cout, fit);
  if (!options.out_dir.empty()) {
    const fs::path dir = options.out_dir;
    fs::create_directories(dir);
    write_file(dir / "fit.json",
               [&](std::ostream& out) { qca::write_fit_json(out, fit); });
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Corpus-driven stochastic search on a periodic qudit chain"};
  app.set_version_flag("--version", qca::kVersion);
  app.require_subcommand(1);

  CommonOptions run_options;
  CLI::App* run = app.add_subcommand("run", "Run trajectory ensembles and write series CSVs");
  add_common_options(run, &run_options, true);

  CommonOptions scan_options;
  CLI::App* scan = app.add_subcommand("scan", "Sweep a gate entropy and detect thresholds");
  add_common_options(scan, &scan_options, true);

  CommonOptions fit_options;
  std::string fit_input;
  bool two_param = false;
  CLI::App* fit = app.add_subcommand("fit", "Fit D = a t^b + c to a series CSV");
  fit->add_option("input", fit_input, "CSV with step and D (or mean_D) columns")
      ->required();
  fit->add_flag("--two-param", two_param, "Fit D = a t^b instead");
  add_common_options(fit, &fit_options, false);

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      return cmd_run(run_options);
    }
    if (scan->parsed()) {
      return cmd_scan(scan_options);
    }
    if (fit->parsed()) {
      return cmd_fit(fit_input, two_param, fit_options);
    }
  } catch (const qca::ConfigError& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 2;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 1;
  }
  return 0;
}
