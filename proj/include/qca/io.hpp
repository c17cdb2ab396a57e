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

#pragma once

#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "qca/analysis.hpp"
#include "qca/automaton.hpp"
#include "qca/config.hpp"
#include "qca/version.hpp"

namespace qca {

/// All floating-point output carries 12 significant digits so regression
/// diffs stay meaningful.
inline std::string format_number(double value) {
  char buffer[40];
  std::snprintf(buffer, sizeof(buffer), "%.12g", value);
  return buffer;
}

/// Ensemble series, one row per recorded step. Observable columns are
/// present only when they were recorded.
inline void write_ensemble_csv(std::ostream& out, const EnsembleStats& stats) {
  if (stats.has_observables) {
    out << "step,mean_D,se_D,mean_dS,se_dS,mean_C,se_C,mean_I3,se_I3,mean_accepted\n";
  } else {
    out << "step,mean_D,se_D,mean_accepted\n";
  }
  for (std::size_t s = 0; s < stats.sample_steps.size(); ++s) {
    const std::int64_t step = stats.sample_steps[s];
    out << step << ',' << format_number(stats.mean_distance[step]) << ','
        << format_number(stats.se_distance[step]);
    if (stats.has_observables) {
      out << ',' << format_number(stats.mean_asymmetry[s]) << ','
          << format_number(stats.se_asymmetry[s]) << ','
          << format_number(stats.mean_correlation[s]) << ','
          << format_number(stats.se_correlation[s]) << ','
          << format_number(stats.mean_tmi[s]) << ','
          << format_number(stats.se_tmi[s]);
    }
    out << ',' << format_number(stats.mean_accepted[s]) << "\n";
  }
}

/// Single-trajectory dump, one row per recorded step.
inline void write_trajectory_csv(std::ostream& out,
                                 const TrajectoryRecord& record,
                                 bool has_observables) {
  out << "step,D,delta_S,C,I3,accepted_count\n";
  for (const ObservableSample& s : record.samples) {
    out << s.step << ',' << format_number(s.distance) << ',';
    if (has_observables) {
      out << format_number(s.asymmetry) << ',' << format_number(s.correlation)
          << ',' << format_number(s.tmi);
    } else {
      out << ",,";
    }
    out << ',' << s.accepted << "\n";
  }
}

inline void write_scan_csv(std::ostream& out, const ScanResult& scan) {
  out << "axis_value,checkpoint_step,mean_D,se_D,mean_I3,se_I3,mean_dS,mean_C\n";
  for (const ScanRow& row : scan.rows) {
    out << format_number(row.axis_value) << ',' << row.checkpoint << ','
        << format_number(row.mean_distance) << ','
        << format_number(row.se_distance) << ',' << format_number(row.mean_tmi)
        << ',' << format_number(row.se_tmi) << ','
        << format_number(row.mean_asymmetry) << ','
        << format_number(row.mean_correlation) << "\n";
  }
}

inline void write_fit_json(std::ostream& out, const PowerLawFit& fit) {
  nlohmann::json j;
  j["a"] = fit.a;
  j["b"] = fit.b;
  j["c"] = fit.c;
  j["residual"] = fit.residual;
  j["converged"] = fit.converged;
  out << j.dump(2) << "\n";
}

struct SeriesCsv {
  std::vector<double> t;
  std::vector<double> y;
  std::vector<double> se;
  bool has_se = false;
};

/// Reads a (step, D) series from a CSV with a header row. Accepts the
/// column names step/t for the abscissa and D/mean_D/y for the ordinate;
/// picks up se_D when present.
inline SeriesCsv read_series_csv(std::istream& in, const std::string& source) {
  std::string line;
  if (!std::getline(in, line)) {
    throw ConfigError(source + ": empty CSV", 0);
  }
  const auto header = KeyValueConfig::split(line, ',');
  int t_col = -1;
  int y_col = -1;
  int se_col = -1;
  for (std::size_t i = 0; i < header.size(); ++i) {
    const std::string name = KeyValueConfig::trim(header[i]);
    if (name == "step" || name == "t") {
      t_col = static_cast<int>(i);
    } else if (name == "D" || name == "mean_D" || name == "y") {
      y_col = static_cast<int>(i);
    } else if (name == "se_D") {
      se_col = static_cast<int>(i);
    }
  }
  if (t_col < 0 || y_col < 0) {
    throw ConfigError(source + ": need 'step' and 'D' (or 'mean_D') columns", 1);
  }
  SeriesCsv series;
  series.has_se = se_col >= 0;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (KeyValueConfig::trim(line).empty()) {
      continue;
    }
    const auto cells = KeyValueConfig::split(line, ',');
    const int needed = std::max(t_col, std::max(y_col, se_col));
    if (static_cast<int>(cells.size()) <= needed) {
      throw ConfigError(source + ": too few columns", line_no);
    }
    try {
      series.t.push_back(std::stod(cells[t_col]));
      series.y.push_back(std::stod(cells[y_col]));
      if (series.has_se) {
        series.se.push_back(std::stod(cells[se_col]));
      }
    } catch (const std::exception&) {
      throw ConfigError(source + ": malformed numeric cell", line_no);
    }
  }
  return series;
}

inline std::string iso_timestamp() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  char buffer[32];
  std::tm tm_utc{};
  gmtime_r(&t, &tm_utc);
  std::strftime(buffer, sizeof(buffer), "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
  return buffer;
}

/// Run provenance. Written before any trajectory starts and finalized at
/// the end; the embedded config snapshot plus the master seed replay the
/// run exactly.
struct RunManifest {
  std::string command;
  std::string source;
  std::uint64_t master_seed = 0;
  int threads = 1;
  std::string started;
  std::string finished;
  std::vector<std::string> outputs;
  std::string config_text;

  void write(const std::filesystem::path& path) const {
    nlohmann::json j;
    j["version"] = kVersion;
    j["command"] = command;
    j["source"] = source;
    j["master_seed"] = master_seed;
    j["threads"] = threads;
    j["started"] = started;
    j["finished"] = finished.empty() ? nlohmann::json() : nlohmann::json(finished);
    j["outputs"] = outputs;
    j["config_text"] = config_text;
    std::ofstream out(path);
    if (!out) {
      throw std::runtime_error("cannot write manifest: " + path.string());
    }
    out << j.dump(2) << "\n";
  }
};

}  // namespace qca
