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

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "qca/analysis.hpp"
#include "qca/automaton.hpp"
#include "qca/corpus.hpp"

namespace qca {

/// Configuration error carrying the offending line number (0 when the
/// problem is not tied to one line).
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& message, int line_no)
      : std::runtime_error(line_no > 0
                               ? "line " + std::to_string(line_no) + ": " + message
                               : message),
        line(line_no) {}

  int line;
};

/// Flat "key = value" file with [section] headers and '#' comment lines.
class KeyValueConfig {
 public:
  struct Entry {
    std::string value;
    int line = 0;
  };

  static KeyValueConfig parse(const std::string& text) {
    KeyValueConfig config;
    std::istringstream stream(text);
    std::string line;
    std::string section;
    int line_no = 0;
    while (std::getline(stream, line)) {
      ++line_no;
      const std::string trimmed = trim(line);
      if (trimmed.empty() || trimmed.front() == '#') {
        continue;
      }
      if (trimmed.front() == '[') {
        if (trimmed.back() != ']' || trimmed.size() < 3) {
          throw ConfigError("malformed section header '" + trimmed + "'", line_no);
        }
        section = trim(trimmed.substr(1, trimmed.size() - 2));
        config.sections_[section];
        continue;
      }
      const auto eq = trimmed.find('=');
      if (eq == std::string::npos) {
        throw ConfigError("expected 'key = value', got '" + trimmed + "'", line_no);
      }
      if (section.empty()) {
        throw ConfigError("key '" + trim(trimmed.substr(0, eq)) +
                              "' appears before any [section]",
                          line_no);
      }
      const std::string key = trim(trimmed.substr(0, eq));
      const std::string value = trim(trimmed.substr(eq + 1));
      if (key.empty()) {
        throw ConfigError("empty key", line_no);
      }
      auto& entries = config.sections_[section];
      if (entries.count(key) > 0) {
        throw ConfigError("duplicate key '" + key + "' in [" + section + "]", line_no);
      }
      entries[key] = Entry{value, line_no};
    }
    return config;
  }

  bool has_section(const std::string& section) const {
    return sections_.count(section) > 0;
  }

  bool has(const std::string& section, const std::string& key) const {
    auto it = sections_.find(section);
    return it != sections_.end() && it->second.count(key) > 0;
  }

  const Entry& entry(const std::string& section, const std::string& key) const {
    auto it = sections_.find(section);
    if (it == sections_.end() || it->second.count(key) == 0) {
      throw ConfigError("missing required key '" + key + "' in [" + section + "]", 0);
    }
    return it->second.at(key);
  }

  std::string get_string(const std::string& section, const std::string& key) const {
    return entry(section, key).value;
  }

  std::string get_string(const std::string& section, const std::string& key,
                         const std::string& fallback) const {
    return has(section, key) ? entry(section, key).value : fallback;
  }

  std::int64_t get_int(const std::string& section, const std::string& key) const {
    const Entry& e = entry(section, key);
    return parse_int(e.value, e.line);
  }

  std::int64_t get_int(const std::string& section, const std::string& key,
                       std::int64_t fallback) const {
    return has(section, key) ? get_int(section, key) : fallback;
  }

  std::uint64_t get_uint(const std::string& section, const std::string& key,
                         std::uint64_t fallback) const {
    if (!has(section, key)) {
      return fallback;
    }
    const Entry& e = entry(section, key);
    try {
      return std::stoull(e.value);
    } catch (const std::exception&) {
      throw ConfigError("expected a non-negative integer, got '" + e.value + "'", e.line);
    }
  }

  double get_double(const std::string& section, const std::string& key) const {
    const Entry& e = entry(section, key);
    return parse_double(e.value, e.line);
  }

  double get_double(const std::string& section, const std::string& key,
                    double fallback) const {
    return has(section, key) ? get_double(section, key) : fallback;
  }

  bool get_flag(const std::string& section, const std::string& key,
                bool fallback) const {
    if (!has(section, key)) {
      return fallback;
    }
    const Entry& e = entry(section, key);
    if (e.value == "on" || e.value == "true" || e.value == "1") {
      return true;
    }
    if (e.value == "off" || e.value == "false" || e.value == "0") {
      return false;
    }
    throw ConfigError("expected on/off, got '" + e.value + "'", e.line);
  }

  GateEntropy get_entropy(const std::string& section, const std::string& key) const {
    const Entry& e = entry(section, key);
    return parse_entropy(e.value, e.line);
  }

  std::vector<GateEntropy> get_entropy_list(const std::string& section,
                                            const std::string& key) const {
    const Entry& e = entry(section, key);
    std::vector<GateEntropy> out;
    for (const std::string& item : split_list(e.value)) {
      out.push_back(parse_entropy(item, e.line));
    }
    if (out.empty()) {
      throw ConfigError("expected at least one value for '" + key + "'", e.line);
    }
    return out;
  }

  std::vector<std::int64_t> get_int_list(const std::string& section,
                                         const std::string& key) const {
    const Entry& e = entry(section, key);
    std::vector<std::int64_t> out;
    for (const std::string& item : split_list(e.value)) {
      out.push_back(parse_int(item, e.line));
    }
    if (out.empty()) {
      throw ConfigError("expected at least one value for '" + key + "'", e.line);
    }
    return out;
  }

  /// Grid syntax: either "start:stop:step" (inclusive) or a comma list.
  std::vector<double> get_grid(const std::string& section, const std::string& key) const {
    const Entry& e = entry(section, key);
    std::vector<double> out;
    if (e.value.find(':') != std::string::npos) {
      const auto parts = split(e.value, ':');
      if (parts.size() != 3) {
        throw ConfigError("grid range needs the form start:stop:step", e.line);
      }
      const double start = parse_double(trim(parts[0]), e.line);
      const double stop = parse_double(trim(parts[1]), e.line);
      const double step = parse_double(trim(parts[2]), e.line);
      if (step <= 0.0 || stop < start) {
        throw ConfigError("grid range needs stop >= start and step > 0", e.line);
      }
      const int count = static_cast<int>(std::floor((stop - start) / step + 1e-9)) + 1;
      for (int i = 0; i < count; ++i) {
        out.push_back(start + i * step);
      }
    } else {
      for (const std::string& item : split_list(e.value)) {
        out.push_back(parse_double(item, e.line));
      }
    }
    if (out.empty()) {
      throw ConfigError("empty grid", e.line);
    }
    return out;
  }

  /// Rejects keys outside the allowed list, pointing at the offending line.
  void check_keys(const std::string& section,
                  const std::set<std::string>& allowed) const {
    auto it = sections_.find(section);
    if (it == sections_.end()) {
      return;
    }
    for (const auto& [key, e] : it->second) {
      if (allowed.count(key) == 0) {
        throw ConfigError("unknown key '" + key + "' in [" + section + "]", e.line);
      }
    }
  }

  void check_sections(const std::set<std::string>& allowed) const {
    for (const auto& [name, entries] : sections_) {
      if (allowed.count(name) == 0) {
        const int line = entries.empty() ? 0 : entries.begin()->second.line;
        throw ConfigError("unknown section [" + name + "]", line);
      }
    }
  }

  static std::string trim(const std::string& s) {
    std::size_t begin = 0;
    std::size_t end = s.size();
    while (begin < end && std::isspace(static_cast<unsigned char>(s[begin]))) {
      ++begin;
    }
    while (end > begin && std::isspace(static_cast<unsigned char>(s[end - 1]))) {
      --end;
    }
    return s.substr(begin, end - begin);
  }

  static std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> parts;
    std::string current;
    for (char ch : s) {
      if (ch == sep) {
        parts.push_back(current);
        current.clear();
      } else {
        current += ch;
      }
    }
    parts.push_back(current);
    return parts;
  }

  static std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    for (const std::string& part : split(s, ',')) {
      const std::string item = trim(part);
      if (!item.empty()) {
        out.push_back(item);
      }
    }
    return out;
  }

 private:
  static std::int64_t parse_int(const std::string& s, int line) {
    try {
      std::size_t used = 0;
      const std::int64_t v = std::stoll(s, &used);
      if (used != s.size()) {
        throw std::invalid_argument(s);
      }
      return v;
    } catch (const std::exception&) {
      throw ConfigError("expected an integer, got '" + s + "'", line);
    }
  }

  static double parse_double(const std::string& s, int line) {
    try {
      std::size_t used = 0;
      const double v = std::stod(s, &used);
      if (used != s.size()) {
        throw std::invalid_argument(s);
      }
      return v;
    } catch (const std::exception&) {
      throw ConfigError("expected a number, got '" + s + "'", line);
    }
  }

  static GateEntropy parse_entropy(const std::string& s, int line) {
    std::string lower = s;
    std::transform(lower.begin(), lower.end(), lower.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    if (lower == "inf" || lower == "infinity") {
      return GateEntropy::infinity();
    }
    try {
      return GateEntropy(parse_double(s, line));
    } catch (const std::invalid_argument& err) {
      throw ConfigError(err.what(), line);
    }
  }

  std::map<std::string, std::map<std::string, Entry>> sections_;
};

struct ScanSpec {
  ScanAxis axis = ScanAxis::two_site;
  std::vector<double> grid;
  std::vector<std::int64_t> checkpoints{1000, 3000, 5000};
  ThresholdParams thresholds;
};

/// Fully resolved experiment description: corpus, automaton parameters,
/// the (s_os, s_ts) series lists, and the optional scan block.
struct ExperimentSpec {
  int num_sites = 6;
  std::int64_t steps = 5000;
  int n_config = 500;
  std::uint64_t master_seed = 986960440;
  std::vector<GateEntropy> one_site_values;
  std::vector<GateEntropy> two_site_values;
  Indicator indicator = Indicator::all_bonds;
  AcceptanceGranularity acceptance = AcceptanceGranularity::per_step;
  std::int64_t record_every = 1;
  bool observables = true;
  int dump_trajectories = 0;

  Corpus corpus;
  CorpusState corpus_state;
  std::vector<std::array<int, 3>> grammar_triples;
  std::vector<std::string> corpus_warnings;

  std::optional<ScanSpec> scan;

  /// Original config text; embedded in the manifest so a run can be
  /// replayed exactly.
  std::string config_text;

  AutomatonConfig automaton_for(GateEntropy one_site, GateEntropy two_site) const {
    AutomatonConfig config;
    config.num_sites = num_sites;
    config.local_dim = corpus.vocabulary.size();
    config.one_site_entropy = one_site;
    config.two_site_entropy = two_site;
    config.steps = steps;
    config.indicator = indicator;
    config.acceptance = acceptance;
    config.record_every = record_every;
    config.record_observables = observables;
    config.grammar_triples = grammar_triples;
    return config;
  }
};

namespace detail {

/// Distinct word-index 3-grams of the corpus sentences, first-seen order.
inline std::vector<std::array<int, 3>> corpus_trigrams(const Corpus& corpus) {
  std::vector<std::array<int, 3>> out;
  for (const auto& sentence : corpus.sentences) {
    for (std::size_t i = 0; i + 2 < sentence.size(); ++i) {
      const std::array<int, 3> t{sentence[i], sentence[i + 1], sentence[i + 2]};
      if (std::find(out.begin(), out.end(), t) == out.end()) {
        out.push_back(t);
      }
    }
  }
  return out;
}

inline std::vector<std::string> read_lines(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("cannot open corpus file: " + path.string(), 0);
  }
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    lines.push_back(line);
  }
  return lines;
}

}  // namespace detail

/// Parses and validates a full experiment config. `base_dir` anchors any
/// relative corpus file path.
inline ExperimentSpec load_experiment(const std::string& text,
                                      const std::filesystem::path& base_dir = ".") {
  const KeyValueConfig kv = KeyValueConfig::parse(text);
  kv.check_sections({"run", "corpus", "grammar", "scan"});
  kv.check_keys("run", {"L", "steps", "n_config", "seed", "s_os", "s_ts",
                        "indicator", "acceptance", "record_every", "observables",
                        "dump_trajectories"});
  kv.check_keys("corpus", {"inline", "file", "short_sentences"});
  kv.check_keys("grammar", {"triples"});
  kv.check_keys("scan", {"axis", "grid", "checkpoints", "stagnation_fraction",
                         "vanishing_tolerance"});

  ExperimentSpec spec;
  spec.config_text = text;
  if (!kv.has_section("run")) {
    throw ConfigError("missing [run] section", 0);
  }
  spec.num_sites = static_cast<int>(kv.get_int("run", "L", 6));
  spec.steps = kv.get_int("run", "steps", 5000);
  spec.n_config = static_cast<int>(kv.get_int("run", "n_config", 500));
  spec.master_seed = kv.get_uint("run", "seed", spec.master_seed);
  spec.one_site_values = kv.has("run", "s_os")
                             ? kv.get_entropy_list("run", "s_os")
                             : std::vector<GateEntropy>{GateEntropy(1.0)};
  spec.two_site_values = kv.has("run", "s_ts")
                             ? kv.get_entropy_list("run", "s_ts")
                             : std::vector<GateEntropy>{GateEntropy(1.0)};
  const std::string indicator = kv.get_string("run", "indicator", "D");
  if (indicator == "D") {
    spec.indicator = Indicator::all_bonds;
  } else if (indicator == "Dprime") {
    spec.indicator = Indicator::disjoint_bonds;
  } else {
    throw ConfigError("indicator must be D or Dprime, got '" + indicator + "'",
                      kv.entry("run", "indicator").line);
  }
  const std::string acceptance = kv.get_string("run", "acceptance", "per-step");
  if (acceptance == "per-step") {
    spec.acceptance = AcceptanceGranularity::per_step;
  } else if (acceptance == "per-layer") {
    spec.acceptance = AcceptanceGranularity::per_layer;
  } else {
    throw ConfigError("acceptance must be per-step or per-layer, got '" +
                          acceptance + "'",
                      kv.entry("run", "acceptance").line);
  }
  spec.record_every = kv.get_int("run", "record_every", 1);
  spec.observables = kv.get_flag("run", "observables", true);
  spec.dump_trajectories =
      static_cast<int>(kv.get_int("run", "dump_trajectories", 0));

  if (!kv.has_section("corpus")) {
    throw ConfigError("missing [corpus] section", 0);
  }
  const bool has_inline = kv.has("corpus", "inline");
  const bool has_file = kv.has("corpus", "file");
  if (has_inline == has_file) {
    throw ConfigError("[corpus] needs exactly one of 'inline' or 'file'", 0);
  }
  ParseOptions parse_options;
  parse_options.warnings = &spec.corpus_warnings;
  const std::string policy = kv.get_string("corpus", "short_sentences", "skip");
  if (policy == "skip") {
    parse_options.short_sentences = ShortSentencePolicy::skip;
  } else if (policy == "error") {
    parse_options.short_sentences = ShortSentencePolicy::error;
  } else {
    throw ConfigError("short_sentences must be skip or error, got '" + policy + "'",
                      kv.entry("corpus", "short_sentences").line);
  }
  std::vector<std::string> lines;
  if (has_inline) {
    for (const std::string& sentence :
         KeyValueConfig::split(kv.get_string("corpus", "inline"), '|')) {
      lines.push_back(KeyValueConfig::trim(sentence));
    }
  } else {
    std::filesystem::path path = kv.get_string("corpus", "file");
    if (path.is_relative()) {
      path = base_dir / path;
    }
    lines = detail::read_lines(path);
  }
  try {
    spec.corpus = parse_corpus(lines, parse_options);
    spec.corpus_state =
        build_corpus_state(extract_bigrams(spec.corpus), spec.corpus.vocabulary);
  } catch (const std::invalid_argument& err) {
    throw ConfigError(std::string("corpus: ") + err.what(),
                      has_inline ? kv.entry("corpus", "inline").line
                                 : kv.entry("corpus", "file").line);
  }

  if (kv.has("grammar", "triples")) {
    const auto& e = kv.entry("grammar", "triples");
    for (const std::string& item : KeyValueConfig::split(e.value, '|')) {
      const auto tokens = detail::split_tokens(KeyValueConfig::trim(item));
      if (tokens.size() != 3) {
        throw ConfigError("each grammar triple needs exactly three words", e.line);
      }
      std::array<int, 3> triple{};
      for (int k = 0; k < 3; ++k) {
        if (!spec.corpus.vocabulary.contains(tokens[k])) {
          throw ConfigError("grammar triple word '" + tokens[k] +
                                "' is not in the corpus vocabulary",
                            e.line);
        }
        triple[k] = spec.corpus.vocabulary.index_of(tokens[k]);
      }
      spec.grammar_triples.push_back(triple);
    }
  } else {
    spec.grammar_triples = detail::corpus_trigrams(spec.corpus);
  }
  if (spec.observables && spec.grammar_triples.empty()) {
    throw ConfigError(
        "observables are enabled but the corpus has no 3-grams; "
        "supply [grammar] triples or disable observables",
        0);
  }

  if (kv.has_section("scan")) {
    ScanSpec scan;
    const std::string axis = kv.get_string("scan", "axis", "ts");
    if (axis == "os") {
      scan.axis = ScanAxis::one_site;
    } else if (axis == "ts") {
      scan.axis = ScanAxis::two_site;
    } else {
      throw ConfigError("scan axis must be os or ts, got '" + axis + "'",
                        kv.entry("scan", "axis").line);
    }
    if (kv.has("scan", "grid")) {
      scan.grid = kv.get_grid("scan", "grid");
    } else {
      for (int i = 0; i <= 20; ++i) {
        scan.grid.push_back(0.25 * i);  // default sweep 0..5
      }
    }
    if (kv.has("scan", "checkpoints")) {
      scan.checkpoints = kv.get_int_list("scan", "checkpoints");
    }
    scan.thresholds.stagnation_fraction =
        kv.get_double("scan", "stagnation_fraction", 0.05);
    scan.thresholds.vanishing_tolerance =
        kv.get_double("scan", "vanishing_tolerance", 0.01);
    for (double v : scan.grid) {
      if (v < 0.0) {
        throw ConfigError("gate entropies must be >= 0", kv.entry("scan", "grid").line);
      }
    }
    if (!std::is_sorted(scan.checkpoints.begin(), scan.checkpoints.end()) ||
        scan.checkpoints.front() < 1) {
      throw ConfigError("scan checkpoints must be ascending and >= 1",
                        kv.has("scan", "checkpoints")
                            ? kv.entry("scan", "checkpoints").line
                            : 0);
    }
    spec.scan = std::move(scan);
  }

  // Surface invalid automaton parameters now, with config context.
  try {
    AutomatonConfig probe =
        spec.automaton_for(spec.one_site_values.front(), spec.two_site_values.front());
    probe.validate();
    if (spec.n_config < 1) {
      throw std::invalid_argument("n_config must be >= 1");
    }
  } catch (const std::invalid_argument& err) {
    throw ConfigError(err.what(), 0);
  }
  return spec;
}

inline ExperimentSpec load_experiment_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("cannot open config file: " + path.string(), 0);
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return load_experiment(buffer.str(), path.parent_path());
}

}  // namespace qca
