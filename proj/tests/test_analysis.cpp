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

#include <catch2/catch.hpp>
#include <cmath>

#include "qca/analysis.hpp"
#include "qca/corpus.hpp"

using namespace qca;

namespace {

CorpusState you_are_here_state() {
  const std::vector<std::string> lines{"you are here", "here you are"};
  const Corpus corpus = parse_corpus(lines);
  return build_corpus_state(extract_bigrams(corpus), corpus.vocabulary);
}

const std::vector<std::array<int, 3>> kGrammar{{0, 1, 2}, {2, 0, 1}};

AutomatonConfig small_config() {
  AutomatonConfig config;
  config.num_sites = 4;
  config.local_dim = 3;
  config.one_site_entropy = GateEntropy(0.5);
  config.two_site_entropy = GateEntropy(0.5);
  config.steps = 40;
  config.record_every = 10;
  config.record_observables = true;
  config.grammar_triples = kGrammar;
  return config;
}

}  // namespace

TEST_CASE("an ensemble of one equals the single trajectory") {
  const CorpusState cs = you_are_here_state();
  const AutomatonConfig config = small_config();
  const EnsembleStats stats = ensemble_average(config, cs, 1, 99);

  AutomatonConfig single = config;
  single.seed = derive_stream_seed(99, 0);
  const TrajectoryRecord record = run_trajectory(single, cs);
  REQUIRE(stats.mean_distance.size() == record.distance_series.size());
  for (std::size_t i = 0; i < record.distance_series.size(); ++i) {
    CHECK(stats.mean_distance[i] == record.distance_series[i]);
    CHECK(stats.se_distance[i] == 0.0);
  }
}

TEST_CASE("frozen ensembles keep a constant mean distance") {
  const CorpusState cs = you_are_here_state();
  AutomatonConfig config = small_config();
  config.one_site_entropy = GateEntropy::infinity();
  config.two_site_entropy = GateEntropy::infinity();
  const EnsembleStats stats = ensemble_average(config, cs, 8, 7);
  for (double d : stats.mean_distance) {
    CHECK(d == stats.mean_distance.front());
  }
  CHECK(stats.se_distance.front() > 0.0);  // spread of initial distances
}

TEST_CASE("ensemble results do not depend on worker scheduling") {
  const CorpusState cs = you_are_here_state();
  const AutomatonConfig config = small_config();
  const EnsembleStats serial = ensemble_average(config, cs, 6, 1234, 1);
  const EnsembleStats threaded = ensemble_average(config, cs, 6, 1234, 3);
  REQUIRE(serial.mean_distance.size() == threaded.mean_distance.size());
  for (std::size_t i = 0; i < serial.mean_distance.size(); ++i) {
    CHECK(serial.mean_distance[i] == threaded.mean_distance[i]);
    CHECK(serial.se_distance[i] == threaded.se_distance[i]);
  }
  REQUIRE(serial.sample_steps == threaded.sample_steps);
  for (std::size_t s = 0; s < serial.sample_steps.size(); ++s) {
    CHECK(serial.mean_tmi[s] == threaded.mean_tmi[s]);
    CHECK(serial.mean_asymmetry[s] == threaded.mean_asymmetry[s]);
    CHECK(serial.mean_correlation[s] == threaded.mean_correlation[s]);
  }
}

TEST_CASE("noiseless power-law data is recovered exactly") {
  std::vector<double> t;
  std::vector<double> y;
  for (int i = 1; i <= 200; ++i) {
    t.push_back(i);
    y.push_back(1.3 * std::pow(i, -0.5) + 1.1);
  }
  const PowerLawFit fit = fit_power_law(t, y);
  CHECK(fit.converged);
  CHECK(fit.a == Approx(1.3).margin(1e-6));
  CHECK(fit.b == Approx(-0.5).margin(1e-6));
  CHECK(fit.c == Approx(1.1).margin(1e-6));
  CHECK(fit.residual < 1e-8);
}

TEST_CASE("the fitted residual is reproducible from the coefficients") {
  std::vector<double> t;
  std::vector<double> y;
  Rng rng(61);
  for (int i = 1; i <= 150; ++i) {
    t.push_back(i);
    y.push_back(0.8 * std::pow(i, -0.3) + 0.9 + 0.001 * rng.normal_pair().first);
  }
  const PowerLawFit fit = fit_power_law(t, y);
  double ssr = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    const double r = fit.a * std::pow(t[i], fit.b) + fit.c - y[i];
    ssr += r * r;
  }
  CHECK(std::abs(std::sqrt(ssr) - fit.residual) < 1e-9);
}

TEST_CASE("noisy power-law data is recovered within a few percent") {
  for (std::uint64_t noise_seed : {1ULL, 2ULL, 3ULL}) {
    Rng rng(noise_seed);
    std::vector<double> t;
    std::vector<double> y;
    for (int i = 1; i <= 2000; ++i) {
      const double clean = 1.3 * std::pow(i, -0.5) + 1.1;
      t.push_back(i);
      y.push_back(clean * (1.0 + 0.01 * rng.normal_pair().first));
    }
    const PowerLawFit fit = fit_power_law(t, y);
    CHECK(fit.converged);
    CHECK(std::abs(fit.a - 1.3) / 1.3 < 0.05);
    CHECK(std::abs(fit.b - (-0.5)) / 0.5 < 0.05);
    CHECK(std::abs(fit.c - 1.1) / 1.1 < 0.05);
  }
}

TEST_CASE("standard-error weights de-emphasize noisy samples") {
  std::vector<double> t;
  std::vector<double> y;
  std::vector<double> se;
  for (int i = 1; i <= 100; ++i) {
    t.push_back(i);
    y.push_back(1.3 * std::pow(i, -0.5) + 1.1);
    se.push_back(1.0);
  }
  // a block of badly measured points, flagged by a huge standard error
  for (int i = 40; i < 50; ++i) {
    y[i] += 0.5;
    se[i] = 100.0;
  }
  FitOptions weighted;
  weighted.weighted = true;
  const PowerLawFit good = fit_power_law(t, y, weighted, se);
  const PowerLawFit dragged = fit_power_law(t, y);
  CHECK(std::abs(good.c - 1.1) < 0.01);
  CHECK(std::abs(dragged.c - 1.1) > std::abs(good.c - 1.1));

  CHECK_THROWS_AS(fit_power_law(t, y, weighted, std::vector<double>{1.0}),
                  std::invalid_argument);
}

TEST_CASE("the two-parameter mode pins the offset at zero") {
  std::vector<double> t;
  std::vector<double> y;
  for (int i = 1; i <= 100; ++i) {
    t.push_back(i);
    y.push_back(2.0 * std::pow(i, -0.8));
  }
  FitOptions options;
  options.two_param = true;
  const PowerLawFit fit = fit_power_law(t, y, options);
  CHECK(fit.converged);
  CHECK(fit.c == 0.0);
  CHECK(fit.a == Approx(2.0).margin(1e-6));
  CHECK(fit.b == Approx(-0.8).margin(1e-6));
}

TEST_CASE("a constant series leaves the exponent unidentified") {
  std::vector<double> t;
  std::vector<double> y;
  for (int i = 1; i <= 50; ++i) {
    t.push_back(i);
    y.push_back(1.25);
  }
  const PowerLawFit fit = fit_power_law(t, y);
  CHECK_FALSE(fit.converged);
  CHECK(fit.residual < 1e-9);
}

TEST_CASE("fit preconditions") {
  const std::vector<double> short_t{1, 2, 3};
  const std::vector<double> short_y{1, 1, 1};
  CHECK_THROWS_AS(fit_power_law(short_t, short_y), std::invalid_argument);
  const std::vector<double> bad_t{0, 1, 2, 3};
  const std::vector<double> bad_y{1, 1, 1, 1};
  CHECK_THROWS_AS(fit_power_law(bad_t, bad_y), std::invalid_argument);
}

TEST_CASE("the fit sits at a numerical stationary point") {
  std::vector<double> t;
  std::vector<double> y;
  Rng rng(62);
  for (int i = 1; i <= 300; ++i) {
    t.push_back(i);
    y.push_back(1.2 * std::pow(i, -0.4) + 1.0 + 0.002 * rng.normal_pair().first);
  }
  const PowerLawFit fit = fit_power_law(t, y);
  const auto ssr_at = [&](double a, double b, double c) {
    double sum = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i) {
      const double r = a * std::pow(t[i], b) + c - y[i];
      sum += r * r;
    }
    return sum;
  };
  const double base = ssr_at(fit.a, fit.b, fit.c);
  for (double sign : {-1.0, 1.0}) {
    CHECK(ssr_at(fit.a + sign * 1e-6, fit.b, fit.c) >= base - 1e-12);
    CHECK(ssr_at(fit.a, fit.b + sign * 1e-6, fit.c) >= base - 1e-12);
    CHECK(ssr_at(fit.a, fit.b, fit.c + sign * 1e-6) >= base - 1e-12);
  }
}

TEST_CASE("a ramp that flattens is detected at the knee") {
  std::vector<double> grid;
  std::vector<double> values;
  for (int i = 0; i <= 10; ++i) {
    const double s = 0.5 * i;
    grid.push_back(s);
    values.push_back(s < 3.0 ? s : 3.0);
  }
  const ThresholdEstimate knee =
      detect_threshold(grid, values, ThresholdMode::stagnation);
  REQUIRE(knee.found);
  CHECK(std::abs(knee.value - 3.0) <= 0.5);
}

TEST_CASE("monotone curves report no crossover") {
  std::vector<double> grid;
  std::vector<double> values;
  for (int i = 0; i <= 10; ++i) {
    grid.push_back(0.5 * i);
    values.push_back(0.7 * i);
  }
  CHECK_FALSE(detect_threshold(grid, values, ThresholdMode::stagnation).found);
}

TEST_CASE("a vanishing curve is detected where it reaches zero") {
  std::vector<double> grid;
  std::vector<double> values;
  for (int i = 0; i <= 10; ++i) {
    const double s = 0.5 * i;
    grid.push_back(s);
    values.push_back(std::min(0.0, s - 2.0) * 0.4);
  }
  const ThresholdEstimate zero =
      detect_threshold(grid, values, ThresholdMode::vanishing);
  REQUIRE(zero.found);
  CHECK(std::abs(zero.value - 2.0) <= 0.5);

  // a curve that never settles near zero has no crossover
  std::vector<double> never(values.size(), -0.5);
  CHECK_FALSE(detect_threshold(grid, never, ThresholdMode::vanishing).found);
}

TEST_CASE("threshold detection rejects malformed grids") {
  const std::vector<double> tiny_grid{0.0, 1.0, 2.0};
  const std::vector<double> tiny_values{0.0, 1.0, 1.0};
  CHECK_THROWS_AS(detect_threshold(tiny_grid, tiny_values, ThresholdMode::stagnation),
                  std::invalid_argument);
  const std::vector<double> unsorted{0.0, 2.0, 1.0, 3.0};
  const std::vector<double> values{0.0, 1.0, 1.0, 1.0};
  CHECK_THROWS_AS(detect_threshold(unsorted, values, ThresholdMode::stagnation),
                  std::invalid_argument);
}

TEST_CASE("scans are reproducible and carry every checkpoint row") {
  const CorpusState cs = you_are_here_state();
  AutomatonConfig base = small_config();
  const std::vector<double> grid{0.0, 1.0, 2.0, 3.0};
  const std::vector<std::int64_t> checkpoints{10, 30};
  const ScanResult a =
      scan_gate_entropy(base, cs, 3, 555, ScanAxis::two_site, grid, checkpoints);
  const ScanResult b =
      scan_gate_entropy(base, cs, 3, 555, ScanAxis::two_site, grid, checkpoints, 2);
  REQUIRE(a.rows.size() == grid.size() * checkpoints.size());
  REQUIRE(b.rows.size() == a.rows.size());
  for (std::size_t i = 0; i < a.rows.size(); ++i) {
    CHECK(a.rows[i].axis_value == b.rows[i].axis_value);
    CHECK(a.rows[i].checkpoint == b.rows[i].checkpoint);
    CHECK(a.rows[i].mean_distance == b.rows[i].mean_distance);
    CHECK(a.rows[i].mean_tmi == b.rows[i].mean_tmi);
  }
  CHECK(a.at(1, 0).axis_value == 1.0);
  CHECK(a.at(1, 0).checkpoint == 10);
  CHECK(a.distance_series(1).size() == grid.size());

  CHECK_THROWS_AS(scan_gate_entropy(base, cs, 3, 555, ScanAxis::two_site, {},
                                    checkpoints),
                  std::invalid_argument);
}
