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
#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "qca/corpus.hpp"
#include "qca/gates.hpp"
#include "qca/linalg.hpp"
#include "qca/observables.hpp"
#include "qca/rng.hpp"
#include "qca/state.hpp"

namespace qca {

/// Which bond set the postselection indicator averages over.
///   all_bonds:      every periodic bond, prefactor 1/L.
///   disjoint_bonds: the L/2 non-overlapping even-offset bonds, prefactor 2/L.
enum class Indicator : std::uint8_t { all_bonds, disjoint_bonds };

/// Whether a proposal covers one full four-layer time step or each layer
/// is accepted or rejected on its own.
enum class AcceptanceGranularity : std::uint8_t { per_step, per_layer };

struct AutomatonConfig {
  int num_sites = 6;
  int local_dim = 3;
  GateEntropy one_site_entropy{1.0};
  GateEntropy two_site_entropy{1.0};
  std::int64_t steps = 5000;
  std::uint64_t seed = 0;
  Indicator indicator = Indicator::all_bonds;
  AcceptanceGranularity acceptance = AcceptanceGranularity::per_step;
  std::int64_t record_every = 1;
  bool record_observables = true;
  /// Extra steps always recorded, e.g. scan checkpoints. Sorted ascending.
  std::vector<std::int64_t> checkpoint_steps{};
  /// Word-index triples counted by the grammar correlation.
  std::vector<std::array<int, 3>> grammar_triples{};

  void validate() const {
    if (num_sites < 4 || num_sites % 2 != 0) {
      throw std::invalid_argument("automaton: chain length must be even and at least 4");
    }
    if (local_dim < 2) {
      throw std::invalid_argument("automaton: local dimension must be >= 2");
    }
    if (steps < 1) {
      throw std::invalid_argument("automaton: need at least one time step");
    }
    if (record_every < 1) {
      throw std::invalid_argument("automaton: record_every must be >= 1");
    }
    if (record_observables && grammar_triples.empty()) {
      throw std::invalid_argument(
          "automaton: recording observables requires a non-empty grammar triple list");
    }
    for (const auto& t : grammar_triples) {
      for (int w : t) {
        if (w < 0 || w >= local_dim) {
          throw std::invalid_argument("automaton: grammar triple word index out of range");
        }
      }
    }
    if (!std::is_sorted(checkpoint_steps.begin(), checkpoint_steps.end())) {
      throw std::invalid_argument("automaton: checkpoint steps must be sorted ascending");
    }
  }
};

/// Frobenius distance of one periodic bond's reduced density matrix to the
/// corpus-state projector.
inline double bond_distance(const PureState& state, const CorpusState& cs,
                            int bond) {
  const int L = state.num_sites;
  if (state.local_dim != cs.local_dim) {
    throw std::invalid_argument("bond_distance: corpus state dimension mismatch");
  }
  const DensityMatrix rho =
      reduced_density_matrix(state, {bond, (bond + 1) % L});
  const CMatrix target = cs.amplitudes * cs.amplitudes.adjoint();
  return (rho.matrix - target).norm();
}

/// Postselection indicator D: bond distance averaged over all L periodic
/// bonds.
inline double mean_bond_distance(const PureState& state,
                                 const CorpusState& cs) {
  const int L = state.num_sites;
  if (L < 2) {
    throw std::invalid_argument("mean_bond_distance: need at least two sites");
  }
  double sum = 0.0;
  for (int j = 0; j < L; ++j) {
    sum += bond_distance(state, cs, j);
  }
  return sum / L;
}

/// Modified indicator D': the same per-bond distance summed over the L/2
/// disjoint even-offset bonds only, prefactor 2/L.
inline double mean_disjoint_bond_distance(const PureState& state,
                                          const CorpusState& cs) {
  const int L = state.num_sites;
  if (L < 2 || L % 2 != 0) {
    throw std::invalid_argument("mean_disjoint_bond_distance: chain length must be even");
  }
  double sum = 0.0;
  for (int j = 0; j < L; j += 2) {
    sum += bond_distance(state, cs, j);
  }
  return sum * 2.0 / L;
}

inline double indicator_value(const PureState& state, const CorpusState& cs,
                              Indicator indicator) {
  return indicator == Indicator::all_bonds
             ? mean_bond_distance(state, cs)
             : mean_disjoint_bond_distance(state, cs);
}

namespace detail {

inline void apply_one_site_layer(PureState& state,
                                 std::span<const GateChoice> layer,
                                 const GateSet& gates,
                                 std::vector<char>* touched) {
  for (int site = 0; site < static_cast<int>(layer.size()); ++site) {
    const GateChoice& choice = layer[site];
    if (choice.is_identity()) {
      continue;
    }
    apply_one_site_noverify(state, site, gates.one_site(choice));
    if (touched != nullptr) {
      (*touched)[site] = 1;
    }
  }
}

inline void apply_two_site_layer(PureState& state,
                                 std::span<const GateChoice> layer,
                                 std::span<const std::pair<int, int>> bonds,
                                 const GateSet& gates,
                                 std::vector<char>* touched) {
  for (std::size_t b = 0; b < layer.size(); ++b) {
    const GateChoice& choice = layer[b];
    if (choice.is_identity()) {
      continue;
    }
    const auto [j, k] = bonds[b];
    apply_two_site_noverify(state, j, k, gates.two_site(choice));
    if (touched != nullptr) {
      (*touched)[j] = 1;
      (*touched)[k] = 1;
    }
  }
}

}  // namespace detail

/// Applies the four sampled layers of one time step to a copy of `state`.
/// Identity choices apply nothing.
inline PureState propose_step(const PureState& state, const GatePlan& plan,
                              const GateSet& gates) {
  const auto even = bonds_with_parity(state.num_sites, BondParity::even);
  const auto odd = bonds_with_parity(state.num_sites, BondParity::odd);
  PureState candidate = state;
  detail::apply_two_site_layer(candidate, plan.even_two_site, even, gates, nullptr);
  detail::apply_one_site_layer(candidate, plan.first_one_site, gates, nullptr);
  detail::apply_two_site_layer(candidate, plan.odd_two_site, odd, gates, nullptr);
  detail::apply_one_site_layer(candidate, plan.second_one_site, gates, nullptr);
  return candidate;
}

/// Replaces `current` with `candidate` iff the indicator strictly
/// decreases; ties keep the current state. Returns whether it moved.
inline bool accept_or_reject(PureState& current, const PureState& candidate,
                             const CorpusState& cs, Indicator indicator) {
  const double now = indicator_value(current, cs, indicator);
  const double proposed = indicator_value(candidate, cs, indicator);
  if (proposed < now) {
    current = candidate;
    return true;
  }
  return false;
}

struct ObservableSample {
  std::int64_t step = 0;
  double distance = 0.0;
  double asymmetry = 0.0;
  double correlation = 0.0;
  double tmi = 0.0;
  std::int64_t accepted = 0;
};

struct TrajectoryRecord {
  /// Indicator value after every step; index 0 is the initial state.
  std::vector<double> distance_series;
  std::vector<ObservableSample> samples;
  std::int64_t accepted_count = 0;
  PureState final_state;
};

/// Single-trajectory driver. Keeps per-bond distances of the indicator's
/// bond set cached and recomputes only the bonds whose sites a proposal
/// touched: unitaries on the complement leave a bond's reduced matrix
/// unchanged. Acceptance compares cached values, so the recorded series is
/// non-increasing exactly, not merely within rounding.
class TrajectoryEngine {
 public:
  TrajectoryEngine(const AutomatonConfig& config, const CorpusState& cs)
      : cfg_(config), gates_(config.local_dim), rng_(config.seed) {
    cfg_.validate();
    if (cs.local_dim != cfg_.local_dim) {
      throw std::invalid_argument("trajectory: corpus state does not match local dimension");
    }
    L_ = cfg_.num_sites;
    d_ = cfg_.local_dim;
    pair_dim_ = d_ * d_;
    upper_count_ = pair_dim_ * (pair_dim_ + 1) / 2;

    const CMatrix target = cs.amplitudes * cs.amplitudes.adjoint();
    cs_upper_.reserve(upper_count_);
    for (int r = 0; r < pair_dim_; ++r) {
      for (int c = r; c < pair_dim_; ++c) {
        cs_upper_.push_back(target(r, c));
      }
    }

    if (cfg_.indicator == Indicator::all_bonds) {
      for (int j = 0; j < L_; ++j) {
        indicator_bonds_.push_back(j);
      }
    } else {
      for (int j = 0; j < L_; j += 2) {
        indicator_bonds_.push_back(j);
      }
    }
    for (int j : indicator_bonds_) {
      const std::array<int, 2> bond{j, (j + 1) % L_};
      bond_index_.push_back(SubsystemIndex::build(L_, d_, bond));
    }
    even_bonds_ = bonds_with_parity(L_, BondParity::even);
    odd_bonds_ = bonds_with_parity(L_, BondParity::odd);

    reset(cfg_.seed);
  }

  /// Reseeds and redraws the initial product state.
  void reset(std::uint64_t seed) {
    rng_ = Rng(seed);
    state_ = random_product_state(L_, d_, rng_);
    steps_done_ = 0;
    accepted_ = 0;
    distances_.resize(indicator_bonds_.size());
    for (std::size_t i = 0; i < indicator_bonds_.size(); ++i) {
      distances_[i] = bond_distance_fast(state_, i);
    }
    current_distance_ = mean_of(distances_);
  }

  /// Advances one time step; returns whether any proposal was accepted.
  bool advance() {
    bool accepted = false;
    sample_plan();
    if (cfg_.acceptance == AcceptanceGranularity::per_step) {
      accepted = propose_full_step();
    } else {
      accepted |= propose_layer(plan_.even_two_site, &even_bonds_);
      accepted |= propose_layer(plan_.first_one_site, nullptr);
      accepted |= propose_layer(plan_.odd_two_site, &odd_bonds_);
      accepted |= propose_layer(plan_.second_one_site, nullptr);
    }
    ++steps_done_;
    return accepted;
  }

  const PureState& state() const { return state_; }
  double distance() const { return current_distance_; }
  std::int64_t step_count() const { return steps_done_; }
  std::int64_t accepted_count() const { return accepted_; }
  const AutomatonConfig& config() const { return cfg_; }

 private:
  static double mean_of(const std::vector<double>& values) {
    double sum = 0.0;
    for (double v : values) {
      sum += v;
    }
    return sum / static_cast<double>(values.size());
  }

  void sample_plan() {
    plan_.even_two_site = sample_two_site_layer(
        cfg_.two_site_entropy, L_, BondParity::even, d_, rng_);
    plan_.first_one_site =
        sample_one_site_layer(cfg_.one_site_entropy, L_, d_, rng_);
    plan_.odd_two_site = sample_two_site_layer(
        cfg_.two_site_entropy, L_, BondParity::odd, d_, rng_);
    plan_.second_one_site =
        sample_one_site_layer(cfg_.one_site_entropy, L_, d_, rng_);
  }

  /// Upper-triangle bond reduced matrix, then Frobenius distance to the
  /// corpus projector using Hermitian symmetry.
  double bond_distance_fast(const PureState& s, std::size_t bond_slot) {
    const SubsystemIndex& index = bond_index_[bond_slot];
    rdm_upper_.assign(upper_count_, Complex(0.0, 0.0));
    gather_.resize(pair_dim_);
    const Complex* amp = s.amplitudes.data();
    const std::uint32_t* pos = index.position.data();
    for (std::int64_t c = 0; c < index.comp_dim; ++c, pos += pair_dim_) {
      for (int r = 0; r < pair_dim_; ++r) {
        gather_[r] = amp[pos[r]];
      }
      Complex* out = rdm_upper_.data();
      for (int r = 0; r < pair_dim_; ++r) {
        const Complex vr = gather_[r];
        for (int rp = r; rp < pair_dim_; ++rp) {
          *out++ += vr * std::conj(gather_[rp]);
        }
      }
    }
    double sum = 0.0;
    std::size_t k = 0;
    for (int r = 0; r < pair_dim_; ++r) {
      sum += std::norm(rdm_upper_[k] - cs_upper_[k]);
      ++k;
      for (int rp = r + 1; rp < pair_dim_; ++rp, ++k) {
        sum += 2.0 * std::norm(rdm_upper_[k] - cs_upper_[k]);
      }
    }
    return std::sqrt(sum);
  }

  bool propose_full_step() {
    if (plan_.all_identity()) {
      return false;  // candidate would equal the state; a tie is rejected
    }
    candidate_ = state_;
    touched_.assign(L_, 0);
    detail::apply_two_site_layer(candidate_, plan_.even_two_site, even_bonds_,
                                 gates_, &touched_);
    detail::apply_one_site_layer(candidate_, plan_.first_one_site, gates_,
                                 &touched_);
    detail::apply_two_site_layer(candidate_, plan_.odd_two_site, odd_bonds_,
                                 gates_, &touched_);
    detail::apply_one_site_layer(candidate_, plan_.second_one_site, gates_,
                                 &touched_);
    return decide();
  }

  bool propose_layer(std::span<const GateChoice> layer,
                     const std::vector<std::pair<int, int>>* bonds) {
    bool any = false;
    for (const GateChoice& c : layer) {
      any |= !c.is_identity();
    }
    if (!any) {
      return false;
    }
    candidate_ = state_;
    touched_.assign(L_, 0);
    if (bonds != nullptr) {
      detail::apply_two_site_layer(candidate_, layer, *bonds, gates_, &touched_);
    } else {
      detail::apply_one_site_layer(candidate_, layer, gates_, &touched_);
    }
    return decide();
  }

  bool decide() {
    candidate_distances_ = distances_;
    for (std::size_t i = 0; i < indicator_bonds_.size(); ++i) {
      const int j = indicator_bonds_[i];
      if (touched_[j] || touched_[(j + 1) % L_]) {
        candidate_distances_[i] = bond_distance_fast(candidate_, i);
      }
    }
    const double proposed = mean_of(candidate_distances_);
    if (proposed < current_distance_) {
      state_.amplitudes.swap(candidate_.amplitudes);
      distances_.swap(candidate_distances_);
      current_distance_ = proposed;
      state_.renormalize();
      ++accepted_;
      return true;
    }
    return false;
  }

  AutomatonConfig cfg_;
  GateSet gates_;
  Rng rng_;
  int L_ = 0;
  int d_ = 0;
  int pair_dim_ = 0;
  std::size_t upper_count_ = 0;

  std::vector<int> indicator_bonds_;
  std::vector<SubsystemIndex> bond_index_;
  std::vector<std::pair<int, int>> even_bonds_;
  std::vector<std::pair<int, int>> odd_bonds_;
  std::vector<Complex> cs_upper_;

  PureState state_;
  PureState candidate_;
  GatePlan plan_;
  std::vector<char> touched_;
  std::vector<double> distances_;
  std::vector<double> candidate_distances_;
  std::vector<Complex> rdm_upper_;
  std::vector<Complex> gather_;
  double current_distance_ = 0.0;
  std::int64_t steps_done_ = 0;
  std::int64_t accepted_ = 0;
};

/// Runs one seeded trajectory: sample, propose, postselect, record. Fully
/// deterministic in (config, seed).
inline TrajectoryRecord run_trajectory(const AutomatonConfig& config,
                                       const CorpusState& cs) {
  TrajectoryEngine engine(config, cs);
  std::optional<ObservablesEngine> observables;
  if (config.record_observables) {
    observables.emplace(config.num_sites, config.local_dim,
                        config.grammar_triples);
  }
  TrajectoryRecord record;
  record.distance_series.reserve(static_cast<std::size_t>(config.steps) + 1);

  const auto& checkpoints = config.checkpoint_steps;
  const auto should_record = [&](std::int64_t step) {
    if (step == 0 || step == config.steps || step % config.record_every == 0) {
      return true;
    }
    return std::binary_search(checkpoints.begin(), checkpoints.end(), step);
  };
  const auto take_sample = [&](std::int64_t step) {
    ObservableSample sample;
    sample.step = step;
    sample.distance = engine.distance();
    sample.accepted = engine.accepted_count();
    if (observables) {
      sample.asymmetry = observables->entanglement_asymmetry(engine.state());
      sample.correlation = observables->grammar_correlation(engine.state());
      sample.tmi = observables->tripartite_mutual_information(engine.state());
    }
    record.samples.push_back(sample);
  };

  record.distance_series.push_back(engine.distance());
  take_sample(0);
  for (std::int64_t step = 1; step <= config.steps; ++step) {
    engine.advance();
    record.distance_series.push_back(engine.distance());
    if (should_record(step)) {
      take_sample(step);
    }
  }
  record.accepted_count = engine.accepted_count();
  record.final_state = engine.state();
  return record;
}

}  // namespace qca
