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

#include <array>
#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

#include "qca/corpus.hpp"
#include "qca/linalg.hpp"
#include "qca/state.hpp"

namespace qca {

/// Zeroes every coherence of a two-site density matrix between different
/// occurrence sectors of `word` (rho -> sum_q P_q rho P_q). Trace is
/// preserved and purity can only drop.
inline DensityMatrix dephase_word_sectors(const DensityMatrix& rho, int word) {
  const int pd = static_cast<int>(rho.matrix.rows());
  const int d = static_cast<int>(std::lround(std::sqrt(static_cast<double>(pd))));
  if (d * d != pd) {
    throw std::invalid_argument("dephase_word_sectors: matrix is not a two-site density matrix");
  }
  if (word < 0 || word >= d) {
    throw std::out_of_range("dephase_word_sectors: word index out of range");
  }
  DensityMatrix out = rho;
  for (int r = 0; r < pd; ++r) {
    for (int c = 0; c < pd; ++c) {
      if (pair_charge(r, word, d) != pair_charge(c, word, d)) {
        out.matrix(r, c) = 0.0;
      }
    }
  }
  return out;
}

/// Expectation sum over periodic site triples of the configured "correct"
/// word sequences; a diagonal observable in the computational basis.
inline double grammar_correlation(const PureState& state,
                                  std::span<const std::array<int, 3>> triples) {
  if (triples.empty()) {
    throw std::invalid_argument("grammar_correlation: empty triple list");
  }
  const int L = state.num_sites;
  const int d = state.local_dim;
  if (L < 3) {
    throw std::invalid_argument("grammar_correlation: need at least three sites");
  }
  for (const auto& t : triples) {
    for (int w : t) {
      if (w < 0 || w >= d) {
        throw std::out_of_range("grammar_correlation: word index out of range");
      }
    }
  }
  std::vector<std::int64_t> strides(L);
  for (int s = 0; s < L; ++s) {
    strides[s] = site_stride(L, d, s);
  }
  std::vector<int> digits(L);
  double total = 0.0;
  for (std::int64_t i = 0; i < state.dim(); ++i) {
    const double weight = std::norm(state.amplitudes[static_cast<std::size_t>(i)]);
    if (weight == 0.0) {
      continue;
    }
    for (int s = 0; s < L; ++s) {
      digits[s] = static_cast<int>((i / strides[s]) % d);
    }
    int matches = 0;
    for (int j = 0; j < L; ++j) {
      const int a = digits[j];
      const int b = digits[(j + 1) % L];
      const int c = digits[(j + 2) % L];
      for (const auto& t : triples) {
        matches += static_cast<int>(a == t[0] && b == t[1] && c == t[2]);
      }
    }
    total += weight * matches;
  }
  return total;
}

namespace detail {

inline double renyi2_of_purity(double p) { return -std::log(p); }

}  // namespace detail

/// Per-bond observable machinery for a fixed chain geometry. Subsystem
/// index tables are built once; the compute methods are pure in the state.
/// Not synchronized: use one instance per worker.
class ObservablesEngine {
 public:
  ObservablesEngine(int num_sites, int local_dim,
                    std::vector<std::array<int, 3>> grammar_triples = {})
      : L_(num_sites), d_(local_dim), triples_(std::move(grammar_triples)) {
    if (L_ < 3 || d_ < 2) {
      throw std::invalid_argument("observables need at least 3 sites and local dimension >= 2");
    }
    singles_.reserve(L_);
    bonds_.reserve(L_);
    skip_pairs_.reserve(L_);
    site_triples_.reserve(L_);
    for (int j = 0; j < L_; ++j) {
      const std::array<int, 1> single{j};
      const std::array<int, 2> bond{j, (j + 1) % L_};
      const std::array<int, 2> skip{j, (j + 2) % L_};
      const std::array<int, 3> triple{j, (j + 1) % L_, (j + 2) % L_};
      singles_.push_back(SubsystemIndex::build(L_, d_, single));
      bonds_.push_back(SubsystemIndex::build(L_, d_, bond));
      skip_pairs_.push_back(SubsystemIndex::build(L_, d_, skip));
      site_triples_.push_back(SubsystemIndex::build(L_, d_, triple));
    }
    const int pd = d_ * d_;
    sector_.assign(d_, std::vector<std::int8_t>(pd));
    for (int w = 0; w < d_; ++w) {
      for (int r = 0; r < pd; ++r) {
        sector_[w][r] = static_cast<std::int8_t>(pair_charge(r, w, d_));
      }
    }
  }

  int num_sites() const { return L_; }
  int local_dim() const { return d_; }
  const std::vector<std::array<int, 3>>& triples() const { return triples_; }

  /// Entanglement asymmetry: sum over periodic bonds and words of the
  /// 2-Renyi entropy gained by dephasing the bond matrix into the word's
  /// occurrence sectors. Non-negative; zero iff every bond matrix is
  /// block-diagonal for every word.
  double entanglement_asymmetry(const PureState& state) const {
    check_state(state);
    const int pd = d_ * d_;
    CMatrix rho;
    double total = 0.0;
    for (int j = 0; j < L_; ++j) {
      accumulate_reduced(state, bonds_[j], rho);
      const double p = purity(rho);
      for (int w = 0; w < d_; ++w) {
        const auto& sector = sector_[w];
        double p_dephased = 0.0;
        for (int r = 0; r < pd; ++r) {
          for (int c = 0; c < pd; ++c) {
            if (sector[r] == sector[c]) {
              p_dephased += std::norm(rho(r, c));
            }
          }
        }
        total += std::log(p / p_dephased);
      }
    }
    return total;
  }

  double grammar_correlation(const PureState& state) const {
    check_state(state);
    return qca::grammar_correlation(state, triples_);
  }

  /// Tripartite mutual information of one periodic triple (j, j+1, j+2),
  /// from 2-Renyi entropies via the symmetric seven-term expansion.
  double tmi_triple(const PureState& state, int j) const {
    check_state(state);
    if (j < 0 || j >= L_) {
      throw std::out_of_range("tmi_triple: site index out of range");
    }
    CMatrix rho;
    const auto entropy = [&](const SubsystemIndex& index) {
      accumulate_reduced(state, index, rho);
      return detail::renyi2_of_purity(purity(rho));
    };
    const int j1 = (j + 1) % L_;
    const int j2 = (j + 2) % L_;
    return entropy(singles_[j]) + entropy(singles_[j1]) + entropy(singles_[j2]) -
           entropy(bonds_[j]) - entropy(skip_pairs_[j]) - entropy(bonds_[j1]) +
           entropy(site_triples_[j]);
  }

  /// Total TMI summed over all periodic site triples.
  double tripartite_mutual_information(const PureState& state) const {
    check_state(state);
    CMatrix rho;
    std::vector<double> s_single(L_);
    std::vector<double> s_bond(L_);
    std::vector<double> s_skip(L_);
    std::vector<double> s_triple(L_);
    for (int j = 0; j < L_; ++j) {
      accumulate_reduced(state, singles_[j], rho);
      s_single[j] = detail::renyi2_of_purity(purity(rho));
      accumulate_reduced(state, bonds_[j], rho);
      s_bond[j] = detail::renyi2_of_purity(purity(rho));
      accumulate_reduced(state, skip_pairs_[j], rho);
      s_skip[j] = detail::renyi2_of_purity(purity(rho));
      accumulate_reduced(state, site_triples_[j], rho);
      s_triple[j] = detail::renyi2_of_purity(purity(rho));
    }
    double total = 0.0;
    for (int j = 0; j < L_; ++j) {
      const int j1 = (j + 1) % L_;
      const int j2 = (j + 2) % L_;
      total += s_single[j] + s_single[j1] + s_single[j2] - s_bond[j] -
               s_skip[j] - s_bond[j1] + s_triple[j];
    }
    return total;
  }

 private:
  void check_state(const PureState& state) const {
    if (state.num_sites != L_ || state.local_dim != d_) {
      throw std::invalid_argument("observables engine geometry does not match the state");
    }
  }

  int L_;
  int d_;
  std::vector<std::array<int, 3>> triples_;
  std::vector<SubsystemIndex> singles_;
  std::vector<SubsystemIndex> bonds_;
  std::vector<SubsystemIndex> skip_pairs_;
  std::vector<SubsystemIndex> site_triples_;
  std::vector<std::vector<std::int8_t>> sector_;
};

/// One-shot conveniences; prefer ObservablesEngine inside loops.
inline double entanglement_asymmetry(const PureState& state) {
  return ObservablesEngine(state.num_sites, state.local_dim)
      .entanglement_asymmetry(state);
}

inline double tripartite_mutual_information(const PureState& state) {
  return ObservablesEngine(state.num_sites, state.local_dim)
      .tripartite_mutual_information(state);
}

}  // namespace qca
