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

#include "oracle.hpp"
#include "qca/gates.hpp"
#include "qca/observables.hpp"
#include "qca/rng.hpp"
#include "qca/state.hpp"

using namespace qca;

namespace {

constexpr std::array<std::array<int, 3>, 2> kGrammar{{{0, 1, 2}, {2, 0, 1}}};

PureState basis_state(const std::vector<int>& digits, int d) {
  PureState state;
  state.num_sites = static_cast<int>(digits.size());
  state.local_dim = d;
  state.amplitudes.assign(static_cast<std::size_t>(ipow(d, state.num_sites)),
                          Complex(0.0, 0.0));
  std::int64_t index = 0;
  for (int digit : digits) {
    index = index * d + digit;
  }
  state.amplitudes[static_cast<std::size_t>(index)] = 1.0;
  return state;
}

PureState random_state(int num_sites, int local_dim, Rng& rng) {
  PureState state;
  state.num_sites = num_sites;
  state.local_dim = local_dim;
  state.amplitudes.resize(static_cast<std::size_t>(ipow(local_dim, num_sites)));
  double sum = 0.0;
  for (auto& a : state.amplitudes) {
    const auto [x, y] = rng.normal_pair();
    a = Complex(x, y);
    sum += std::norm(a);
  }
  for (auto& a : state.amplitudes) {
    a /= std::sqrt(sum);
  }
  return state;
}

}  // namespace

TEST_CASE("dephasing removes exactly the cross-sector coherences") {
  // (|you,are> + |are,here>)/sqrt(2): the two components live in different
  // q_you sectors, so dephasing on "you" kills the off-diagonals.
  CVector psi = CVector::Zero(9);
  psi[0 * 3 + 1] = 1.0 / std::sqrt(2.0);
  psi[1 * 3 + 2] = 1.0 / std::sqrt(2.0);
  DensityMatrix rho{psi * psi.adjoint(), {0, 1}};

  const DensityMatrix dephased = dephase_word_sectors(rho, 0);
  CMatrix expected = CMatrix::Zero(9, 9);
  expected(1, 1) = 0.5;
  expected(5, 5) = 0.5;
  CHECK(max_abs(dephased.matrix - expected) < 1e-14);

  // both components carry q_are = 1, so dephasing on "are" is a no-op
  const DensityMatrix unchanged = dephase_word_sectors(rho, 1);
  CHECK(max_abs(unchanged.matrix - rho.matrix) < 1e-14);

  CHECK_THROWS_AS(dephase_word_sectors(rho, 3), std::out_of_range);
}

TEST_CASE("dephasing preserves the trace and never raises purity") {
  Rng rng(41);
  for (int trial = 0; trial < 20; ++trial) {
    const PureState chain = random_state(4, 3, rng);
    const DensityMatrix rho = reduced_density_matrix(chain, {1, 2});
    for (int w = 0; w < 3; ++w) {
      const DensityMatrix dephased = dephase_word_sectors(rho, w);
      CHECK(std::abs(dephased.matrix.trace().real() - rho.matrix.trace().real()) < 1e-12);
      CHECK(purity(dephased.matrix) <= purity(rho.matrix) + 1e-12);
    }
  }
}

TEST_CASE("hand-computed asymmetry of the two-word superposition") {
  PureState state;
  state.num_sites = 2;
  state.local_dim = 3;
  state.amplitudes.assign(9, Complex(0.0, 0.0));
  state.amplitudes[0 * 3 + 1] = 1.0 / std::sqrt(2.0);
  state.amplitudes[1 * 3 + 2] = 1.0 / std::sqrt(2.0);

  const DensityMatrix rho = reduced_density_matrix(state, {0, 1});
  const double s_rho = renyi2_entropy(rho);
  CHECK(s_rho < 1e-12);  // pure

  const double ds_you = renyi2_entropy(dephase_word_sectors(rho, 0)) - s_rho;
  const double ds_are = renyi2_entropy(dephase_word_sectors(rho, 1)) - s_rho;
  const double ds_here = renyi2_entropy(dephase_word_sectors(rho, 2)) - s_rho;
  CHECK(ds_you == Approx(std::log(2.0)).margin(1e-12));
  CHECK(ds_are == Approx(0.0).margin(1e-12));
  CHECK(ds_here == Approx(std::log(2.0)).margin(1e-12));
}

TEST_CASE("product basis states carry no asymmetry") {
  const PureState state = basis_state({0, 1, 2, 0, 1, 2}, 3);
  CHECK(entanglement_asymmetry(state) == Approx(0.0).margin(1e-12));
}

TEST_CASE("asymmetry is non-negative and phase invariant") {
  Rng rng(42);
  for (int trial = 0; trial < 10; ++trial) {
    PureState state = random_state(4, 3, rng);
    const double ea = entanglement_asymmetry(state);
    CHECK(ea >= -1e-10);
    const Complex phase = std::exp(Complex(0.0, 1.7));
    for (auto& a : state.amplitudes) {
      a *= phase;
    }
    CHECK(entanglement_asymmetry(state) == Approx(ea).margin(1e-10));
  }
}

TEST_CASE("asymmetry matches the projector-sandwich oracle") {
  Rng rng(43);
  for (int L : {3, 4}) {
    for (int trial = 0; trial < 5; ++trial) {
      const PureState state = random_state(L, 3, rng);
      CHECK(entanglement_asymmetry(state) ==
            Approx(oracle::entanglement_asymmetry(state)).margin(1e-10));
    }
  }
}

TEST_CASE("grammar correlation counts matching triples on basis states") {
  CHECK(grammar_correlation(basis_state({0, 0, 0, 0, 0, 0}, 3), kGrammar) ==
        Approx(0.0).margin(1e-14));
  // you,are,here,you,are,here: yah at 0 and 3, hya at 2 and 5
  CHECK(grammar_correlation(basis_state({0, 1, 2, 0, 1, 2}, 3), kGrammar) ==
        Approx(4.0).margin(1e-12));
}

TEST_CASE("grammar correlation of the uniform product state") {
  PureState state;
  state.num_sites = 6;
  state.local_dim = 3;
  state.amplitudes.assign(729, Complex(1.0 / std::sqrt(729.0), 0.0));
  // each occupation expectation is 1/3, six sites and two triples
  CHECK(grammar_correlation(state, kGrammar) == Approx(4.0 / 9.0).margin(1e-12));
}

TEST_CASE("grammar correlation equals the triple count on random basis states") {
  Rng rng(44);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<int> digits(6);
    for (int& digit : digits) {
      digit = static_cast<int>(rng.pick(3));
    }
    int expected = 0;
    for (int j = 0; j < 6; ++j) {
      for (const auto& t : kGrammar) {
        expected += static_cast<int>(digits[j] == t[0] &&
                                     digits[(j + 1) % 6] == t[1] &&
                                     digits[(j + 2) % 6] == t[2]);
      }
    }
    CHECK(grammar_correlation(basis_state(digits, 3), kGrammar) ==
          Approx(static_cast<double>(expected)).margin(1e-12));
  }
}

TEST_CASE("grammar correlation rejects an empty triple list") {
  const PureState state = basis_state({0, 1, 2, 0}, 3);
  CHECK_THROWS_AS(grammar_correlation(state, {}), std::invalid_argument);
}

TEST_CASE("grammar correlation matches the embedded-projector oracle") {
  Rng rng(45);
  for (int L : {3, 4}) {
    for (int trial = 0; trial < 5; ++trial) {
      const PureState state = random_state(L, 3, rng);
      CHECK(grammar_correlation(state, kGrammar) ==
            Approx(oracle::grammar_correlation(state, kGrammar)).margin(1e-10));
    }
  }
}

TEST_CASE("product states carry no mutual information") {
  Rng rng(46);
  const PureState state = random_product_state(4, 3, rng);
  CHECK(tripartite_mutual_information(state) == Approx(0.0).margin(1e-10));
}

TEST_CASE("a site in product with an entangled pair has zero triple TMI") {
  Rng rng(47);
  PureState state = random_product_state(4, 3, rng);
  // entangle sites 1 and 2 only
  const GateSet gates(3);
  apply_two_site(state, 1, 2, gates.cf_unitary(0, FlipOrientation::control_first));
  apply_two_site(state, 1, 2, gates.cf_unitary(2, FlipOrientation::control_second));
  const ObservablesEngine engine(4, 3);
  // triple (0,1,2): site 0 is in a product with the pair (1,2)
  CHECK(engine.tmi_triple(state, 0) == Approx(0.0).margin(1e-10));
  // triple (3,0,1): sites 3 and 0 are unentangled with everything
  CHECK(engine.tmi_triple(state, 3) == Approx(0.0).margin(1e-10));
}

TEST_CASE("triple TMI equals the mutual-information composition") {
  Rng rng(48);
  for (int trial = 0; trial < 5; ++trial) {
    const PureState state = random_state(4, 3, rng);
    const ObservablesEngine engine(4, 3);
    const CMatrix full = oracle::full_density(state);
    for (int j = 0; j < 4; ++j) {
      const int j1 = (j + 1) % 4;
      const int j2 = (j + 2) % 4;
      const auto entropy = [&](std::vector<int> sites) {
        return oracle::renyi2(oracle::partial_trace(full, 4, 3, sites));
      };
      const double i2_ab = entropy({j}) + entropy({j1}) - entropy({j, j1});
      const double i2_ac = entropy({j}) + entropy({j2}) - entropy({j, j2});
      const double i2_a_bc = entropy({j}) + entropy({j1, j2}) - entropy({j, j1, j2});
      CHECK(engine.tmi_triple(state, j) ==
            Approx(i2_ab + i2_ac - i2_a_bc).margin(1e-10));
    }
  }
}

TEST_CASE("triple TMI is symmetric under subsystem permutations") {
  Rng rng(49);
  const PureState state = random_state(3, 3, rng);
  const CMatrix full = oracle::full_density(state);
  const auto entropy = [&](std::vector<int> sites) {
    return oracle::renyi2(oracle::partial_trace(full, 3, 3, sites));
  };
  // the symmetric expansion is invariant under any relabeling of (0,1,2)
  const double symmetric = entropy({0}) + entropy({1}) + entropy({2}) -
                           entropy({0, 1}) - entropy({0, 2}) - entropy({1, 2}) +
                           entropy({0, 1, 2});
  const std::array<std::array<int, 3>, 3> orders{{{0, 1, 2}, {1, 2, 0}, {2, 0, 1}}};
  for (const auto& order : orders) {
    const int a = order[0], b = order[1], c = order[2];
    const double composed =
        (entropy({a}) + entropy({b}) - entropy({a, b})) +
        (entropy({a}) + entropy({c}) - entropy({a, c})) -
        (entropy({a}) + entropy({b, c}) - entropy({a, b, c}));
    CHECK(composed == Approx(symmetric).margin(1e-10));
  }
}

TEST_CASE("total TMI matches the brute-force oracle and ignores phases") {
  Rng rng(50);
  for (int L : {3, 4}) {
    for (int trial = 0; trial < 5; ++trial) {
      PureState state = random_state(L, 3, rng);
      const double tmi = tripartite_mutual_information(state);
      CHECK(tmi == Approx(oracle::tripartite_mutual_information(state)).margin(1e-10));
      for (auto& a : state.amplitudes) {
        a *= std::exp(Complex(0.0, -0.9));
      }
      CHECK(tripartite_mutual_information(state) == Approx(tmi).margin(1e-10));
    }
  }
}
