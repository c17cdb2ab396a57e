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

#include "qca/gates.hpp"

using namespace qca;

TEST_CASE("the mixing generator is the all-ones off-diagonal matrix") {
  const CMatrix x = build_x(3);
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) {
      CHECK(x(r, c) == Complex(r == c ? 0.0 : 1.0, 0.0));
    }
  }
  CHECK(is_hermitian(x));

  Eigen::SelfAdjointEigenSolver<CMatrix> solver(x);
  const auto& v = solver.eigenvalues();
  CHECK(v[0] == Approx(-1.0).margin(1e-12));
  CHECK(v[1] == Approx(-1.0).margin(1e-12));
  CHECK(v[2] == Approx(2.0).margin(1e-12));
}

TEST_CASE("word-phase generators have the expected diagonals") {
  const CMatrix z = build_z(0, 3);
  CHECK(z(0, 0) == Complex(1.0, 0.0));
  CHECK(z(1, 1) == Complex(-1.0, 0.0));
  CHECK(z(2, 2) == Complex(-1.0, 0.0));
  CHECK(max_abs(z - z.cwiseProduct(CMatrix::Identity(3, 3))) == 0.0);

  for (int d : {2, 3, 5}) {
    CMatrix sum = CMatrix::Zero(d, d);
    for (int w = 0; w < d; ++w) {
      const CMatrix zw = build_z(w, d);
      CHECK(zw.trace().real() == Approx(2.0 - d));
      sum += zw;
    }
    CHECK(max_abs(sum - (2.0 - d) * CMatrix::Identity(d, d)) < 1e-14);
  }
  CHECK_THROWS_AS(build_z(3, 3), std::out_of_range);
}

TEST_CASE("controlled-flip generators gate the mixer on the control word") {
  const CMatrix cf = build_cf(0, 3, FlipOrientation::control_first);
  CHECK(is_hermitian(cf));
  const CMatrix x = build_x(3);
  CVector target(3);
  target << Complex(0.3, 0.1), Complex(-0.2, 0.4), Complex(0.5, -0.6);
  for (int control = 0; control < 3; ++control) {
    CVector in = CVector::Zero(9);
    in.segment(control * 3, 3) = target;
    const CVector out = cf * in;
    CVector expected = CVector::Zero(9);
    expected.segment(control * 3, 3) = (control == 0) ? (x * target).eval() : target;
    CHECK((out - expected).norm() < 1e-14);
  }
}

TEST_CASE("the two flip orientations are swap conjugates") {
  CMatrix swap = CMatrix::Zero(9, 9);
  for (int a = 0; a < 3; ++a) {
    for (int b = 0; b < 3; ++b) {
      swap(b * 3 + a, a * 3 + b) = 1.0;
    }
  }
  for (int w = 0; w < 3; ++w) {
    const CMatrix first = build_cf(w, 3, FlipOrientation::control_first);
    const CMatrix second = build_cf(w, 3, FlipOrientation::control_second);
    CHECK(max_abs(second - swap * first * swap) < 1e-14);
  }
}

TEST_CASE("exponentiation reproduces the closed forms") {
  const CMatrix uz = exponentiate(build_z(0, 3));
  CMatrix expected_z = CMatrix::Zero(3, 3);
  expected_z(0, 0) = Complex(0.0, -1.0);
  expected_z(1, 1) = Complex(0.0, 1.0);
  expected_z(2, 2) = Complex(0.0, 1.0);
  CHECK(max_abs(uz - expected_z) < 1e-12);

  // exp(-i pi/2 X) = i I - (1+i) J / 3 with J the all-ones matrix
  const CMatrix ux = exponentiate(build_x(3));
  const CMatrix expected_x = Complex(0.0, 1.0) * CMatrix::Identity(3, 3) -
                             Complex(1.0, 1.0) / 3.0 * CMatrix::Ones(3, 3);
  CHECK(max_abs(ux - expected_x) < 1e-12);

  CHECK_THROWS_AS(exponentiate(CMatrix::Ones(2, 3)), std::invalid_argument);
  CMatrix skew(2, 2);
  skew << 0.0, 1.0, -1.0, 0.0;
  CHECK_THROWS_AS(exponentiate(skew), std::invalid_argument);
}

TEST_CASE("every sampled generator exponentiates to a unitary") {
  for (int d : {2, 3, 4}) {
    CHECK(is_unitary(exponentiate(build_x(d))));
    for (int w = 0; w < d; ++w) {
      CHECK(is_unitary(exponentiate(build_z(w, d))));
      CHECK(is_unitary(exponentiate(build_cf(w, d, FlipOrientation::control_first))));
      CHECK(is_unitary(exponentiate(build_cf(w, d, FlipOrientation::control_second))));
    }
  }
}

TEST_CASE("the exponentiated flip is block structured") {
  const GateSet gates(3);
  const CMatrix ucf = gates.cf_unitary(0, FlipOrientation::control_first);
  const CMatrix ux = gates.x_unitary();
  // control block carries exp(-i pi/2 X); the complement blocks carry the
  // scalar phase exp(-i pi/2)
  CHECK(max_abs(ucf.block(0, 0, 3, 3) - ux) < 1e-12);
  for (int control = 1; control < 3; ++control) {
    const CMatrix block = ucf.block(control * 3, control * 3, 3, 3);
    CHECK(max_abs(block - Complex(0.0, -1.0) * CMatrix::Identity(3, 3)) < 1e-12);
  }
  // off-control blocks vanish
  CHECK(ucf.block(0, 3, 3, 6).norm() < 1e-12);
  CHECK(ucf.block(3, 0, 6, 3).norm() < 1e-12);
  CHECK(ucf.block(3, 6, 3, 3).norm() < 1e-12);
}

TEST_CASE("gate entropy maps to the effective probability") {
  CHECK(GateEntropy(0.0).probability() == 1.0);
  CHECK(GateEntropy(1.0).probability() == Approx(0.1));
  CHECK(GateEntropy(std::log10(2.0)).probability() == Approx(0.5));
  CHECK(GateEntropy::infinity().probability() == 0.0);
  CHECK_THROWS_AS(GateEntropy(-0.5), std::invalid_argument);
  CHECK_THROWS_AS(GateEntropy(std::nan("")), std::invalid_argument);
}

TEST_CASE("bond layers tile the periodic chain") {
  const auto even = bonds_with_parity(6, BondParity::even);
  const auto odd = bonds_with_parity(6, BondParity::odd);
  CHECK(even == std::vector<std::pair<int, int>>{{0, 1}, {2, 3}, {4, 5}});
  CHECK(odd == std::vector<std::pair<int, int>>{{1, 2}, {3, 4}, {5, 0}});
  CHECK_THROWS_AS(bonds_with_parity(5, BondParity::even), std::invalid_argument);
}

TEST_CASE("zero gate entropy never samples identity") {
  Rng rng(31);
  for (int trial = 0; trial < 200; ++trial) {
    for (const GateChoice& c : sample_one_site_layer(GateEntropy(0.0), 6, 3, rng)) {
      CHECK_FALSE(c.is_identity());
    }
    for (const GateChoice& c :
         sample_two_site_layer(GateEntropy(0.0), 6, BondParity::even, 3, rng)) {
      CHECK_FALSE(c.is_identity());
    }
  }
}

TEST_CASE("infinite gate entropy always samples identity") {
  Rng rng(32);
  for (int trial = 0; trial < 200; ++trial) {
    for (const GateChoice& c :
         sample_one_site_layer(GateEntropy::infinity(), 6, 3, rng)) {
      CHECK(c.is_identity());
    }
    for (const GateChoice& c : sample_two_site_layer(GateEntropy::infinity(), 6,
                                                     BondParity::odd, 3, rng)) {
      CHECK(c.is_identity());
    }
  }
}

TEST_CASE("effective fractions track the sampling probability") {
  Rng rng(33);
  long effective = 0;
  const long draws = 100000;
  for (long i = 0; i < draws / 6; ++i) {
    for (const GateChoice& c : sample_one_site_layer(GateEntropy(1.0), 6, 3, rng)) {
      effective += c.is_identity() ? 0 : 1;
    }
  }
  CHECK(std::abs(static_cast<double>(effective) / (draws / 6 * 6) - 0.1) < 0.01);

  effective = 0;
  for (long i = 0; i < draws / 3; ++i) {
    for (const GateChoice& c : sample_two_site_layer(
             GateEntropy(std::log10(2.0)), 6, BondParity::even, 3, rng)) {
      effective += c.is_identity() ? 0 : 1;
    }
  }
  CHECK(std::abs(static_cast<double>(effective) / (draws / 3 * 3) - 0.5) < 0.01);
}

TEST_CASE("one-site sampling is uniform over the effective set") {
  Rng rng(34);
  std::array<long, 4> counts{};  // x, z0, z1, z2
  const long layers = 20000;
  for (long i = 0; i < layers; ++i) {
    for (const GateChoice& c : sample_one_site_layer(GateEntropy(0.0), 6, 3, rng)) {
      counts[c.kind == GateKind::x ? 0 : 1 + c.word] += 1;
    }
  }
  const double total = layers * 6.0;
  for (long count : counts) {
    CHECK(std::abs(count / total - 0.25) < 0.01);
  }
}

TEST_CASE("both flip orientations are drawn") {
  Rng rng(35);
  std::array<long, 2> counts{};
  for (int i = 0; i < 4000; ++i) {
    for (const GateChoice& c :
         sample_two_site_layer(GateEntropy(0.0), 6, BondParity::even, 3, rng)) {
      counts[static_cast<int>(c.orientation)] += 1;
    }
  }
  const double total = static_cast<double>(counts[0] + counts[1]);
  CHECK(std::abs(counts[0] / total - 0.5) < 0.03);
}

TEST_CASE("sampling is reproducible by seed") {
  Rng a(36);
  Rng b(36);
  const GatePlan pa = sample_gate_plan(GateEntropy(0.5), GateEntropy(0.5), 6, 3, a);
  const GatePlan pb = sample_gate_plan(GateEntropy(0.5), GateEntropy(0.5), 6, 3, b);
  auto same = [](const std::vector<GateChoice>& x, const std::vector<GateChoice>& y) {
    REQUIRE(x.size() == y.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
      CHECK(x[i].kind == y[i].kind);
      CHECK(x[i].word == y[i].word);
      CHECK(x[i].orientation == y[i].orientation);
    }
  };
  same(pa.even_two_site, pb.even_two_site);
  same(pa.first_one_site, pb.first_one_site);
  same(pa.odd_two_site, pb.odd_two_site);
  same(pa.second_one_site, pb.second_one_site);
}

TEST_CASE("gate plans know whether they do anything") {
  Rng rng(37);
  const GatePlan frozen = sample_gate_plan(GateEntropy::infinity(),
                                           GateEntropy::infinity(), 6, 3, rng);
  CHECK(frozen.all_identity());
  const GatePlan busy = sample_gate_plan(GateEntropy(0.0), GateEntropy(0.0), 6, 3, rng);
  CHECK_FALSE(busy.all_identity());
}

TEST_CASE("the gate set resolves choices to the exponentiated operators") {
  const GateSet gates(3);
  GateChoice x{GateKind::x, -1, FlipOrientation::control_first};
  CHECK(max_abs(gates.one_site(x) - exponentiate(build_x(3))) == 0.0);
  GateChoice z{GateKind::z, 2, FlipOrientation::control_first};
  CHECK(max_abs(gates.one_site(z) - exponentiate(build_z(2, 3))) == 0.0);
  GateChoice cf{GateKind::cf, 1, FlipOrientation::control_second};
  CHECK(max_abs(gates.two_site(cf) -
                exponentiate(build_cf(1, 3, FlipOrientation::control_second))) == 0.0);
  GateChoice id{};
  CHECK_THROWS_AS(gates.one_site(id), std::invalid_argument);
  CHECK_THROWS_AS(gates.two_site(z), std::invalid_argument);
}
