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
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <utility>
#include <vector>

#include "qca/linalg.hpp"
#include "qca/rng.hpp"

namespace qca {

/// Symmetric mixing generator: zero diagonal, ones everywhere else. For
/// d = 3 this is the sum of the single-shift and dual-shift gates.
inline CMatrix build_x(int local_dim) {
  if (local_dim < 2) {
    throw std::invalid_argument("build_x: local dimension must be >= 2");
  }
  CMatrix x = CMatrix::Ones(local_dim, local_dim);
  x.diagonal().setZero();
  return x;
}

/// Word-phase generator: +1 on the word's occupation, -1 on every other.
inline CMatrix build_z(int word, int local_dim) {
  if (word < 0 || word >= local_dim) {
    throw std::out_of_range("build_z: word index out of range");
  }
  CMatrix z = -CMatrix::Identity(local_dim, local_dim);
  z(word, word) = 1.0;
  return z;
}

enum class FlipOrientation : std::uint8_t {
  control_first = 0,   // first bond site controls, second is the target
  control_second = 1,  // second bond site controls, first is the target
};

/// Controlled-flip generator on an ordered site pair: the X mixer acts on
/// the target site when the control site carries `word`, identity
/// otherwise. Either site of the pair can be the target.
inline CMatrix build_cf(int word, int local_dim, FlipOrientation orientation) {
  if (word < 0 || word >= local_dim) {
    throw std::out_of_range("build_cf: word index out of range");
  }
  const CMatrix x = build_x(local_dim);
  const CMatrix id = CMatrix::Identity(local_dim, local_dim);
  const int pd = local_dim * local_dim;
  CMatrix cf = CMatrix::Zero(pd, pd);
  for (int c = 0; c < local_dim; ++c) {
    CMatrix control = CMatrix::Zero(local_dim, local_dim);
    control(c, c) = 1.0;
    const CMatrix& action = (c == word) ? x : id;
    cf += (orientation == FlipOrientation::control_first)
              ? kron(control, action)
              : kron(action, control);
  }
  return cf;
}

/// exp(-i pi/2 h) for Hermitian h, via eigendecomposition.
inline CMatrix exponentiate(const CMatrix& generator) {
  if (!is_hermitian(generator)) {
    throw std::invalid_argument("exponentiate: generator is not Hermitian");
  }
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(generator);
  if (solver.info() != Eigen::Success) {
    throw std::runtime_error("exponentiate: eigendecomposition failed");
  }
  const auto& values = solver.eigenvalues();
  CVector phases(values.size());
  constexpr double kHalfPi = 1.57079632679489661923;
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    phases[i] = std::exp(Complex(0.0, -kHalfPi * values[i]));
  }
  return solver.eigenvectors() * phases.asDiagonal() *
         solver.eigenvectors().adjoint();
}

/// Gate entropy S = -log10(P) of drawing an effective (non-identity)
/// operator at one gate slot. S = 0 means always effective; S = +infinity
/// means never.
class GateEntropy {
 public:
  GateEntropy() = default;

  explicit GateEntropy(double value) : value_(value) {
    if (std::isnan(value) || value < 0.0) {
      throw std::invalid_argument("gate entropy must be >= 0 or infinite");
    }
  }

  static GateEntropy infinity() {
    return GateEntropy(std::numeric_limits<double>::infinity());
  }

  double value() const { return value_; }
  bool is_infinite() const { return std::isinf(value_); }

  /// Effective-draw probability 10^(-S), in [0, 1].
  double probability() const { return std::pow(10.0, -value_); }

 private:
  double value_ = 0.0;
};

enum class GateKind : std::uint8_t { identity, x, z, cf };

/// One sampled slot of a circuit layer. Identity means "no operation":
/// nothing is applied, rather than a phase-carrying exponential.
struct GateChoice {
  GateKind kind = GateKind::identity;
  std::int8_t word = -1;  // for z and cf
  FlipOrientation orientation = FlipOrientation::control_first;  // for cf

  bool is_identity() const { return kind == GateKind::identity; }
};

enum class BondParity : std::uint8_t { even, odd };

/// Bonds (j, j+1 mod L) whose left site has the given parity. L must be
/// even so the two layers tile the periodic chain without overlap.
inline std::vector<std::pair<int, int>> bonds_with_parity(int num_sites,
                                                          BondParity parity) {
  if (num_sites < 4 || num_sites % 2 != 0) {
    throw std::invalid_argument("bond layers need an even chain of at least 4 sites");
  }
  std::vector<std::pair<int, int>> bonds;
  bonds.reserve(num_sites / 2);
  const int offset = (parity == BondParity::even) ? 0 : 1;
  for (int b = 0; b < num_sites / 2; ++b) {
    const int j = 2 * b + offset;
    bonds.emplace_back(j, (j + 1) % num_sites);
  }
  return bonds;
}

/// One choice per site: with probability 10^(-s) an effective operator,
/// uniform over the mixer and the d word phases; identity otherwise.
inline std::vector<GateChoice> sample_one_site_layer(GateEntropy entropy,
                                                     int num_sites,
                                                     int local_dim, Rng& rng) {
  const double p = entropy.probability();
  std::vector<GateChoice> layer(num_sites);
  for (GateChoice& choice : layer) {
    if (rng.uniform() < p) {
      const std::uint32_t op = rng.pick(static_cast<std::uint32_t>(local_dim + 1));
      if (op == 0) {
        choice.kind = GateKind::x;
      } else {
        choice.kind = GateKind::z;
        choice.word = static_cast<std::int8_t>(op - 1);
      }
    }
  }
  return layer;
}

/// One choice per bond of the given parity: with probability 10^(-s) a
/// controlled flip with uniform word and uniform orientation, identity
/// otherwise.
inline std::vector<GateChoice> sample_two_site_layer(GateEntropy entropy,
                                                     int num_sites,
                                                     BondParity parity,
                                                     int local_dim, Rng& rng) {
  const auto bonds = bonds_with_parity(num_sites, parity);
  const double p = entropy.probability();
  std::vector<GateChoice> layer(bonds.size());
  for (GateChoice& choice : layer) {
    if (rng.uniform() < p) {
      choice.kind = GateKind::cf;
      choice.word = static_cast<std::int8_t>(rng.pick(static_cast<std::uint32_t>(local_dim)));
      choice.orientation = static_cast<FlipOrientation>(rng.pick(2));
    }
  }
  return layer;
}

/// The four layers of one time step, in application order.
struct GatePlan {
  std::vector<GateChoice> even_two_site;
  std::vector<GateChoice> first_one_site;
  std::vector<GateChoice> odd_two_site;
  std::vector<GateChoice> second_one_site;

  bool all_identity() const {
    auto clean = [](const std::vector<GateChoice>& layer) {
      for (const GateChoice& c : layer) {
        if (!c.is_identity()) {
          return false;
        }
      }
      return true;
    };
    return clean(even_two_site) && clean(first_one_site) &&
           clean(odd_two_site) && clean(second_one_site);
  }
};

inline GatePlan sample_gate_plan(GateEntropy one_site, GateEntropy two_site,
                                 int num_sites, int local_dim, Rng& rng) {
  GatePlan plan;
  plan.even_two_site =
      sample_two_site_layer(two_site, num_sites, BondParity::even, local_dim, rng);
  plan.first_one_site =
      sample_one_site_layer(one_site, num_sites, local_dim, rng);
  plan.odd_two_site =
      sample_two_site_layer(two_site, num_sites, BondParity::odd, local_dim, rng);
  plan.second_one_site =
      sample_one_site_layer(one_site, num_sites, local_dim, rng);
  return plan;
}

/// Exponentiated operators for one local dimension, built once per run and
/// shared read-only afterwards.
class GateSet {
 public:
  explicit GateSet(int local_dim) : d_(local_dim) {
    u_x_ = exponentiate(build_x(local_dim));
    u_z_.reserve(local_dim);
    u_cf_.reserve(local_dim);
    for (int w = 0; w < local_dim; ++w) {
      u_z_.push_back(exponentiate(build_z(w, local_dim)));
      u_cf_.push_back({exponentiate(build_cf(w, local_dim, FlipOrientation::control_first)),
                       exponentiate(build_cf(w, local_dim, FlipOrientation::control_second))});
    }
  }

  int local_dim() const { return d_; }

  const CMatrix& one_site(const GateChoice& choice) const {
    switch (choice.kind) {
      case GateKind::x:
        return u_x_;
      case GateKind::z:
        return u_z_.at(choice.word);
      default:
        throw std::invalid_argument("one_site: choice is not a one-site operator");
    }
  }

  const CMatrix& two_site(const GateChoice& choice) const {
    if (choice.kind != GateKind::cf) {
      throw std::invalid_argument("two_site: choice is not a controlled flip");
    }
    return u_cf_.at(choice.word)[static_cast<int>(choice.orientation)];
  }

  const CMatrix& x_unitary() const { return u_x_; }
  const CMatrix& z_unitary(int word) const { return u_z_.at(word); }
  const CMatrix& cf_unitary(int word, FlipOrientation orientation) const {
    return u_cf_.at(word)[static_cast<int>(orientation)];
  }

 private:
  int d_;
  CMatrix u_x_;
  std::vector<CMatrix> u_z_;
  std::vector<std::array<CMatrix, 2>> u_cf_;
};

}  // namespace qca
