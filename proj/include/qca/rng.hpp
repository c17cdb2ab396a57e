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

#include <cassert>
#include <cmath>
#include <cstdint>
#include <random>
#include <utility>

namespace qca {

/// splitmix64 finalizer; decorrelates nearby integer seeds.
inline std::uint64_t mix_bits(std::uint64_t x) {
  x ^= x >> 30;
  x *= 0xbf58476d1ce4e5b9ULL;
  x ^= x >> 27;
  x *= 0x94d049bb133111ebULL;
  x ^= x >> 31;
  return x;
}

/// Deterministic per-stream seed: hash of (master seed, stream index).
/// Trajectory i of an ensemble uses derive_stream_seed(master_seed, i).
inline std::uint64_t derive_stream_seed(std::uint64_t master_seed,
                                        std::uint64_t index) {
  return mix_bits(master_seed + 0x9e3779b97f4a7c15ULL * (index + 1));
}

/// mt19937_64 with hand-rolled draw helpers. The standard distribution
/// classes are not bit-stable across standard libraries; these are, so a
/// given seed reproduces the same trajectory everywhere.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform double in [0, 1) with 53-bit resolution.
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  /// Uniform integer in [0, n), n > 0.
  std::uint32_t pick(std::uint32_t n) {
    assert(n > 0);
    return static_cast<std::uint32_t>(
        (static_cast<unsigned __int128>(engine_()) * n) >> 64);
  }

  /// Two independent standard normals (Box-Muller).
  std::pair<double, double> normal_pair() {
    const double u = 1.0 - uniform();  // (0, 1], keeps the log finite
    const double radius = std::sqrt(-2.0 * std::log(u));
    const double angle = 2.0 * kPi * uniform();
    return {radius * std::cos(angle), radius * std::sin(angle)};
  }

  std::uint64_t raw() { return engine_(); }

 private:
  static constexpr double kPi = 3.14159265358979323846;
  std::mt19937_64 engine_;
};

}  // namespace qca
