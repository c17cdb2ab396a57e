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

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <stdexcept>

namespace qca {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

inline constexpr double kHermitianTol = 1e-12;
inline constexpr double kUnitaryTol = 1e-12;

/// Largest entrywise magnitude; zero for empty matrices.
inline double max_abs(const CMatrix& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

inline bool is_hermitian(const CMatrix& m, double tol = kHermitianTol) {
  if (m.rows() != m.cols()) {
    return false;
  }
  return max_abs(m - m.adjoint()) <= tol;
}

inline bool is_unitary(const CMatrix& m, double tol = kUnitaryTol) {
  if (m.rows() != m.cols()) {
    return false;
  }
  const CMatrix gram = m.adjoint() * m;
  return max_abs(gram - CMatrix::Identity(m.rows(), m.cols())) <= tol;
}

/// Kronecker product a (x) b, row-major block convention: the first factor
/// owns the most significant index digits.
inline CMatrix kron(const CMatrix& a, const CMatrix& b) {
  CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

/// Integer power for Hilbert-space dimensions; throws when the result would
/// overflow the 32-bit index range used by the state layout.
inline std::int64_t ipow(std::int64_t base, int exp) {
  if (base < 0 || exp < 0) {
    throw std::invalid_argument("ipow: negative base or exponent");
  }
  std::int64_t result = 1;
  for (int i = 0; i < exp; ++i) {
    result *= base;
    if (result > (std::int64_t{1} << 31)) {
      throw std::invalid_argument("ipow: dimension exceeds index range");
    }
  }
  return result;
}

}  // namespace qca
