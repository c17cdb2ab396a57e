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

#include <cmath>
#include <cstdint>
#include <fstream>
#include <istream>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "qca/linalg.hpp"
#include "qca/rng.hpp"

namespace qca {

/// Dense state vector for a chain of `num_sites` d-level sites.
///
/// Site 0 owns the most significant digit of the basis index:
///   index = sum_j digit_j * d^(num_sites - 1 - j),
/// so the two-site pair value of bond (j, j+1) is digit_j * d + digit_{j+1},
/// matching the corpus-state pair convention.
struct PureState {
  int num_sites = 0;
  int local_dim = 0;
  std::vector<Complex> amplitudes;

  std::int64_t dim() const {
    return static_cast<std::int64_t>(amplitudes.size());
  }

  double norm_sq() const {
    double sum = 0.0;
    for (const Complex& a : amplitudes) {
      sum += std::norm(a);
    }
    return sum;
  }

  double norm() const { return std::sqrt(norm_sq()); }

  void renormalize() {
    const double n = norm();
    if (n == 0.0) {
      throw std::runtime_error("cannot renormalize a zero state");
    }
    const double inv = 1.0 / n;
    for (Complex& a : amplitudes) {
      a *= inv;
    }
  }
};

/// Stride of a site's digit within the flat index.
inline std::int64_t site_stride(int num_sites, int local_dim, int site) {
  return ipow(local_dim, num_sites - 1 - site);
}

/// Digit of `site` within flat index `index`.
inline int site_digit(std::int64_t index, int num_sites, int local_dim,
                      int site) {
  return static_cast<int>(
      (index / site_stride(num_sites, local_dim, site)) % local_dim);
}

/// Tensor product of independent local vectors, each drawn uniformly from
/// the unit sphere of complex d-space (normalized complex Gaussians).
inline PureState random_product_state(int num_sites, int local_dim, Rng& rng) {
  if (num_sites < 1 || local_dim < 2) {
    throw std::invalid_argument("random_product_state: need num_sites >= 1 and local_dim >= 2");
  }
  PureState state;
  state.num_sites = num_sites;
  state.local_dim = local_dim;
  state.amplitudes.assign(1, Complex(1.0, 0.0));
  std::vector<Complex> local(local_dim);
  std::vector<Complex> next;
  for (int site = 0; site < num_sites; ++site) {
    double sum_sq = 0.0;
    for (int k = 0; k < local_dim; ++k) {
      const auto [re, im] = rng.normal_pair();
      local[k] = Complex(re, im);
      sum_sq += std::norm(local[k]);
    }
    const double inv = 1.0 / std::sqrt(sum_sq);
    for (int k = 0; k < local_dim; ++k) {
      local[k] *= inv;
    }
    next.resize(state.amplitudes.size() * local_dim);
    for (std::size_t a = 0; a < state.amplitudes.size(); ++a) {
      for (int k = 0; k < local_dim; ++k) {
        next[a * local_dim + k] = state.amplitudes[a] * local[k];
      }
    }
    state.amplitudes.swap(next);
  }
  return state;
}

namespace detail {

/// u acts on the tensor factor of `site`; no unitarity check.
inline void apply_one_site_noverify(PureState& state, int site,
                                    const CMatrix& u) {
  const int d = state.local_dim;
  const std::int64_t stride = site_stride(state.num_sites, d, site);
  const std::int64_t dim = state.dim();
  const std::int64_t block = stride * d;
  std::vector<Complex> v(d);
  Complex* amp = state.amplitudes.data();
  for (std::int64_t base0 = 0; base0 < dim; base0 += block) {
    for (std::int64_t lo = 0; lo < stride; ++lo) {
      const std::int64_t base = base0 + lo;
      for (int k = 0; k < d; ++k) {
        v[k] = amp[base + k * stride];
      }
      for (int r = 0; r < d; ++r) {
        Complex acc(0.0, 0.0);
        for (int k = 0; k < d; ++k) {
          acc += u(r, k) * v[k];
        }
        amp[base + r * stride] = acc;
      }
    }
  }
}

/// u acts on the ordered pair (j, k) with k = (j+1) mod L; the pair value
/// digit_j * d + digit_k indexes u. Handles the wrap-around bond.
inline void apply_two_site_noverify(PureState& state, int j, int k,
                                    const CMatrix& u) {
  const int d = state.local_dim;
  const int L = state.num_sites;
  const int pd = d * d;
  std::vector<Complex> v(pd);
  std::vector<Complex> w(pd);
  Complex* amp = state.amplitudes.data();
  if (k == j + 1) {
    const std::int64_t stride = site_stride(L, d, k);
    const std::int64_t dim = state.dim();
    const std::int64_t block = stride * pd;
    for (std::int64_t base0 = 0; base0 < dim; base0 += block) {
      for (std::int64_t lo = 0; lo < stride; ++lo) {
        const std::int64_t base = base0 + lo;
        for (int p = 0; p < pd; ++p) {
          v[p] = amp[base + p * stride];
        }
        for (int r = 0; r < pd; ++r) {
          Complex acc(0.0, 0.0);
          for (int p = 0; p < pd; ++p) {
            acc += u(r, p) * v[p];
          }
          w[r] = acc;
        }
        for (int p = 0; p < pd; ++p) {
          amp[base + p * stride] = w[p];
        }
      }
    }
  } else {
    // wrap bond (L-1, 0): site L-1 has stride 1, site 0 has stride d^(L-1)
    const std::int64_t top = site_stride(L, d, 0);
    const std::int64_t mid_count = top / d;
    for (std::int64_t mid = 0; mid < mid_count; ++mid) {
      const std::int64_t base = mid * d;
      for (int w0 = 0; w0 < d; ++w0) {
        for (int wl = 0; wl < d; ++wl) {
          v[wl * d + w0] = amp[w0 * top + base + wl];
        }
      }
      for (int r = 0; r < pd; ++r) {
        Complex acc(0.0, 0.0);
        for (int p = 0; p < pd; ++p) {
          acc += u(r, p) * v[p];
        }
        w[r] = acc;
      }
      for (int w0 = 0; w0 < d; ++w0) {
        for (int wl = 0; wl < d; ++wl) {
          amp[w0 * top + base + wl] = w[wl * d + w0];
        }
      }
    }
  }
}

}  // namespace detail

inline void apply_one_site(PureState& state, int site, const CMatrix& u) {
  if (site < 0 || site >= state.num_sites) {
    throw std::out_of_range("apply_one_site: site index out of range");
  }
  if (u.rows() != state.local_dim || u.cols() != state.local_dim) {
    throw std::invalid_argument("apply_one_site: gate dimension mismatch");
  }
  if (!is_unitary(u)) {
    throw std::invalid_argument("apply_one_site: gate is not unitary");
  }
  detail::apply_one_site_noverify(state, site, u);
}

inline void apply_two_site(PureState& state, int j, int k, const CMatrix& u) {
  const int L = state.num_sites;
  if (j < 0 || j >= L || k < 0 || k >= L) {
    throw std::out_of_range("apply_two_site: site index out of range");
  }
  if (k != (j + 1) % L) {
    throw std::invalid_argument(
        "apply_two_site: sites are not an adjacent bond under periodic boundaries");
  }
  const int pd = state.local_dim * state.local_dim;
  if (u.rows() != pd || u.cols() != pd) {
    throw std::invalid_argument("apply_two_site: gate dimension mismatch");
  }
  if (!is_unitary(u)) {
    throw std::invalid_argument("apply_two_site: gate is not unitary");
  }
  detail::apply_two_site_noverify(state, j, k, u);
}

/// Precomputed index split for a subsystem. position[c * sub_dim + r] is
/// the flat state index whose subsystem digits spell r (sites in the order
/// given, first site most significant) and whose complement digits spell c
/// (complement sites ascending, first most significant).
struct SubsystemIndex {
  int sub_dim = 0;
  std::int64_t comp_dim = 0;
  std::vector<std::uint32_t> position;

  static SubsystemIndex build(int num_sites, int local_dim,
                              std::span<const int> sites) {
    if (sites.empty() || static_cast<int>(sites.size()) > num_sites) {
      throw std::invalid_argument("subsystem must be a proper non-empty site subset");
    }
    std::vector<char> in_sub(num_sites, 0);
    for (int s : sites) {
      if (s < 0 || s >= num_sites) {
        throw std::out_of_range("subsystem site index out of range");
      }
      if (in_sub[s]) {
        throw std::invalid_argument("subsystem sites must be distinct");
      }
      in_sub[s] = 1;
    }
    SubsystemIndex out;
    const std::int64_t dim = ipow(local_dim, num_sites);
    out.sub_dim = static_cast<int>(ipow(local_dim, static_cast<int>(sites.size())));
    out.comp_dim = dim / out.sub_dim;
    out.position.resize(static_cast<std::size_t>(dim));

    std::vector<int> comp_sites;
    for (int s = 0; s < num_sites; ++s) {
      if (!in_sub[s]) {
        comp_sites.push_back(s);
      }
    }
    std::vector<std::int64_t> strides(num_sites);
    for (int s = 0; s < num_sites; ++s) {
      strides[s] = site_stride(num_sites, local_dim, s);
    }
    for (std::int64_t i = 0; i < dim; ++i) {
      std::int64_t r = 0;
      for (int s : sites) {
        r = r * local_dim + (i / strides[s]) % local_dim;
      }
      std::int64_t c = 0;
      for (int s : comp_sites) {
        c = c * local_dim + (i / strides[s]) % local_dim;
      }
      out.position[static_cast<std::size_t>(c * out.sub_dim + r)] =
          static_cast<std::uint32_t>(i);
    }
    return out;
  }
};

/// Reduced density matrix plus the chain sites it describes, in the order
/// used for its row index.
struct DensityMatrix {
  CMatrix matrix;
  std::vector<int> sites;
};

/// Accumulates the partial trace of |state><state| over the complement of
/// the subsystem described by `index` into `out` (resized and zeroed).
inline void accumulate_reduced(const PureState& state,
                               const SubsystemIndex& index, CMatrix& out) {
  const int sub = index.sub_dim;
  out = CMatrix::Zero(sub, sub);
  std::vector<Complex> v(sub);
  const Complex* amp = state.amplitudes.data();
  const std::uint32_t* pos = index.position.data();
  for (std::int64_t c = 0; c < index.comp_dim; ++c, pos += sub) {
    for (int r = 0; r < sub; ++r) {
      v[r] = amp[pos[r]];
    }
    for (int r = 0; r < sub; ++r) {
      for (int rp = r; rp < sub; ++rp) {
        out(r, rp) += v[r] * std::conj(v[rp]);
      }
    }
  }
  for (int r = 0; r < sub; ++r) {
    for (int rp = r + 1; rp < sub; ++rp) {
      out(rp, r) = std::conj(out(r, rp));
    }
  }
}

/// Exact partial trace of |state><state| keeping `sites` (any order,
/// contiguity not required).
inline DensityMatrix reduced_density_matrix(const PureState& state,
                                            std::vector<int> sites) {
  const SubsystemIndex index =
      SubsystemIndex::build(state.num_sites, state.local_dim, sites);
  DensityMatrix dm;
  dm.sites = std::move(sites);
  accumulate_reduced(state, index, dm.matrix);
  return dm;
}

/// Tr(rho^2) for Hermitian rho.
inline double purity(const CMatrix& rho) { return rho.squaredNorm(); }

/// 2-Renyi entropy -ln Tr(rho^2), in nats.
inline double renyi2_entropy(const DensityMatrix& rho) {
  const double trace = rho.matrix.trace().real();
  if (std::abs(trace - 1.0) > 1e-6) {
    throw std::invalid_argument("renyi2_entropy: density matrix trace deviates from 1");
  }
  return -std::log(purity(rho.matrix));
}

/// Frobenius distance sqrt(Tr[(rho-sigma)^dag (rho-sigma)]).
inline double frobenius_distance(const DensityMatrix& rho,
                                 const DensityMatrix& sigma) {
  if (rho.matrix.rows() != sigma.matrix.rows() ||
      rho.matrix.cols() != sigma.matrix.cols()) {
    throw std::invalid_argument("frobenius_distance: dimension mismatch");
  }
  return (rho.matrix - sigma.matrix).norm();
}

/// Snapshot format: "L <n>", "d <n>", then d^L lines of "re im" in
/// row-major basis order. Full precision, for regression fixtures.
inline void save_snapshot(std::ostream& out, const PureState& state) {
  out << "L " << state.num_sites << "\n";
  out << "d " << state.local_dim << "\n";
  out.precision(17);
  for (const Complex& a : state.amplitudes) {
    out << a.real() << " " << a.imag() << "\n";
  }
}

inline PureState load_snapshot(std::istream& in) {
  std::string tag;
  PureState state;
  if (!(in >> tag) || tag != "L" || !(in >> state.num_sites)) {
    throw std::runtime_error("snapshot: missing or malformed L header");
  }
  if (!(in >> tag) || tag != "d" || !(in >> state.local_dim)) {
    throw std::runtime_error("snapshot: missing or malformed d header");
  }
  const std::int64_t dim = ipow(state.local_dim, state.num_sites);
  state.amplitudes.resize(static_cast<std::size_t>(dim));
  for (std::int64_t i = 0; i < dim; ++i) {
    double re = 0.0;
    double im = 0.0;
    if (!(in >> re >> im)) {
      throw std::runtime_error("snapshot: truncated amplitude list");
    }
    state.amplitudes[static_cast<std::size_t>(i)] = Complex(re, im);
  }
  return state;
}

inline void save_snapshot_file(const std::string& path, const PureState& state) {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("cannot open snapshot file for writing: " + path);
  }
  save_snapshot(out, state);
}

inline PureState load_snapshot_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open snapshot file: " + path);
  }
  return load_snapshot(in);
}

}  // namespace qca
