// Copyright 2026 The dbp Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


// Reference implementations used as independent oracles by the tests. None of
// them calls into Eigen's decompositions or the library's equalizers.

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

#include "dbp/equalize.hpp"
#include "dbp/model.hpp"

namespace dbp::testing {

using Dense = std::vector<std::vector<cplx>>;

inline Dense to_dense(const CMatrix& m) {
  Dense d(static_cast<std::size_t>(m.rows()), std::vector<cplx>(static_cast<std::size_t>(m.cols())));
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) d[i][j] = m(i, j);
  return d;
}

// A^H B by explicit triple loop.
inline Dense naive_adjoint_product(const Dense& a, const Dense& b) {
  const std::size_t rows = a.size(), n = a.empty() ? 0 : a[0].size(), m = b.empty() ? 0 : b[0].size();
  Dense out(n, std::vector<cplx>(m, cplx{0.0, 0.0}));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < m; ++j)
      for (std::size_t k = 0; k < rows; ++k) out[i][j] += std::conj(a[k][i]) * b[k][j];
  return out;
}

inline std::vector<cplx> naive_adjoint_vector(const Dense& a, const std::vector<cplx>& y) {
  const std::size_t n = a.empty() ? 0 : a[0].size();
  std::vector<cplx> out(n, cplx{0.0, 0.0});
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < a.size(); ++k) out[i] += std::conj(a[k][i]) * y[k];
  return out;
}

// Solves A X = B by Gauss-Jordan elimination with partial pivoting.
inline Dense gauss_solve(Dense a, Dense b) {
  const std::size_t n = a.size();
  const std::size_t m = b.empty() ? 0 : b[0].size();
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < n; ++r)
      if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
    if (std::abs(a[piv][col]) == 0.0) throw std::runtime_error("singular");
    std::swap(a[col], a[piv]);
    std::swap(b[col], b[piv]);
    const cplx inv = 1.0 / a[col][col];
    for (std::size_t j = 0; j < n; ++j) a[col][j] *= inv;
    for (std::size_t j = 0; j < m; ++j) b[col][j] *= inv;
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col) continue;
      const cplx f = a[r][col];
      if (f == cplx{0.0, 0.0}) continue;
      for (std::size_t j = 0; j < n; ++j) a[r][j] -= f * a[col][j];
      for (std::size_t j = 0; j < m; ++j) b[r][j] -= f * b[col][j];
    }
  }
  return b;
}

inline Dense identity(std::size_t n) {
  Dense d(n, std::vector<cplx>(n, cplx{0.0, 0.0}));
  for (std::size_t i = 0; i < n; ++i) d[i][i] = 1.0;
  return d;
}

inline Dense inverse(const Dense& a) { return gauss_solve(a, identity(a.size())); }

inline std::vector<cplx> solve_vector(const Dense& a, const std::vector<cplx>& b) {
  Dense rhs(b.size(), std::vector<cplx>(1));
  for (std::size_t i = 0; i < b.size(); ++i) rhs[i][0] = b[i];
  const auto x = gauss_solve(a, rhs);
  std::vector<cplx> out(b.size());
  for (std::size_t i = 0; i < b.size(); ++i) out[i] = x[i][0];
  return out;
}

inline CMatrix random_complex_matrix(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed,
                                     double variance = 1.0) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n(0.0, std::sqrt(variance / 2.0));
  CMatrix m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m(i) = cplx{n(rng), n(rng)};
  return m;
}

inline CVector random_complex_vector(Eigen::Index n, std::uint64_t seed) {
  return random_complex_matrix(n, 1, seed).col(0);
}

/// LAMA written directly on (y, H): r is the residual and tau = beta phi / N0.
/// Returns z^t and phi^t for t = 1..T.
struct CentralizedLamaTrace {
  std::vector<CVector> z;
  std::vector<double> phi;
};

inline CentralizedLamaTrace centralized_lama(const CMatrix& H, const CVector& y, double N0,
                                             const Constellation& constellation, int T) {
  const double beta = static_cast<double>(H.cols()) / static_cast<double>(H.rows());
  const Eigen::Index U = H.cols();
  CentralizedLamaTrace trace;
  CVector s = CVector::Zero(U);
  CVector r = y;
  double tau = beta * constellation.es() / N0;
  for (int t = 1; t <= T; ++t) {
    CVector z = s;
    for (Eigen::Index u = 0; u < U; ++u)
      for (Eigen::Index b = 0; b < H.rows(); ++b) z(u) += std::conj(H(b, u)) * r(b);
    trace.z.push_back(z);
    trace.phi.push_back(N0 * tau / beta);
    double g = 0.0;
    for (Eigen::Index u = 0; u < U; ++u) {
      // Posterior moments by plain summation with a max shift.
      const double var = N0 * (1.0 + tau);
      double best = -1e300;
      for (const auto& a : constellation.symbols()) best = std::max(best, -std::norm(z(u) - a) / var);
      cplx num{0.0, 0.0};
      double den = 0.0, second = 0.0;
      for (const auto& a : constellation.symbols()) {
        const double p = std::exp(-std::norm(z(u) - a) / var - best);
        num += p * a;
        den += p;
        second += p * std::norm(a);
      }
      s(u) = num / den;
      g += second / den - std::norm(s(u));
    }
    const double tau_next = beta / N0 * g / static_cast<double>(U);
    CVector hs = CVector::Zero(H.rows());
    for (Eigen::Index b = 0; b < H.rows(); ++b)
      for (Eigen::Index u = 0; u < U; ++u) hs(b) += H(b, u) * s(u);
    r = y - hs + (tau_next / (1.0 + tau)) * r;
    tau = tau_next;
  }
  return trace;
}

/// Random unit-sum weights with every entry at least `floor`.
inline std::vector<double> random_weights(std::mt19937_64& rng, int C, double floor = 0.0) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<double> w(static_cast<std::size_t>(C));
  double sum = 0.0;
  for (auto& x : w) sum += (x = unif(rng));
  const double spare = 1.0 - C * floor;
  double acc = 0.0;
  for (std::size_t c = 0; c + 1 < w.size(); ++c) acc += (w[c] = floor + spare * w[c] / sum);
  w.back() = 1.0 - acc;
  return w;
}

inline double max_abs_diff(const CVector& a, const CVector& b) {
  return (a - b).cwiseAbs().maxCoeff();
}

}  // namespace dbp::testing
