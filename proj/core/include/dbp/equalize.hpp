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

#pragma once

#include <span>
#include <vector>

#include "dbp/model.hpp"
#include "dbp/types.hpp"

namespace dbp {

/// Per-cluster sufficient statistics: G_c = H_c^H H_c and y_c^mrc = H_c^H y_c.
struct PartialStats {
  CMatrix gram;
  CVector mrc;
};

/// Sum of all partial statistics, i.e. the full Gram matrix and MRC vector.
struct FusedStats {
  CMatrix gram;
  CVector mrc;

  Eigen::Index users() const noexcept { return mrc.size(); }
};

struct EqualizerOutput {
  CVector z;
  RVector sigma2;  // per-UE post-equalization error variance
  EqualizerKind kind = EqualizerKind::MRC;
};

PartialStats local_preprocess(const Eigen::Ref<const CMatrix>& H_c,
                              const Eigen::Ref<const CVector>& y_c);

/// Adder tree over the cluster contributions. Throws InvalidArgument on an
/// empty list and DimensionMismatch when the parts disagree on U.
FusedStats fuse_partials(std::span<const PartialStats> parts);

/// Unpartitioned preprocessing (the centralized path).
inline FusedStats centralized_stats(const CMatrix& H, const CVector& y) {
  auto p = local_preprocess(H, y);
  return FusedStats{std::move(p.gram), std::move(p.mrc)};
}

/// MRC, ZF or L-MMSE on fused statistics, with the exact finite-dimensional
/// error-variance vectors. L-MMSE regularizes with rho = N0 / Es.
///
/// MRC and ZF already have unit gain on the wanted symbol. The L-MMSE estimate
/// is shrunk by mu_u = ((G + rho I)^-1 G)_uu; with unit_gain set, each entry is
/// divided by mu_u and the variance reports only noise plus interference from
/// the other UEs. That is the form z_u = s_u + e_u used by hard decisions and
/// by estimate fusion.
///
/// Throws SingularGram when ZF meets a (numerically) singular Gram matrix or
/// MRC meets a zero diagonal entry, and NegativeVariance if an error variance
/// comes out below zero beyond round-off.
EqualizerOutput linear_equalize(EqualizerKind kind, const FusedStats& fused, double N0,
                                double Es, bool unit_gain = false);

struct PosteriorStats {
  cplx mean;
  double variance;
};

/// Mean and variance of s given z = s + CN(0, tau) under a uniform prior on
/// the constellation. Weights are formed in the log domain.
PosteriorStats posterior_stats(cplx z, double tau, const Constellation& constellation);

struct LamaParams {
  int max_iterations = 10;
  // Mean damping; 1 is undamped. 0.75 works well on correlated finite channels.
  double damping = 1.0;
};

struct LamaTrace {
  std::vector<CVector> z;    // z^t, t = 1..T
  std::vector<double> phi;   // phi^t, t = 1..T
};

struct LamaResult {
  EqualizerOutput output;
  LamaTrace trace;
};

/// LAMA on the fused MRC vector and Gram matrix:
///
///   z^t     = y_mrc + (I - G) s^t + v^t
///   s^{t+1} = F(z^t, N0 + beta phi^t)
///   phi^{t+1} = < G(z^t, N0 + beta phi^t) >
///   v^{t+1} = beta phi^{t+1} / (N0 + beta phi^t) (z^t - s^t)
///
/// starting from s = E[S], v = 0, phi = Var[S]. Returns z^T with error
/// variance N0 + beta phi^T on every entry. Throws Divergence if an iterate
/// becomes non-finite.
LamaResult lama_equalize(const FusedStats& fused, const Constellation& constellation,
                         double N0, double beta, const LamaParams& params = {});

/// Dispatches to linear_equalize or lama_equalize.
EqualizerOutput equalize(EqualizerKind kind, const FusedStats& fused,
                         const Constellation& constellation, double N0, double beta,
                         const LamaParams& lama = {}, bool unit_gain = false);

/// Nearest constellation point per entry; ties go to the lowest index.
std::vector<int> hard_detect(const CVector& z, const Constellation& constellation);

}  // namespace dbp
