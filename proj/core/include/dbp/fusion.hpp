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

#include "dbp/equalize.hpp"
#include "dbp/model.hpp"

namespace dbp {

struct ClusterOutput {
  int cluster_id = 0;
  CVector z;
  RVector sigma2;
};

/// Equalizes one cluster from its local (H_c, y_c) only.
///
/// Linear equalizers run on the raw local statistics, L-MMSE in its unit-gain
/// form so that every cluster reports z_c = s + e_c. LAMA first rescales the
/// local system by 1/sqrt(w_c), where w_c = cluster_fraction is the share of
/// BS antennas held by the cluster, so the columns of the local channel have
/// unit expected energy; it then runs with noise N0 / w_c and ratio U / B_c.
/// For C = 1 (w_c = 1) this is exactly the PD/centralized equalizer.
///
/// Throws SingularGram for ZF on an underdetermined cluster (B_c < U).
ClusterOutput cluster_equalize(EqualizerKind kind, const Eigen::Ref<const CMatrix>& H_c,
                               const Eigen::Ref<const CVector>& y_c, double N0,
                               const Constellation& constellation,
                               const LamaParams& lama = {}, double cluster_fraction = 1.0,
                               int cluster_id = 0);

/// Inverse-variance weights, nu(c, u) = (1/s2(c,u)) / sum_c' (1/s2(c',u)).
struct FusionWeights {
  RMatrix nu;  // C x U
};

// Variances below this are raised to it before inversion.
inline constexpr double kVarianceFloor = 1e-15;

/// sigma2 is C x U. Throws InvalidArgument on zero, negative or non-finite
/// variances.
FusionWeights optimal_fusion_weights(const RMatrix& sigma2);

/// Stacks per-cluster variance vectors into the C x U matrix expected above.
RMatrix stack_variances(std::span<const ClusterOutput> outputs);

/// z_u = sum_c nu(c,u) z_{c,u}; the fused variance is (sum_c 1/s2(c,u))^-1.
EqualizerOutput fuse_estimates(std::span<const ClusterOutput> outputs,
                               const FusionWeights& weights);

/// Runs cluster_equalize over every block of the partition and fuses the
/// results with optimal weights.
EqualizerOutput fd_equalize(EqualizerKind kind, const ChannelRealization& channel,
                            const CVector& y, double N0, const Constellation& constellation,
                            const LamaParams& lama = {});

}  // namespace dbp
