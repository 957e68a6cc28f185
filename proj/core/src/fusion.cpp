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

#include <algorithm>
#include <cmath>
#include <string>

#include "dbp/errors.hpp"
#include "dbp/fusion.hpp"

namespace dbp {

ClusterOutput cluster_equalize(EqualizerKind kind, const Eigen::Ref<const CMatrix>& H_c,
                               const Eigen::Ref<const CVector>& y_c, double N0,
                               const Constellation& constellation, const LamaParams& lama,
                               double cluster_fraction, int cluster_id) {
  const Eigen::Index B_c = H_c.rows();
  const Eigen::Index U = H_c.cols();
  if (kind == EqualizerKind::ZF && B_c < U) {
    throw SingularGram("ZF in cluster " + std::to_string(cluster_id) + ": " +
                       std::to_string(B_c) + " antennas cannot separate " +
                       std::to_string(U) + " UEs");
  }
  if (!(cluster_fraction > 0.0 && cluster_fraction <= 1.0)) {
    throw InvalidArgument("cluster_fraction must lie in (0, 1]");
  }

  auto local = local_preprocess(H_c, y_c);
  FusedStats stats{std::move(local.gram), std::move(local.mrc)};

  ClusterOutput out;
  out.cluster_id = cluster_id;
  if (kind == EqualizerKind::LAMA) {
    const double w = cluster_fraction;
    stats.gram /= w;
    stats.mrc /= w;
    const double beta_c = static_cast<double>(U) / static_cast<double>(B_c);
    auto res = lama_equalize(stats, constellation, N0 / w, beta_c, lama);
    out.z = std::move(res.output.z);
    out.sigma2 = std::move(res.output.sigma2);
  } else {
    auto res = linear_equalize(kind, stats, N0, constellation.es(), /*unit_gain=*/true);
    out.z = std::move(res.z);
    out.sigma2 = std::move(res.sigma2);
  }
  return out;
}

FusionWeights optimal_fusion_weights(const RMatrix& sigma2) {
  if (sigma2.rows() == 0 || sigma2.cols() == 0) {
    throw InvalidArgument("optimal_fusion_weights: empty variance matrix");
  }
  FusionWeights w;
  w.nu.resize(sigma2.rows(), sigma2.cols());
  for (Eigen::Index u = 0; u < sigma2.cols(); ++u) {
    double total = 0.0;
    for (Eigen::Index c = 0; c < sigma2.rows(); ++c) {
      const double s2 = sigma2(c, u);
      if (!std::isfinite(s2) || !(s2 > 0.0)) {
        throw InvalidArgument("fusion needs positive finite variances; cluster " +
                              std::to_string(c) + ", UE " + std::to_string(u) + " has " +
                              std::to_string(s2));
      }
      w.nu(c, u) = 1.0 / std::max(s2, kVarianceFloor);
      total += w.nu(c, u);
    }
    w.nu.col(u) /= total;
  }
  return w;
}

RMatrix stack_variances(std::span<const ClusterOutput> outputs) {
  if (outputs.empty()) throw InvalidArgument("no cluster outputs");
  const Eigen::Index U = outputs.front().sigma2.size();
  RMatrix s2(static_cast<Eigen::Index>(outputs.size()), U);
  for (std::size_t c = 0; c < outputs.size(); ++c) {
    if (outputs[c].sigma2.size() != U) {
      throw DimensionMismatch("cluster outputs disagree on the number of UEs");
    }
    s2.row(static_cast<Eigen::Index>(c)) = outputs[c].sigma2.transpose();
  }
  return s2;
}

EqualizerOutput fuse_estimates(std::span<const ClusterOutput> outputs,
                               const FusionWeights& weights) {
  if (outputs.empty()) throw InvalidArgument("fuse_estimates: no cluster outputs");
  const auto C = static_cast<Eigen::Index>(outputs.size());
  const Eigen::Index U = outputs.front().z.size();
  if (weights.nu.rows() != C || weights.nu.cols() != U) {
    throw DimensionMismatch("fusion weights are " + std::to_string(weights.nu.rows()) + "x" +
                            std::to_string(weights.nu.cols()) + ", expected " +
                            std::to_string(C) + "x" + std::to_string(U));
  }
  EqualizerOutput out;
  out.z = CVector::Zero(U);
  RVector precision = RVector::Zero(U);
  for (Eigen::Index c = 0; c < C; ++c) {
    const auto& o = outputs[static_cast<std::size_t>(c)];
    if (o.z.size() != U || o.sigma2.size() != U) {
      throw DimensionMismatch("cluster " + std::to_string(o.cluster_id) +
                              " output has the wrong length");
    }
    for (Eigen::Index u = 0; u < U; ++u) {
      out.z(u) += weights.nu(c, u) * o.z(u);
      precision(u) += 1.0 / std::max(o.sigma2(u), kVarianceFloor);
    }
  }
  out.sigma2 = precision.cwiseInverse();
  return out;
}

EqualizerOutput fd_equalize(EqualizerKind kind, const ChannelRealization& channel,
                            const CVector& y, double N0, const Constellation& constellation,
                            const LamaParams& lama) {
  const auto& p = channel.partition;
  if (y.size() != channel.H.rows()) throw DimensionMismatch("y does not match H");
  std::vector<ClusterOutput> outputs;
  outputs.reserve(static_cast<std::size_t>(p.count()));
  for (int c = 0; c < p.count(); ++c) {
    outputs.push_back(cluster_equalize(kind, channel.cluster(c), cluster_rows(y, p, c), N0,
                                       constellation, lama, p.weight(c), c));
  }
  auto fused = fuse_estimates(outputs, optimal_fusion_weights(stack_variances(outputs)));
  fused.kind = kind;
  return fused;
}

}  // namespace dbp
