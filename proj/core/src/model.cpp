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

#include <cmath>
#include <numeric>
#include <string>

#include "dbp/errors.hpp"
#include "dbp/model.hpp"

namespace dbp {

void SystemConfig::validate() const {
  if (B < 1 || U < 1) throw InvalidArgument("B and U must be at least 1");
  if (!(N0 >= 0.0) || !std::isfinite(N0)) throw InvalidArgument("N0 must be finite and >= 0");
  if (!(Es > 0.0)) throw InvalidArgument("Es must be positive");
}

ClusterPartition::ClusterPartition(std::vector<int> sizes) : sizes_(std::move(sizes)) {
  if (sizes_.empty()) throw InvalidArgument("partition needs at least one cluster");
  offsets_.reserve(sizes_.size());
  for (int s : sizes_) {
    if (s < 1) throw InvalidArgument("every cluster needs at least one antenna");
    offsets_.push_back(total_);
    total_ += s;
  }
}

ClusterPartition ClusterPartition::uniform(int B, int C) {
  if (C < 1 || B < 1) throw InvalidArgument("uniform partition needs B, C >= 1");
  if (B % C != 0) {
    throw InvalidArgument("B = " + std::to_string(B) + " is not divisible into " +
                          std::to_string(C) + " equal clusters");
  }
  return ClusterPartition(std::vector<int>(static_cast<std::size_t>(C), B / C));
}

ClusterPartition ClusterPartition::from_weights(int B, std::span<const double> weights) {
  if (weights.empty()) throw InvalidArgument("empty weight vector");
  const double sum = std::accumulate(weights.begin(), weights.end(), 0.0);
  if (std::abs(sum - 1.0) > 1e-12) {
    throw InvalidArgument("cluster weights must sum to 1");
  }
  std::vector<int> sizes;
  sizes.reserve(weights.size());
  for (double w : weights) {
    const double exact = w * static_cast<double>(B);
    const double rounded = std::round(exact);
    if (std::abs(exact - rounded) > 1e-9 || rounded < 1.0) {
      throw InvalidArgument("w_c * B = " + std::to_string(exact) +
                            " is not a positive integer");
    }
    sizes.push_back(static_cast<int>(rounded));
  }
  ClusterPartition p(std::move(sizes));
  if (p.total() != B) throw InvalidArgument("cluster sizes do not add up to B");
  return p;
}

ClusterPartition ClusterPartition::from_sizes(std::span<const int> sizes) {
  return ClusterPartition(std::vector<int>(sizes.begin(), sizes.end()));
}

std::vector<double> ClusterPartition::weights() const {
  std::vector<double> w;
  w.reserve(sizes_.size());
  for (int c = 0; c < count(); ++c) w.push_back(weight(c));
  return w;
}

cplx complex_gaussian(Rng& rng, double variance) {
  std::normal_distribution<double> normal(0.0, std::sqrt(variance / 2.0));
  const double re = normal(rng);
  const double im = normal(rng);
  return {re, im};
}

ChannelRealization sample_rayleigh_channel(const SystemConfig& cfg,
                                           const ClusterPartition& partition,
                                           Rng& rng) {
  if (cfg.B < 1 || cfg.U < 1) throw InvalidArgument("B and U must be at least 1");
  if (partition.total() != cfg.B) {
    throw DimensionMismatch("partition covers " + std::to_string(partition.total()) +
                            " antennas, system has " + std::to_string(cfg.B));
  }
  const double variance = 1.0 / static_cast<double>(cfg.B);
  std::normal_distribution<double> normal(0.0, std::sqrt(variance / 2.0));
  CMatrix H(cfg.B, cfg.U);
  // Column-major fill; the order is part of the seed contract.
  for (Eigen::Index j = 0; j < H.cols(); ++j) {
    for (Eigen::Index i = 0; i < H.rows(); ++i) {
      const double re = normal(rng);
      const double im = normal(rng);
      H(i, j) = cplx(re, im);
    }
  }
  return ChannelRealization{std::move(H), partition};
}

SymbolVector sample_symbols(const Constellation& constellation, int U, Rng& rng) {
  if (U < 1) throw InvalidArgument("U must be at least 1");
  std::uniform_int_distribution<int> pick(0, static_cast<int>(constellation.size()) - 1);
  SymbolVector out;
  out.index.resize(static_cast<std::size_t>(U));
  out.value.resize(U);
  for (int u = 0; u < U; ++u) {
    const int k = pick(rng);
    out.index[static_cast<std::size_t>(u)] = k;
    out.value(u) = constellation[static_cast<std::size_t>(k)];
  }
  return out;
}

CVector transmit(const CMatrix& H, const CVector& s0, double N0, Rng& rng) {
  if (H.cols() != s0.size()) {
    throw DimensionMismatch("H has " + std::to_string(H.cols()) + " columns but s0 has " +
                            std::to_string(s0.size()) + " entries");
  }
  if (!(N0 >= 0.0)) throw InvalidArgument("N0 must be >= 0");
  CVector y = H * s0;
  if (N0 > 0.0) {
    std::normal_distribution<double> normal(0.0, std::sqrt(N0 / 2.0));
    for (Eigen::Index i = 0; i < y.size(); ++i) {
      const double re = normal(rng);
      const double im = normal(rng);
      y(i) += cplx(re, im);
    }
  }
  return y;
}

MessageVolume message_volume(std::uint64_t U, std::uint64_t n_subcarriers,
                             std::uint64_t n_symbols, std::uint64_t C,
                             std::uint64_t bytes_per_entry) {
  if (U == 0 || n_subcarriers == 0 || n_symbols == 0 || C == 0 || bytes_per_entry == 0) {
    throw InvalidArgument("message_volume inputs must be positive");
  }
  const std::uint64_t gram_entries = U * U * n_subcarriers * C;
  const std::uint64_t estimate_entries = U * n_subcarriers * n_symbols * C;
  MessageVolume v;
  v.pd_bytes = (gram_entries + estimate_entries) * bytes_per_entry;
  v.fd_bytes = estimate_entries * bytes_per_entry;
  v.cs_bytes_per_iteration = 2 * v.fd_bytes;
  return v;
}

}  // namespace dbp
