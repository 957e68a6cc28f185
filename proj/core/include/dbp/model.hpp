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

#include <cstddef>
#include <optional>
#include <random>
#include <span>
#include <string_view>
#include <vector>

#include "dbp/types.hpp"

namespace dbp {

/// Finite symbol alphabet with a uniform prior.
///
/// Square QAM alphabets are stored with unit average energy. Symbol k maps
/// to in-phase level k / sqrt(M) and quadrature level k % sqrt(M), levels
/// ordered from most negative to most positive.
class Constellation {
 public:
  enum class Name { QPSK, QAM16, QAM64 };

  static Constellation qpsk();
  static Constellation qam16();
  static Constellation qam64();
  static Constellation make(Name name);
  // Accepts "qpsk", "16qam"/"qam16", "64qam"/"qam64".
  static std::optional<Constellation> parse(std::string_view text);

  Name name() const noexcept { return name_; }
  std::string_view label() const noexcept;
  std::size_t size() const noexcept { return symbols_.size(); }
  std::span<const cplx> symbols() const noexcept { return symbols_; }
  const cplx& operator[](std::size_t i) const { return symbols_[i]; }
  double es() const noexcept { return es_; }
  double bits() const noexcept;
  // Levels per real dimension (sqrt of the alphabet size).
  std::size_t side() const noexcept { return side_; }

 private:
  Constellation(Name name, std::size_t side);

  Name name_;
  std::size_t side_;
  std::vector<cplx> symbols_;
  double es_ = 0.0;
};

struct SystemConfig {
  int B = 1;         // BS antennas
  int U = 1;         // single-antenna UEs
  double N0 = 0.0;   // complex noise variance per receive entry
  double Es = 1.0;

  double beta() const noexcept {
    return static_cast<double>(U) / static_cast<double>(B);
  }
  void validate() const;
};

/// Contiguous row-block split of the BS array into clusters.
class ClusterPartition {
 public:
  static ClusterPartition uniform(int B, int C);
  // Throws InvalidArgument unless every w_c * B is a positive integer.
  static ClusterPartition from_weights(int B, std::span<const double> weights);
  static ClusterPartition from_sizes(std::span<const int> sizes);

  int count() const noexcept { return static_cast<int>(sizes_.size()); }
  int total() const noexcept { return total_; }
  int size(int c) const { return sizes_.at(static_cast<std::size_t>(c)); }
  int offset(int c) const { return offsets_.at(static_cast<std::size_t>(c)); }
  double weight(int c) const {
    return static_cast<double>(size(c)) / static_cast<double>(total_);
  }
  std::span<const int> sizes() const noexcept { return sizes_; }
  std::vector<double> weights() const;

 private:
  explicit ClusterPartition(std::vector<int> sizes);

  std::vector<int> sizes_;
  std::vector<int> offsets_;
  int total_ = 0;
};

struct ChannelRealization {
  CMatrix H;
  ClusterPartition partition;

  // Row block H_c.
  auto cluster(int c) const { return H.middleRows(partition.offset(c), partition.size(c)); }
};

// y_c, the rows of y belonging to cluster c.
inline auto cluster_rows(const CVector& y, const ClusterPartition& p, int c) {
  return y.segment(p.offset(c), p.size(c));
}

struct SymbolVector {
  std::vector<int> index;  // into Constellation::symbols()
  CVector value;
};

/// Seeded generator used by every sampling routine.
using Rng = std::mt19937_64;

/// i.i.d. CN(0, 1/B) entries; the partition only labels the row blocks.
ChannelRealization sample_rayleigh_channel(const SystemConfig& cfg,
                                           const ClusterPartition& partition,
                                           Rng& rng);

SymbolVector sample_symbols(const Constellation& constellation, int U, Rng& rng);

/// y = H s0 + n, n ~ CN(0, N0 I).
CVector transmit(const CMatrix& H, const CVector& s0, double N0, Rng& rng);

// One CN(0, variance) draw from two real Gaussians of variance/2 each.
cplx complex_gaussian(Rng& rng, double variance);

struct MessageVolume {
  std::uint64_t pd_bytes = 0;
  std::uint64_t fd_bytes = 0;
  std::uint64_t cs_bytes_per_iteration = 0;

  static constexpr double kBytesPerMiB = 1048576.0;
  double pd_mib() const { return static_cast<double>(pd_bytes) / kBytesPerMiB; }
  double fd_mib() const { return static_cast<double>(fd_bytes) / kBytesPerMiB; }
  double cs_mib() const {
    return static_cast<double>(cs_bytes_per_iteration) / kBytesPerMiB;
  }
};

/// Fusion traffic for one OFDM packet of N_sc subcarriers and N_sym symbols.
/// PD ships every local Gram matrix once per subcarrier plus one MRC vector per
/// (subcarrier, symbol); FD ships only local estimates; consensus sharing
/// doubles FD traffic on every iteration.
MessageVolume message_volume(std::uint64_t U, std::uint64_t n_subcarriers,
                             std::uint64_t n_symbols, std::uint64_t C,
                             std::uint64_t bytes_per_entry = 8);

}  // namespace dbp
