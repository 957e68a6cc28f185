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


#include <benchmark/benchmark.h>

#include "dbp/equalize.hpp"
#include "dbp/fusion.hpp"
#include "dbp/model.hpp"

namespace {

using namespace dbp;

struct Setup {
  ChannelRealization channel;
  CVector y;
  double N0 = 0.05;
};

Setup make_setup(int B, int U, int C) {
  SystemConfig cfg{B, U, 0.05, 1.0};
  Rng rng(1);
  Setup s{sample_rayleigh_channel(cfg, ClusterPartition::uniform(B, C), rng), {}, 0.05};
  s.y = transmit(s.channel.H, sample_symbols(Constellation::qam16(), U, rng).value, s.N0, rng);
  return s;
}

void BM_PartialStats(benchmark::State& state) {
  const auto s = make_setup(256, static_cast<int>(state.range(0)), 8);
  const auto& p = s.channel.partition;
  for (auto _ : state) {
    std::vector<PartialStats> parts;
    for (int c = 0; c < p.count(); ++c)
      parts.push_back(local_preprocess(s.channel.cluster(c), cluster_rows(s.y, p, c)));
    benchmark::DoNotOptimize(fuse_partials(parts));
  }
}
BENCHMARK(BM_PartialStats)->Arg(8)->Arg(16)->Arg(32);

void BM_PdEqualize(benchmark::State& state) {
  const auto kind = static_cast<EqualizerKind>(state.range(0));
  const auto s = make_setup(256, 16, 8);
  const auto fused = centralized_stats(s.channel.H, s.y);
  const auto con = Constellation::qam16();
  for (auto _ : state) {
    benchmark::DoNotOptimize(equalize(kind, fused, con, s.N0, 16.0 / 256.0));
  }
  state.SetLabel(std::string(to_string(kind)));
}
BENCHMARK(BM_PdEqualize)->DenseRange(0, 3);

void BM_FdEqualize(benchmark::State& state) {
  const auto kind = static_cast<EqualizerKind>(state.range(0));
  const auto s = make_setup(256, 16, 8);
  const auto con = Constellation::qam16();
  for (auto _ : state) {
    benchmark::DoNotOptimize(fd_equalize(kind, s.channel, s.y, s.N0, con));
  }
  state.SetLabel(std::string(to_string(kind)));
}
BENCHMARK(BM_FdEqualize)->DenseRange(0, 3);

void BM_PosteriorStats(benchmark::State& state) {
  const auto con = state.range(0) == 4 ? Constellation::qpsk() : Constellation::qam64();
  cplx z{0.1, -0.3};
  for (auto _ : state) {
    benchmark::DoNotOptimize(posterior_stats(z, 0.2, con));
    z += cplx{1e-9, 0.0};
  }
}
BENCHMARK(BM_PosteriorStats)->Arg(4)->Arg(64);

}  // namespace
