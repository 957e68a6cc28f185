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

#include "dbp/asymptotics.hpp"

namespace {

using namespace dbp;

void BM_LamaPsi(benchmark::State& state) {
  const auto con = state.range(0) == 4 ? Constellation::qpsk() : Constellation::qam16();
  const auto spec = MseFunctionSpec::lama(con);
  double s2 = 0.1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(psi_mse(spec, s2));
    s2 += 1e-12;
  }
}
BENCHMARK(BM_LamaPsi)->Arg(4)->Arg(16);

void BM_LamaFixedPoint(benchmark::State& state) {
  const auto spec = MseFunctionSpec::lama(Constellation::qam16());
  for (auto _ : state) benchmark::DoNotOptimize(solve_fixed_point(spec, 0.05, 0.25));
}
BENCHMARK(BM_LamaFixedPoint);

void BM_LmmseFixedPoint(benchmark::State& state) {
  const auto spec = MseFunctionSpec::linear(EqualizerKind::LMMSE);
  for (auto _ : state) benchmark::DoNotOptimize(solve_fixed_point(spec, 0.05, 0.25));
}
BENCHMARK(BM_LmmseFixedPoint);

void BM_MutualInformation(benchmark::State& state) {
  const auto con = Constellation::qam16();
  for (auto _ : state) benchmark::DoNotOptimize(awgn_mutual_information(con, 20.0));
}
BENCHMARK(BM_MutualInformation);

void BM_MinAntennaRatio(benchmark::State& state) {
  RateSearchSpec spec;
  spec.kind = EqualizerKind::LMMSE;
  spec.target_rate = 1.99;
  for (auto _ : state) benchmark::DoNotOptimize(min_antenna_ratio(spec));
}
BENCHMARK(BM_MinAntennaRatio)->Unit(benchmark::kMillisecond);

}  // namespace
