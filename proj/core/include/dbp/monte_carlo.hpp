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

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "dbp/equalize.hpp"
#include "dbp/model.hpp"

namespace dbp {

struct ExperimentConfig {
  SystemConfig system;  // N0 is ignored; each SNR point sets it from Es/N0
  ClusterPartition partition = ClusterPartition::uniform(1, 1);
  Constellation constellation = Constellation::qpsk();
  EqualizerKind kind = EqualizerKind::LMMSE;
  Architecture arch = Architecture::PD;
  LamaParams lama;
  std::vector<double> snr_db;  // Es/N0 in dB
  int trials = 1;
  std::uint64_t seed = 1;
  int workers = 0;  // 0 selects std::thread::hardware_concurrency()
  double quadrature_tol = 1e-13;

  void validate() const;
  double noise_variance(std::size_t snr_index) const;
};

struct SerPoint {
  double snr_db = 0.0;
  std::int64_t trials = 0;
  std::int64_t symbols = 0;
  std::int64_t errors = 0;
  double ser = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  double predicted_sinr = 0.0;
  double ser_predicted = 0.0;
};

struct SerResult {
  EqualizerKind kind = EqualizerKind::LMMSE;
  Architecture arch = Architecture::PD;
  int clusters = 1;
  std::vector<SerPoint> points;
};

struct WilsonInterval {
  double low = 0.0;
  double high = 0.0;
};

inline constexpr double kZ95 = 1.959963984540054;

WilsonInterval wilson_interval(std::int64_t successes, std::int64_t n, double z = kZ95);

double q_function(double x);

/// Uncoded SER of square M-QAM over complex AWGN at symbol SNR `sinr`:
/// SER = 1 - (1 - p)^2 with p = 2 (1 - 1/sqrt(M)) Q(sqrt(3 sinr / (M - 1))).
double ser_closed_form(const Constellation& constellation, double sinr);

/// Counter-based seed for (trial, SNR point); independent of execution order.
std::uint64_t child_seed(std::uint64_t master, std::uint64_t trial_index,
                         std::uint64_t snr_index);

struct TrialSample {
  ChannelRealization channel;
  SymbolVector symbols;
  CVector y;
};

/// Channel, symbols and noise of one trial. Depends only on the system,
/// partition, constellation, seed and indices, so every equalizer sees the
/// same realizations.
TrialSample sample_trial(const ExperimentConfig& config, std::size_t snr_index,
                         std::uint64_t trial_index);

/// Equalization of one received vector through the chosen architecture.
/// L-MMSE estimates come out with unit gain, ready for hard decisions.
EqualizerOutput run_pipeline(EqualizerKind kind, Architecture arch,
                             const ChannelRealization& channel, const CVector& y, double N0,
                             const Constellation& constellation, const LamaParams& lama = {});

/// Per-UE symbol-error indicators (1 = wrong decision).
std::vector<std::uint8_t> run_trial(const ExperimentConfig& config, std::size_t snr_index,
                                    std::uint64_t trial_index);

/// Large-system SINR of the configured scheme at one SNR point. LAMA uses the
/// state-evolution value after lama.max_iterations iterations.
double predicted_sinr(const ExperimentConfig& config, std::size_t snr_index);

SerResult run_experiment(const ExperimentConfig& config);

/// Columns: snr_db,equalizer,architecture,C,trials,errors,ser,ci_low,ci_high,ser_predicted
void write_ser_csv_header(std::ostream& os);
void write_ser_csv(std::ostream& os, const SerResult& result);

}  // namespace dbp
