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
#include <cstdio>
#include <exception>
#include <mutex>
#include <ostream>
#include <string>
#include <thread>

#include "dbp/asymptotics.hpp"
#include "dbp/errors.hpp"
#include "dbp/fusion.hpp"
#include "dbp/monte_carlo.hpp"

namespace dbp {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

}  // namespace

void ExperimentConfig::validate() const {
  system.validate();
  if (partition.total() != system.B) {
    throw InvalidArgument("partition covers " + std::to_string(partition.total()) +
                          " antennas but B = " + std::to_string(system.B));
  }
  if (trials < 1) throw InvalidArgument("trials must be >= 1");
  if (snr_db.empty()) throw InvalidArgument("no SNR points");
  for (double s : snr_db) {
    if (!std::isfinite(s)) throw InvalidArgument("SNR points must be finite");
  }
  if (workers < 0) throw InvalidArgument("workers must be >= 0");
  if (lama.max_iterations < 1) throw InvalidArgument("LAMA needs at least one iteration");
  if (!(lama.damping > 0.0 && lama.damping <= 1.0)) {
    throw InvalidArgument("LAMA damping must lie in (0, 1]");
  }
}

double ExperimentConfig::noise_variance(std::size_t snr_index) const {
  return system.Es / db_to_linear(snr_db.at(snr_index));
}

WilsonInterval wilson_interval(std::int64_t successes, std::int64_t n, double z) {
  if (n <= 0 || successes < 0 || successes > n) {
    throw InvalidArgument("wilson_interval needs 0 <= k <= n, n > 0");
  }
  const double nn = static_cast<double>(n);
  const double p = static_cast<double>(successes) / nn;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / nn;
  const double center = (p + z2 / (2.0 * nn)) / denom;
  const double half = z * std::sqrt(p * (1.0 - p) / nn + z2 / (4.0 * nn * nn)) / denom;
  // At the edges the exact bound is 0 or 1; the formula leaves round-off there.
  return {successes == 0 ? 0.0 : std::max(0.0, center - half),
          successes == n ? 1.0 : std::min(1.0, center + half)};
}

double q_function(double x) { return 0.5 * std::erfc(x / std::sqrt(2.0)); }

double ser_closed_form(const Constellation& constellation, double sinr) {
  if (!(sinr >= 0.0)) throw InvalidArgument("ser_closed_form needs sinr >= 0");
  const double M = static_cast<double>(constellation.size());
  const double side = static_cast<double>(constellation.side());
  if (side * side != M) throw InvalidArgument("ser_closed_form supports square QAM only");
  const double p = 2.0 * (1.0 - 1.0 / side) * q_function(std::sqrt(3.0 * sinr / (M - 1.0)));
  return p * (2.0 - p);
}

std::uint64_t child_seed(std::uint64_t master, std::uint64_t trial_index,
                         std::uint64_t snr_index) {
  return splitmix64(splitmix64(splitmix64(master) ^ trial_index) ^ (snr_index + 0x5851f42d4c957f2dULL));
}

TrialSample sample_trial(const ExperimentConfig& config, std::size_t snr_index,
                         std::uint64_t trial_index) {
  Rng rng(child_seed(config.seed, trial_index, snr_index));
  TrialSample t{sample_rayleigh_channel(config.system, config.partition, rng), {}, {}};
  t.symbols = sample_symbols(config.constellation, config.system.U, rng);
  t.y = transmit(t.channel.H, t.symbols.value, config.noise_variance(snr_index), rng);
  return t;
}

EqualizerOutput run_pipeline(EqualizerKind kind, Architecture arch,
                             const ChannelRealization& channel, const CVector& y, double N0,
                             const Constellation& constellation, const LamaParams& lama) {
  const double beta = static_cast<double>(channel.H.cols()) / static_cast<double>(channel.H.rows());
  switch (arch) {
    case Architecture::Centralized:
      return equalize(kind, centralized_stats(channel.H, y), constellation, N0, beta, lama,
                      /*unit_gain=*/true);
    case Architecture::PD: {
      const auto& p = channel.partition;
      std::vector<PartialStats> parts;
      parts.reserve(static_cast<std::size_t>(p.count()));
      for (int c = 0; c < p.count(); ++c) {
        parts.push_back(local_preprocess(channel.cluster(c), cluster_rows(y, p, c)));
      }
      return equalize(kind, fuse_partials(parts), constellation, N0, beta, lama, /*unit_gain=*/true);
    }
    case Architecture::FD:
      return fd_equalize(kind, channel, y, N0, constellation, lama);
  }
  throw InvalidArgument("unknown architecture");
}

std::vector<std::uint8_t> run_trial(const ExperimentConfig& config, std::size_t snr_index,
                                    std::uint64_t trial_index) {
  const auto t = sample_trial(config, snr_index, trial_index);
  EqualizerOutput out;
  try {
    out = run_pipeline(config.kind, config.arch, t.channel, t.y, config.noise_variance(snr_index),
                       config.constellation, config.lama);
  } catch (const Error& e) {
    throw Error("trial " + std::to_string(trial_index) + " at " +
                fmt(config.snr_db.at(snr_index)) + " dB (" + std::string(to_string(config.kind)) +
                "-" + std::string(to_string(config.arch)) + "): " + e.what());
  }
  const auto detected = hard_detect(out.z, config.constellation);
  std::vector<std::uint8_t> errors(detected.size());
  for (std::size_t u = 0; u < detected.size(); ++u) {
    errors[u] = detected[u] != t.symbols.index[u] ? 1 : 0;
  }
  return errors;
}

double predicted_sinr(const ExperimentConfig& config, std::size_t snr_index) {
  const double es_over_n0 = db_to_linear(config.snr_db.at(snr_index));
  const double beta = config.system.beta();
  const auto weights = config.partition.weights();
  if (config.kind != EqualizerKind::LAMA) {
    return asymptotic_sinr(config.kind, config.arch, config.constellation, es_over_n0, beta,
                           weights, config.quadrature_tol);
  }
  const double N0 = config.constellation.es() / es_over_n0;
  const int T = config.lama.max_iterations;
  if (config.arch != Architecture::FD) {
    const auto traj = se_trajectory(config.constellation, N0, beta, T, 1.0, config.quadrature_tol);
    return config.constellation.es() / traj.back();
  }
  double precision = 0.0;
  for (double w : weights) {
    const auto traj = se_trajectory(config.constellation, N0, beta, T, w, config.quadrature_tol);
    precision += 1.0 / traj.back();
  }
  return config.constellation.es() * precision;
}

SerResult run_experiment(const ExperimentConfig& config) {
  config.validate();
  const std::size_t n_snr = config.snr_db.size();
  const auto trials = static_cast<std::uint64_t>(config.trials);
  int workers = config.workers > 0 ? config.workers
                                   : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  workers = static_cast<int>(std::min<std::uint64_t>(static_cast<std::uint64_t>(workers), trials));

  // errors[w][snr]; integer counts make the reduction order-independent.
  std::vector<std::vector<std::int64_t>> errors(static_cast<std::size_t>(workers),
                                                std::vector<std::int64_t>(n_snr, 0));
  std::exception_ptr failure;
  std::mutex failure_mu;

  auto work = [&](int id) {
    try {
      for (std::size_t s = 0; s < n_snr; ++s) {
        for (std::uint64_t t = static_cast<std::uint64_t>(id); t < trials;
             t += static_cast<std::uint64_t>(workers)) {
          for (auto e : run_trial(config, s, t)) errors[static_cast<std::size_t>(id)][s] += e;
        }
      }
    } catch (...) {
      std::lock_guard lock(failure_mu);
      if (!failure) failure = std::current_exception();
    }
  };

  if (workers == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) pool.emplace_back(work, w);
    for (auto& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);

  SerResult result;
  result.kind = config.kind;
  result.arch = config.arch;
  result.clusters = config.partition.count();
  for (std::size_t s = 0; s < n_snr; ++s) {
    SerPoint p;
    p.snr_db = config.snr_db[s];
    p.trials = config.trials;
    p.symbols = static_cast<std::int64_t>(config.trials) * config.system.U;
    for (const auto& row : errors) p.errors += row[s];
    p.ser = static_cast<double>(p.errors) / static_cast<double>(p.symbols);
    const auto ci = wilson_interval(p.errors, p.symbols);
    p.ci_low = ci.low;
    p.ci_high = ci.high;
    p.predicted_sinr = predicted_sinr(config, s);
    p.ser_predicted = ser_closed_form(config.constellation, p.predicted_sinr);
    result.points.push_back(p);
  }
  return result;
}

void write_ser_csv_header(std::ostream& os) {
  os << "snr_db,equalizer,architecture,C,trials,errors,ser,ci_low,ci_high,ser_predicted\n";
}

void write_ser_csv(std::ostream& os, const SerResult& result) {
  for (const auto& p : result.points) {
    os << fmt(p.snr_db) << ',' << to_string(result.kind) << ',' << to_string(result.arch) << ','
       << result.clusters << ',' << p.trials << ',' << p.errors << ',' << fmt(p.ser) << ','
       << fmt(p.ci_low) << ',' << fmt(p.ci_high) << ',' << fmt(p.ser_predicted) << '\n';
  }
}

}  // namespace dbp
