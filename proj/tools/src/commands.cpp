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


#include "dbp/cli/commands.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "dbp/asymptotics.hpp"
#include "dbp/errors.hpp"
#include "dbp/model.hpp"
#include "dbp/monte_carlo.hpp"

namespace dbp::cli {

namespace {

// A numerical failure at a named grid point.
class PointFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

std::string error_kind(const Error& e) {
  if (dynamic_cast<const InvalidRegime*>(&e)) return "InvalidRegime";
  if (dynamic_cast<const Infeasible*>(&e)) return "Infeasible";
  if (dynamic_cast<const NonConvergence*>(&e)) return "NonConvergence";
  if (dynamic_cast<const Divergence*>(&e)) return "Divergence";
  if (dynamic_cast<const SingularGram*>(&e)) return "SingularGram";
  if (dynamic_cast<const NegativeVariance*>(&e)) return "NegativeVariance";
  if (dynamic_cast<const DimensionMismatch*>(&e)) return "DimensionMismatch";
  if (dynamic_cast<const InvalidArgument*>(&e)) return "InvalidArgument";
  return "Error";
}

std::string join(const std::vector<double>& v, char sep = ';') {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += sep;
    s += num(v[i]);
  }
  return s;
}

double finite_or_throw(double v, const std::string& what) {
  if (!std::isfinite(v)) throw PointFailure(what + ": non-finite result");
  return v;
}

std::ofstream open_output(const RunOptions& options, const std::string& file) {
  std::filesystem::create_directories(options.out_dir);
  const auto path = options.out_dir / file;
  std::ofstream os(path, std::ios::binary);
  if (!os) throw ConfigError("cannot write '" + path.string() + "'");
  return os;
}

Constellation read_constellation(ConfigReader& r) {
  const auto text = r.text_or("system", "constellation", "qpsk");
  const auto c = Constellation::parse(text);
  if (!c) r.fail("system", "constellation", "unknown constellation '" + text + "'");
  return *c;
}

std::vector<EqualizerKind> read_kinds(ConfigReader& r) {
  const auto words = r.words("equalizer", "kinds").value_or(
      std::vector<std::string>{"mrc", "zf", "lmmse", "lama"});
  std::vector<EqualizerKind> kinds;
  for (const auto& w : words) {
    const auto k = parse_equalizer_kind(w);
    if (!k) r.fail("equalizer", "kinds", "unknown equalizer '" + w + "'");
    kinds.push_back(*k);
  }
  return kinds;
}

std::vector<Architecture> read_architectures(ConfigReader& r) {
  const auto words =
      r.words("equalizer", "architectures").value_or(std::vector<std::string>{"pd", "fd"});
  std::vector<Architecture> archs;
  for (const auto& w : words) {
    const auto a = parse_architecture(w);
    if (!a) r.fail("equalizer", "architectures", "unknown architecture '" + w + "'");
    archs.push_back(*a);
  }
  return archs;
}

// Cluster fractions for the analysis commands: either `clusters` (uniform)
// or an explicit `weights` list.
std::vector<double> read_weights(ConfigReader& r) {
  const auto clusters = r.integer("partition", "clusters");
  const auto weights = r.reals("partition", "weights");
  if (weights) {
    if (clusters && *clusters != static_cast<std::int64_t>(weights->size())) {
      r.fail("partition", "clusters", "disagrees with the length of partition.weights");
    }
    double sum = 0.0;
    for (double w : *weights) {
      if (w < 0.0) r.fail("partition", "weights", "weights must be >= 0");
      sum += w;
    }
    if (std::abs(sum - 1.0) > 1e-12) r.fail("partition", "weights", "weights must sum to 1");
    return *weights;
  }
  const auto C = clusters.value_or(1);
  if (C < 1 || C > 4096) r.fail("partition", "clusters", "must lie in [1, 4096]");
  return std::vector<double>(static_cast<std::size_t>(C), 1.0 / static_cast<double>(C));
}

std::vector<double> required_reals(ConfigReader& r, const std::string& section,
                                   const std::string& key) {
  auto v = r.reals(section, key);
  if (!v) throw ConfigError(section + "." + key + " is required");
  return *v;
}

std::string weights_label(Architecture arch, const std::vector<double>& w) {
  return arch == Architecture::FD ? join(w) : std::string("1");
}

}  // namespace

void analyze(const ConfigFile& config, const RunOptions& options, std::ostream& out) {
  ConfigReader r(config);
  const auto constellation = read_constellation(r);
  const auto kinds = read_kinds(r);
  const auto archs = read_architectures(r);
  const auto weights = read_weights(r);
  const auto betas = required_reals(r, "sweep", "beta");
  const auto snrs = required_reals(r, "sweep", "es_over_n0_db");
  const auto file = r.text_or("output", "file", "analyze.csv");
  for (double b : betas) {
    if (!(b > 0.0) || b > 16.0) r.fail("sweep", "beta", "values must lie in (0, 16]");
  }
  r.finish();

  std::ostringstream csv;
  csv << "beta,es_over_n0_db,equalizer,architecture,weights,sinr,sinr_db,sigma2,cluster_sinr\n";
  const double Es = constellation.es();
  for (double beta : betas) {
    for (double snr_db : snrs) {
      const double alpha = db_to_linear(snr_db);
      for (auto kind : kinds) {
        const auto spec = kind == EqualizerKind::LAMA ? MseFunctionSpec::lama(constellation)
                                                      : MseFunctionSpec::linear(kind, Es);
        for (auto arch : archs) {
          const std::string point = "beta=" + num(beta) + " es_over_n0_db=" + num(snr_db) +
                                    " " + std::string(to_string(kind)) + "/" +
                                    std::string(to_string(arch));
          double sinr = 0.0;
          std::vector<double> cluster_sinr;
          try {
            if (arch == Architecture::FD) {
              const auto fd = sinr_fd(spec, alpha, beta, weights);
              sinr = fd.sinr;
              cluster_sinr = fd.cluster_sinr;
            } else {
              sinr = asymptotic_sinr(kind, arch, constellation, alpha, beta, weights);
              cluster_sinr = {sinr};
            }
          } catch (const Error& e) {
            throw PointFailure(point + ": " + error_kind(e) + ": " + e.what());
          }
          finite_or_throw(sinr, point);
          csv << num(beta) << ',' << num(snr_db) << ',' << to_string(kind) << ','
              << to_string(arch) << ',' << weights_label(arch, weights) << ',' << num(sinr)
              << ',' << num(finite_or_throw(linear_to_db(sinr), point)) << ','
              << num(Es / sinr) << ',' << join(cluster_sinr) << '\n';
        }
      }
    }
  }
  auto os = open_output(options, file);
  os << csv.str();
  out << "analyze: " << betas.size() * snrs.size() * kinds.size() * archs.size()
      << " rows written to " << (options.out_dir / file).string() << '\n';
}

void simulate(const ConfigFile& config, const RunOptions& options, std::ostream& out) {
  ConfigReader r(config);
  ExperimentConfig base;
  base.system.B = static_cast<int>(r.integer_or("system", "B", 256));
  base.system.U = static_cast<int>(r.integer_or("system", "U", 16));
  base.constellation = read_constellation(r);
  base.system.Es = base.constellation.es();
  if (base.system.B < 1 || base.system.U < 1) r.fail("system", "B", "B and U must be >= 1");

  const auto clusters = r.integer("partition", "clusters");
  const auto sizes = r.reals("partition", "sizes");
  try {
    if (sizes) {
      std::vector<int> s;
      for (double v : *sizes) {
        if (v != std::floor(v) || v < 1.0) r.fail("partition", "sizes", "sizes must be positive integers");
        s.push_back(static_cast<int>(v));
      }
      base.partition = ClusterPartition::from_sizes(s);
      if (base.partition.total() != base.system.B) {
        r.fail("partition", "sizes", "sizes must sum to system.B");
      }
    } else {
      base.partition = ClusterPartition::uniform(base.system.B, static_cast<int>(clusters.value_or(1)));
    }
  } catch (const InvalidArgument& e) {
    r.fail("partition", sizes ? "sizes" : "clusters", e.what());
  }
  if (sizes && clusters && *clusters != static_cast<std::int64_t>(sizes->size())) {
    r.fail("partition", "clusters", "disagrees with the length of partition.sizes");
  }

  const auto kinds = read_kinds(r);
  const auto archs = read_architectures(r);
  base.lama.max_iterations = static_cast<int>(r.integer_or("equalizer", "lama_iterations", 10));
  base.lama.damping = r.real_or("equalizer", "damping", 1.0);
  if (base.lama.max_iterations < 1) r.fail("equalizer", "lama_iterations", "must be >= 1");
  if (!(base.lama.damping > 0.0 && base.lama.damping <= 1.0)) {
    r.fail("equalizer", "damping", "must lie in (0, 1]");
  }

  base.snr_db = required_reals(r, "sweep", "snr_db");
  const auto trials = r.integer("sweep", "trials");
  if (!trials) throw ConfigError("sweep.trials is required");
  if (*trials < 1 || *trials > 100000000) r.fail("sweep", "trials", "must lie in [1, 1e8]");
  base.trials = static_cast<int>(*trials);
  const auto seed = r.integer_or("sweep", "seed", 1);
  if (seed < 0) r.fail("sweep", "seed", "must be >= 0");
  base.seed = options.seed.value_or(static_cast<std::uint64_t>(seed));
  const auto workers = r.integer_or("sweep", "workers", 0);
  if (workers < 0) r.fail("sweep", "workers", "must be >= 0");
  base.workers = options.workers.value_or(static_cast<int>(workers));
  const auto file = r.text_or("output", "file", "ser.csv");
  r.finish();

  std::ostringstream csv;
  write_ser_csv_header(csv);
  for (auto kind : kinds) {
    for (auto arch : archs) {
      auto cfg = base;
      cfg.kind = kind;
      cfg.arch = arch;
      SerResult result;
      try {
        result = run_experiment(cfg);
      } catch (const Error& e) {
        throw PointFailure(std::string(to_string(kind)) + "/" + std::string(to_string(arch)) +
                           ": " + error_kind(e) + ": " + e.what());
      }
      write_ser_csv(csv, result);
      for (const auto& p : result.points) {
        out << to_string(kind) << '/' << to_string(arch) << " Es/N0=" << num(p.snr_db)
            << " dB: SER " << num(p.ser) << " [" << num(p.ci_low) << ", " << num(p.ci_high)
            << "], predicted " << num(p.ser_predicted) << '\n';
      }
    }
  }
  auto os = open_output(options, file);
  os << csv.str();
  out << "simulate: " << kinds.size() * archs.size() << " curves written to "
      << (options.out_dir / file).string() << '\n';
}

void rate_search(const ConfigFile& config, const RunOptions& options, std::ostream& out,
                 std::ostream& err) {
  ConfigReader r(config);
  RateSearchSpec base;
  base.constellation = read_constellation(r);
  const auto kinds = read_kinds(r);
  const auto archs = read_architectures(r);
  base.weights = read_weights(r);
  const auto rates = required_reals(r, "sweep", "target_rate");
  const auto losses = required_reals(r, "sweep", "snr_loss_db");
  base.beta_min = r.real_or("sweep", "beta_min", base.beta_min);
  base.beta_max = r.real_or("sweep", "beta_max", base.beta_max);
  base.resolution = r.real_or("sweep", "resolution", base.resolution);
  base.grid_points = static_cast<int>(r.integer_or("sweep", "grid_points", base.grid_points));
  const auto on_infeasible = r.text_or("sweep", "on_infeasible", "error");
  const auto file = r.text_or("output", "file", "rate_search.csv");
  if (!(base.beta_min > 0.0 && base.beta_min < base.beta_max)) {
    r.fail("sweep", "beta_min", "need 0 < beta_min < beta_max");
  }
  if (!(base.resolution > 0.0 && base.resolution < 1.0)) {
    r.fail("sweep", "resolution", "must lie in (0, 1)");
  }
  if (base.grid_points < 2) r.fail("sweep", "grid_points", "must be >= 2");
  for (double l : losses) {
    if (l < 0.0) r.fail("sweep", "snr_loss_db", "losses must be >= 0");
  }
  if (on_infeasible != "error" && on_infeasible != "skip") {
    r.fail("sweep", "on_infeasible", "must be 'error' or 'skip'");
  }
  r.finish();

  std::ostringstream csv;
  csv << "equalizer,architecture,constellation,target_rate,snr_loss_db,min_inv_beta\n";
  std::size_t rows = 0;
  for (auto kind : kinds) {
    for (auto arch : archs) {
      for (double rate : rates) {
        for (double loss : losses) {
          auto spec = base;
          spec.kind = kind;
          spec.arch = arch;
          spec.target_rate = rate;
          spec.snr_loss_db = loss;
          const std::string point = std::string(to_string(kind)) + "/" +
                                    std::string(to_string(arch)) + " R=" + num(rate) +
                                    " loss=" + num(loss) + " dB";
          RateSearchResult res;
          try {
            res = min_antenna_ratio(spec);
          } catch (const Infeasible& e) {
            if (on_infeasible == "skip") {
              err << "rate-search: " << point << ": Infeasible: " << e.what() << " (skipped)\n";
              continue;
            }
            throw PointFailure(point + ": Infeasible: " + e.what());
          } catch (const Error& e) {
            throw PointFailure(point + ": " + error_kind(e) + ": " + e.what());
          }
          csv << to_string(kind) << ',' << to_string(arch) << ','
              << base.constellation.label() << ',' << num(rate) << ',' << num(loss) << ','
              << num(finite_or_throw(res.inv_beta, point)) << '\n';
          ++rows;
        }
      }
    }
  }
  auto os = open_output(options, file);
  os << csv.str();
  out << "rate-search: " << rows << " rows written to " << (options.out_dir / file).string()
      << '\n';
}

void volumes(const ConfigFile& config, const RunOptions& options, std::ostream& out) {
  ConfigReader r(config);
  auto positive = [&](const char* key, std::int64_t fallback) {
    const auto v = r.integer_or("volumes", key, fallback);
    if (v < 1) r.fail("volumes", key, "must be a positive integer");
    return static_cast<std::uint64_t>(v);
  };
  const auto U = positive("users", 16);
  const auto n_sc = positive("subcarriers", 1200);
  const auto n_sym = positive("symbols", 14);
  const auto C = positive("clusters", 4);
  const auto bytes = positive("bytes_per_entry", 8);
  const auto file = r.text_or("output", "file", "volumes.csv");
  r.finish();

  const auto v = message_volume(U, n_sc, n_sym, C, bytes);
  char line[160];
  out << "U=" << U << " N_sc=" << n_sc << " N_sym=" << n_sym << " C=" << C << " ("
      << bytes << " bytes per entry)\n";
  std::snprintf(line, sizeof line, "m_PD  %10.2f MiB  (%llu bytes)\n", v.pd_mib(),
                static_cast<unsigned long long>(v.pd_bytes));
  out << line;
  std::snprintf(line, sizeof line, "m_FD  %10.2f MiB  (%llu bytes)\n", v.fd_mib(),
                static_cast<unsigned long long>(v.fd_bytes));
  out << line;
  std::snprintf(line, sizeof line, "m_CS  %10.2f MiB  (%llu bytes per iteration)\n", v.cs_mib(),
                static_cast<unsigned long long>(v.cs_bytes_per_iteration));
  out << line;

  auto os = open_output(options, file);
  os << "architecture,bytes,mib\n";
  os << "PD," << v.pd_bytes << ',' << num(v.pd_mib()) << '\n';
  os << "FD," << v.fd_bytes << ',' << num(v.fd_mib()) << '\n';
  os << "CS," << v.cs_bytes_per_iteration << ',' << num(v.cs_mib()) << '\n';
}

int run_command(std::string_view command, const RunOptions& options, std::ostream& out,
                std::ostream& err) {
  try {
    const bool config_optional = command == "volumes" || command == "validate";
    if (command != "analyze" && command != "simulate" && command != "rate-search" &&
        !config_optional) {
      err << "unknown command '" << command << "'\n";
      return kExitUsage;
    }
    if (!options.config && !config_optional) {
      err << command << ": --config is required\n";
      return kExitUsage;
    }
    const auto config = options.config ? ConfigFile::load(options.config->string())
                                       : [] {
                                           std::istringstream empty;
                                           return ConfigFile::parse(empty, "<defaults>");
                                         }();
    if (command == "analyze") {
      analyze(config, options, out);
    } else if (command == "simulate") {
      simulate(config, options, out);
    } else if (command == "rate-search") {
      rate_search(config, options, out, err);
    } else if (command == "volumes") {
      volumes(config, options, out);
    } else {
      ConfigReader r(config);
      ValidateOptions v;
      v.corrupt_fusion_weights = options.corrupt_fusion_weights;
      const auto seed = r.integer("validate", "seed");
      if (seed) v.seed = static_cast<std::uint64_t>(*seed);
      if (options.seed) v.seed = *options.seed;
      r.finish();
      return print_validation(run_validation(v), out) ? kExitOk : kExitNumerical;
    }
    return kExitOk;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const PointFailure& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const Error& e) {
    err << "numerical failure: " << error_kind(e) << ": " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "output error: " << e.what() << '\n';
    return kExitUsage;
  }
}

}  // namespace dbp::cli
