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
#include <functional>
#include <ostream>
#include <random>

#include "dbp/asymptotics.hpp"
#include "dbp/cli/commands.hpp"
#include "dbp/equalize.hpp"
#include "dbp/errors.hpp"
#include "dbp/fusion.hpp"
#include "dbp/model.hpp"
#include "dbp/monte_carlo.hpp"

namespace dbp::cli {

namespace {

std::string sci(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

struct Instance {
  ChannelRealization channel;
  CVector y;
  double N0;
};

Instance random_instance(Rng& rng, int B, int U, int C, double N0,
                         const Constellation& constellation) {
  SystemConfig cfg{B, U, N0, constellation.es()};
  auto channel = sample_rayleigh_channel(cfg, ClusterPartition::uniform(B, C), rng);
  const auto s = sample_symbols(constellation, U, rng);
  auto y = transmit(channel.H, s.value, N0, rng);
  return {std::move(channel), std::move(y), N0};
}

// LAMA written directly on (y, H): z = s + H^H r with the residual r carrying
// the Onsager correction, tau the normalized signal variance.
void centralized_lama(const CMatrix& H, const CVector& y, double N0,
                      const Constellation& constellation, int T, std::vector<CVector>& zs,
                      std::vector<double>& phis) {
  const double beta = static_cast<double>(H.cols()) / static_cast<double>(H.rows());
  const Eigen::Index U = H.cols();
  CVector s = CVector::Zero(U);
  CVector r = y;
  double tau = beta * constellation.es() / N0;
  for (int t = 1; t <= T; ++t) {
    const CVector z = s + H.adjoint() * r;
    zs.push_back(z);
    phis.push_back(N0 * tau / beta);
    double g = 0.0;
    for (Eigen::Index u = 0; u < U; ++u) {
      const auto post = posterior_stats(z(u), N0 * (1.0 + tau), constellation);
      s(u) = post.mean;
      g += post.variance;
    }
    const double tau_next = beta / N0 * g / static_cast<double>(U);
    r = y - H * s + (tau_next / (1.0 + tau)) * r;
    tau = tau_next;
  }
}

std::vector<double> random_weights(std::mt19937_64& rng, int C, double floor) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<double> w(static_cast<std::size_t>(C));
  double sum = 0.0;
  for (auto& x : w) sum += (x = unif(rng));
  const double spare = 1.0 - C * floor;
  double acc = 0.0;
  for (std::size_t c = 0; c + 1 < w.size(); ++c) acc += (w[c] = floor + spare * w[c] / sum);
  w.back() = 1.0 - acc;
  return w;
}

using Check = std::function<PropertyResult()>;

PropertyResult make(std::string name, bool ok, std::string detail) {
  return {std::move(name), ok, std::move(detail)};
}

}  // namespace

std::vector<PropertyResult> run_validation(const ValidateOptions& options) {
  const auto qpsk = Constellation::qpsk();
  const std::vector<double> snr_grid_db{0.0, 5.0, 10.0, 20.0};
  const std::vector<double> beta_grid{0.05, 0.1, 0.2, 0.3, 0.45, 0.6, 0.75, 0.9};
  const std::vector<EqualizerKind> linear{EqualizerKind::MRC, EqualizerKind::ZF,
                                          EqualizerKind::LMMSE};
  const std::vector<EqualizerKind> all{EqualizerKind::MRC, EqualizerKind::ZF,
                                       EqualizerKind::LMMSE, EqualizerKind::LAMA};

  std::vector<Check> checks;

  checks.emplace_back([&] {
    double worst = 0.0;
    for (auto kind : linear) {
      for (double db : snr_grid_db) {
        for (double beta : beta_grid) {
          const double a = db_to_linear(db);
          const auto fp = solve_fixed_point(MseFunctionSpec::linear(kind), 1.0 / a, beta);
          worst = std::max(worst, rel(fp.sinr, sinr_pd_closed_form(kind, a, beta)));
        }
      }
    }
    return make("closed-form SINR equals fixed point", worst <= 1e-9, "max rel err " + sci(worst));
  });

  checks.emplace_back([&] {
    Rng rng(options.seed);
    double worst = 0.0;
    for (int C : {2, 4, 8}) {
      for (int i = 0; i < 4; ++i) {
        const auto inst = random_instance(rng, 64, 16, C, 0.1, qpsk);
        const auto& p = inst.channel.partition;
        std::vector<PartialStats> parts;
        for (int c = 0; c < C; ++c) {
          parts.push_back(local_preprocess(inst.channel.cluster(c), cluster_rows(inst.y, p, c)));
        }
        const auto fused = fuse_partials(parts);
        const auto central = centralized_stats(inst.channel.H, inst.y);
        for (auto kind : all) {
          const auto a = equalize(kind, fused, qpsk, inst.N0, 0.25);
          const auto b = equalize(kind, central, qpsk, inst.N0, 0.25);
          worst = std::max({worst, (a.z - b.z).cwiseAbs().maxCoeff(),
                            (a.sigma2 - b.sigma2).cwiseAbs().maxCoeff()});
        }
      }
    }
    return make("PD equals centralized (all equalizers)", worst <= 1e-10,
                "max abs diff " + sci(worst));
  });

  checks.emplace_back([&] {
    Rng rng(options.seed + 1);
    double worst = 0.0;
    for (int i = 0; i < 4; ++i) {
      const auto inst = random_instance(rng, 64, 16, 1, 0.05, qpsk);
      LamaParams lp;
      lp.max_iterations = 5;
      const auto pd = lama_equalize(centralized_stats(inst.channel.H, inst.y), qpsk, inst.N0,
                                    0.25, lp);
      std::vector<CVector> zs;
      std::vector<double> phis;
      centralized_lama(inst.channel.H, inst.y, inst.N0, qpsk, 5, zs, phis);
      for (std::size_t t = 0; t < zs.size(); ++t) {
        worst = std::max({worst, (pd.trace.z[t] - zs[t]).cwiseAbs().maxCoeff(),
                          std::abs(pd.trace.phi[t] - phis[t])});
      }
    }
    return make("LAMA-PD equals centralized LAMA", worst <= 1e-10, "max abs diff " + sci(worst));
  });

  auto fusion_weights = [&](const RMatrix& s2) {
    auto w = optimal_fusion_weights(s2);
    if (options.corrupt_fusion_weights) {
      // Proportional to the variance instead of its inverse.
      for (Eigen::Index u = 0; u < s2.cols(); ++u) w.nu.col(u) = s2.col(u) / s2.col(u).sum();
    }
    return w;
  };

  checks.emplace_back([&] {
    std::mt19937_64 rng(options.seed + 2);
    std::uniform_real_distribution<double> unif(0.01, 5.0);
    double worst = 0.0;
    for (int i = 0; i < 50; ++i) {
      RMatrix s2(4, 8);
      for (Eigen::Index k = 0; k < s2.size(); ++k) s2(k) = unif(rng);
      const auto w = fusion_weights(s2);
      for (Eigen::Index u = 0; u < s2.cols(); ++u) {
        worst = std::max(worst, std::abs(w.nu.col(u).sum() - 1.0));
        if (w.nu.col(u).minCoeff() < 0.0) worst = 1.0;
      }
    }
    return make("fusion weights are a convex combination", worst <= 1e-12,
                "max |sum - 1| " + sci(worst));
  });

  checks.emplace_back([&] {
    std::mt19937_64 rng(options.seed + 3);
    std::uniform_real_distribution<double> unif(0.01, 5.0);
    int beaten = 0;
    for (int i = 0; i < 20; ++i) {
      RMatrix s2(3, 4);
      for (Eigen::Index k = 0; k < s2.size(); ++k) s2(k) = unif(rng);
      const auto w = fusion_weights(s2);
      for (Eigen::Index u = 0; u < s2.cols(); ++u) {
        const double best = (w.nu.col(u).array().square() * s2.col(u).array()).sum();
        for (int a = 0; a < 100; ++a) {
          Eigen::VectorXd alt(s2.rows());
          for (Eigen::Index c = 0; c < alt.size(); ++c) alt(c) = unif(rng);
          alt /= alt.sum();
          if ((alt.array().square() * s2.col(u).array()).sum() < best * (1.0 - 1e-12)) ++beaten;
        }
      }
    }
    return make("optimal fusion minimizes the fused variance", beaten == 0,
                std::to_string(beaten) + " random unit-sum weights did better");
  });

  checks.emplace_back([&] {
    std::mt19937_64 rng(options.seed + 4);
    std::uniform_real_distribution<double> unif(0.01, 5.0);
    bool ok = true;
    for (int i = 0; i < 50; ++i) {
      std::vector<ClusterOutput> outs(3);
      for (int c = 0; c < 3; ++c) {
        outs[static_cast<std::size_t>(c)] = {c, CVector::Zero(6), RVector(6)};
        for (Eigen::Index u = 0; u < 6; ++u) outs[static_cast<std::size_t>(c)].sigma2(u) = unif(rng);
      }
      const auto fused = fuse_estimates(outs, optimal_fusion_weights(stack_variances(outs)));
      const RMatrix s2 = stack_variances(outs);
      for (Eigen::Index u = 0; u < 6; ++u) ok = ok && fused.sigma2(u) <= s2.col(u).minCoeff();
    }
    return make("fused variance below every cluster variance", ok, "");
  });

  checks.emplace_back([&] {
    std::mt19937_64 rng(options.seed + 5);
    const double a = db_to_linear(10.0);
    const double beta = 0.05;
    const double closed = sinr_fd_zf_closed(a, beta, 4);
    double worst = 0.0;
    for (int i = 0; i < 10; ++i) {
      const auto w = random_weights(rng, 4, beta + 0.05);
      worst = std::max(worst, rel(sinr_fd(MseFunctionSpec::linear(EqualizerKind::ZF), a, beta, w).sinr, closed));
    }
    return make("ZF-FD SINR independent of the allocation", worst <= 1e-9,
                "max rel err " + sci(worst));
  });

  checks.emplace_back([&] {
    std::mt19937_64 rng(options.seed + 6);
    const double a = 10.0;
    const double beta = 0.25;
    double violation = 0.0;
    for (int i = 0; i < 100; ++i) {
      const auto w = random_weights(rng, 4, 0.0);
      const auto cf = sinr_fd_lmmse_closed(a, beta, w);
      violation = std::max(violation, cf.lower_bound - cf.sinr);
    }
    const std::vector<double> uniform(4, 0.25);
    const auto u = sinr_fd_lmmse_closed(a, beta, uniform);
    const double gap = std::abs(u.sinr - u.lower_bound);
    return make("L-MMSE-FD uniform allocation is the lower bound",
                violation <= 1e-12 && gap <= 1e-12,
                "max violation " + sci(violation) + ", uniform gap " + sci(gap));
  });

  checks.emplace_back([&] {
    const std::vector<double> w{1.0, 0.0, 0.0, 0.0};
    double worst = 0.0;
    for (double db : snr_grid_db) {
      for (double beta : beta_grid) {
        const double a = db_to_linear(db);
        worst = std::max(worst, std::abs(sinr_fd_lmmse_closed(a, beta, w).sinr -
                                         sinr_pd_closed_form(EqualizerKind::LMMSE, a, beta)));
      }
    }
    return make("single-cluster allocation reproduces L-MMSE PD", worst <= 1e-12,
                "max abs diff " + sci(worst));
  });

  checks.emplace_back([&] {
    bool ordered = true;
    double mrc_gap = 0.0;
    for (auto kind : all) {
      for (int C : {2, 4}) {
        const std::vector<double> w(static_cast<std::size_t>(C), 1.0 / C);
        for (double db : {0.0, 10.0}) {
          for (double beta : {0.05, 0.1, 0.2}) {
            const double a = db_to_linear(db);
            if (kind == EqualizerKind::ZF && C * beta >= 1.0) continue;
            const double pd = asymptotic_sinr(kind, Architecture::PD, qpsk, a, beta, w);
            const double fd = asymptotic_sinr(kind, Architecture::FD, qpsk, a, beta, w);
            ordered = ordered && fd <= pd * (1.0 + 1e-12);
            if (kind == EqualizerKind::MRC) mrc_gap = std::max(mrc_gap, rel(fd, pd));
          }
        }
      }
    }
    return make("FD never beats PD; MRC ties", ordered && mrc_gap <= 1e-12,
                "MRC rel gap " + sci(mrc_gap));
  });

  checks.emplace_back([&] {
    bool ok = true;
    for (double db : snr_grid_db) {
      for (double beta : beta_grid) {
        const double a = db_to_linear(db);
        const double l = sinr_pd_closed_form(EqualizerKind::LMMSE, a, beta);
        ok = ok && l >= sinr_pd_closed_form(EqualizerKind::MRC, a, beta) * (1 - 1e-12);
        ok = ok && l >= sinr_pd_closed_form(EqualizerKind::ZF, a, beta) * (1 - 1e-12);
        const std::vector<double> w{0.5, 0.5};
        const double lf = asymptotic_sinr(EqualizerKind::LMMSE, Architecture::FD, qpsk, a, beta, w);
        ok = ok && lf >= asymptotic_sinr(EqualizerKind::MRC, Architecture::FD, qpsk, a, beta, w) * (1 - 1e-12);
        if (2 * beta < 1.0 - 1e-6) {
          ok = ok && lf >= asymptotic_sinr(EqualizerKind::ZF, Architecture::FD, qpsk, a, beta, w) * (1 - 1e-12);
        }
      }
    }
    return make("L-MMSE SINR dominates MRC and ZF", ok, "");
  });

  checks.emplace_back([&] {
    double worst = 0.0;
    for (double beta : {0.125, 0.25}) {
      for (double db : {5.0, 10.0}) {
        const double N0 = 1.0 / db_to_linear(db);
        const auto fp = solve_fixed_point(MseFunctionSpec::lama(qpsk), N0, beta);
        const auto traj = se_trajectory(qpsk, N0, beta, 200);
        worst = std::max(worst, rel(traj.back(), fp.sigma2));
      }
    }
    return make("state evolution converges to the LAMA fixed point", worst <= 1e-9,
                "max rel err " + sci(worst));
  });

  checks.emplace_back([&] {
    std::mt19937_64 rng(options.seed + 7);
    std::normal_distribution<double> n01(0.0, 1.0);
    std::uniform_real_distribution<double> lt(-9.0, 1.0);
    bool ok = true;
    for (const auto& c : {Constellation::qpsk(), Constellation::qam16(), Constellation::qam64()}) {
      for (int i = 0; i < 2000; ++i) {
        const auto post = posterior_stats(cplx(n01(rng), n01(rng)), std::pow(10.0, lt(rng)), c);
        ok = ok && post.variance >= 0.0 && post.variance <= c.es() * (1.0 + 1e-12);
      }
    }
    return make("posterior variance within [0, Es]", ok, "");
  });

  checks.emplace_back([&] {
    Rng rng(options.seed + 8);
    double lowest = 0.0;
    for (int i = 0; i < 30; ++i) {
      const auto inst = random_instance(rng, 32, 8, 2, 0.2, qpsk);
      for (auto kind : all) {
        const auto out = run_pipeline(kind, Architecture::PD, inst.channel, inst.y, inst.N0, qpsk);
        const auto fd = run_pipeline(kind, Architecture::FD, inst.channel, inst.y, inst.N0, qpsk);
        lowest = std::min({lowest, out.sigma2.minCoeff(), fd.sigma2.minCoeff()});
      }
    }
    return make("error variances are nonnegative", lowest >= 0.0, "min " + sci(lowest));
  });

  checks.emplace_back([&] {
    Rng rng(options.seed + 9);
    double worst = 0.0;
    for (int i = 0; i < 10; ++i) {
      const auto inst = random_instance(rng, 64, 8, 1, 0.0, qpsk);
      const auto stats = centralized_stats(inst.channel.H, inst.y);
      const auto l = linear_equalize(EqualizerKind::LMMSE, stats, 1e-12, 1.0);
      const auto z = linear_equalize(EqualizerKind::ZF, stats, 1e-12, 1.0);
      worst = std::max(worst, (l.z - z.z).cwiseAbs().maxCoeff());
    }
    return make("L-MMSE approaches ZF as N0 -> 0", worst <= 1e-4, "max abs diff " + sci(worst));
  });

  checks.emplace_back([&] {
    const auto v = message_volume(16, 1200, 14, 4);
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.2f/%.2f MiB", v.pd_mib(), v.fd_mib());
    const bool ok = std::string(buf) == "17.58/8.20 MiB" &&
                    v.cs_bytes_per_iteration == 2 * v.fd_bytes;
    return make("message volumes: m_PD, m_FD and m_CS = 2 m_FD", ok, buf);
  });

  checks.emplace_back([&] {
    double worst = 0.0;
    for (const auto& c : {Constellation::qpsk(), Constellation::qam16(), Constellation::qam64()}) {
      cplx mean{0.0, 0.0};
      double energy = 0.0;
      for (const auto& a : c.symbols()) {
        mean += a;
        energy += std::norm(a);
      }
      const double n = static_cast<double>(c.size());
      worst = std::max({worst, std::abs(mean) / n, std::abs(energy / n - 1.0),
                        std::abs(c.es() - 1.0)});
    }
    return make("constellations are zero-mean with unit energy", worst <= 1e-12,
                "max deviation " + sci(worst));
  });

  checks.emplace_back([&] {
    ExperimentConfig cfg;
    cfg.system = {32, 4, 0.0, 1.0};
    cfg.partition = ClusterPartition::uniform(32, 2);
    cfg.snr_db = {5.0};
    cfg.trials = 1;
    cfg.seed = options.seed;
    bool same = true;
    for (std::uint64_t t = 0; t < 5; ++t) same = same && run_trial(cfg, 0, t) == run_trial(cfg, 0, t);
    Rng a(options.seed);
    Rng b(options.seed);
    const SystemConfig sys{16, 4, 0.1, 1.0};
    const auto ha = sample_rayleigh_channel(sys, ClusterPartition::uniform(16, 1), a);
    const auto hb = sample_rayleigh_channel(sys, ClusterPartition::uniform(16, 1), b);
    same = same && ha.H == hb.H;
    return make("sampling and trials are seed-deterministic", same, "");
  });

  std::vector<PropertyResult> results;
  for (const auto& check : checks) {
    try {
      results.push_back(check());
    } catch (const std::exception& e) {
      results.push_back({"(property " + std::to_string(results.size() + 1) + ")", false,
                         std::string("threw: ") + e.what()});
    }
  }
  return results;
}

bool print_validation(const std::vector<PropertyResult>& results, std::ostream& out) {
  bool all = true;
  int passed = 0;
  for (const auto& r : results) {
    out << (r.passed ? "PASS  " : "FAIL  ") << r.name;
    if (!r.detail.empty()) out << "  (" << r.detail << ")";
    out << '\n';
    all = all && r.passed;
    passed += r.passed ? 1 : 0;
  }
  out << passed << "/" << results.size() << " properties passed\n";
  return all;
}

}  // namespace dbp::cli
