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
#include <limits>
#include <numbers>
#include <numeric>
#include <string>

#include "dbp/asymptotics.hpp"
#include "dbp/equalize.hpp"
#include "dbp/errors.hpp"
#include "dbp/quadrature.hpp"

namespace dbp {

namespace {

// ZF needs beta / w strictly below one by this margin.
constexpr double kZfMargin = 1e-9;

// In-phase levels of a square constellation; the quadrature levels are the same.
std::vector<double> axis_levels(const Constellation& constellation) {
  const auto symbols = constellation.symbols();
  const std::size_t side = constellation.side();
  std::vector<double> levels(side);
  for (std::size_t i = 0; i < side; ++i) levels[i] = symbols[i * side].real();
  return levels;
}

// A uniform prior on a square grid and circular noise make the posterior
// factor into independent in-phase and quadrature parts, so both the MSE and
// the mutual information are twice a one-dimensional expectation. Per real
// dimension the noise is N(0, sigma2 / 2) = sigma X with X ~ N(0, 1/2).
AdaptiveEstimate lama_psi_adaptive(const Constellation& constellation, double sigma2,
                                   double tol) {
  const auto levels = axis_levels(constellation);
  const double sigma = std::sqrt(sigma2);
  const double inv_m = 1.0 / static_cast<double>(levels.size());
  std::vector<double> logp(levels.size());
  auto f = [&](double x) {
    double acc = 0.0;
    for (double s : levels) {
      const double y = s + sigma * x;
      double top = -std::numeric_limits<double>::infinity();
      for (std::size_t k = 0; k < levels.size(); ++k) {
        const double d = y - levels[k];
        logp[k] = -d * d / sigma2;
        top = std::max(top, logp[k]);
      }
      double z = 0.0;
      double m = 0.0;
      for (std::size_t k = 0; k < levels.size(); ++k) {
        const double p = std::exp(logp[k] - top);
        z += p;
        m += p * levels[k];
      }
      const double e = m / z - s;
      acc += e * e;
    }
    return acc * inv_m;
  };
  auto est = gaussian_expectation(f, 0.5 * tol);
  est.value *= 2.0;
  est.error *= 2.0;
  return est;
}

AdaptiveEstimate axis_conditional_entropy_excess(const Constellation& constellation,
                                                 double noise, double tol) {
  const auto levels = axis_levels(constellation);
  const double sigma = std::sqrt(noise);
  const double inv_m = 1.0 / static_cast<double>(levels.size());
  // E over S and X of log(sum_a p(y|a) / p(y|S)) in nats for one real axis.
  auto f = [&](double x) {
    const double n = sigma * x;
    double acc = 0.0;
    for (double s : levels) {
      const double y = s + n;
      double min_d = std::numeric_limits<double>::infinity();
      for (double a : levels) min_d = std::min(min_d, (y - a) * (y - a));
      double sum = 0.0;
      for (double a : levels) sum += std::exp(-((y - a) * (y - a) - min_d) / noise);
      acc += (n * n - min_d) / noise + std::log(sum);
    }
    return acc * inv_m;
  };
  return gaussian_expectation(f, tol);
}

void check_weights(std::span<const double> weights) {
  if (weights.empty()) throw InvalidArgument("empty cluster weight vector");
  double sum = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) throw InvalidArgument("cluster weights must be >= 0");
    sum += w;
  }
  if (std::abs(sum - 1.0) > 1e-12) throw InvalidArgument("cluster weights must sum to 1");
}

double stable_lmmse_root(double b, double c) {
  // Positive root x of x^2 + b x - c = 0 (c >= 0), i.e. (sqrt(b^2 + 4c) - b)/2,
  // without cancellation for large positive b.
  const double r = std::sqrt(b * b + 4.0 * c);
  return b > 0.0 ? 2.0 * c / (r + b) : 0.5 * (r - b);
}

}  // namespace

MseFunctionSpec MseFunctionSpec::linear(EqualizerKind kind, double Es) {
  if (kind == EqualizerKind::LAMA) {
    throw InvalidArgument("LAMA needs a constellation; use MseFunctionSpec::lama");
  }
  MseFunctionSpec s;
  s.kind = kind;
  s.Es = Es;
  return s;
}

MseFunctionSpec MseFunctionSpec::lama(const Constellation& constellation, double tol) {
  if (!(tol > 0.0)) throw InvalidArgument("quadrature tolerance must be positive");
  MseFunctionSpec s;
  s.kind = EqualizerKind::LAMA;
  s.Es = constellation.es();
  s.constellation = constellation;
  s.quadrature_tol = tol;
  return s;
}

double psi_mse(const MseFunctionSpec& spec, double sigma2) {
  if (!(sigma2 > 0.0)) throw InvalidArgument("psi_mse: sigma2 must be positive");
  switch (spec.kind) {
    case EqualizerKind::MRC: return spec.Es;
    case EqualizerKind::ZF: return sigma2;
    case EqualizerKind::LMMSE: return spec.Es * sigma2 / (spec.Es + sigma2);
    case EqualizerKind::LAMA:
      if (!spec.constellation) throw InvalidArgument("psi_mse: LAMA needs a constellation");
      return lama_psi_adaptive(*spec.constellation, sigma2, spec.quadrature_tol).value;
  }
  throw InvalidArgument("psi_mse: unknown equalizer");
}

double psi_quadrature_error(const MseFunctionSpec& spec, double sigma2) {
  if (spec.kind != EqualizerKind::LAMA) return 0.0;
  if (!(sigma2 > 0.0)) throw InvalidArgument("psi_quadrature_error: sigma2 must be positive");
  if (!spec.constellation) throw InvalidArgument("psi_quadrature_error: LAMA needs a constellation");
  return lama_psi_adaptive(*spec.constellation, sigma2, spec.quadrature_tol).error;
}

double lama_psi_gauss_hermite(const Constellation& constellation, double sigma2, int order) {
  if (!(sigma2 > 0.0)) throw InvalidArgument("lama_psi_gauss_hermite: sigma2 must be positive");
  const double sigma = std::sqrt(sigma2);
  const auto symbols = constellation.symbols();
  double acc = 0.0;
  for (const auto& s : symbols) {
    acc += complex_gaussian_expectation(
        [&](cplx x) { return std::norm(posterior_stats(s + sigma * x, sigma2, constellation).mean - s); },
        order);
  }
  return acc / static_cast<double>(symbols.size());
}

FixedPointResult solve_fixed_point(const MseFunctionSpec& spec, double N0, double beta,
                                   double w, const FixedPointOptions& opts) {
  if (!(N0 > 0.0) || !std::isfinite(N0)) throw InvalidArgument("fixed point needs N0 > 0");
  if (!(beta >= 0.0)) throw InvalidArgument("fixed point needs beta >= 0");
  if (!(w > 0.0 && w <= 1.0)) throw InvalidArgument("cluster fraction must lie in (0, 1]");
  if (spec.kind == EqualizerKind::ZF && !(beta / w < 1.0 - kZfMargin)) {
    throw InvalidRegime("ZF requires beta/w < 1 (beta = " + std::to_string(beta) +
                        ", w = " + std::to_string(w) + ")");
  }

  auto map = [&](double s2) { return (N0 + beta * psi_mse(spec, s2)) / w; };

  FixedPointResult r;
  double s2 = (N0 + beta * spec.Es) / w;
  for (int k = 1; k <= opts.max_iter; ++k) {
    const double next = map(s2);
    const bool done = std::abs(next - s2) <= opts.tol * next;
    s2 = next;
    r.iterations = k;
    if (done) {
      r.converged = true;
      break;
    }
  }
  if (!r.converged) {
    throw NonConvergence("fixed point did not converge in " + std::to_string(opts.max_iter) +
                         " iterations (beta = " + std::to_string(beta) + ")");
  }
  r.sigma2 = s2;
  r.sinr = spec.Es / s2;

  if (spec.kind == EqualizerKind::LAMA && beta > 0.0) {
    // From N0/w the iteration increases onto the smallest fixed point.
    double low = N0 / w;
    for (int k = 1; k <= opts.max_iter; ++k) {
      const double next = map(low);
      const bool done = std::abs(next - low) <= opts.tol * next;
      low = next;
      if (done) {
        r.multiple_fixed_points = std::abs(low - s2) > 1e-6 * s2;
        break;
      }
    }
  }
  return r;
}

double sinr_pd_closed_form(EqualizerKind kind, double es_over_n0, double beta) {
  if (!(es_over_n0 >= 0.0) || !(beta >= 0.0)) {
    throw InvalidArgument("closed form needs Es/N0 >= 0 and beta >= 0");
  }
  const double a = es_over_n0;
  switch (kind) {
    case EqualizerKind::MRC: return a / (1.0 + beta * a);
    case EqualizerKind::ZF:
      if (!(beta < 1.0 - kZfMargin)) {
        throw InvalidRegime("ZF closed form requires beta < 1 (beta = " + std::to_string(beta) + ")");
      }
      return a * (1.0 - beta);
    case EqualizerKind::LMMSE: return stable_lmmse_root(1.0 - a * (1.0 - beta), a);
    case EqualizerKind::LAMA: break;
  }
  throw InvalidArgument("no closed-form SINR for LAMA");
}

FdSinr sinr_fd(const MseFunctionSpec& spec, double es_over_n0, double beta,
               std::span<const double> weights, const FixedPointOptions& opts) {
  check_weights(weights);
  if (!(es_over_n0 > 0.0)) throw InvalidArgument("sinr_fd needs Es/N0 > 0");
  const double N0 = spec.Es / es_over_n0;

  FdSinr out;
  double precision = 0.0;
  for (double w : weights) {
    if (w == 0.0) {
      out.cluster_sigma2.push_back(std::numeric_limits<double>::infinity());
      out.cluster_sinr.push_back(0.0);
      continue;
    }
    const auto fp = solve_fixed_point(spec, N0, beta, w, opts);
    out.cluster_sigma2.push_back(fp.sigma2);
    out.cluster_sinr.push_back(fp.sinr);
    precision += 1.0 / fp.sigma2;
  }
  out.sigma2 = 1.0 / precision;
  out.sinr = std::accumulate(out.cluster_sinr.begin(), out.cluster_sinr.end(), 0.0);

  double weighted_psi = 0.0;
  for (std::size_t c = 0; c < weights.size(); ++c) {
    if (weights[c] == 0.0) continue;
    const double nu = (1.0 / out.cluster_sigma2[c]) / precision;
    weighted_psi += nu * psi_mse(spec, out.cluster_sigma2[c]);
  }
  const double identity = N0 + beta * weighted_psi;
  if (std::abs(identity - out.sigma2) > 1e-9 * out.sigma2) {
    throw NonConvergence("fused variance identity violated: " + std::to_string(out.sigma2) +
                         " vs " + std::to_string(identity));
  }
  return out;
}

double sinr_fd_zf_closed(double es_over_n0, double beta, int C) {
  if (C < 1) throw InvalidArgument("C must be >= 1");
  if (!(C * beta < 1.0)) {
    throw InvalidRegime("ZF-FD requires C beta < 1 (C = " + std::to_string(C) +
                        ", beta = " + std::to_string(beta) + ")");
  }
  return es_over_n0 * (1.0 - C * beta);
}

LmmseFdClosedForm sinr_fd_lmmse_closed(double es_over_n0, double beta,
                                       std::span<const double> weights) {
  check_weights(weights);
  const double a = es_over_n0;
  const double C = static_cast<double>(weights.size());
  auto f = [&](double w) {
    const double b = 1.0 - a * (w - beta);
    return std::sqrt(b * b + 4.0 * a * w);
  };
  const double offset = 0.5 * (C - a * (1.0 - C * beta));

  LmmseFdClosedForm out;
  double root_sum = 0.0;
  for (double w : weights) root_sum += f(w);
  out.sinr = 0.5 * root_sum - offset;
  // Jensen on the convex f: sum_c f(w_c) >= C f(1/C) = sqrt(b^2 + 4 a C).
  const double b_uniform = C - a * (1.0 - C * beta);
  out.lower_bound = 0.5 * std::sqrt(b_uniform * b_uniform + 4.0 * a * C) - offset;
  out.upper_bound = sinr_pd_closed_form(EqualizerKind::LMMSE, a, beta);
  return out;
}

std::vector<double> se_trajectory(const Constellation& constellation, double N0, double beta,
                                  int T, double w, double quadrature_tol) {
  if (T < 1) throw InvalidArgument("se_trajectory needs T >= 1");
  if (!(w > 0.0 && w <= 1.0)) throw InvalidArgument("cluster fraction must lie in (0, 1]");
  const auto spec = MseFunctionSpec::lama(constellation, quadrature_tol);
  std::vector<double> traj;
  traj.reserve(static_cast<std::size_t>(T));
  traj.push_back((N0 + beta * constellation.es()) / w);
  for (int t = 2; t <= T; ++t) {
    const double prev = traj.back();
    // Psi(0) = 0: with N0 = 0 and beta = 0 the trajectory stays at zero.
    const double psi = prev > 0.0 ? psi_mse(spec, prev) : 0.0;
    traj.push_back((N0 + beta * psi) / w);
  }
  return traj;
}

double awgn_mutual_information(const Constellation& constellation, double sinr,
                               double quadrature_tol) {
  if (!(sinr >= 0.0)) throw InvalidArgument("mutual information needs sinr >= 0");
  if (!(quadrature_tol > 0.0)) throw InvalidArgument("quadrature tolerance must be positive");
  if (sinr == 0.0) return 0.0;
  const double noise = constellation.es() / sinr;
  const auto excess = axis_conditional_entropy_excess(constellation, noise,
                                                      0.5 * quadrature_tol * std::numbers::ln2);
  const double conditional = 2.0 * excess.value / std::numbers::ln2;
  return std::clamp(constellation.bits() - conditional, 0.0, constellation.bits());
}

double awgn_mutual_information_gauss_hermite(const Constellation& constellation, double sinr,
                                             int order) {
  if (!(sinr >= 0.0)) throw InvalidArgument("mutual information needs sinr >= 0");
  if (sinr == 0.0) return 0.0;
  const double noise = constellation.es() / sinr;
  const double sigma = std::sqrt(noise);
  const auto symbols = constellation.symbols();

  double acc = 0.0;
  for (const auto& s : symbols) {
    acc += complex_gaussian_expectation(
        [&](cplx x) {
          const cplx n = sigma * x;
          const cplx y = s + n;
          double min_d = std::numeric_limits<double>::infinity();
          for (const auto& a : symbols) min_d = std::min(min_d, std::norm(y - a));
          double sum = 0.0;
          for (const auto& a : symbols) sum += std::exp(-(std::norm(y - a) - min_d) / noise);
          return (std::norm(n) - min_d) / noise + std::log(sum);
        },
        order);
  }
  const double conditional = acc / (static_cast<double>(symbols.size()) * std::numbers::ln2);
  return std::clamp(constellation.bits() - conditional, 0.0, constellation.bits());
}

double awgn_snr_for_rate(const Constellation& constellation, double rate,
                         double quadrature_tol) {
  if (!(rate > 0.0) || !(rate < constellation.bits())) {
    throw Infeasible("target rate " + std::to_string(rate) + " is outside (0, " +
                     std::to_string(constellation.bits()) + ")");
  }
  double lo = -60.0;
  double hi = 80.0;
  if (awgn_mutual_information(constellation, db_to_linear(hi), quadrature_tol) < rate) {
    throw Infeasible("target rate " + std::to_string(rate) +
                     " is not reached below 80 dB Es/N0");
  }
  for (int k = 0; k < 200; ++k) {
    const double mid = 0.5 * (lo + hi);
    const double mi = awgn_mutual_information(constellation, db_to_linear(mid), quadrature_tol);
    if (mi < rate) {
      lo = mid;
    } else {
      hi = mid;
    }
    if (std::abs(mi - rate) < 1e-9 && mi >= rate) break;
    if (hi - lo < 1e-13) break;
  }
  return db_to_linear(hi);
}

double asymptotic_sinr(EqualizerKind kind, Architecture arch,
                       const Constellation& constellation, double es_over_n0, double beta,
                       std::span<const double> weights, double quadrature_tol) {
  const auto spec = kind == EqualizerKind::LAMA
                        ? MseFunctionSpec::lama(constellation, quadrature_tol)
                        : MseFunctionSpec::linear(kind, constellation.es());
  if (arch == Architecture::FD) {
    return sinr_fd(spec, es_over_n0, beta, weights).sinr;
  }
  if (kind == EqualizerKind::LAMA) {
    return solve_fixed_point(spec, spec.Es / es_over_n0, beta).sinr;
  }
  return sinr_pd_closed_form(kind, es_over_n0, beta);
}

}  // namespace dbp
