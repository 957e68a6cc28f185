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

#include <optional>
#include <span>
#include <vector>

#include "dbp/model.hpp"
#include "dbp/types.hpp"

namespace dbp {

/// Selects the MSE function Psi(sigma^2) of one equalizer.
struct MseFunctionSpec {
  EqualizerKind kind = EqualizerKind::LMMSE;
  double Es = 1.0;
  // Needed for LAMA only.
  std::optional<Constellation> constellation;
  // Absolute tolerance of the LAMA expectation over the noise.
  double quadrature_tol = kDefaultQuadratureTol;

  static constexpr double kDefaultQuadratureTol = 1e-13;

  static MseFunctionSpec linear(EqualizerKind kind, double Es = 1.0);
  static MseFunctionSpec lama(const Constellation& constellation,
                              double tol = kDefaultQuadratureTol);
};

/// Psi for MRC (Es), ZF (sigma^2), L-MMSE (Es sigma^2 / (Es + sigma^2)) and
/// LAMA, where it is E|F(S + sigma Z, sigma^2) - S|^2 averaged exactly over S
/// with Z ~ CN(0,1). The LAMA expectation splits into two identical real axes
/// and each is integrated by the adaptive rule in quadrature.hpp.
double psi_mse(const MseFunctionSpec& spec, double sigma2);

/// Error estimate of the LAMA quadrature (difference between the last two step
/// halvings). Zero for linear kinds.
double psi_quadrature_error(const MseFunctionSpec& spec, double sigma2);

/// LAMA Psi by a tensor Gauss-Hermite rule over the complex noise. Converges
/// slowly once sigma2 is small against the symbol spacing; kept as an
/// independent cross-check of psi_mse.
double lama_psi_gauss_hermite(const Constellation& constellation, double sigma2, int order);

struct FixedPointResult {
  double sigma2 = 0.0;
  double sinr = 0.0;
  int iterations = 0;
  bool converged = false;
  // Set when iterating from below lands on a different (smaller) fixed point.
  bool multiple_fixed_points = false;
};

struct FixedPointOptions {
  double tol = 1e-12;
  int max_iter = 100000;
};

/// Largest solution of w sigma^2 = N0 + beta Psi(sigma^2), found by iterating
/// sigma^2 <- (N0 + beta Psi(sigma^2)) / w from (N0 + beta Es) / w. The
/// iteration decreases monotonically onto the largest fixed point.
///
/// Throws InvalidArgument for N0 <= 0, InvalidRegime for ZF with beta/w not
/// below one, and NonConvergence when max_iter is exhausted.
FixedPointResult solve_fixed_point(const MseFunctionSpec& spec, double N0, double beta,
                                   double w = 1.0, const FixedPointOptions& opts = {});

/// Large-system PD (= centralized) SINR of MRC, ZF and L-MMSE.
double sinr_pd_closed_form(EqualizerKind kind, double es_over_n0, double beta);

struct FdSinr {
  std::vector<double> cluster_sigma2;  // +inf for an empty cluster
  std::vector<double> cluster_sinr;
  double sinr = 0.0;    // sum of the per-cluster SINRs
  double sigma2 = 0.0;  // (sum_c 1/sigma_c^2)^-1
};

/// Per-cluster fixed points w_c sigma_c^2 = N0 + beta Psi(sigma_c^2) and their
/// optimal fusion. Clusters with w_c = 0 contribute nothing. The identity
/// sigma_FD^2 = N0 + beta sum_c nu_c Psi(sigma_c^2) is checked to 1e-9.
FdSinr sinr_fd(const MseFunctionSpec& spec, double es_over_n0, double beta,
               std::span<const double> weights, const FixedPointOptions& opts = {});

/// ZF after optimal fusion: (Es/N0)(1 - C beta). Requires C beta < 1.
double sinr_fd_zf_closed(double es_over_n0, double beta, int C);

struct LmmseFdClosedForm {
  double sinr = 0.0;         // post-fusion SINR for the given weights
  double lower_bound = 0.0;  // attained by uniform weights
  double upper_bound = 0.0;  // attained by a single non-empty cluster (= PD)
};

LmmseFdClosedForm sinr_fd_lmmse_closed(double es_over_n0, double beta,
                                       std::span<const double> weights);

/// State evolution sigma_1^2 = (N0 + beta Es)/w, sigma_t^2 = (N0 + beta
/// Psi_LAMA(sigma_{t-1}^2))/w for t = 2..T.
std::vector<double> se_trajectory(const Constellation& constellation, double N0, double beta,
                                  int T, double w = 1.0,
                                  double quadrature_tol = MseFunctionSpec::kDefaultQuadratureTol);

/// I(S; S + n) in bits for uniform S over the constellation and
/// n ~ CN(0, Es / sinr), accurate to about quadrature_tol bits.
double awgn_mutual_information(const Constellation& constellation, double sinr,
                               double quadrature_tol = 1e-12);

/// The same quantity with a tensor Gauss-Hermite rule of the given order.
double awgn_mutual_information_gauss_hermite(const Constellation& constellation, double sinr,
                                             int order);

/// Es/N0 (linear) at which the interference-free channel reaches `rate`.
/// Bisection to 1e-9 bits. Throws Infeasible unless 0 < rate < log2|O|.
double awgn_snr_for_rate(const Constellation& constellation, double rate,
                         double quadrature_tol = 1e-12);

/// Large-system SINR of an equalizer in the PD (or centralized) or FD
/// architecture. FD uses the cluster fractions in `weights`.
double asymptotic_sinr(EqualizerKind kind, Architecture arch,
                       const Constellation& constellation, double es_over_n0, double beta,
                       std::span<const double> weights,
                       double quadrature_tol = MseFunctionSpec::kDefaultQuadratureTol);

struct RateSearchSpec {
  EqualizerKind kind = EqualizerKind::LMMSE;
  Architecture arch = Architecture::PD;
  Constellation constellation = Constellation::qpsk();
  double target_rate = 1.0;
  double snr_loss_db = 1.0;
  std::vector<double> weights{0.5, 0.5};  // FD cluster fractions
  double quadrature_tol = MseFunctionSpec::kDefaultQuadratureTol;
  double beta_min = 1e-6;
  double beta_max = 1.0;
  // Relative bisection resolution on beta.
  double resolution = 1e-4;
  int grid_points = 120;
};

struct RateSearchResult {
  double beta = 0.0;           // largest feasible system ratio
  double inv_beta = 0.0;       // minimum BS-to-UE antenna ratio
  double awgn_es_over_n0 = 0.0;
  double es_over_n0 = 0.0;     // operating point including the SNR loss
};

/// True when the equalizer reaches the target rate at system ratio beta while
/// operating snr_loss_db above the AWGN requirement.
bool rate_feasible(const RateSearchSpec& spec, double awgn_es_over_n0, double beta);

/// Smallest B/U such that the equalizer's decoupled channel achieves the
/// target rate with at most the given SNR loss relative to the interference-free
/// channel. Coarse log grid over [beta_min, beta_max] (which also covers
/// non-monotone feasibility) followed by bisection on the last feasible cell.
/// Throws Infeasible if no beta in range works.
RateSearchResult min_antenna_ratio(const RateSearchSpec& spec);

}  // namespace dbp
