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
#include <string>
#include <vector>

#include "dbp/asymptotics.hpp"
#include "dbp/errors.hpp"

namespace dbp {

bool rate_feasible(const RateSearchSpec& spec, double awgn_es_over_n0, double beta) {
  const double es_over_n0 = awgn_es_over_n0 * db_to_linear(spec.snr_loss_db);
  double sinr = 0.0;
  try {
    sinr = asymptotic_sinr(spec.kind, spec.arch, spec.constellation, es_over_n0, beta,
                           spec.weights, spec.quadrature_tol);
  } catch (const InvalidRegime&) {
    return false;
  }
  return awgn_mutual_information(spec.constellation, sinr) >= spec.target_rate;
}

RateSearchResult min_antenna_ratio(const RateSearchSpec& spec) {
  if (!(spec.snr_loss_db >= 0.0)) throw InvalidArgument("SNR loss must be >= 0 dB");
  if (!(spec.beta_min > 0.0 && spec.beta_min < spec.beta_max)) {
    throw InvalidArgument("need 0 < beta_min < beta_max");
  }
  if (spec.grid_points < 2) throw InvalidArgument("need at least two grid points");

  RateSearchResult out;
  out.awgn_es_over_n0 = awgn_snr_for_rate(spec.constellation, spec.target_rate);
  out.es_over_n0 = out.awgn_es_over_n0 * db_to_linear(spec.snr_loss_db);

  const int n = spec.grid_points;
  const double log_lo = std::log(spec.beta_min);
  const double log_hi = std::log(spec.beta_max);
  std::vector<double> grid(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    grid[static_cast<std::size_t>(i)] =
        i == n - 1 ? spec.beta_max : std::exp(log_lo + (log_hi - log_lo) * i / (n - 1));
  }

  // Scan down from the largest ratio; the first feasible cell holds the answer
  // even when feasibility is not monotone in beta.
  int found = -1;
  for (int i = n - 1; i >= 0; --i) {
    if (rate_feasible(spec, out.awgn_es_over_n0, grid[static_cast<std::size_t>(i)])) {
      found = i;
      break;
    }
  }
  if (found < 0) {
    throw Infeasible(std::string(to_string(spec.kind)) + "-" + std::string(to_string(spec.arch)) +
                     " cannot reach rate " + std::to_string(spec.target_rate) + " with " +
                     std::to_string(spec.snr_loss_db) + " dB SNR loss for any beta in range");
  }

  double lo = grid[static_cast<std::size_t>(found)];
  if (found < n - 1) {
    double hi = grid[static_cast<std::size_t>(found + 1)];
    while (hi - lo > spec.resolution * lo) {
      const double mid = 0.5 * (lo + hi);
      if (rate_feasible(spec, out.awgn_es_over_n0, mid)) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
  }
  out.beta = lo;
  out.inv_beta = 1.0 / lo;
  return out;
}

}  // namespace dbp
