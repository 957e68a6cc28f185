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

#include <functional>
#include <vector>

#include "dbp/types.hpp"

namespace dbp {

/// Nodes and weights for integral of exp(-x^2) f(x) over the real line.
struct GaussHermiteRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Cached per order; safe to call from several threads.
const GaussHermiteRule& gauss_hermite(int order);

/// E[f(Z)] for Z ~ CN(0, 1) with a tensor-product rule of the given order per
/// real dimension.
double complex_gaussian_expectation(const std::function<double(cplx)>& f, int order);

struct AdaptiveEstimate {
  double value = 0.0;
  // |T(h) - T(2h)| at the final step size.
  double error = 0.0;
  int intervals = 0;
  bool converged = false;
};

/// E[f(X)] for real X ~ N(0, 1/2), the same weight exp(-x^2)/sqrt(pi) that the
/// Gauss-Hermite rule integrates. Uses the trapezoid rule on [-9, 9] with
/// repeated halving of the step until two successive estimates differ by at
/// most `tol`. The trapezoid rule converges geometrically for integrands
/// analytic in a strip around the real axis, which includes the softmax-type
/// posterior means that make Gauss-Hermite converge only algebraically.
AdaptiveEstimate gaussian_expectation(const std::function<double(double)>& f,
                                      double tol = 1e-13, int max_intervals = 1 << 18);

}  // namespace dbp
