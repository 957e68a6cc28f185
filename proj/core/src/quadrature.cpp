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
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <string>

#include "dbp/errors.hpp"
#include "dbp/quadrature.hpp"

namespace dbp {

namespace {

// Newton iteration on orthonormal Hermite polynomials, seeded with the usual
// asymptotic root estimates (largest root first).
GaussHermiteRule compute_rule(int n) {
  constexpr double kEps = 1e-15;
  constexpr int kMaxIter = 100;
  const double pim4 = 1.0 / std::pow(std::numbers::pi, 0.25);

  GaussHermiteRule rule;
  rule.nodes.assign(static_cast<std::size_t>(n), 0.0);
  rule.weights.assign(static_cast<std::size_t>(n), 0.0);
  auto& x = rule.nodes;
  auto& w = rule.weights;

  const int m = (n + 1) / 2;
  double z = 0.0;
  for (int i = 0; i < m; ++i) {
    if (i == 0) {
      z = std::sqrt(2.0 * n + 1.0) - 1.85575 * std::pow(2.0 * n + 1.0, -0.16667);
    } else if (i == 1) {
      z -= 1.14 * std::pow(static_cast<double>(n), 0.426) / z;
    } else if (i == 2) {
      z = 1.86 * z - 0.86 * x[0];
    } else if (i == 3) {
      z = 1.91 * z - 0.91 * x[1];
    } else {
      z = 2.0 * z - x[static_cast<std::size_t>(i - 2)];
    }
    double pp = 0.0;
    int it = 0;
    for (; it < kMaxIter; ++it) {
      double p1 = pim4;
      double p2 = 0.0;
      for (int j = 0; j < n; ++j) {
        const double p3 = p2;
        p2 = p1;
        p1 = z * std::sqrt(2.0 / (j + 1.0)) * p2 - std::sqrt(static_cast<double>(j) / (j + 1.0)) * p3;
      }
      pp = std::sqrt(2.0 * n) * p2;
      const double z1 = z;
      z = z1 - p1 / pp;
      if (std::abs(z - z1) <= kEps * std::max(1.0, std::abs(z))) break;
    }
    if (it == kMaxIter) {
      throw NonConvergence("Gauss-Hermite root " + std::to_string(i) + " of order " +
                           std::to_string(n) + " did not converge");
    }
    const auto lo = static_cast<std::size_t>(i);
    const auto hi = static_cast<std::size_t>(n - 1 - i);
    x[lo] = z;
    x[hi] = -z;
    w[lo] = 2.0 / (pp * pp);
    w[hi] = w[lo];
  }
  return rule;
}

}  // namespace

const GaussHermiteRule& gauss_hermite(int order) {
  if (order < 1 || order > 400) {
    throw InvalidArgument("Gauss-Hermite order must lie in [1, 400]");
  }
  static std::mutex mu;
  static std::map<int, std::unique_ptr<GaussHermiteRule>> cache;
  std::lock_guard lock(mu);
  auto& slot = cache[order];
  if (!slot) slot = std::make_unique<GaussHermiteRule>(compute_rule(order));
  return *slot;
}

double complex_gaussian_expectation(const std::function<double(cplx)>& f, int order) {
  const auto& rule = gauss_hermite(order);
  double acc = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    for (std::size_t j = 0; j < rule.nodes.size(); ++j) {
      acc += rule.weights[i] * rule.weights[j] * f(cplx(rule.nodes[i], rule.nodes[j]));
    }
  }
  return acc / std::numbers::pi;
}

AdaptiveEstimate gaussian_expectation(const std::function<double(double)>& f, double tol,
                                      int max_intervals) {
  constexpr double kHalfWidth = 9.0;
  constexpr int kInitialIntervals = 36;
  constexpr int kMinHalvings = 2;
  if (!(tol > 0.0)) throw InvalidArgument("gaussian_expectation: tol must be positive");
  if (max_intervals < kInitialIntervals) {
    throw InvalidArgument("gaussian_expectation: max_intervals below the initial grid");
  }

  auto g = [&](double x) { return std::exp(-x * x) * f(x); };

  // `sum` holds the unscaled trapezoid sum over the current grid; halving the
  // step adds the midpoints only.
  int n = kInitialIntervals;
  double h = 2.0 * kHalfWidth / n;
  double sum = 0.5 * (g(-kHalfWidth) + g(kHalfWidth));
  for (int i = 1; i < n; ++i) sum += g(-kHalfWidth + i * h);

  AdaptiveEstimate est;
  est.value = h * sum / std::sqrt(std::numbers::pi);
  est.intervals = n;
  for (int halving = 1; 2 * n <= max_intervals; ++halving) {
    double mid = 0.0;
    for (int i = 0; i < n; ++i) mid += g(-kHalfWidth + (i + 0.5) * h);
    sum += mid;
    n *= 2;
    h *= 0.5;
    const double value = h * sum / std::sqrt(std::numbers::pi);
    est.error = std::abs(value - est.value);
    est.value = value;
    est.intervals = n;
    if (halving >= kMinHalvings && est.error <= tol) {
      est.converged = true;
      break;
    }
  }
  return est;
}

}  // namespace dbp
