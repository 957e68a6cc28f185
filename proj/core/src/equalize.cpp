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
#include <string>

#include "dbp/equalize.hpp"
#include "dbp/errors.hpp"

namespace dbp {

namespace {

// Relative pivot threshold below which a Cholesky factor is treated as singular.
constexpr double kPivotTolerance = 1e-12;

std::string dims(Eigen::Index r, Eigen::Index c) {
  return std::to_string(r) + "x" + std::to_string(c);
}

// Inverse of a Hermitian positive-definite matrix through its Cholesky factor.
CMatrix hermitian_inverse(const CMatrix& A, const char* what) {
  Eigen::LLT<CMatrix> llt(A);
  if (llt.info() != Eigen::Success) {
    throw SingularGram(std::string(what) + ": Cholesky factorization failed");
  }
  const double max_diag = A.diagonal().real().cwiseAbs().maxCoeff();
  const CMatrix Lm = llt.matrixL();
  const double min_pivot = Lm.diagonal().real().minCoeff();
  if (!(min_pivot * min_pivot > kPivotTolerance * max_diag)) {
    throw SingularGram(std::string(what) + ": matrix is numerically singular");
  }
  return llt.solve(CMatrix::Identity(A.rows(), A.cols()));
}

RVector checked_variances(const CVector& diag, double scale) {
  RVector out(diag.size());
  const double tol = 1e-10 * std::max(scale, 1.0);
  for (Eigen::Index u = 0; u < diag.size(); ++u) {
    const double v = diag(u).real();
    if (!std::isfinite(v) || v < -tol) {
      throw NegativeVariance("error variance of UE " + std::to_string(u) + " is " +
                             std::to_string(v));
    }
    out(u) = std::max(v, 0.0);
  }
  return out;
}

// diag(A G A^H N0 + (A G - I)(A G - I)^H Es) for the estimate z = A y_mrc,
// where A G plays the role of the effective channel seen by each UE.
RVector linear_error_variance(const CMatrix& A, const CMatrix& G, double N0, double Es) {
  const Eigen::Index U = G.rows();
  const CMatrix AG = A * G;
  const CMatrix residual = AG - CMatrix::Identity(U, U);
  CVector diag(U);
  for (Eigen::Index u = 0; u < U; ++u) {
    // Row-wise products avoid forming the full U x U products.
    const cplx noise = A.row(u).dot(AG.row(u));
    const double interference = residual.row(u).squaredNorm();
    diag(u) = noise * N0 + interference * Es;
  }
  return checked_variances(diag, N0 + Es);
}

}  // namespace

PartialStats local_preprocess(const Eigen::Ref<const CMatrix>& H_c,
                              const Eigen::Ref<const CVector>& y_c) {
  if (H_c.rows() != y_c.size()) {
    throw DimensionMismatch("H_c is " + dims(H_c.rows(), H_c.cols()) + " but y_c has " +
                            std::to_string(y_c.size()) + " entries");
  }
  PartialStats out;
  out.gram = H_c.adjoint() * H_c;
  out.mrc = H_c.adjoint() * y_c;
  return out;
}

FusedStats fuse_partials(std::span<const PartialStats> parts) {
  if (parts.empty()) throw InvalidArgument("fuse_partials: no partial statistics");
  const Eigen::Index U = parts.front().mrc.size();
  FusedStats out{CMatrix::Zero(U, U), CVector::Zero(U)};
  for (const auto& p : parts) {
    if (p.mrc.size() != U || p.gram.rows() != U || p.gram.cols() != U) {
      throw DimensionMismatch("fuse_partials: parts disagree on the number of UEs");
    }
    out.gram += p.gram;
    out.mrc += p.mrc;
  }
  return out;
}

EqualizerOutput linear_equalize(EqualizerKind kind, const FusedStats& fused, double N0,
                                double Es, bool unit_gain) {
  const CMatrix& G = fused.gram;
  const Eigen::Index U = fused.users();
  if (G.rows() != U || G.cols() != U) {
    throw DimensionMismatch("Gram matrix is " + dims(G.rows(), G.cols()) +
                            " but the MRC vector has " + std::to_string(U) + " entries");
  }
  if (!(N0 >= 0.0) || !(Es > 0.0)) throw InvalidArgument("need N0 >= 0 and Es > 0");

  EqualizerOutput out;
  out.kind = kind;
  switch (kind) {
    case EqualizerKind::MRC: {
      const RVector d = G.diagonal().real();
      for (Eigen::Index u = 0; u < U; ++u) {
        if (!(d(u) > 0.0)) {
          throw SingularGram("MRC: zero diagonal entry of G for UE " + std::to_string(u));
        }
      }
      const CMatrix A = d.cwiseInverse().cast<cplx>().asDiagonal();
      out.z = A * fused.mrc;
      out.sigma2 = linear_error_variance(A, G, N0, Es);
      break;
    }
    case EqualizerKind::ZF: {
      const CMatrix Ginv = hermitian_inverse(G, "ZF");
      out.z = Ginv * fused.mrc;
      RVector s2 = Ginv.diagonal().real() * N0;
      out.sigma2 = checked_variances(s2.cast<cplx>(), N0);
      break;
    }
    case EqualizerKind::LMMSE: {
      const double rho = N0 / Es;
      CMatrix R = G;
      R.diagonal().array() += rho;
      const CMatrix W = hermitian_inverse(R, "L-MMSE");
      out.z = W * fused.mrc;
      out.sigma2 = linear_error_variance(W, G, N0, Es);
      if (unit_gain) {
        // W G = G (G + rho I)^-1 is Hermitian, so its diagonal is real.
        const RVector mu = (W * G).diagonal().real();
        for (Eigen::Index u = 0; u < U; ++u) {
          if (!(mu(u) > 0.0)) {
            throw SingularGram("L-MMSE: zero gain for UE " + std::to_string(u));
          }
          const double bias = (1.0 - mu(u)) * (1.0 - mu(u)) * Es;
          out.z(u) /= mu(u);
          out.sigma2(u) = std::max(out.sigma2(u) - bias, 0.0) / (mu(u) * mu(u));
        }
      }
      break;
    }
    case EqualizerKind::LAMA:
      throw InvalidArgument("linear_equalize: LAMA is not a linear equalizer");
  }
  return out;
}

PosteriorStats posterior_stats(cplx z, double tau, const Constellation& constellation) {
  if (!(tau > 0.0)) throw InvalidArgument("posterior_stats: tau must be positive");
  const auto symbols = constellation.symbols();
  double min_dist = std::numeric_limits<double>::infinity();
  for (const auto& a : symbols) min_dist = std::min(min_dist, std::norm(z - a));
  double total = 0.0;
  double second = 0.0;
  cplx first{0.0, 0.0};
  for (const auto& a : symbols) {
    const double w = std::exp(-(std::norm(z - a) - min_dist) / tau);
    total += w;
    first += w * a;
    second += w * std::norm(a);
  }
  const cplx mean = first / total;
  const double variance = std::max(second / total - std::norm(mean), 0.0);
  return {mean, variance};
}

LamaResult lama_equalize(const FusedStats& fused, const Constellation& constellation,
                         double N0, double beta, const LamaParams& params) {
  const CMatrix& G = fused.gram;
  const Eigen::Index U = fused.users();
  if (G.rows() != U || G.cols() != U) {
    throw DimensionMismatch("LAMA: Gram matrix and MRC vector disagree on U");
  }
  if (params.max_iterations < 1) throw InvalidArgument("LAMA: max_iterations must be >= 1");
  if (!(params.damping > 0.0 && params.damping <= 1.0)) {
    throw InvalidArgument("LAMA: damping must lie in (0, 1]");
  }
  if (!(N0 >= 0.0) || !(beta >= 0.0)) throw InvalidArgument("LAMA: need N0 >= 0, beta >= 0");

  cplx prior_mean{0.0, 0.0};
  for (const auto& a : constellation.symbols()) prior_mean += a;
  prior_mean /= static_cast<double>(constellation.size());
  const double prior_var = constellation.es() - std::norm(prior_mean);

  CVector s = CVector::Constant(U, prior_mean);
  CVector v = CVector::Zero(U);
  double phi = prior_var;
  const double theta = params.damping;

  LamaResult result;
  result.trace.z.reserve(static_cast<std::size_t>(params.max_iterations));
  result.trace.phi.reserve(static_cast<std::size_t>(params.max_iterations));

  CVector z(U);
  CVector s_new(U);
  for (int t = 1;; ++t) {
    z = fused.mrc + s - G * s + v;
    if (!z.allFinite() || !std::isfinite(phi)) {
      throw Divergence("LAMA diverged at iteration " + std::to_string(t), t);
    }
    result.trace.z.push_back(z);
    result.trace.phi.push_back(phi);
    if (t == params.max_iterations) break;

    // A zero effective variance only arises for N0 = 0 after exact recovery.
    const double tau = std::max(N0 + beta * phi, std::numeric_limits<double>::min());
    double var_sum = 0.0;
    for (Eigen::Index u = 0; u < U; ++u) {
      const auto post = posterior_stats(z(u), tau, constellation);
      s_new(u) = post.mean;
      var_sum += post.variance;
    }
    const double phi_next = var_sum / static_cast<double>(U);
    v = (beta * phi_next / tau) * (z - s);
    s = theta * s_new + (1.0 - theta) * s;
    phi = phi_next;
  }

  result.output.kind = EqualizerKind::LAMA;
  result.output.z = z;
  result.output.sigma2 = RVector::Constant(U, N0 + beta * phi);
  return result;
}

EqualizerOutput equalize(EqualizerKind kind, const FusedStats& fused,
                         const Constellation& constellation, double N0, double beta,
                         const LamaParams& lama, bool unit_gain) {
  if (kind == EqualizerKind::LAMA) {
    return lama_equalize(fused, constellation, N0, beta, lama).output;
  }
  return linear_equalize(kind, fused, N0, constellation.es(), unit_gain);
}

std::vector<int> hard_detect(const CVector& z, const Constellation& constellation) {
  std::vector<int> out(static_cast<std::size_t>(z.size()));
  const auto symbols = constellation.symbols();
  for (Eigen::Index u = 0; u < z.size(); ++u) {
    int best = 0;
    double best_dist = std::norm(z(u) - symbols[0]);
    for (std::size_t k = 1; k < symbols.size(); ++k) {
      const double d = std::norm(z(u) - symbols[k]);
      if (d < best_dist) {
        best_dist = d;
        best = static_cast<int>(k);
      }
    }
    out[static_cast<std::size_t>(u)] = best;
  }
  return out;
}

}  // namespace dbp
