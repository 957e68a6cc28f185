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
#include <random>

#include "doctest.h"
#include "dbp/equalize.hpp"
#include "dbp/errors.hpp"
#include "oracles.hpp"

using namespace dbp;
namespace t = dbp::testing;

namespace {

struct Instance {
  ChannelRealization channel;
  SymbolVector s;
  CVector y;
  double N0;
};

Instance make_instance(int B, int U, int C, double N0, std::uint64_t seed,
                       const Constellation& con = Constellation::qpsk()) {
  SystemConfig cfg{B, U, N0, 1.0};
  Rng rng(seed);
  auto ch = sample_rayleigh_channel(cfg, ClusterPartition::uniform(B, C), rng);
  auto s = sample_symbols(con, U, rng);
  CVector y = transmit(ch.H, s.value, N0, rng);
  return {std::move(ch), std::move(s), std::move(y), N0};
}

FusedStats fused_from_partition(const Instance& inst) {
  std::vector<PartialStats> parts;
  const auto& p = inst.channel.partition;
  for (int c = 0; c < p.count(); ++c)
    parts.push_back(local_preprocess(inst.channel.cluster(c), cluster_rows(inst.y, p, c)));
  return fuse_partials(parts);
}

}  // namespace

TEST_CASE("local preprocessing matches naive products") {
  const CMatrix H = t::random_complex_matrix(4, 2, 1);
  const CVector y = t::random_complex_vector(4, 2);
  const auto stats = local_preprocess(H, y);
  const auto G = t::naive_adjoint_product(t::to_dense(H), t::to_dense(H));
  std::vector<cplx> yv(y.data(), y.data() + y.size());
  const auto m = t::naive_adjoint_vector(t::to_dense(H), yv);
  for (int i = 0; i < 2; ++i) {
    CHECK(std::abs(stats.mrc(i) - m[static_cast<std::size_t>(i)]) < 1e-12);
    for (int j = 0; j < 2; ++j) CHECK(std::abs(stats.gram(i, j) - G[i][j]) < 1e-12);
  }
  CHECK((stats.gram - stats.gram.adjoint()).norm() < 1e-12);
}

TEST_CASE("local preprocessing edge cases") {
  const CVector y = t::random_complex_vector(3, 5);
  const auto id = local_preprocess(CMatrix::Identity(3, 3), y);
  CHECK(id.gram == CMatrix::Identity(3, 3));
  CHECK(id.mrc == y);
  const auto zero = local_preprocess(CMatrix::Zero(3, 2), y);
  CHECK(zero.gram.isZero(0.0));
  CHECK(zero.mrc.isZero(0.0));
  CHECK_THROWS_AS(local_preprocess(CMatrix::Zero(3, 2), CVector::Zero(2)), DimensionMismatch);
}

TEST_CASE("fusing partial statistics") {
  const auto inst = make_instance(64, 8, 4, 0.1, 17);
  const auto fused = fused_from_partition(inst);
  const auto central = centralized_stats(inst.channel.H, inst.y);
  CHECK((fused.gram - central.gram).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((fused.mrc - central.mrc).cwiseAbs().maxCoeff() < 1e-12);

  const std::vector<PartialStats> single{local_preprocess(inst.channel.H, inst.y)};
  const auto pass = fuse_partials(single);
  CHECK(pass.gram == single[0].gram);
  CHECK(pass.mrc == single[0].mrc);

  PartialStats a{t::random_complex_matrix(3, 3, 4), t::random_complex_vector(3, 5)};
  PartialStats b{-a.gram, a.mrc};
  const std::vector<PartialStats> cancel{a, b};
  CHECK(fuse_partials(cancel).gram.isZero(0.0));

  CHECK_THROWS_AS(fuse_partials(std::span<const PartialStats>{}), InvalidArgument);
  const std::vector<PartialStats> bad{a, PartialStats{CMatrix::Zero(2, 2), CVector::Zero(2)}};
  CHECK_THROWS_AS(fuse_partials(bad), DimensionMismatch);
}

TEST_CASE("linear equalizers on an identity Gram matrix") {
  const CVector m = t::random_complex_vector(4, 9);
  const FusedStats fused{CMatrix::Identity(4, 4), m};
  const double N0 = 0.2;
  const auto zf = linear_equalize(EqualizerKind::ZF, fused, N0, 1.0);
  const auto mrc = linear_equalize(EqualizerKind::MRC, fused, N0, 1.0);
  const auto mmse = linear_equalize(EqualizerKind::LMMSE, fused, N0, 1.0);
  CHECK(zf.z == m);
  CHECK((mrc.z - m).norm() < 1e-15);
  CHECK((mmse.z * (1.0 + N0) - m).norm() < 1e-14);
  CHECK(zf.sigma2.isApproxToConstant(N0));
}

TEST_CASE("noiseless zero-forcing recovers the symbols") {
  const auto inst = make_instance(4, 4, 1, 0.0, 23);
  const auto out = linear_equalize(EqualizerKind::ZF, centralized_stats(inst.channel.H, inst.y),
                                   0.0, 1.0);
  CHECK(t::max_abs_diff(out.z, inst.s.value) < 1e-10);
  CHECK(out.sigma2.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("L-MMSE matches a dense solve of (H^H H + rho I) z = H^H y") {
  const auto inst = make_instance(8, 2, 1, 0.3, 31);
  const auto out = linear_equalize(EqualizerKind::LMMSE,
                                   centralized_stats(inst.channel.H, inst.y), inst.N0, 1.0);
  const auto Hd = t::to_dense(inst.channel.H);
  auto A = t::naive_adjoint_product(Hd, Hd);
  for (std::size_t i = 0; i < A.size(); ++i) A[i][i] += inst.N0;
  std::vector<cplx> yv(inst.y.data(), inst.y.data() + inst.y.size());
  const auto z = t::solve_vector(A, t::naive_adjoint_vector(Hd, yv));
  for (int u = 0; u < 2; ++u) CHECK(std::abs(out.z(u) - z[static_cast<std::size_t>(u)]) < 1e-10);
}

TEST_CASE("L-MMSE error variance and unit-gain form against dense algebra") {
  const auto inst = make_instance(16, 4, 1, 0.2, 37);
  const auto fused = centralized_stats(inst.channel.H, inst.y);
  const double N0 = inst.N0, Es = 1.0, rho = N0 / Es;
  const auto Gd = t::to_dense(fused.gram);
  auto A = Gd;
  for (std::size_t i = 0; i < A.size(); ++i) A[i][i] += rho;
  const auto W = t::inverse(A);
  // mu = diag(W G); MSE_u = Es (1 - mu_u) for the biased estimate.
  for (std::size_t u = 0; u < 4; ++u) {
    cplx mu{0.0, 0.0};
    for (std::size_t k = 0; k < 4; ++k) mu += W[u][k] * Gd[k][u];
    const double mse = Es * (1.0 - mu.real());
    const auto plain = linear_equalize(EqualizerKind::LMMSE, fused, N0, Es);
    CHECK(plain.sigma2(static_cast<Eigen::Index>(u)) == doctest::Approx(mse).epsilon(1e-10));
    const auto unit = linear_equalize(EqualizerKind::LMMSE, fused, N0, Es, true);
    CHECK(std::abs(unit.z(static_cast<Eigen::Index>(u)) -
                   plain.z(static_cast<Eigen::Index>(u)) / mu.real()) < 1e-10);
    const double expected = (mse - (1.0 - mu.real()) * (1.0 - mu.real()) * Es) /
                            (mu.real() * mu.real());
    CHECK(unit.sigma2(static_cast<Eigen::Index>(u)) == doctest::Approx(expected).epsilon(1e-9));
  }
}

TEST_CASE("MRC and ZF variances against dense algebra") {
  const auto inst = make_instance(32, 6, 1, 0.1, 41);
  const auto fused = centralized_stats(inst.channel.H, inst.y);
  const auto Gd = t::to_dense(fused.gram);
  const auto Ginv = t::inverse(Gd);
  const auto zf = linear_equalize(EqualizerKind::ZF, fused, inst.N0, 1.0);
  const auto mrc = linear_equalize(EqualizerKind::MRC, fused, inst.N0, 1.0);
  for (std::size_t u = 0; u < 6; ++u) {
    const auto i = static_cast<Eigen::Index>(u);
    CHECK(zf.sigma2(i) == doctest::Approx(Ginv[u][u].real() * inst.N0).epsilon(1e-10));
    double interference = 0.0;
    for (std::size_t k = 0; k < 6; ++k)
      if (k != u) interference += std::norm(Gd[u][k]);
    const double g = Gd[u][u].real();
    CHECK(mrc.sigma2(i) ==
          doctest::Approx(inst.N0 / g + interference / (g * g)).epsilon(1e-10));
    CHECK(std::abs(mrc.z(i) - fused.mrc(i) / g) < 1e-12);
  }
}

TEST_CASE("linear equalizer error paths") {
  FusedStats singular{CMatrix::Zero(2, 2), CVector::Zero(2)};
  singular.gram(0, 0) = 1.0;
  CHECK_THROWS_AS(linear_equalize(EqualizerKind::ZF, singular, 0.1, 1.0), SingularGram);
  CHECK_THROWS_AS(linear_equalize(EqualizerKind::MRC, singular, 0.1, 1.0), SingularGram);
  const FusedStats ok{CMatrix::Identity(2, 2), CVector::Zero(2)};
  CHECK_THROWS_AS(linear_equalize(EqualizerKind::LAMA, ok, 0.1, 1.0), InvalidArgument);
}

TEST_CASE("posterior statistics") {
  const auto qpsk = Constellation::qpsk();
  SUBCASE("symmetric point") {
    for (double tau : {1e-3, 0.5, 10.0}) {
      const auto p = posterior_stats(cplx{0.0, 0.0}, tau, qpsk);
      CHECK(std::abs(p.mean) < 1e-15);
      CHECK(p.variance == doctest::Approx(1.0).epsilon(1e-14));
    }
  }
  SUBCASE("hard-decision limit") {
    const cplx a = qpsk[2];
    const auto p = posterior_stats(a + cplx{0.05, -0.02}, 1e-9, qpsk);
    CHECK(std::abs(p.mean - a) < 1e-12);
    CHECK(p.variance < 1e-12);
  }
  SUBCASE("naive summation in extended precision") {
    const cplx z{0.3, 0.1};
    const long double tau = 0.5L;
    long double den = 0.0L, re = 0.0L, im = 0.0L, second = 0.0L;
    for (const auto& a : qpsk.symbols()) {
      const long double dr = z.real() - a.real(), di = z.imag() - a.imag();
      const long double p = std::exp(-(dr * dr + di * di) / tau);
      den += p;
      re += p * a.real();
      im += p * a.imag();
      second += p * (static_cast<long double>(a.real()) * a.real() +
                     static_cast<long double>(a.imag()) * a.imag());
    }
    const long double mr = re / den, mi = im / den;
    const auto p = posterior_stats(z, 0.5, qpsk);
    CHECK(std::abs(p.mean.real() - static_cast<double>(mr)) < 1e-12);
    CHECK(std::abs(p.mean.imag() - static_cast<double>(mi)) < 1e-12);
    CHECK(std::abs(p.variance - static_cast<double>(second / den - mr * mr - mi * mi)) < 1e-12);
  }
  SUBCASE("far-away observations do not underflow") {
    const auto p = posterior_stats(cplx{40.0, -35.0}, 1e-6, Constellation::qam16());
    CHECK(std::isfinite(p.mean.real()));
    CHECK(std::isfinite(p.variance));
  }
  SUBCASE("variance bound") {
    std::mt19937_64 rng(3);
    std::normal_distribution<double> n(0.0, 2.0);
    std::uniform_real_distribution<double> lt(-8.0, 2.0);
    for (const auto& con : {qpsk, Constellation::qam16(), Constellation::qam64()}) {
      for (int i = 0; i < 2000; ++i) {
        const auto p = posterior_stats(cplx{n(rng), n(rng)}, std::pow(10.0, lt(rng)), con);
        CHECK(p.variance >= 0.0);
        CHECK(p.variance <= con.es() + 1e-12);
      }
    }
  }
  CHECK_THROWS_AS(posterior_stats(cplx{}, 0.0, qpsk), InvalidArgument);
  CHECK_THROWS_AS(posterior_stats(cplx{}, -1.0, qpsk), InvalidArgument);
}

TEST_CASE("LAMA first iteration") {
  const auto qpsk = Constellation::qpsk();
  const auto inst = make_instance(32, 8, 1, 0.1, 43);
  const auto fused = centralized_stats(inst.channel.H, inst.y);
  const auto r = lama_equalize(fused, qpsk, inst.N0, 0.25, LamaParams{1, 1.0});
  REQUIRE(r.trace.z.size() == 1);
  CHECK(r.trace.phi[0] == doctest::Approx(1.0));
  CHECK(t::max_abs_diff(r.trace.z[0], fused.mrc) < 1e-15);
  CHECK(r.output.sigma2.isApproxToConstant(inst.N0 + 0.25 * 1.0));

  const FusedStats orth{CMatrix::Identity(8, 8), inst.s.value};
  const auto one = lama_equalize(orth, qpsk, 1e-12, 1.0, LamaParams{1, 1.0});
  CHECK(one.output.z == inst.s.value);
}

TEST_CASE("LAMA on an orthogonal noiseless system drives phi to zero") {
  const auto qpsk = Constellation::qpsk();
  Rng rng(8);
  const auto s = sample_symbols(qpsk, 8, rng);
  const FusedStats orth{CMatrix::Identity(8, 8), s.value};
  const auto r = lama_equalize(orth, qpsk, 1e-9, 0.5, LamaParams{6, 1.0});
  for (std::size_t t = 1; t < r.trace.phi.size(); ++t) CHECK(r.trace.phi[t] <= r.trace.phi[t - 1]);
  CHECK(r.trace.phi.back() < 1e-12);
  CHECK(t::max_abs_diff(r.output.z, s.value) < 1e-9);
}

TEST_CASE("LAMA matches the centralized oracle iteration by iteration") {
  const auto qpsk = Constellation::qpsk();
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto inst = make_instance(64, 16, 4, 0.05, 100 + seed);
    const auto pd = lama_equalize(fused_from_partition(inst), qpsk, inst.N0, 0.25,
                                  LamaParams{5, 1.0});
    const auto oracle = t::centralized_lama(inst.channel.H, inst.y, inst.N0, qpsk, 5);
    REQUIRE(pd.trace.z.size() == 5);
    for (std::size_t it = 0; it < 5; ++it) {
      CHECK(t::max_abs_diff(pd.trace.z[it], oracle.z[it]) < 1e-10);
      CHECK(std::abs(pd.trace.phi[it] - oracle.phi[it]) < 1e-10);
    }
  }
}

TEST_CASE("damped LAMA still equalizes a well-conditioned system") {
  const auto inst = make_instance(128, 8, 1, 0.01, 55);
  const auto r = lama_equalize(centralized_stats(inst.channel.H, inst.y),
                               Constellation::qpsk(), inst.N0, 8.0 / 128.0, LamaParams{10, 0.75});
  CHECK(hard_detect(r.output.z, Constellation::qpsk()) == inst.s.index);
}

TEST_CASE("LAMA argument checks") {
  const FusedStats f{CMatrix::Identity(2, 2), CVector::Zero(2)};
  const auto q = Constellation::qpsk();
  CHECK_THROWS_AS(lama_equalize(f, q, 0.1, 1.0, LamaParams{0, 1.0}), InvalidArgument);
  CHECK_THROWS_AS(lama_equalize(f, q, 0.1, 1.0, LamaParams{3, 0.0}), InvalidArgument);
  CHECK_THROWS_AS(lama_equalize(f, q, 0.1, 1.0, LamaParams{3, 1.5}), InvalidArgument);
}

TEST_CASE("hard detection") {
  const auto qpsk = Constellation::qpsk();
  CVector z(3);
  z << qpsk[3], cplx{0.0, 0.0}, cplx{0.9, 1.1};
  const auto d = hard_detect(z, qpsk);
  CHECK(d[0] == 3);
  CHECK(d[1] == 0);
  CHECK(qpsk[static_cast<std::size_t>(d[2])] ==
        cplx{1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0)});
  const auto q16 = Constellation::qam16();
  CVector all(16);
  for (int k = 0; k < 16; ++k) all(k) = q16[static_cast<std::size_t>(k)];
  const auto idx = hard_detect(all, q16);
  for (int k = 0; k < 16; ++k) CHECK(idx[static_cast<std::size_t>(k)] == k);
}

TEST_CASE("L-MMSE approaches ZF as the noise vanishes") {
  const auto inst = make_instance(64, 8, 1, 0.0, 61);
  const auto fused = centralized_stats(inst.channel.H, inst.y);
  const auto zf = linear_equalize(EqualizerKind::ZF, fused, 1e-12, 1.0);
  const auto mmse = linear_equalize(EqualizerKind::LMMSE, fused, 1e-12, 1.0);
  CHECK(t::max_abs_diff(zf.z, mmse.z) < 1e-4);
}

TEST_CASE("error variances are nonnegative on random instances") {
  const auto qpsk = Constellation::qpsk();
  std::uniform_real_distribution<double> lognoise(-4.0, 0.5);
  std::mt19937_64 rng(71);
  for (int i = 0; i < 1000; ++i) {
    const double N0 = std::pow(10.0, lognoise(rng));
    const auto inst = make_instance(24, 6, 1, N0, 1000 + static_cast<std::uint64_t>(i));
    const auto fused = centralized_stats(inst.channel.H, inst.y);
    for (auto kind : {EqualizerKind::MRC, EqualizerKind::ZF, EqualizerKind::LMMSE,
                      EqualizerKind::LAMA}) {
      const auto out = equalize(kind, fused, qpsk, N0, 0.25, LamaParams{5, 1.0});
      REQUIRE(out.sigma2.size() == 6);
      CHECK(out.sigma2.minCoeff() >= 0.0);
    }
  }
}
