#include "fcat/fock.hpp"
#include "fcat/group.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace fcat;

namespace {

// exp(-|b|^2/2 - |c|^2/2 + conj(b) c)
cplx coherent_overlap(cplx b, cplx c) { return std::exp(-std::norm(b) / 2.0 - std::norm(c) / 2.0 + std::conj(b) * c); }

FockState two_mode(cplx a, cplx b, int cutoff = kDefaultCutoff) { return coherent_state(Vec2(a, b), cutoff); }

}  // namespace

TEST(CoherentState, VacuumAndNormalization) {
  const auto vac = coherent_state(0.0, 10);
  EXPECT_EQ(vac[0], cplx(1.0));
  EXPECT_EQ(vac.amplitudes().tail(10).norm(), 0.0);
  EXPECT_LE(coherent_state(cplx(1.2, -0.7), kDefaultCutoff).norm_deviation(), 1e-12);
}

TEST(CoherentState, OverlapMatchesClosedForm) {
  const std::vector<cplx> amps{0.0, 1.0, cplx(0, 1.5), cplx(-1.2, 0.8), cplx(2.0, 0.0), cplx(0.3, -1.9)};
  for (auto b : amps)
    for (auto c : amps) {
      const cplx numeric = coherent_state(b, 30).inner(coherent_state(c, 30));
      EXPECT_LE(std::abs(numeric - coherent_overlap(b, c)), 1e-10);
    }
}

TEST(CoherentState, OrthogonalQuadrantOverlap) {
  const double a = canonical_alpha();
  const double overlap = std::abs(coherent_state(a, kDefaultCutoff).inner(coherent_state(I_UNIT * a, kDefaultCutoff)));
  EXPECT_NEAR(overlap, std::exp(-std::numbers::pi / 2.0), 1e-12);
  EXPECT_NEAR(overlap, 0.2079, 1e-4);
}

TEST(CoherentState, StarvedCutoffIsRejected) {
  EXPECT_THROW(coherent_state(canonical_alpha(), 5), numerical_error);
  EXPECT_GT(coherent_tail_mass(canonical_alpha(), 5), 1e-4);
  EXPECT_LT(coherent_tail_mass(1.6, kDefaultCutoff), 1e-14);
}

TEST(CatState, ParitySupport) {
  const auto even = cat_state(canonical_alpha(), 0, kDefaultCutoff);
  const auto odd = cat_state(canonical_alpha(), 1, kDefaultCutoff);
  for (int n = 1; n <= kDefaultCutoff; n += 2) EXPECT_EQ(even[n], cplx(0.0));
  for (int n = 0; n <= kDefaultCutoff; n += 2) EXPECT_EQ(odd[n], cplx(0.0));
  EXPECT_LE(even.norm_deviation(), 1e-12);
  EXPECT_THROW(cat_state(0.0, 1, 10), input_error);
  EXPECT_THROW(cat_state(1.0, 2, 10), input_error);
}

TEST(CatState, QuadrantCatsAreOrthonormal) {
  // Opposite parities are orthogonal; even cats also across quadrants at a = sqrt(pi/2).
  // Odd cats across quadrants overlap by 1 / sinh(pi/2).
  const double a = canonical_alpha();
  for (int k = 0; k < 2; ++k)
    for (int l = 0; l < 2; ++l)
      for (int m = 0; m < 2; ++m)
        for (int n = 0; n < 2; ++n) {
          const auto x = cat_state(std::pow(I_UNIT, m) * a, k, kDefaultCutoff);
          const auto y = cat_state(std::pow(I_UNIT, n) * a, l, kDefaultCutoff);
          double expected = (k == l && m == n) ? 1.0 : 0.0;
          if (k == 1 && l == 1 && m != n) expected = 1.0 / std::sinh(std::numbers::pi / 2);
          EXPECT_NEAR(std::abs(x.inner(y)), expected, 1e-10) << k << l << m << n;
        }
}

TEST(PassiveGaussian, IdentityAndSwap) {
  const FockConfig cfg(2, kDefaultCutoff);
  const auto id = passive_gaussian_unitary(paulis::I(), cfg);
  EXPECT_LE((id.matrix() - Mat::Identity(cfg.dimension(), cfg.dimension())).norm(), 1e-12);

  const auto swap = passive_gaussian_unitary(paulis::X(), cfg);
  const cplx b(0.9, -0.4), c(-0.3, 1.1);
  EXPECT_LE(infidelity(swap.apply(two_mode(b, c)), two_mode(c, b)), 1e-10);
  EXPECT_LE((swap.apply(two_mode(b, c)) - two_mode(c, b)).norm(), 1e-10);
  EXPECT_THROW(passive_gaussian_unitary(paulis::X(), FockConfig(1, 10)), input_error);
  EXPECT_THROW(passive_gaussian_unitary(Mat2(2.0 * paulis::X()), cfg), input_error);
}

TEST(PassiveGaussian, HadamardMovesTheCanonicalConstellation) {
  const FockConfig cfg(2, kDefaultCutoff);
  const double a = canonical_alpha();
  const auto h = passive_gaussian_unitary(paulis::H(), cfg);
  const auto out = h.apply(two_mode(a, I_UNIT * a));
  const auto expected = two_mode(std::polar(a, std::numbers::pi / 4), std::polar(a, -std::numbers::pi / 4));
  EXPECT_LE(infidelity(out, expected), 1e-9);
}

TEST(PassiveGaussian, ZIsParityOfSecondMode) {
  const FockConfig cfg(2, 12);
  const auto z = passive_gaussian_unitary(paulis::Z(), cfg);
  const auto parity = number_diagonal_operator([](std::span<const int> n) { return n[1] % 2 ? -1.0 : 1.0; }, cfg);
  EXPECT_LE((z.matrix() - parity.to_dense().matrix()).norm(), 1e-10);
}

TEST(PassiveGaussian, RepresentationOnCoherentStates) {
  const FockConfig cfg(2, kDefaultCutoff);
  std::mt19937 rng(7);
  std::normal_distribution<double> gauss;
  auto random_unitary = [&] {
    Mat2 m;
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) m(i, j) = cplx(gauss(rng), gauss(rng));
    Eigen::HouseholderQR<Mat2> qr(m);
    return Mat2(qr.householderQ());
  };
  const std::vector<Vec2> probes{{cplx(1.0, 0.0), cplx(0.0, 1.0)}, {cplx(-0.5, 0.7), cplx(0.8, 0.2)},
                                 {cplx(0.0, 0.0), cplx(1.2, -0.3)}};
  for (int trial = 0; trial < 5; ++trial) {
    const Mat2 u = random_unitary(), v = random_unitary();
    const auto pu = passive_gaussian_unitary(u, cfg);
    const auto pv = passive_gaussian_unitary(v, cfg);
    const auto puv = passive_gaussian_unitary(Mat2(u * v), cfg);
    // Photon-number blocks below the cutoff are complete, so unitary there.
    std::vector<Eigen::Index> low;
    for (Eigen::Index i = 0; i < cfg.dimension(); ++i) {
      const auto n = cfg.multi_index(i);
      if (n[0] + n[1] <= cfg.cutoff) low.push_back(i);
    }
    const Mat cols = pu.matrix()(Eigen::all, low);
    EXPECT_LE(unitarity_residual(cols), 1e-10);
    for (const auto& alpha : probes) {
      const auto state = coherent_state(alpha, cfg.cutoff);
      EXPECT_LE((pu.apply(pv.apply(state)) - puv.apply(state)).norm(), 1e-9);
      // pi(U)|a> = |U a>, exactly (no phase).
      EXPECT_GE(std::abs(coherent_state(Vec2(u * alpha), cfg.cutoff).inner(pu.apply(state))), 1.0 - 1e-9);
    }
  }
}

TEST(PassiveGaussian, CommutesWithTotalPhotonNumber) {
  const FockConfig cfg(2, 10);
  const auto pu = passive_gaussian_unitary(paulis::H(), cfg);
  Eigen::VectorXd total(cfg.dimension());
  for (Eigen::Index i = 0; i < total.size(); ++i) {
    const auto n = cfg.multi_index(i);
    total[i] = n[0] + n[1];
  }
  const Mat number = total.cast<cplx>().asDiagonal();
  EXPECT_LE((pu.matrix() * number - number * pu.matrix()).norm(), 1e-10);
}

TEST(NumberDiagonal, ConstantSelfKerrAndValidation) {
  const FockConfig cfg(1, 20);
  const auto one = number_diagonal_operator([](std::span<const int>) { return cplx(1.0); }, cfg);
  EXPECT_EQ((one.diagonal() - Vec::Ones(cfg.dimension())).norm(), 0.0);

  // i^{n^2} = 1 on even n, i on odd n.
  const auto kerr = number_diagonal_operator(
      [](std::span<const int> n) { return std::pow(I_UNIT, (n[0] * n[0]) % 4); }, cfg);
  for (int n = 0; n <= 20; ++n) EXPECT_LE(std::abs(kerr.diagonal()[n] - (n % 2 ? I_UNIT : cplx(1.0))), 1e-15);

  EXPECT_THROW(number_diagonal_operator([](std::span<const int>) { return cplx(2.0); }, cfg), input_error);
}

TEST(Ladder, AnnihilationEigenstates) {
  const FockConfig cfg(1, 10);
  const auto vac = FockState(cfg, Vec::Unit(cfg.dimension(), 0));
  EXPECT_EQ(annihilate(vac, 0).norm(), 0.0);

  const cplx a(0.8, 0.6);
  const auto coh = coherent_state(a, 30);
  EXPECT_LE((annihilate(coh, 0) - a * coh).norm(), 1e-9);

  const auto two = coherent_state(Vec2(a, -a), 25);
  EXPECT_LE((annihilate(two, 1) - (-a) * two).norm(), 1e-9);
  EXPECT_THROW(annihilate(two, 2), input_error);

  // <m|a^dag|n> = conj <n|a|m>
  const auto s = coherent_state(cplx(0.3, 0.2), 10);
  const auto t = coherent_state(cplx(-0.1, 0.5), 10);
  EXPECT_LE(std::abs(t.inner(create(s, 0)) - std::conj(s.inner(annihilate(t, 0)))), 1e-14);
}

TEST(HermitianRoots, DiagonalAndIdentity) {
  const auto id = hermitian_inv_sqrt(Mat::Identity(3, 3), 1e-12);
  EXPECT_LE((id.inv_sqrt - Mat::Identity(3, 3)).norm(), 1e-15);
  Mat d = Mat::Zero(2, 2);
  d(0, 0) = 4.0;
  d(1, 1) = 1.0;
  const auto r = hermitian_inv_sqrt(d, 1e-12);
  EXPECT_NEAR(r.inv_sqrt(0, 0).real(), 0.5, 1e-15);
  EXPECT_NEAR(r.inv_sqrt(1, 1).real(), 1.0, 1e-15);
  EXPECT_NEAR(r.sqrt(0, 0).real(), 2.0, 1e-15);
}

TEST(HermitianRoots, RandomPositiveMatrices) {
  std::mt19937 rng(11);
  std::normal_distribution<double> gauss;
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 2 + trial % 7;
    Mat b(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) b(i, j) = cplx(gauss(rng), gauss(rng));
    const Mat a = b * b.adjoint() + 0.1 * Mat::Identity(n, n);
    const auto r = hermitian_inv_sqrt(a, 1e-12);
    EXPECT_LE((r.inv_sqrt * a * r.inv_sqrt - Mat::Identity(n, n)).norm(), 1e-9);
    EXPECT_LE((r.sqrt * r.sqrt - a).norm(), 1e-9 * a.norm());
    EXPECT_LE((psd_sqrt(a) - r.sqrt).norm(), 1e-9 * a.norm());
  }
}

TEST(HermitianRoots, SingularAndNonHermitianAreRejected) {
  Mat singular = Mat::Ones(3, 3);
  EXPECT_THROW(hermitian_inv_sqrt(singular, 1e-12), numerical_error);
  Mat skew = Mat::Zero(2, 2);
  skew(0, 1) = 1.0;
  EXPECT_THROW(hermitian_inv_sqrt(skew, 1e-12), input_error);
  // the pseudo-inverse keeps the range: J/3 is a projector.
  const Mat p = psd_pinv_sqrt(singular, 1e-12);
  EXPECT_LE((p * singular * p - singular / 3.0).norm(), 1e-12);
}
