#include "fcat/encoder.hpp"

#include <gtest/gtest.h>

using namespace fcat;

namespace {

struct D8Fixture {
  FiniteMatrixGroup group = make_group(GroupSpec::d8());
  GroupFourierTransform fourier = build_fourier_transform(group, irrep_table(group, GroupSpec::d8()));
};

const D8Fixture& d8() {
  static const D8Fixture fixture;
  return fixture;
}

CodeBasis canonical_code(double alpha = canonical_alpha()) {
  return build_code_basis(make_constellation(d8().group, alpha, std::numbers::pi / 2), d8().fourier);
}

Mat basis_gram(const CodeBasis& code) {
  Mat g(4, 4);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) g(i, j) = code.basis_states[i].inner(code.basis_states[j]);
  return g;
}

}  // namespace

TEST(Constellation, CanonicalPointsAreDistinct) {
  const auto c = make_constellation(d8().group, canonical_alpha(), std::numbers::pi / 2);
  ASSERT_EQ(c.states.size(), 8u);
  EXPECT_GT(min_euclidean_distance(c), 0.0);
  EXPECT_LE((c.points[d8().group.identity_index()] - Vec2(canonical_alpha(), I_UNIT * canonical_alpha())).norm(),
            1e-15);
  for (const auto& s : c.states) EXPECT_LE(s.norm_deviation(), 1e-12);
}

TEST(Constellation, RealDiagonalVectorIsDegenerate) {
  // X fixes (a, a).
  EXPECT_THROW(make_constellation(d8().group, 1.0, 0.0), input_error);
  EXPECT_THROW(make_constellation(d8().group, 0.0, 1.0), input_error);
}

TEST(Constellation, TrivialGroupHasOneState) {
  const auto trivial = make_group(GroupSpec::cyclic(1));
  const Vec2 a(0.7, cplx(0, -0.4));
  const auto c = make_constellation(trivial, a);
  ASSERT_EQ(c.states.size(), 1u);
  EXPECT_LE((c.states[0] - coherent_state(a, kDefaultCutoff)).norm(), 1e-15);
  EXPECT_THROW(min_euclidean_distance(c), input_error);

  const auto basis = orthonormal_group_basis(c, gram_matrix(c));
  EXPECT_LE((basis[0] - c.states[0]).norm(), 1e-15);
}

TEST(Constellation, MinimumDistance) {
  const double a = 1.1;
  EXPECT_NEAR(min_euclidean_distance(make_constellation(d8().group, a, std::numbers::pi / 2)), 2 * a, 1e-12);
  double best = 0.0, best_phi = 0.0;
  for (int k = 1; k < 60; ++k) {
    const double phi = std::numbers::pi * k / 60.0;
    const double d = min_euclidean_distance(make_constellation(d8().group, a, phi));
    if (d > best + 1e-12) best = d, best_phi = phi;
  }
  EXPECT_NEAR(best_phi, std::numbers::pi / 2, 1e-12);
}

TEST(Gram, KnownEntriesAtCanonicalAmplitude) {
  const auto c = make_constellation(d8().group, canonical_alpha(), std::numbers::pi / 2);
  const auto gram = gram_matrix(c);
  const auto e = static_cast<Eigen::Index>(d8().group.identity_index());
  const auto x = static_cast<Eigen::Index>(*d8().group.find(paulis::X()));
  const auto minus = static_cast<Eigen::Index>(*d8().group.find(-paulis::I()));
  for (Eigen::Index i = 0; i < 8; ++i) EXPECT_EQ(gram.entries(i, i), cplx(1.0));
  EXPECT_LE(std::abs(gram.entries(e, x) - std::exp(-std::numbers::pi)), 1e-12);
  EXPECT_LE(std::abs(gram.entries(e, minus) - std::exp(-2 * std::numbers::pi)), 1e-12);
  EXPECT_LE((gram.entries - gram.entries.adjoint()).norm(), 1e-12);
}

TEST(Gram, FockMatchesClosedForm) {
  for (double alpha : {0.8, 1.0, 1.25, 1.6})
    for (double phi : {0.4, std::numbers::pi / 2, 2.5}) {
      const auto c = make_constellation(d8().group, alpha, phi);
      EXPECT_LE((gram_matrix(c).entries - analytic_gram(c.points)).cwiseAbs().maxCoeff(), 1e-9);
      Eigen::SelfAdjointEigenSolver<Mat> es(gram_matrix(c).entries);
      EXPECT_GE(es.eigenvalues().minCoeff(), -1e-10);
    }
}

TEST(GroupBasis, OrthonormalAndLeftRegular) {
  const auto c = make_constellation(d8().group, canonical_alpha(), std::numbers::pi / 2);
  const auto basis = orthonormal_group_basis(c, gram_matrix(c));
  for (std::size_t g = 0; g < 8; ++g)
    for (std::size_t h = 0; h < 8; ++h)
      EXPECT_NEAR(std::abs(basis[g].inner(basis[h])), g == h ? 1.0 : 0.0, 1e-10);

  for (std::size_t g = 0; g < 8; ++g) {
    const auto pg = passive_gaussian_unitary(d8().group.matrix(g), c.config());
    for (std::size_t h = 0; h < 8; ++h)
      EXPECT_LE((pg.apply(basis[h]) - basis[d8().group.multiply(g, h)]).norm(), 1e-9);
  }
}

TEST(Encode, ProductFormAtCanonicalAmplitude) {
  const auto code = canonical_code();
  for (int l = 0; l < 2; ++l)
    for (int m = 0; m < 2; ++m)
      EXPECT_LE(infidelity(code.state(l, m), product_form_codeword(canonical_alpha(), l, m)), 1e-9);
  EXPECT_LE((basis_gram(code) - Mat::Identity(4, 4)).norm(), 1e-10);
}

TEST(Encode, ProductFormFailsAtGenericAmplitude) {
  const auto code = canonical_code(1.0);
  EXPECT_GT(infidelity(code.state(0, 0), product_form_codeword(1.0, 0, 0)), 1e-6);
}

TEST(Encode, OrthonormalOverAmplitudeRange) {
  for (double alpha = 0.8; alpha <= 1.6 + 1e-12; alpha += 0.1)
    EXPECT_LE((basis_gram(canonical_code(alpha)) - Mat::Identity(4, 4)).norm(), 1e-10) << alpha;
}

TEST(Encode, CovariantUnderThePauliGroup) {
  for (double alpha : {1.0, canonical_alpha()}) {
    const auto code = canonical_code(alpha);
    for (std::size_t g = 0; g < 8; ++g) {
      const Mat2& lg = d8().group.matrix(g);
      const auto pg = passive_gaussian_unitary(lg, code.config());
      for (int l = 0; l < 2; ++l)
        for (int m = 0; m < 2; ++m) {
          FockState expected = FockState::zero(code.config());
          for (int lp = 0; lp < 2; ++lp) expected = expected + lg(lp, l) * code.state(lp, m);
          EXPECT_LE(infidelity(pg.apply(code.state(l, m)), expected), 1e-9);
        }
    }
  }
  // pi(X) maps |0,0> to |1,0>
  const auto code = canonical_code();
  const auto px = passive_gaussian_unitary(paulis::X(), code.config());
  EXPECT_LE(infidelity(px.apply(code.state(0, 0)), code.state(1, 0)), 1e-9);
}

TEST(Encode, ProjectorIsRankFourAndInvariant) {
  const auto code = canonical_code();
  const Mat p = code.projector().matrix();
  EXPECT_LE((p * p - p).norm(), 1e-9);
  EXPECT_LE((p - p.adjoint()).norm(), 1e-9);
  EXPECT_NEAR(p.trace().real(), 4.0, 1e-9);
  for (const auto& g : d8().group.elements()) {
    const Mat pg = passive_gaussian_unitary(g.matrix, code.config()).matrix();
    EXPECT_LE((pg * p - p * pg).norm(), 1e-9);
  }
}

TEST(DeformedEncode, IdentityDeformationIsTrivial) {
  const auto c = make_constellation(d8().group, 1.1, std::numbers::pi / 2);
  for (int l = 0; l < 2; ++l)
    for (int m = 0; m < 2; ++m)
      EXPECT_LE((deformed_encode(c, paulis::I(), d8().fourier, l, m) - encode(c, d8().fourier, l, m)).norm(), 1e-12);
}

TEST(DeformedEncode, HadamardConstellationAndPermutedGram) {
  const double a = canonical_alpha();
  const auto c = make_constellation(d8().group, a, std::numbers::pi / 2);
  const auto deformed = deformed_code(c, paulis::H(), d8().fourier);
  const Vec2 expected(std::polar(a, std::numbers::pi / 4), std::polar(a, -std::numbers::pi / 4));
  EXPECT_LE((deformed.constellation.alpha_vec - expected).norm(), 1e-14);

  // Gamma_U = P Gamma P^dag with P_{g,g'} = delta_{g', U^dag g U}
  const Mat2 u = paulis::H();
  Mat p = Mat::Zero(8, 8);
  for (std::size_t g = 0; g < 8; ++g) {
    const auto gp = d8().group.find(u.adjoint() * d8().group.matrix(g) * u);
    ASSERT_TRUE(gp.has_value());
    p(static_cast<Eigen::Index>(g), static_cast<Eigen::Index>(*gp)) = 1.0;
  }
  const Mat gamma = gram_matrix(c).entries;
  EXPECT_LE((deformed.gram.entries - p * gamma * p.adjoint()).norm(), 1e-10);
}

TEST(CovariantEncode, CoincidesWithFourierCodeAtCanonicalAmplitude) {
  const auto code = canonical_code();
  const auto& c = code.constellation;
  for (int l = 0; l < 2; ++l) {
    EXPECT_LE(infidelity(covariant_encode(c, d8().fourier, l, Vec2(1, 0)), code.state(l, 0)), 1e-9);
    EXPECT_LE(infidelity(covariant_encode(c, d8().fourier, l, Vec2(0, 1)), code.state(l, 1)), 1e-9);
  }
  EXPECT_THROW(covariant_encode(c, d8().fourier, 0, Vec2(1, 1)), input_error);
}

TEST(CovariantEncode, DiffersAtGenericAmplitude) {
  const auto code = canonical_code(1.0);
  const auto cov = covariant_encode(code.constellation, d8().fourier, 0, Vec2(1, 0));
  EXPECT_GT(infidelity(cov, code.state(0, 0)), 1e-6);
}

TEST(GramSpectrum, DiagonalOnlyAtSpecialAmplitudes) {
  auto spectrum = [](double alpha) {
    const auto c = make_constellation(d8().group, alpha, std::numbers::pi / 2);
    return gram_fourier_spectrum(gram_matrix(c), d8().fourier);
  };
  const auto canonical = spectrum(canonical_alpha());
  EXPECT_LE(canonical.off_diagonal, 1e-10);
  EXPECT_LE(canonical.scalar_deviation, 1e-10);
  EXPECT_LE(spectrum(std::sqrt(std::numbers::pi)).off_diagonal, 1e-10);
  EXPECT_GT(spectrum(1.0).off_diagonal, 1e-6);
}

TEST(CatQudit, TwoLeggedCatIsTheStandardCat) {
  const auto code = cat_qudit(2, 2, 1.0);
  ASSERT_EQ(code.codewords.size(), 2u);
  EXPECT_LE(infidelity(code.codewords[0], cat_state(1.0, 0, kDefaultCutoff)), 1e-12);
  EXPECT_LE(infidelity(code.codewords[1], cat_state(1.0, 1, kDefaultCutoff)), 1e-12);
}

TEST(CatQudit, GramIsDiagonalizedByTheDft) {
  const int n = 4;
  const double alpha = 1.0;
  const auto code = cat_qudit(n, 2, alpha);
  const auto zn = make_group(GroupSpec::cyclic(n));
  const Mat f = build_fourier_transform(zn, irrep_table(zn, GroupSpec::cyclic(n))).matrix;
  Mat gamma(n, n);
  for (int k = 0; k < n; ++k)
    for (int l = 0; l < n; ++l) {
      const double step = 2 * std::numbers::pi / n;
      gamma(k, l) = coherent_state(std::polar(alpha, step * k), 30).inner(coherent_state(std::polar(alpha, step * l), 30));
    }
  const Mat fdf = f * code.delta.cast<cplx>().asDiagonal() * f.adjoint();
  EXPECT_LE((gamma - fdf).norm(), 1e-10);
}

TEST(CatQudit, CodewordsAreOrthonormal) {
  const auto code = cat_qudit(8, 4, 1.25);
  for (int k = 0; k < 4; ++k)
    for (int j = 0; j < 4; ++j)
      EXPECT_NEAR(std::abs(code.codewords[k].inner(code.codewords[j])), k == j ? 1.0 : 0.0, 1e-10);
  for (int k = 0; k < 8; ++k) EXPECT_GE(code.delta[k], 0.0);
  EXPECT_THROW(cat_qudit(8, 3, 1.0), input_error);
}
