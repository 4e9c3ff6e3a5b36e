#include <gtest/gtest.h>

#include "oracles.hpp"

using namespace qtorus;

namespace {

GnsConfig single(int radius) {
  GnsConfig c;
  c.radii = {radius};
  c.use_characters = false;
  c.restarts = 3;
  c.krylov_steps = 80;
  return c;
}

}  // namespace

TEST(TruncationBox, IndexRoundTrip) {
  const TruncationBox box(3, 2);
  EXPECT_EQ(box.size(), 125u);
  for (std::size_t i = 0; i < box.size(); ++i) EXPECT_EQ(box.index(box.point(i)), i);
  EXPECT_FALSE(box.contains(make_lattice({3, 0, 0})));
}

TEST(Compression, MatchesDenseOracle) {
  const Theta th = make_theta2(0.3);
  Rng rng = substream(4, 1);
  for (int trial = 0; trial < 5; ++trial) {
    const auto a = random_element(th, rng, 2, 6);
    const TruncationBox box(2, 3);
    const Eigen::MatrixXcd lib = Eigen::MatrixXcd(represent(a, box).matrix);
    const Eigen::MatrixXcd ref = oracle::dense_compression(a, 3);
    const auto pts = oracle::box_points(2, 3);
    double diff = 0.0;
    for (std::size_t r = 0; r < pts.size(); ++r)
      for (std::size_t c = 0; c < pts.size(); ++c) {
        const std::size_t lr = box.index(make_lattice(pts[r]));
        const std::size_t lc = box.index(make_lattice(pts[c]));
        diff = std::max(diff, std::abs(lib(lr, lc) - ref(r, c)));
      }
    EXPECT_LE(diff, 1e-12);
  }
}

TEST(Compression, SupportWarningWhenElementOutgrowsBox) {
  const Theta th = make_theta2(0.3);
  const auto a = TorusElement::monomial(th, {5, 0}) + one(th);
  EXPECT_TRUE(represent(a, TruncationBox(2, 3)).support_warning);
  EXPECT_FALSE(represent(a, TruncationBox(2, 8)).support_warning);
}

TEST(NormEngine, LanczosAgreesWithDenseSvd) {
  const Theta th = make_theta2(0.3);
  Rng rng = substream(4, 2);
  for (int trial = 0; trial < 6; ++trial) {
    const auto a = trial % 2 ? hermitize(random_element(th, rng, 2, 5)) : random_element(th, rng, 2, 5);
    const double svd = oracle::dense_norm(a, 4);
    const NormInterval iv = norm_interval(a, single(4));
    EXPECT_LE(iv.lower, svd + 1e-9);
    EXPECT_GE(iv.lower, svd - 1e-6) << "trial " << trial;
    EXPECT_GE(iv.upper, iv.lower);
  }
}

TEST(NormEngine, MonomialIsExact) {
  const Theta th = make_theta(3, {0.0, 0.3, 0.1, -0.3, 0.0, 0.7, -0.1, -0.7, 0.0});
  const auto u = TorusElement::monomial(th, {2, -1, 3}, Complex(0.0, -1.5));
  const NormInterval iv = norm_interval(u, GnsConfig::for_dim(3));
  EXPECT_LT(iv.width(), 1e-9);
  EXPECT_NEAR(iv.lower, 1.5, 1e-15);
}

TEST(NormEngine, OnePlusGeneratorCommutative) {
  const Theta th = commutative_theta(1);
  const auto a = one(th) + TorusElement::generator(th, 0);
  GnsConfig cfg;
  cfg.radii = {4, 8, 12};
  const NormInterval iv = norm_interval(a, cfg);
  EXPECT_GE(iv.lower, 2.0 - 1e-6);
  EXPECT_LE(iv.lower, 2.0 + 1e-12);
  EXPECT_DOUBLE_EQ(iv.upper, 2.0);
}

TEST(NormEngine, CompressionProfileIsMonotone) {
  const Theta th = make_theta2(0.3);
  Rng rng = substream(4, 3);
  GnsConfig cfg;
  cfg.radii = {2, 4, 6, 8};
  cfg.use_characters = false;
  for (int trial = 0; trial < 8; ++trial) {
    const auto a = random_element(th, rng, 2, 5);
    const auto prof = norm_lower_profile(a, cfg);
    ASSERT_EQ(prof.size(), cfg.radii.size());
    for (std::size_t i = 1; i < prof.size(); ++i) EXPECT_GE(prof[i], prof[i - 1] - 1e-12 * prof[i - 1]);
  }
}

TEST(NormEngine, EnclosesCommutativeSupNorm) {
  const Theta th = commutative_theta(2);
  Rng rng = substream(4, 4);
  GnsConfig cfg;
  cfg.radii = {4, 8};
  for (int trial = 0; trial < 10; ++trial) {
    const auto a = random_element(th, rng, 2, 5);
    const double sup = oracle::sup_norm(a, 400);
    const NormInterval iv = norm_interval(a, cfg);
    // the grid sup is itself a lower bound of the true sup
    EXPECT_GE(iv.upper, sup - 1e-12);
    EXPECT_LE(iv.lower, sup + 1e-3 * sup);
    EXPECT_GE(iv.lower, sup - 1e-6 * sup) << "character route should be near exact";
  }
}

TEST(NormEngine, ZeroAndScalar) {
  const Theta th = make_theta2(0.3);
  const NormInterval z = norm_interval(TorusElement(th), GnsConfig{});
  EXPECT_EQ(z.lower, 0.0);
  EXPECT_EQ(z.upper, 0.0);
  const NormInterval s = norm_interval(TorusElement::scalar(th, Complex(3.0, 4.0)), GnsConfig{});
  EXPECT_DOUBLE_EQ(s.lower, 5.0);
  EXPECT_DOUBLE_EQ(s.upper, 5.0);
}

TEST(NormEngine, DeterministicForFixedSeed) {
  const Theta th = make_theta2(0.61803398875);
  Rng rng = substream(4, 5);
  const auto a = random_element(th, rng, 2, 6);
  GnsConfig cfg;
  cfg.radii = {4, 8};
  const NormInterval x = norm_interval(a, cfg);
  const NormInterval y = norm_interval(a, cfg);
  EXPECT_EQ(x.lower, y.lower);
  EXPECT_EQ(x.upper, y.upper);
}

TEST(NormEngine, RejectsBadSchedule) {
  const Theta th = make_theta2(0.3);
  GnsConfig cfg;
  cfg.radii = {4, 4};
  EXPECT_THROW(norm_interval(one(th) + TorusElement::generator(th, 0), cfg), InputError);
  cfg.radii = {};
  EXPECT_THROW(norm_interval(one(th), cfg), InputError);
}

TEST(NormEngine, MatrixNormOfDiagonal) {
  const Theta th = make_theta2(0.3);
  ElementMatrix m(th, 2);
  m(0, 0) = TorusElement::scalar(th, 2.0);
  m(1, 1) = TorusElement::scalar(th, 3.0) + TorusElement::generator(th, 0) * 0.5 + TorusElement::monomial(th, {-1, 0}, 0.5);
  GnsConfig cfg;
  cfg.radii = {4, 8};
  const NormInterval iv = matrix_norm_interval(m, cfg);
  EXPECT_NEAR(iv.lower, 4.0, 1e-6);
  EXPECT_GE(iv.upper, 4.0 - 1e-12);
}

TEST(Interval, Arithmetic) {
  NormInterval a{1.0, 2.0};
  NormInterval b{0.5, 0.75};
  const NormInterval s = a + b;
  EXPECT_DOUBLE_EQ(s.lower, 1.5);
  EXPECT_DOUBLE_EQ(s.upper, 2.75);
  const NormInterval m = interval_max(a, b);
  EXPECT_DOUBLE_EQ(m.lower, 1.0);
  EXPECT_DOUBLE_EQ(m.upper, 2.0);
  EXPECT_TRUE(a.overlaps(NormInterval{2.0, 3.0}));
  EXPECT_FALSE(a.overlaps(NormInterval{2.1, 3.0}));
  EXPECT_DOUBLE_EQ(NormInterval::exact(4.0).sqrt().lower, 2.0);
}

TEST(Positivity, Verdicts) {
  const Theta th = make_theta2(0.3);
  const TruncationBox box(2, 3);
  EXPECT_EQ(positivity_check(ElementMatrix::identity(th, 2), box).verdict, PositivityVerdict::plausible);
  EXPECT_EQ(positivity_check(ElementMatrix::scalar_identity(th, 2, -1.0), box).verdict, PositivityVerdict::non_positive);
  ElementMatrix m(th, 1);
  // 1 + cos has minimum 0 on the torus; compressions approach it from above
  m(0, 0) = one(th) + TorusElement::generator(th, 0) * 0.5 + TorusElement::monomial(th, {-1, 0}, 0.5);
  EXPECT_NE(positivity_check(m, box, 1e-9).verdict, PositivityVerdict::non_positive);
  ElementMatrix bad(th, 1);
  bad(0, 0) = TorusElement::generator(th, 0);
  EXPECT_THROW(positivity_check(bad, box), InputError);
}

TEST(Positivity, CompressionSquareRoot) {
  const Theta th = make_theta2(0.3);
  const TruncationBox box(2, 2);
  ElementMatrix m(th, 1);
  m(0, 0) = TorusElement::scalar(th, 2.0) + TorusElement::generator(th, 1) * 0.5 + TorusElement::monomial(th, {0, -1}, 0.5);
  const Eigen::MatrixXcd r = compression_sqrt(m, box);
  const Eigen::MatrixXcd h = dense_hermitian_compression(m, box);
  EXPECT_LE((r * r - h).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_NEAR(compression_sqrt_norm(ElementMatrix::scalar_identity(th, 2, 4.0), box), 2.0, 1e-12);
  EXPECT_NEAR(compression_inverse_sqrt_norm(ElementMatrix::scalar_identity(th, 2, 4.0), box), 0.5, 1e-12);
}
