#include <gtest/gtest.h>

#include "oracles.hpp"

using namespace qtorus;

namespace {

Theta theta3() { return make_theta(3, {0.0, 0.3, 0.1, -0.3, 0.0, 0.7, -0.1, -0.7, 0.0}); }

std::vector<int> as_vec(const Lattice& k, int n) { return {k.begin(), k.begin() + n}; }

}  // namespace

TEST(Theta, RejectsNonAntisymmetric) {
  EXPECT_THROW(make_theta(2, {0.0, 0.3, 0.3, 0.0}), InputError);
  EXPECT_THROW(make_theta(2, {0.1, 0.3, -0.3, 0.0}), InputError);
  EXPECT_THROW(make_theta(2, {0.0, 0.3, -0.3}), InputError);
  EXPECT_NO_THROW(make_theta(2, {0.0, 0.3, -0.3, 0.0}));
}

TEST(Theta, CommutatorTurnsOfGenerators) {
  const Theta th = theta3();
  EXPECT_DOUBLE_EQ(th->commutator_turns(make_lattice({1, 0, 0}), make_lattice({0, 1, 0})), -0.3);
  EXPECT_TRUE(commutative_theta(3)->is_commutative());
  EXPECT_FALSE(th->is_commutative());
}

TEST(Algebra, DefiningRelation) {
  const Theta th = theta3();
  for (int j = 0; j < 3; ++j)
    for (int k = j + 1; k < 3; ++k) {
      const auto uj = TorusElement::generator(th, j);
      const auto uk = TorusElement::generator(th, k);
      const Complex phase = std::polar(1.0, 2.0 * std::numbers::pi * (*th)(j, k));
      EXPECT_LE(max_abs_diff(uk * uj, (uj * uk) * phase), 1e-15);
    }
}

TEST(Algebra, GeneratorsAreUnitary) {
  const Theta th = theta3();
  for (int j = 0; j < 3; ++j) {
    const auto u = TorusElement::generator(th, j);
    EXPECT_LE(max_abs_diff(u * adjoint(u), one(th)), 1e-15);
    EXPECT_LE(max_abs_diff(adjoint(u) * u, one(th)), 1e-15);
  }
}

TEST(Algebra, ProductPhaseMatchesWordOracle) {
  const Theta th = theta3();
  const auto rows = oracle::theta_rows(*th);
  Rng rng = substream(1, 1);
  for (int trial = 0; trial < 200; ++trial) {
    const Lattice p = random_lattice(rng, 3, 3);
    const Lattice q = random_lattice(rng, 3, 3);
    const Complex expected = oracle::product_phase(as_vec(p, 3), as_vec(q, 3), rows);
    const auto prod = TorusElement::monomial(th, std::span<const int>(p.data(), 3)) *
                      TorusElement::monomial(th, std::span<const int>(q.data(), 3));
    ASSERT_EQ(prod.size(), 1u);
    EXPECT_NEAR(std::abs(prod.coeff(p + q) - expected), 0.0, 1e-12);
  }
}

TEST(Algebra, AdjointPhaseMatchesWordOracle) {
  const Theta th = theta3();
  const auto rows = oracle::theta_rows(*th);
  Rng rng = substream(1, 2);
  for (int trial = 0; trial < 100; ++trial) {
    const Lattice k = random_lattice(rng, 3, 3);
    const auto a = adjoint(TorusElement::monomial(th, std::span<const int>(k.data(), 3)));
    EXPECT_NEAR(std::abs(a.coeff(-k) - oracle::adjoint_phase(as_vec(k, 3), rows)), 0.0, 1e-12);
  }
}

TEST(Algebra, ProductMatchesOracleOnPolynomials) {
  const Theta th = theta3();
  const auto rows = oracle::theta_rows(*th);
  Rng rng = substream(1, 3);
  for (int trial = 0; trial < 30; ++trial) {
    const auto a = random_element(th, rng, 2, 5);
    const auto b = random_element(th, rng, 2, 5);
    EXPECT_LE(oracle::max_abs_diff(oracle::coeffs(a * b), oracle::multiply(oracle::coeffs(a), oracle::coeffs(b), rows)),
              1e-12);
  }
}

// Random invariants, 100 instances each, on unit l1 inputs.
class AlgebraInvariants : public ::testing::TestWithParam<int> {};

TEST_P(AlgebraInvariants, Hold) {
  const Theta th = GetParam() == 1 ? commutative_theta(1) : GetParam() == 2 ? make_theta2(0.61803398875) : theta3();
  const int n = th->dim();
  Rng rng = substream(2, GetParam());
  for (int i = 0; i < 100; ++i) {
    const auto a = harness::random_unit_element(th, rng);
    const auto b = harness::random_unit_element(th, rng);
    const auto c = harness::random_unit_element(th, rng);
    EXPECT_LE(harness::raw_diff((a * b) * c, a * (b * c)), 1e-12);
    EXPECT_LE(std::abs(trace(a * b) - trace(b * a)), 1e-12);
    EXPECT_LE(harness::raw_diff(adjoint(a * b), adjoint(b) * adjoint(a)), 1e-12);
    EXPECT_LE(harness::raw_diff(adjoint(adjoint(a)), a), 1e-12);
    EXPECT_GE(trace(adjoint(a) * a).real(), 0.0);
    for (int j = 0; j < n; ++j) {
      EXPECT_LE(harness::raw_diff(derive(a * b, j), derive(a, j) * b + a * derive(b, j)), 1e-12);
      EXPECT_LE(harness::raw_diff(derive(adjoint(a), j), adjoint(derive(a, j))), 1e-12);
      EXPECT_LE(std::abs(trace(derive(a, j))), 1e-12);
    }
    std::vector<double> s(n), t(n), st(n);
    for (int j = 0; j < n; ++j) {
      s[j] = uniform01(rng);
      t[j] = uniform01(rng);
      st[j] = s[j] + t[j];
    }
    EXPECT_LE(harness::raw_diff(act(a * b, s), act(a, s) * act(b, s)), 1e-12);
    EXPECT_LE(harness::raw_diff(act(act(a, s), t), act(a, st)), 1e-12);
    EXPECT_LE(harness::raw_diff(act(adjoint(a), s), adjoint(act(a, s))), 1e-12);
  }
}

INSTANTIATE_TEST_SUITE_P(Dims, AlgebraInvariants, ::testing::Values(1, 2, 3));

TEST(Algebra, DerivativeIsLimitOfAction) {
  const Theta th = make_theta2(0.3);
  Rng rng = substream(3, 1);
  const auto a = random_element(th, rng, 2, 4);
  const double h = 1e-6;
  for (int j = 0; j < 2; ++j) {
    std::vector<double> s(2, 0.0), m(2, 0.0);
    s[j] = h;
    m[j] = -h;
    const auto quotient = (act(a, s) - act(a, m)) * (0.5 / h);
    EXPECT_LE(max_abs_diff(quotient, derive(a, j)), 1e-6);
  }
}

TEST(Algebra, FejerSmoothingShrinksCoefficients) {
  const Theta th = make_theta2(0.3);
  Rng rng = substream(3, 2);
  const auto a = random_element(th, rng, 3, 8);
  const auto s = fejer_smooth(a, FejerParams{4});
  EXPECT_LE(s.support_radius(), 3);
  for (const auto& t : s.terms()) EXPECT_LE(std::abs(t.c), std::abs(a.coeff(t.k)) + 1e-15);
  EXPECT_LE(max_abs_diff(fejer_smooth(one(th), FejerParams{4}), one(th)), 1e-15);
  // coefficients outside the Fejer window vanish
  const auto far = TorusElement::monomial(th, {5, 0});
  EXPECT_TRUE(fejer_smooth(far, FejerParams{4}).is_zero());
}

TEST(Algebra, FromTermsMergesAndDrops) {
  const Theta th = make_theta2(0.3);
  const auto a = TorusElement::from_terms(th, {{make_lattice({1, 0}), 1.0}, {make_lattice({1, 0}), -1.0},
                                               {make_lattice({0, 1}), 2.0}, {make_lattice({0, 1}), 0.5}});
  EXPECT_EQ(a.size(), 1u);
  EXPECT_EQ(a.coeff(make_lattice({0, 1})), Complex(2.5));
}

TEST(Algebra, MixingAlgebrasIsRejected) {
  const auto a = TorusElement::generator(make_theta2(0.3), 0);
  const auto b = TorusElement::generator(make_theta2(0.4), 0);
  EXPECT_THROW(a * b, InputError);
  EXPECT_THROW(a + b, InputError);
}

TEST(Algebra, CommutingSupportDetection) {
  const Theta th = make_theta2(0.3);
  EXPECT_TRUE(has_commuting_support(one(th) + TorusElement::generator(th, 0)));
  EXPECT_FALSE(has_commuting_support(TorusElement::generator(th, 0) + TorusElement::generator(th, 1)));
}

TEST(Algebra, HermitizeProducesSelfAdjoint) {
  const Theta th = theta3();
  Rng rng = substream(3, 3);
  for (int i = 0; i < 20; ++i) {
    const auto h = hermitize(random_element(th, rng, 2, 5));
    EXPECT_TRUE(is_self_adjoint(h, 0.0));
  }
}
