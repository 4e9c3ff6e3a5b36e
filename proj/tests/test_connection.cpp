#include <gtest/gtest.h>

#include "oracles.hpp"

using namespace qtorus;

namespace {

TorusElement cosine(const Theta& th, int axis, double amp) {
  std::array<int, 3> k{}, m{};
  k[axis] = 1;
  m[axis] = -1;
  const int n = th->dim();
  return TorusElement::monomial(th, std::span<const int>(k.data(), n), 0.5 * amp) +
         TorusElement::monomial(th, std::span<const int>(m.data(), n), 0.5 * amp);
}

MetricMatrix conformal(const Theta& th, double eps, const TorusElement& h) {
  MetricSpec spec;
  spec.kind = MetricKind::conformal;
  spec.epsilon = eps;
  spec.profile = {h};
  return make_metric(th, spec);
}

MetricMatrix two_plus_cos() {
  const Theta th = commutative_theta(1);
  MetricSpec spec;
  spec.kind = MetricKind::explicit_entries;
  ElementMatrix e(th, 1);
  e(0, 0) = TorusElement::scalar(th, 2.0) + cosine(th, 0, 1.0);
  spec.entries = e;
  return make_metric(th, spec);
}

std::vector<CompatibilitySample> samples(const Theta& th, std::uint64_t seed, int count) {
  Rng rng = substream(seed, 1);
  std::vector<CompatibilitySample> out;
  for (int i = 0; i < count; ++i) {
    out.push_back({harness::random_derivation(th, rng), random_module_vector(th, rng, 1, 3),
                   random_module_vector(th, rng, 1, 3)});
  }
  return out;
}

// Fixture metrics for the axiom sweep.
MetricMatrix fixture_metric(int which) {
  switch (which) {
    case 0:
      return identity_metric(make_theta2(0.3));
    case 1: {
      const Theta th = make_theta2(0.3);
      return conformal(th, 1.5, cosine(th, 0, 0.5) + cosine(th, 1, 0.2));
    }
    case 2: {
      const Theta th = make_theta2(0.61803398875);
      MetricSpec spec;
      spec.kind = MetricKind::rotated_diagonal;
      spec.epsilon = 1.0;
      spec.profile = {cosine(th, 0, 0.4), cosine(th, 1, 0.3)};
      spec.rotation = {0.8, -0.6, 0.6, 0.8};
      return make_metric(th, spec);
    }
    case 3: {
      const Theta th = make_theta(3, {0.0, 0.3, 0.1, -0.3, 0.0, 0.7, -0.1, -0.7, 0.0});
      return conformal(th, 2.0, cosine(th, 2, 0.4));
    }
    default:
      return two_plus_cos();
  }
}

}  // namespace

TEST(Inverse, IdentityMetricIsExact) {
  const MetricMatrix g = identity_metric(make_theta2(0.3));
  const InverseApprox inv = invert_metric(g, 1, 1e-12);
  EXPECT_EQ(inv.eta, 0.0);
  EXPECT_TRUE(inv.converged);
}

TEST(Inverse, TwoPlusCosConvergesAtRadius24) {
  const MetricMatrix g = two_plus_cos();
  const InverseApprox inv = invert_metric(g, 24, 1e-13);
  EXPECT_TRUE(inv.converged);
  EXPECT_LE(inv.eta, 1e-8);
  // reciprocal of 2 + cos has coefficients (sqrt 3 - 2)^|k| / sqrt 3
  const double q = 2.0 - std::sqrt(3.0);
  for (int k = -6; k <= 6; ++k)
    EXPECT_NEAR(inv.entries(0, 0).coeff(make_lattice({k})).real(), std::pow(-q, std::abs(k)) / std::sqrt(3.0), 1e-12);
  for (std::size_t i = 1; i < inv.history.size(); ++i) EXPECT_LE(inv.history[i], inv.history[i - 1] * 1.0001);
}

TEST(Inverse, TruncationLimitsResidual) {
  const MetricMatrix g = two_plus_cos();
  const InverseApprox inv = invert_metric(g, 2, 1e-13);
  EXPECT_FALSE(inv.converged);
  EXPECT_GT(inv.eta, 1e-4);
}

TEST(Christoffel, IdentityMetricGivesZero) {
  const MetricMatrix g = identity_metric(make_theta2(0.3));
  const ChristoffelTensor gamma = christoffel(g, invert_metric(g, 1, 1e-12));
  EXPECT_EQ(gamma.max_abs_coeff(), 0.0);
}

TEST(Christoffel, MatchesCommutativeOracle) {
  const MetricMatrix g = two_plus_cos();
  const InverseApprox inv = invert_metric(g, 24, 1e-13);
  ASSERT_LE(inv.eta, 1e-8);
  const ChristoffelTensor gamma = christoffel(g, inv);
  const int K = 30;
  const auto ref = oracle::christoffel_two_plus_cos(K);
  double err = 0.0;
  for (int k = -K; k <= K; ++k) err = std::max(err, std::abs(gamma(0, 0, 0).coeff(make_lattice({k})) - ref[k + K]));
  EXPECT_LE(err, 1e-7);
}

TEST(Christoffel, StaleInverseIsRejected) {
  const MetricMatrix g = fixture_metric(1);
  const InverseApprox inv = invert_metric(g, 8, 1e-10);
  EXPECT_THROW(christoffel(g.scaled(2.0), inv), InputError);
}

TEST(Christoffel, ScalingInvariance) {
  for (int which : {1, 2, 3}) {
    const MetricMatrix g = fixture_metric(which);
    const int radius = default_inverse_radius(g);
    const ChristoffelTensor base = christoffel(g, invert_metric(g, radius, 1e-12));
    for (double r : {2.0, 5.0}) {
      const MetricMatrix gr = g.scaled(r);
      const ChristoffelTensor scaled = christoffel(gr, invert_metric(gr, radius, 1e-12));
      EXPECT_LE(max_abs_diff(base, scaled), 1e-10) << "metric " << which << " r " << r;
    }
  }
}

class ConnectionAxioms : public ::testing::TestWithParam<int> {};

TEST_P(ConnectionAxioms, HoldOnSamples) {
  const MetricMatrix g = fixture_metric(GetParam());
  const GeometryContext ctx = make_context(g, 0, 1e-10);
  const AxiomReport rep = check_axioms(ctx.metric, ctx.gamma, samples(g.theta(), 40 + GetParam(), 12));
  EXPECT_EQ(rep.torsion_defect, 0.0);
  EXPECT_LE(rep.self_adjoint_defect, rep.threshold);
  EXPECT_LE(rep.max_compatibility(), rep.threshold);
  EXPECT_EQ(rep.compatibility.size(), 12u);
  EXPECT_TRUE(rep.passed());
}

INSTANTIATE_TEST_SUITE_P(Fixtures, ConnectionAxioms, ::testing::Values(0, 1, 2, 3, 4));

TEST(Connection, FundamentalTheoremIdentity) {
  // <nabla_{d_j} e_k | e_l>_g = g#_{jkl}
  const MetricMatrix g = fixture_metric(2);
  const GeometryContext ctx = make_context(g, 0, 1e-12);
  const Theta& th = g.theta();
  for (int j = 0; j < 2; ++j)
    for (int k = 0; k < 2; ++k) {
      const ModuleVector d = covariant_derivative(ctx.gamma, Derivation::coordinate(th, j), ModuleVector::basis(th, k));
      for (int l = 0; l < 2; ++l) {
        const TorusElement lhs = inner_g(g, d, ModuleVector::basis(th, l));
        EXPECT_LE((lhs - g_natural(g, j, k, l)).l1_norm(), 10.0 * ctx.inverse.eta + 1e-12);
      }
    }
}

TEST(Connection, LeibnizRuleOfCovariantDerivative) {
  const MetricMatrix g = fixture_metric(1);
  const GeometryContext ctx = make_context(g);
  Rng rng = substream(6, 2);
  for (int i = 0; i < 5; ++i) {
    const Derivation d = harness::random_derivation(g.theta(), rng);
    const auto a = random_element(g.theta(), rng, 1, 3);
    const auto x = random_module_vector(g.theta(), rng, 1, 3);
    const ModuleVector lhs = covariant_derivative(ctx.gamma, d, a * x);
    const ModuleVector rhs = d(a) * x + a * covariant_derivative(ctx.gamma, d, x);
    EXPECT_LE((lhs - rhs).l1_norm(), 1e-12);
  }
}

TEST(Connection, InnerDerivationActsByLeftMultiplication) {
  const MetricMatrix g = fixture_metric(1);
  const GeometryContext ctx = make_context(g);
  const Theta& th = g.theta();
  const TorusElement b = (TorusElement::generator(th, 0) - adjoint(TorusElement::generator(th, 0))) * 0.5;
  Rng rng = substream(6, 3);
  const auto x = random_module_vector(th, rng, 1, 3);
  const ModuleVector out = covariant_derivative(ctx.gamma, Derivation::inner(b), x);
  EXPECT_LE((out - b * x).l1_norm(), 1e-15);
}

TEST(Derivation, Validation) {
  const Theta th = make_theta2(0.3);
  EXPECT_THROW(Derivation({1.0, 0.0}, TorusElement::generator(th, 0)), InputError);
  EXPECT_THROW(Derivation({1.0, 0.0}, TorusElement::scalar(th, Complex(0.0, 1.0))), InputError);
  EXPECT_THROW(Derivation({1.0}, TorusElement(th)), InputError);
  const Derivation d = Derivation::coordinate(th, 1);
  const auto u = TorusElement::generator(th, 1);
  EXPECT_LE(max_abs_diff(d(u), derive(u, 1)), 0.0);
}

TEST(Derivation, NormAddsParts) {
  const Theta th = make_theta2(0.3);
  const TorusElement b = (TorusElement::generator(th, 0) - adjoint(TorusElement::generator(th, 0))) * 0.5;
  const Derivation d({0.6, 0.8}, b);
  GnsConfig cfg;
  cfg.radii = {4, 8};
  const NormInterval iv = der_norm(d, NormChoice{NormKind::l2}, cfg);
  // ||b|| = ||sin|| = 1
  EXPECT_NEAR(iv.lower, 2.0, 1e-9);
  EXPECT_NEAR(iv.upper, 2.0, 1e-12);
}
