// Random fixture generators shared by the suites and the acceptance binary.
#pragma once

#include "qtorus/qtorus.hpp"

namespace support {

using namespace qtorus;

/// Conformal metric (eps + h^2) I on a random two-dimensional torus.
inline MetricMatrix random_conformal(std::uint64_t seed, int n = 2) {
  Rng rng = substream(seed, 0xc0f);
  std::vector<double> th(n * n, 0.0);
  for (int j = 0; j < n; ++j)
    for (int k = j + 1; k < n; ++k) {
      th[j * n + k] = uniform(rng, 0.05, 0.95);
      th[k * n + j] = -th[j * n + k];
    }
  const Theta theta = make_theta(n, th);
  MetricSpec spec;
  spec.kind = MetricKind::conformal;
  spec.epsilon = uniform(rng, 0.5, 2.0);
  spec.profile = {harness::random_sa(theta, rng, 1, 3) * 0.5};
  return make_metric(theta, spec);
}

/// Lighter search settings that keep each suite within its time budget.
inline SeminormConfig light_config(int n) {
  SeminormConfig cfg = SeminormConfig::for_dim(n);
  cfg.gns.radii = n <= 2 ? std::vector<int>{4, 8} : std::vector<int>{2, 4};
  cfg.search.circle_points = 16;
  cfg.search.face_points = 2;
  cfg.ad.restarts = 1;
  return cfg;
}

inline MetricMatrix two_plus_cos() {
  const Theta th = commutative_theta(1);
  MetricSpec spec;
  spec.kind = MetricKind::explicit_entries;
  ElementMatrix e(th, 1);
  e(0, 0) = TorusElement::scalar(th, 2.0) + TorusElement::monomial(th, {1}, 0.5) + TorusElement::monomial(th, {-1}, 0.5);
  spec.entries = e;
  return make_metric(th, spec);
}

/// The n = 1 module vector with five Fourier coefficients used by the decomposition check.
inline ModuleVector five_coefficient_vector() {
  const Theta th = commutative_theta(1);
  const TorusElement c = TorusElement::from_terms(th, {{make_lattice({-2}), Complex(0.10, -0.05)},
                                                       {make_lattice({-1}), Complex(-0.30, 0.20)},
                                                       {make_lattice({0}), Complex(0.70, 0.0)},
                                                       {make_lattice({1}), Complex(0.25, 0.40)},
                                                       {make_lattice({2}), Complex(-0.15, 0.10)}});
  return ModuleVector(th, {c});
}

}  // namespace support
