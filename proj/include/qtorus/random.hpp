// Seeded sampling helpers. Conversions from raw engine output are written out
// here so that a seed produces the same stream with every standard library.
#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

#include "qtorus/algebra.hpp"

namespace qtorus {

using Rng = std::mt19937_64;

inline double uniform01(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

inline double uniform(Rng& rng, double lo, double hi) { return lo + (hi - lo) * uniform01(rng); }

inline int uniform_int(Rng& rng, int lo, int hi) {
  const auto span = static_cast<std::uint64_t>(hi - lo + 1);
  return lo + static_cast<int>(rng() % span);
}

inline double gaussian(Rng& rng) {
  double u = uniform01(rng);
  while (u <= 0.0) u = uniform01(rng);
  const double v = uniform01(rng);
  return std::sqrt(-2.0 * std::log(u)) * std::cos(2.0 * std::numbers::pi * v);
}

inline Complex complex_gaussian(Rng& rng) { return {gaussian(rng), gaussian(rng)}; }

/// Derives an independent stream for a labelled sub-task.
inline Rng substream(std::uint64_t seed, std::uint64_t label) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(label), static_cast<std::uint32_t>(label >> 32)};
  return Rng(seq);
}

inline Lattice random_lattice(Rng& rng, int n, int radius) {
  Lattice k{};
  for (int j = 0; j < n; ++j) k[j] = uniform_int(rng, -radius, radius);
  return k;
}

/// Random polynomial with `terms` coefficients in the box of the given radius
/// (fewer if lattice points repeat).
inline TorusElement random_element(const Theta& theta, Rng& rng, int radius, int terms) {
  std::vector<Term> out;
  for (int i = 0; i < terms; ++i) {
    out.push_back(Term{random_lattice(rng, theta->dim(), radius), complex_gaussian(rng)});
  }
  return TorusElement::from_terms(theta, std::move(out));
}

inline TorusElement random_self_adjoint(const Theta& theta, Rng& rng, int radius, int terms) {
  return real_part(random_element(theta, rng, radius, terms));
}

}  // namespace qtorus
