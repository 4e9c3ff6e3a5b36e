// Approximate inverse of a metric, Christoffel data of the Levi-Civita
// connection, and covariant derivatives along derivations.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qtorus/ball_search.hpp"
#include "qtorus/module.hpp"

namespace qtorus {

struct InverseApprox {
  ElementMatrix entries;
  /// l1 upper bound of max(||g X - I||, ||X g - I||).
  double eta = 0.0;
  int radius = 0;
  int iterations = 0;
  bool converged = false;
  std::uint64_t metric_fingerprint = 0;
  std::vector<double> history;
};

inline int default_inverse_radius(const MetricMatrix& g) { return std::max(1, 4 * g.entries().support_radius()); }

inline double inverse_residual(const ElementMatrix& g, const ElementMatrix& x) {
  const ElementMatrix id = ElementMatrix::identity(g.theta(), g.size());
  return std::max((g * x - id).l1_spectral_bound(), (x * g - id).l1_spectral_bound());
}

/// Newton-Hotelling iteration X <- X (2I - g X), truncated to `radius` after each step.
inline InverseApprox invert_metric(const MetricMatrix& g, int radius, double tol, int max_iterations = 100) {
  if (!(tol > 0.0)) throw InputError("inverse.tol must be positive");
  if (radius < 0) throw InputError("inverse.radius must be nonnegative");
  if (g.evidence().min_eig < 10.0 * tol) {
    throw InputError("metric is too close to singular for inversion (compression min eigenvalue " +
                     std::to_string(g.evidence().min_eig) + ")");
  }
  const ElementMatrix& gm = g.entries();
  const ElementMatrix id = ElementMatrix::identity(g.theta(), g.dim());
  const double u = gm.l1_spectral_bound();
  ElementMatrix x = ElementMatrix::scalar_identity(g.theta(), g.dim(), 1.0 / u);
  InverseApprox out{x, inverse_residual(gm, x), radius, 0, false, g.fingerprint(), {}};
  out.history.push_back(out.eta);
  if (out.eta <= tol) {
    out.converged = true;
    return out;
  }
  for (int it = 1; it <= max_iterations; ++it) {
    const ElementMatrix e = gm * x - id;
    x = (x - x * e).truncated(radius);
    const double eta = inverse_residual(gm, x);
    out.history.push_back(eta);
    if (eta < out.eta) {
      out.entries = x;
      out.eta = eta;
      out.iterations = it;
    }
    if (eta <= tol) {
      out.converged = true;
      return out;
    }
    // stagnation at the truncation floor or divergence
    if (it > 3 && eta >= out.history[out.history.size() - 2]) break;
  }
  return out;
}

/// g#_{jkl} = 1/2 [d_j g_kl + d_k g_jl - d_l g_jk].
inline TorusElement g_natural(const MetricMatrix& g, int j, int k, int l) {
  const int n = g.dim();
  if (j < 0 || k < 0 || l < 0 || j >= n || k >= n || l >= n) throw InputError("g_natural: index out of range");
  TorusElement acc = derive(g(k, l), j);
  acc += derive(g(j, l), k);
  acc -= derive(g(j, k), l);
  return acc * 0.5;
}

/// Gamma^m_{jk}: nabla_{d_j} e_k = sum_m Gamma^m_{jk} e_m.
class ChristoffelTensor {
 public:
  ChristoffelTensor(Theta theta, int n) : theta_(std::move(theta)), n_(n), gamma_(n * n * n, TorusElement(theta_)) {}

  int dim() const { return n_; }
  const Theta& theta() const { return theta_; }
  TorusElement& operator()(int m, int j, int k) { return gamma_[(m * n_ + j) * n_ + k]; }
  const TorusElement& operator()(int m, int j, int k) const { return gamma_[(m * n_ + j) * n_ + k]; }

  double eta = 0.0;
  std::uint64_t metric_fingerprint = 0;

  double max_abs_coeff() const {
    double r = 0.0;
    for (const auto& e : gamma_) r = std::max(r, e.max_abs_coeff());
    return r;
  }

 private:
  Theta theta_;
  int n_;
  std::vector<TorusElement> gamma_;
};

inline double max_abs_diff(const ChristoffelTensor& a, const ChristoffelTensor& b) {
  double r = 0.0;
  for (int m = 0; m < a.dim(); ++m)
    for (int j = 0; j < a.dim(); ++j)
      for (int k = 0; k < a.dim(); ++k) r = std::max(r, max_abs_diff(a(m, j, k), b(m, j, k)));
  return r;
}

/// Gamma^m_{jk} = sum_l g#_{jkl} (g^-1)_{lm}, so that sum_m Gamma^m_{jk} g_ml = g#_{jkl}.
inline ChristoffelTensor christoffel(const MetricMatrix& g, const InverseApprox& ginv) {
  if (ginv.metric_fingerprint != g.fingerprint()) throw InputError("christoffel: inverse was computed for another metric");
  const int n = g.dim();
  ChristoffelTensor out(g.theta(), n);
  out.eta = ginv.eta;
  out.metric_fingerprint = g.fingerprint();
  for (int j = 0; j < n; ++j) {
    for (int k = j; k < n; ++k) {
      std::vector<TorusElement> gn;
      for (int l = 0; l < n; ++l) gn.push_back(g_natural(g, j, k, l));
      for (int m = 0; m < n; ++m) {
        TorusElement acc(g.theta());
        for (int l = 0; l < n; ++l) {
          if (gn[l].is_zero() || ginv.entries(l, m).is_zero()) continue;
          acc += gn[l] * ginv.entries(l, m);
        }
        out(m, k, j) = acc;
        out(m, j, k) = std::move(acc);
      }
    }
  }
  return out;
}

/// delta = sum_m r_m d_m + ad(b), with b skew-adjoint and traceless.
struct Derivation {
  std::vector<double> r;
  TorusElement b;

  Derivation(std::vector<double> r_in, TorusElement b_in) : r(std::move(r_in)), b(std::move(b_in)) {
    if (r.size() != static_cast<std::size_t>(b.dim())) throw InputError("derivation: r has wrong length");
    if (!is_skew_adjoint(b, 1e-12)) throw InputError("derivation: b must be skew-adjoint");
    if (!is_traceless(b, 1e-12)) throw InputError("derivation: b must be traceless");
  }

  static Derivation coordinate(const Theta& theta, int j) {
    std::vector<double> r(theta->dim(), 0.0);
    r.at(j) = 1.0;
    return Derivation(std::move(r), TorusElement(theta));
  }

  static Derivation inner(TorusElement b) {
    const int n = b.dim();
    return Derivation(std::vector<double>(n, 0.0), std::move(b));
  }

  TorusElement operator()(const TorusElement& a) const {
    TorusElement acc(a.theta());
    for (int m = 0; m < a.dim(); ++m)
      if (r[m] != 0.0) acc.axpy(r[m], derive(a, m));
    if (!b.is_zero()) acc += b * a - a * b;
    return acc;
  }
};

/// (nabla_delta X)_k = sum_m r_m d_m a_k + sum_j a_j sum_m r_m Gamma^k_{mj} + b a_k.
inline ModuleVector covariant_derivative(const ChristoffelTensor& gamma, const Derivation& delta,
                                         const ModuleVector& x) {
  const int n = gamma.dim();
  if (x.dim() != n || !same_algebra(x.theta(), gamma.theta()) || !same_algebra(delta.b.theta(), gamma.theta())) {
    throw InputError("covariant_derivative: mismatched dimensions or theta");
  }
  if (!is_skew_adjoint(delta.b, 1e-12) || !is_traceless(delta.b, 1e-12)) {
    throw InputError("covariant_derivative: b must be skew-adjoint and traceless");
  }
  ModuleVector out(x.theta());
  for (int k = 0; k < n; ++k) {
    TorusElement acc(x.theta());
    for (int m = 0; m < n; ++m)
      if (delta.r[m] != 0.0) acc.axpy(delta.r[m], derive(x[k], m));
    for (int j = 0; j < n; ++j) {
      if (x[j].is_zero()) continue;
      TorusElement row(x.theta());
      for (int m = 0; m < n; ++m)
        if (delta.r[m] != 0.0) row.axpy(delta.r[m], gamma(k, m, j));
      if (!row.is_zero()) acc += x[j] * row;
    }
    if (!delta.b.is_zero()) acc += delta.b * x[k];
    out[k] = std::move(acc);
  }
  return out;
}

struct CompatibilitySample {
  Derivation delta;
  ModuleVector x;
  ModuleVector y;
};

struct CompatibilityResult {
  CompatibilitySample sample;
  double residual_upper = 0.0;
};

struct AxiomReport {
  double torsion_defect = 0.0;
  double self_adjoint_defect = 0.0;
  double eta = 0.0;
  double threshold = 0.0;
  std::vector<CompatibilityResult> compatibility;

  double max_compatibility() const {
    double r = 0.0;
    for (const auto& c : compatibility) r = std::max(r, c.residual_upper);
    return r;
  }

  bool passed() const {
    return torsion_defect <= 1e-12 && self_adjoint_defect <= threshold && max_compatibility() <= threshold;
  }
};

/// Scales the sample so that N(r) + ||b||_1 <= 1 and ||X||_1 = ||Y||_1 = 1.
inline CompatibilitySample normalize_sample(CompatibilitySample s) {
  double dsize = s.delta.b.l1_norm();
  for (double v : s.delta.r) dsize += std::abs(v);
  if (dsize > 1.0) {
    for (double& v : s.delta.r) v /= dsize;
    s.delta.b *= 1.0 / dsize;
  }
  if (s.x.l1_norm() > 0.0) s.x *= 1.0 / s.x.l1_norm();
  if (s.y.l1_norm() > 0.0) s.y *= 1.0 / s.y.l1_norm();
  return s;
}

/// Residuals of the connection axioms. Defects are l1 coefficient bounds, hence
/// upper bounds for the C*-norm; the pass threshold is 10 eta + 1e-12.
inline AxiomReport check_axioms(const MetricMatrix& g, const ChristoffelTensor& gamma,
                                const std::vector<CompatibilitySample>& samples) {
  if (gamma.metric_fingerprint != g.fingerprint()) throw InputError("check_axioms: Christoffel data built from another metric");
  const int n = g.dim();
  AxiomReport rep;
  rep.eta = gamma.eta;
  rep.threshold = 10.0 * gamma.eta + 1e-12;
  for (int m = 0; m < n; ++m)
    for (int j = 0; j < n; ++j)
      for (int k = j + 1; k < n; ++k)
        rep.torsion_defect = std::max(rep.torsion_defect, (gamma(m, j, k) - gamma(m, k, j)).l1_norm());
  for (int j = 0; j < n; ++j) {
    for (int k = 0; k < n; ++k) {
      for (int l = 0; l < n; ++l) {
        TorusElement s(g.theta());
        for (int m = 0; m < n; ++m)
          if (!gamma(m, j, k).is_zero() && !g(m, l).is_zero()) s += gamma(m, j, k) * g(m, l);
        rep.self_adjoint_defect = std::max(rep.self_adjoint_defect, 0.5 * (s - adjoint(s)).l1_norm());
      }
    }
  }
  for (const auto& raw : samples) {
    CompatibilitySample smp = normalize_sample(raw);
    const TorusElement lhs = smp.delta(inner_g(g, smp.x, smp.y));
    const TorusElement r1 = inner_g(g, covariant_derivative(gamma, smp.delta, smp.x), smp.y);
    const TorusElement r2 = inner_g(g, smp.x, covariant_derivative(gamma, smp.delta, smp.y));
    rep.compatibility.push_back({smp, (lhs - r1 - r2).l1_norm()});
  }
  return rep;
}

/// ||delta|| = N(r) + ||b||.
inline NormInterval der_norm(const Derivation& delta, NormChoice norm, const GnsConfig& cfg) {
  NormInterval part_b = norm_interval(delta.b * Complex(0.0, 1.0), cfg);
  NormInterval out = NormInterval::exact(norm(delta.r)) + part_b;
  out.method = part_b.method;
  return out;
}

}  // namespace qtorus
