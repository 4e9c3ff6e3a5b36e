// The free module A^n with its standard and metric-weighted inner products.
#pragma once

#include <bit>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qtorus/algebra.hpp"
#include "qtorus/element_matrix.hpp"
#include "qtorus/gns.hpp"
#include "qtorus/random.hpp"

namespace qtorus {

/// sum_j a_j . e_j, one component per coordinate direction.
class ModuleVector {
 public:
  explicit ModuleVector(const Theta& theta) : theta_(theta), comps_(theta->dim(), TorusElement(theta)) {}

  ModuleVector(const Theta& theta, std::vector<TorusElement> comps) : theta_(theta), comps_(std::move(comps)) {
    if (comps_.size() != static_cast<std::size_t>(theta->dim())) {
      throw InputError("module vector needs " + std::to_string(theta->dim()) + " components, got " +
                       std::to_string(comps_.size()));
    }
    for (const auto& c : comps_) {
      if (!same_algebra(c.theta(), theta_)) throw InputError("module vector components use a different theta");
    }
  }

  static ModuleVector basis(const Theta& theta, int j) {
    if (j < 0 || j >= theta->dim()) throw InputError("basis index out of range");
    ModuleVector v(theta);
    v.comps_[j] = one(theta);
    return v;
  }

  const Theta& theta() const { return theta_; }
  int dim() const { return static_cast<int>(comps_.size()); }
  const std::vector<TorusElement>& components() const { return comps_; }
  TorusElement& operator[](int j) { return comps_[j]; }
  const TorusElement& operator[](int j) const { return comps_[j]; }

  bool is_zero() const {
    for (const auto& c : comps_)
      if (!c.is_zero()) return false;
    return true;
  }

  double l1_norm() const {
    double s = 0.0;
    for (const auto& c : comps_) s += c.l1_norm();
    return s;
  }

  double max_abs_coeff() const {
    double m = 0.0;
    for (const auto& c : comps_) m = std::max(m, c.max_abs_coeff());
    return m;
  }

  int support_radius() const {
    int r = 0;
    for (const auto& c : comps_) r = std::max(r, c.support_radius());
    return r;
  }

  ModuleVector& operator+=(const ModuleVector& o) {
    check(o);
    for (int j = 0; j < dim(); ++j) comps_[j] += o.comps_[j];
    return *this;
  }
  ModuleVector& operator-=(const ModuleVector& o) {
    check(o);
    for (int j = 0; j < dim(); ++j) comps_[j] -= o.comps_[j];
    return *this;
  }
  ModuleVector& operator*=(Complex s) {
    for (auto& c : comps_) c *= s;
    return *this;
  }

  friend ModuleVector operator+(ModuleVector a, const ModuleVector& b) { return a += b; }
  friend ModuleVector operator-(ModuleVector a, const ModuleVector& b) { return a -= b; }
  friend ModuleVector operator*(ModuleVector a, Complex s) { return a *= s; }
  friend ModuleVector operator*(Complex s, ModuleVector a) { return a *= s; }

  /// Left action a . X.
  friend ModuleVector operator*(const TorusElement& a, const ModuleVector& x) {
    ModuleVector out(x.theta_);
    for (int j = 0; j < x.dim(); ++j) out.comps_[j] = a * x.comps_[j];
    return out;
  }

 private:
  void check(const ModuleVector& o) const {
    if (dim() != o.dim() || !same_algebra(theta_, o.theta_)) throw InputError("module vectors do not match");
  }

  Theta theta_;
  std::vector<TorusElement> comps_;
};

inline double max_abs_diff(const ModuleVector& a, const ModuleVector& b) { return (a - b).max_abs_coeff(); }

inline ModuleVector random_module_vector(const Theta& theta, Rng& rng, int radius, int terms) {
  std::vector<TorusElement> comps;
  for (int j = 0; j < theta->dim(); ++j) comps.push_back(random_element(theta, rng, radius, terms));
  return ModuleVector(theta, std::move(comps));
}

/// <X|Y>_st = sum_j a_j b_j*.
inline TorusElement inner_st(const ModuleVector& x, const ModuleVector& y) {
  if (x.dim() != y.dim() || !same_algebra(x.theta(), y.theta())) {
    throw InputError("inner_st: module vectors do not match");
  }
  TorusElement acc(x.theta());
  for (int j = 0; j < x.dim(); ++j) {
    if (x[j].is_zero() || y[j].is_zero()) continue;
    acc += x[j] * adjoint(y[j]);
  }
  return acc;
}

/// Self-adjoint part of a, with c_{-k} written as the exact adjoint image of c_k
/// so that adjoint(a) reproduces a up to one rounding of the phase.
inline TorusElement hermitize(const TorusElement& a) {
  const ThetaMatrix& th = *a.theta();
  const TorusElement b = real_part(a);
  std::vector<Term> terms;
  for (const Term& t : b.terms()) {
    const Lattice minus = -t.k;
    if (is_origin(t.k)) {
      terms.push_back(Term{t.k, Complex(t.c.real(), 0.0)});
    } else if (t.k > minus) {
      terms.push_back(t);
      terms.push_back(Term{minus, std::conj(t.c) * std::conj(th.twist(t.k, minus))});
    }
  }
  return TorusElement::from_terms(a.theta(), std::move(terms));
}

enum class MetricKind { conformal, rotated_diagonal, explicit_entries };

inline const char* to_string(MetricKind k) {
  switch (k) {
    case MetricKind::conformal:
      return "conformal";
    case MetricKind::rotated_diagonal:
      return "rotated-diagonal";
    case MetricKind::explicit_entries:
      return "explicit";
  }
  return "unknown";
}

struct MetricSpec {
  MetricKind kind = MetricKind::conformal;
  double epsilon = 1.0;
  std::vector<TorusElement> profile;  // h (conformal, one entry) or d_j (rotated-diagonal)
  std::vector<double> rotation;       // row-major n x n real orthogonal matrix; empty means identity
  std::optional<ElementMatrix> entries;
};

/// Riemannian metric: Hermitian matrix over the algebra with self-adjoint
/// entries and recorded positivity evidence.
class MetricMatrix {
 public:
  MetricMatrix(ElementMatrix entries, PositivityEvidence evidence, MetricKind kind)
      : entries_(std::move(entries)), evidence_(evidence), kind_(kind) {
    fingerprint_ = compute_fingerprint();
  }

  const Theta& theta() const { return entries_.theta(); }
  int dim() const { return entries_.size(); }
  const ElementMatrix& entries() const { return entries_; }
  const TorusElement& operator()(int j, int k) const { return entries_(j, k); }
  const PositivityEvidence& evidence() const { return evidence_; }
  MetricKind kind() const { return kind_; }
  std::uint64_t fingerprint() const { return fingerprint_; }

  /// r . g, reusing the evidence.
  MetricMatrix scaled(double r) const {
    if (!(r > 0.0)) throw InputError("metric scale must be positive");
    return MetricMatrix(entries_ * Complex(r), evidence_.scaled(r), kind_);
  }

 private:
  std::uint64_t compute_fingerprint() const {
    // FNV-1a over theta and coefficient bit patterns
    std::uint64_t h = 1469598103934665603ull;
    auto mix = [&h](std::uint64_t v) {
      for (int i = 0; i < 8; ++i) {
        h ^= (v >> (8 * i)) & 0xff;
        h *= 1099511628211ull;
      }
    };
    for (double t : theta()->entries()) mix(std::bit_cast<std::uint64_t>(t));
    for (int j = 0; j < dim(); ++j) {
      for (int k = 0; k < dim(); ++k) {
        mix(0x9e3779b97f4a7c15ull + static_cast<std::uint64_t>(j * dim() + k));
        for (const Term& t : entries_(j, k).terms()) {
          for (int i = 0; i < theta()->dim(); ++i) mix(static_cast<std::uint64_t>(static_cast<std::int64_t>(t.k[i])));
          mix(std::bit_cast<std::uint64_t>(t.c.real()));
          mix(std::bit_cast<std::uint64_t>(t.c.imag()));
        }
      }
    }
    return h;
  }

  ElementMatrix entries_;
  PositivityEvidence evidence_;
  MetricKind kind_;
  std::uint64_t fingerprint_ = 0;
};

inline int default_evidence_radius(int n) { return n <= 2 ? 4 : 2; }

inline MetricMatrix make_metric(const Theta& theta, const MetricSpec& spec, int evidence_radius = 0) {
  const int n = theta->dim();
  if (evidence_radius <= 0) evidence_radius = default_evidence_radius(n);
  const TruncationBox box(n, evidence_radius);
  auto require_sa = [](const TorusElement& a, const std::string& what) {
    if (!is_self_adjoint(a, 1e-12 * std::max(1.0, a.max_abs_coeff()))) {
      throw InputError(what + " is not self-adjoint");
    }
  };
  ElementMatrix g(theta, n);
  switch (spec.kind) {
    case MetricKind::conformal: {
      if (!(spec.epsilon > 0.0)) throw InputError("metric.epsilon must be positive");
      if (spec.profile.size() != 1) throw InputError("conformal metric needs exactly one profile element h");
      require_sa(spec.profile[0], "metric.h");
      const TorusElement h = hermitize(spec.profile[0]);
      const TorusElement f = hermitize(TorusElement::scalar(theta, spec.epsilon) + h * h);
      for (int j = 0; j < n; ++j) g(j, j) = f;
      break;
    }
    case MetricKind::rotated_diagonal: {
      if (!(spec.epsilon > 0.0)) throw InputError("metric.epsilon must be positive");
      if (spec.profile.size() != static_cast<std::size_t>(n)) {
        throw InputError("rotated-diagonal metric needs " + std::to_string(n) + " profile elements d_j");
      }
      std::vector<double> o = spec.rotation;
      if (o.empty()) {
        o.assign(static_cast<std::size_t>(n) * n, 0.0);
        for (int j = 0; j < n; ++j) o[j * n + j] = 1.0;
      }
      if (o.size() != static_cast<std::size_t>(n) * n) throw InputError("metric.O must be n x n");
      for (int a = 0; a < n; ++a) {
        for (int b = 0; b < n; ++b) {
          double dot = 0.0;
          for (int m = 0; m < n; ++m) dot += o[m * n + a] * o[m * n + b];
          if (std::abs(dot - (a == b ? 1.0 : 0.0)) > 1e-12) throw InputError("metric.O is not orthogonal");
        }
      }
      std::vector<TorusElement> diag;
      for (int m = 0; m < n; ++m) {
        require_sa(spec.profile[m], "metric.d[" + std::to_string(m) + "]");
        const TorusElement d = hermitize(spec.profile[m]);
        diag.push_back(TorusElement::scalar(theta, spec.epsilon) + d * d);
      }
      for (int j = 0; j < n; ++j) {
        for (int k = j; k < n; ++k) {
          TorusElement acc(theta);
          for (int m = 0; m < n; ++m) {
            const double w = o[m * n + j] * o[m * n + k];
            if (w != 0.0) acc.axpy(w, diag[m]);
          }
          g(j, k) = hermitize(acc);
          g(k, j) = g(j, k);
        }
      }
      break;
    }
    case MetricKind::explicit_entries: {
      if (!spec.entries) throw InputError("explicit metric needs entries");
      const ElementMatrix& e = *spec.entries;
      if (e.size() != n || !same_algebra(e.theta(), theta)) throw InputError("explicit metric has wrong shape");
      for (int j = 0; j < n; ++j) {
        for (int k = 0; k < n; ++k) {
          require_sa(e(j, k), "metric entry (" + std::to_string(j) + "," + std::to_string(k) + ")");
          if (max_abs_diff(e(j, k), e(k, j)) > 1e-12 * std::max(1.0, e.max_abs_coeff())) {
            throw InputError("metric entries must satisfy g_jk = g_kj");
          }
        }
      }
      for (int j = 0; j < n; ++j) {
        for (int k = j; k < n; ++k) {
          g(j, k) = hermitize(e(j, k));
          g(k, j) = g(j, k);
        }
      }
      break;
    }
  }
  const PositivityEvidence ev = positivity_check(g, box);
  if (spec.kind == MetricKind::explicit_entries && ev.verdict != PositivityVerdict::plausible) {
    throw InputError(std::string("explicit metric failed positivity evidence (") + to_string(ev.verdict) +
                     ", min eigenvalue " + std::to_string(ev.min_eig) + ")");
  }
  if (ev.verdict == PositivityVerdict::non_positive) {
    throw NumericalError("structurally positive metric produced a negative compression eigenvalue");
  }
  return MetricMatrix(std::move(g), ev, spec.kind);
}

inline MetricMatrix identity_metric(const Theta& theta) {
  MetricSpec spec;
  spec.kind = MetricKind::conformal;
  spec.epsilon = 1.0;
  spec.profile = {TorusElement(theta)};
  return make_metric(theta, spec);
}

/// k-th component sum_j a_j g_jk.
inline ModuleVector apply_Tg(const MetricMatrix& g, const ModuleVector& x) {
  if (x.dim() != g.dim() || !same_algebra(x.theta(), g.theta())) throw InputError("apply_Tg: dimension mismatch");
  ModuleVector out(x.theta());
  for (int k = 0; k < g.dim(); ++k) {
    TorusElement acc(x.theta());
    for (int j = 0; j < g.dim(); ++j) {
      if (x[j].is_zero() || g(j, k).is_zero()) continue;
      acc += x[j] * g(j, k);
    }
    out[k] = std::move(acc);
  }
  return out;
}

inline TorusElement inner_g(const MetricMatrix& g, const ModuleVector& x, const ModuleVector& y) {
  if (g.evidence().verdict == PositivityVerdict::non_positive) {
    throw InputError("inner_g: metric lacks positivity evidence");
  }
  return inner_st(apply_Tg(g, x), y);
}

/// ||X||_g = ||<X|X>_g||^{1/2}.
inline NormInterval norm_g(const MetricMatrix& g, const ModuleVector& x, const GnsConfig& cfg) {
  const TorusElement m = inner_g(g, x, x);
  if (!is_self_adjoint(m, 1e-10 * std::max(1.0, m.max_abs_coeff()))) {
    throw NumericalError("<X|X>_g is not self-adjoint");
  }
  return norm_interval(real_part(m), cfg).sqrt();
}

inline NormInterval norm_st(const ModuleVector& x, const GnsConfig& cfg) {
  return norm_interval(real_part(inner_st(x, x)), cfg).sqrt();
}

}  // namespace qtorus
