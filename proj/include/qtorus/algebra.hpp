// Fourier polynomials in the smooth quantum torus.
//
// An element is a finitely supported map k -> c_k from Z^n to C, read as
// sum_k c_k u^k with the ordered monomials u^k = u_1^{k_1} ... u_n^{k_n}.
// Multiplication is the twisted convolution forced by the commutation
// relation u_k u_j = e^{2 pi i Theta_jk} u_j u_k.
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <memory>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace qtorus {

inline constexpr int kMaxDim = 6;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;
/// Coefficients with magnitude below this are dropped after arithmetic.
inline constexpr double kDropThreshold = 1e-15;

using Complex = std::complex<double>;
/// Lattice point; entries past the torus dimension are always zero.
using Lattice = std::array<int, kMaxDim>;

/// Malformed or inconsistent input (bad dimensions, violated preconditions).
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A numerical procedure failed to meet its contract.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline Lattice make_lattice(std::span<const int> k) {
  if (k.size() > static_cast<std::size_t>(kMaxDim)) {
    throw InputError("lattice vector longer than the supported maximum dimension");
  }
  Lattice out{};
  std::copy(k.begin(), k.end(), out.begin());
  return out;
}

inline Lattice make_lattice(std::initializer_list<int> k) {
  return make_lattice(std::span<const int>(k.begin(), k.size()));
}

inline Lattice operator+(const Lattice& a, const Lattice& b) {
  Lattice out{};
  for (int j = 0; j < kMaxDim; ++j) out[j] = a[j] + b[j];
  return out;
}

inline Lattice operator-(const Lattice& a) {
  Lattice out{};
  for (int j = 0; j < kMaxDim; ++j) out[j] = -a[j];
  return out;
}

inline int sup_norm(const Lattice& k) {
  int r = 0;
  for (int v : k) r = std::max(r, std::abs(v));
  return r;
}

inline bool is_origin(const Lattice& k) {
  return std::all_of(k.begin(), k.end(), [](int v) { return v == 0; });
}

/// Real antisymmetric n x n matrix defining the commutation phases.
class ThetaMatrix {
 public:
  ThetaMatrix(int n, std::vector<double> entries) : n_(n), entries_(std::move(entries)) {
    if (n < 1 || n > kMaxDim) {
      throw InputError("theta: dimension must be between 1 and " + std::to_string(kMaxDim));
    }
    if (entries_.size() != static_cast<std::size_t>(n) * n) {
      throw InputError("theta: expected " + std::to_string(n * n) + " entries, got " +
                       std::to_string(entries_.size()));
    }
    for (int j = 0; j < n; ++j) {
      for (int k = 0; k < n; ++k) {
        const double a = entries_[j * n + k];
        const double b = entries_[k * n + j];
        if (!std::isfinite(a)) throw InputError("theta: non-finite entry");
        if (std::abs(a + b) > 1e-14 * std::max(1.0, std::abs(a))) {
          throw InputError("theta: matrix is not antisymmetric at (" + std::to_string(j + 1) +
                           "," + std::to_string(k + 1) + ")");
        }
      }
    }
    // store the exactly antisymmetric version of the upper triangle
    for (int j = 0; j < n; ++j) {
      entries_[j * n + j] = 0.0;
      for (int k = j + 1; k < n; ++k) entries_[k * n + j] = -entries_[j * n + k];
    }
  }

  int dim() const { return n_; }
  double operator()(int j, int k) const { return entries_[j * n_ + k]; }
  const std::vector<double>& entries() const { return entries_; }

  bool is_commutative() const {
    return std::all_of(entries_.begin(), entries_.end(), [](double v) { return v == 0.0; });
  }

  /// Phase angle, in turns, of u^p u^q = lambda(p,q) u^{p+q}:
  /// sum_{j<k} Theta_jk p_k q_j.
  double twist_turns(const Lattice& p, const Lattice& q) const {
    double acc = 0.0;
    for (int j = 0; j < n_; ++j) {
      if (q[j] == 0) continue;
      double w = 0.0;
      for (int k = j + 1; k < n_; ++k) w += (*this)(j, k) * p[k];
      acc += w * q[j];
    }
    return acc;
  }

  Complex twist(const Lattice& p, const Lattice& q) const {
    return std::polar(1.0, kTwoPi * twist_turns(p, q));
  }

  /// u^p u^q = e^{2 pi i omega(p,q)} u^q u^p, omega in turns.
  double commutator_turns(const Lattice& p, const Lattice& q) const {
    return twist_turns(p, q) - twist_turns(q, p);
  }

  friend bool operator==(const ThetaMatrix& a, const ThetaMatrix& b) {
    return a.n_ == b.n_ && a.entries_ == b.entries_;
  }

 private:
  int n_;
  std::vector<double> entries_;
};

using Theta = std::shared_ptr<const ThetaMatrix>;

inline Theta make_theta(int n, std::vector<double> entries) {
  return std::make_shared<const ThetaMatrix>(n, std::move(entries));
}

/// Two-dimensional torus with Theta_12 = theta.
inline Theta make_theta2(double theta) { return make_theta(2, {0.0, theta, -theta, 0.0}); }

inline Theta commutative_theta(int n) {
  return make_theta(n, std::vector<double>(static_cast<std::size_t>(n) * n, 0.0));
}

inline bool same_algebra(const Theta& a, const Theta& b) {
  return a == b || (a && b && *a == *b);
}

struct Term {
  Lattice k;
  Complex c;
};

/// Finite Fourier polynomial sum_k c_k u^k. Terms are kept sorted by k with
/// no duplicates and no coefficient below kDropThreshold.
class TorusElement {
 public:
  explicit TorusElement(Theta theta) : theta_(std::move(theta)) {
    if (!theta_) throw InputError("torus element requires a theta matrix");
  }

  static TorusElement from_terms(Theta theta, std::vector<Term> terms) {
    TorusElement out(std::move(theta));
    const int n = out.dim();
    for (const Term& t : terms) {
      for (int j = n; j < kMaxDim; ++j) {
        if (t.k[j] != 0) throw InputError("lattice point has more components than the torus dimension");
      }
    }
    std::sort(terms.begin(), terms.end(), [](const Term& a, const Term& b) { return a.k < b.k; });
    for (const Term& t : terms) {
      if (!out.terms_.empty() && out.terms_.back().k == t.k) {
        out.terms_.back().c += t.c;
      } else {
        out.terms_.push_back(t);
      }
    }
    out.prune();
    return out;
  }

  static TorusElement monomial(Theta theta, std::span<const int> k, Complex c = 1.0) {
    if (k.size() != static_cast<std::size_t>(theta->dim())) {
      throw InputError("monomial: exponent has length " + std::to_string(k.size()) +
                       " but the torus has dimension " + std::to_string(theta->dim()));
    }
    return from_terms(std::move(theta), {Term{make_lattice(k), c}});
  }

  static TorusElement monomial(Theta theta, std::initializer_list<int> k, Complex c = 1.0) {
    return monomial(std::move(theta), std::span<const int>(k.begin(), k.size()), c);
  }

  static TorusElement scalar(Theta theta, Complex c) {
    return from_terms(std::move(theta), {Term{Lattice{}, c}});
  }

  static TorusElement one(Theta theta) { return scalar(std::move(theta), 1.0); }

  /// Generator u_{axis+1}.
  static TorusElement generator(Theta theta, int axis) {
    if (axis < 0 || axis >= theta->dim()) throw InputError("generator: axis out of range");
    Lattice k{};
    k[axis] = 1;
    return from_terms(std::move(theta), {Term{k, 1.0}});
  }

  const Theta& theta() const { return theta_; }
  int dim() const { return theta_->dim(); }
  std::span<const Term> terms() const { return terms_; }
  std::size_t size() const { return terms_.size(); }
  bool is_zero() const { return terms_.empty(); }

  Complex coeff(const Lattice& k) const {
    auto it = std::lower_bound(terms_.begin(), terms_.end(), k,
                               [](const Term& t, const Lattice& key) { return t.k < key; });
    return (it != terms_.end() && it->k == k) ? it->c : Complex{};
  }

  int support_radius() const {
    int r = 0;
    for (const Term& t : terms_) r = std::max(r, sup_norm(t.k));
    return r;
  }

  double l1_norm() const {
    double s = 0.0;
    for (const Term& t : terms_) s += std::abs(t.c);
    return s;
  }

  double max_abs_coeff() const {
    double m = 0.0;
    for (const Term& t : terms_) m = std::max(m, std::abs(t.c));
    return m;
  }

  TorusElement& operator+=(const TorusElement& o) { return axpy(1.0, o); }
  TorusElement& operator-=(const TorusElement& o) { return axpy(-1.0, o); }

  TorusElement& operator*=(Complex s) {
    for (Term& t : terms_) t.c *= s;
    prune();
    return *this;
  }

  /// this += s * o
  TorusElement& axpy(Complex s, const TorusElement& o) {
    require_compatible(*this, o);
    std::vector<Term> merged;
    merged.reserve(terms_.size() + o.terms_.size());
    auto a = terms_.begin();
    auto b = o.terms_.begin();
    while (a != terms_.end() || b != o.terms_.end()) {
      if (b == o.terms_.end() || (a != terms_.end() && a->k < b->k)) {
        merged.push_back(*a++);
      } else if (a == terms_.end() || b->k < a->k) {
        merged.push_back(Term{b->k, s * b->c});
        ++b;
      } else {
        merged.push_back(Term{a->k, a->c + s * b->c});
        ++a;
        ++b;
      }
    }
    terms_ = std::move(merged);
    prune();
    return *this;
  }

  friend TorusElement operator+(TorusElement a, const TorusElement& b) { return a += b; }
  friend TorusElement operator-(TorusElement a, const TorusElement& b) { return a -= b; }
  friend TorusElement operator*(TorusElement a, Complex s) { return a *= s; }
  friend TorusElement operator*(Complex s, TorusElement a) { return a *= s; }
  friend TorusElement operator-(TorusElement a) { return a *= -1.0; }
  friend TorusElement operator*(const TorusElement& a, const TorusElement& b);

  friend void require_compatible(const TorusElement& a, const TorusElement& b) {
    if (!same_algebra(a.theta_, b.theta_)) {
      throw InputError("elements belong to different quantum tori (dimension or theta mismatch)");
    }
  }

 private:
  void prune() {
    std::erase_if(terms_, [](const Term& t) { return std::abs(t.c) < kDropThreshold; });
  }

  friend class ElementAccumulator;

  Theta theta_;
  std::vector<Term> terms_;
};

/// Accumulates coefficients on a bounded lattice box, densely when the box is
/// small enough and through a sorted merge otherwise.
class ElementAccumulator {
 public:
  ElementAccumulator(Theta theta, int radius) : theta_(std::move(theta)), radius_(radius) {
    const int n = theta_->dim();
    std::size_t size = 1;
    dense_ = true;
    for (int j = 0; j < n; ++j) {
      stride_[j] = size;
      size *= static_cast<std::size_t>(2 * radius_ + 1);
      if (size > (std::size_t{1} << 22)) {
        dense_ = false;
        break;
      }
    }
    if (dense_) {
      values_.assign(size, Complex{});
      touched_.assign(size, 0);
    }
  }

  void add(const Lattice& k, Complex c) {
    if (!dense_) {
      sparse_.push_back(Term{k, c});
      return;
    }
    std::size_t idx = 0;
    for (int j = 0; j < theta_->dim(); ++j) idx += static_cast<std::size_t>(k[j] + radius_) * stride_[j];
    values_[idx] += c;
    touched_[idx] = 1;
  }

  TorusElement finish() && {
    if (!dense_) return TorusElement::from_terms(theta_, std::move(sparse_));
    const int n = theta_->dim();
    TorusElement out(theta_);
    const int width = 2 * radius_ + 1;
    for (std::size_t idx = 0; idx < values_.size(); ++idx) {
      if (!touched_[idx] || std::abs(values_[idx]) < kDropThreshold) continue;
      Lattice k{};
      std::size_t rem = idx;
      for (int j = 0; j < n; ++j) {
        k[j] = static_cast<int>(rem % width) - radius_;
        rem /= width;
      }
      out.terms_.push_back(Term{k, values_[idx]});
    }
    // dense order is axis-0 fastest; restore lexicographic order
    std::sort(out.terms_.begin(), out.terms_.end(),
              [](const Term& a, const Term& b) { return a.k < b.k; });
    return out;
  }

 private:
  Theta theta_;
  int radius_;
  bool dense_ = true;
  std::array<std::size_t, kMaxDim> stride_{};
  std::vector<Complex> values_;
  std::vector<char> touched_;
  std::vector<Term> sparse_;
};

inline TorusElement operator*(const TorusElement& a, const TorusElement& b) {
  require_compatible(a, b);
  if (a.is_zero() || b.is_zero()) return TorusElement(a.theta());
  const ThetaMatrix& th = *a.theta();
  const int n = th.dim();
  ElementAccumulator acc(a.theta(), a.support_radius() + b.support_radius());
  // lambda(p,q) = exp(2 pi i q.w(p)) with w(p)_j = sum_{k>j} Theta_jk p_k
  std::array<double, kMaxDim> w{};
  for (const Term& x : a.terms()) {
    for (int j = 0; j < n; ++j) {
      double s = 0.0;
      for (int k = j + 1; k < n; ++k) s += th(j, k) * x.k[k];
      w[j] = s;
    }
    for (const Term& y : b.terms()) {
      double turns = 0.0;
      for (int j = 0; j < n; ++j) turns += w[j] * y.k[j];
      const Complex phase = turns == 0.0 ? Complex{1.0} : std::polar(1.0, kTwoPi * turns);
      acc.add(x.k + y.k, x.c * y.c * phase);
    }
  }
  return std::move(acc).finish();
}

inline TorusElement one(const Theta& theta) { return TorusElement::one(theta); }

/// (u^k)* = conj(lambda(k,-k)) u^{-k}.
inline TorusElement adjoint(const TorusElement& a) {
  const ThetaMatrix& th = *a.theta();
  std::vector<Term> terms;
  terms.reserve(a.size());
  for (const Term& t : a.terms()) {
    const Lattice minus = -t.k;
    terms.push_back(Term{minus, std::conj(t.c) * std::conj(th.twist(t.k, minus))});
  }
  return TorusElement::from_terms(a.theta(), std::move(terms));
}

/// Faithful tracial state: the coefficient at the origin.
inline Complex trace(const TorusElement& a) { return a.coeff(Lattice{}); }

/// Coordinate derivation, axis is zero-based: c_k -> 2 pi i k_axis c_k.
inline TorusElement derive(const TorusElement& a, int axis) {
  if (axis < 0 || axis >= a.dim()) {
    throw InputError("derive: axis " + std::to_string(axis) + " out of range for dimension " +
                     std::to_string(a.dim()));
  }
  std::vector<Term> terms;
  terms.reserve(a.size());
  for (const Term& t : a.terms()) {
    if (t.k[axis] != 0) terms.push_back(Term{t.k, Complex(0.0, kTwoPi * t.k[axis]) * t.c});
  }
  return TorusElement::from_terms(a.theta(), std::move(terms));
}

/// Torus action with t_j = exp(2 pi i s_j): c_k -> exp(2 pi i s.k) c_k.
inline TorusElement act(const TorusElement& a, std::span<const double> s) {
  if (s.size() != static_cast<std::size_t>(a.dim())) throw InputError("act: parameter has wrong length");
  std::vector<Term> terms;
  terms.reserve(a.size());
  for (const Term& t : a.terms()) {
    double turns = 0.0;
    for (int j = 0; j < a.dim(); ++j) turns += s[j] * t.k[j];
    terms.push_back(Term{t.k, t.c * std::polar(1.0, kTwoPi * turns)});
  }
  return TorusElement::from_terms(a.theta(), std::move(terms));
}

struct FejerParams {
  int order = 1;
};

/// Average of the torus action against the product Fejer kernel of the given
/// order: c_k -> c_k prod_j max(0, 1 - |k_j|/(M+1)).
inline TorusElement fejer_smooth(const TorusElement& a, FejerParams p) {
  if (p.order < 1) throw InputError("fejer_smooth: order must be at least 1");
  std::vector<Term> terms;
  for (const Term& t : a.terms()) {
    double weight = 1.0;
    for (int j = 0; j < a.dim(); ++j) {
      weight *= std::max(0.0, 1.0 - std::abs(t.k[j]) / static_cast<double>(p.order + 1));
    }
    if (weight > 0.0) terms.push_back(Term{t.k, t.c * weight});
  }
  return TorusElement::from_terms(a.theta(), std::move(terms));
}

/// Largest coefficientwise distance between two elements.
inline double max_abs_diff(const TorusElement& a, const TorusElement& b) {
  return (a - b).max_abs_coeff();
}

inline TorusElement real_part(const TorusElement& a) { return (a + adjoint(a)) * 0.5; }

inline TorusElement imag_part(const TorusElement& a) {
  return (a - adjoint(a)) * Complex(0.0, -0.5);
}

inline bool is_self_adjoint(const TorusElement& a, double tol = 1e-12) {
  return max_abs_diff(a, adjoint(a)) <= tol;
}

inline bool is_skew_adjoint(const TorusElement& a, double tol = 1e-12) {
  return (a + adjoint(a)).max_abs_coeff() <= tol;
}

inline bool is_traceless(const TorusElement& a, double tol = 1e-12) {
  return std::abs(trace(a)) <= tol;
}

/// Drops every term outside the sup-norm ball of the given radius.
inline TorusElement truncate(const TorusElement& a, int radius) {
  std::vector<Term> terms;
  for (const Term& t : a.terms()) {
    if (sup_norm(t.k) <= radius) terms.push_back(t);
  }
  return TorusElement::from_terms(a.theta(), std::move(terms));
}

/// True when the element lies in a commutative subalgebra: every pair of
/// support points commutes, u^p u^q = u^q u^p.
inline bool has_commuting_support(const TorusElement& a, double tol = 1e-13) {
  const ThetaMatrix& th = *a.theta();
  if (th.is_commutative()) return true;
  const auto terms = a.terms();
  for (std::size_t i = 0; i < terms.size(); ++i) {
    for (std::size_t j = i + 1; j < terms.size(); ++j) {
      if (std::abs(th.commutator_turns(terms[i].k, terms[j].k)) > tol) return false;
    }
  }
  return true;
}

}  // namespace qtorus
