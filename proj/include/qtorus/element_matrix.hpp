// Square matrices with entries in the quantum torus.
#pragma once

#include <Eigen/Dense>

#include "qtorus/algebra.hpp"

namespace qtorus {

class ElementMatrix {
 public:
  ElementMatrix(Theta theta, int size)
      : theta_(std::move(theta)), size_(size),
        entries_(static_cast<std::size_t>(size) * size, TorusElement(theta_)) {
    if (size < 1) throw InputError("element matrix must have positive size");
  }

  static ElementMatrix identity(Theta theta, int size) {
    ElementMatrix m(theta, size);
    for (int j = 0; j < size; ++j) m(j, j) = one(theta);
    return m;
  }

  static ElementMatrix scalar_identity(Theta theta, int size, Complex c) {
    ElementMatrix m(theta, size);
    for (int j = 0; j < size; ++j) m(j, j) = TorusElement::scalar(theta, c);
    return m;
  }

  int size() const { return size_; }
  const Theta& theta() const { return theta_; }

  TorusElement& operator()(int j, int k) { return entries_[static_cast<std::size_t>(j) * size_ + k]; }
  const TorusElement& operator()(int j, int k) const {
    return entries_[static_cast<std::size_t>(j) * size_ + k];
  }

  ElementMatrix& operator+=(const ElementMatrix& o) {
    check(o);
    for (std::size_t i = 0; i < entries_.size(); ++i) entries_[i] += o.entries_[i];
    return *this;
  }
  ElementMatrix& operator-=(const ElementMatrix& o) {
    check(o);
    for (std::size_t i = 0; i < entries_.size(); ++i) entries_[i] -= o.entries_[i];
    return *this;
  }
  ElementMatrix& operator*=(Complex s) {
    for (auto& e : entries_) e *= s;
    return *this;
  }

  friend ElementMatrix operator+(ElementMatrix a, const ElementMatrix& b) { return a += b; }
  friend ElementMatrix operator-(ElementMatrix a, const ElementMatrix& b) { return a -= b; }
  friend ElementMatrix operator*(ElementMatrix a, Complex s) { return a *= s; }
  friend ElementMatrix operator*(Complex s, ElementMatrix a) { return a *= s; }

  friend ElementMatrix operator*(const ElementMatrix& a, const ElementMatrix& b) {
    a.check(b);
    ElementMatrix out(a.theta_, a.size_);
    for (int j = 0; j < a.size_; ++j) {
      for (int k = 0; k < a.size_; ++k) {
        TorusElement acc(a.theta_);
        for (int m = 0; m < a.size_; ++m) {
          if (a(j, m).is_zero() || b(m, k).is_zero()) continue;
          acc += a(j, m) * b(m, k);
        }
        out(j, k) = std::move(acc);
      }
    }
    return out;
  }

  /// Conjugate transpose with the algebra adjoint on entries.
  ElementMatrix adjoint() const {
    ElementMatrix out(theta_, size_);
    for (int j = 0; j < size_; ++j)
      for (int k = 0; k < size_; ++k) out(k, j) = qtorus::adjoint((*this)(j, k));
    return out;
  }

  ElementMatrix truncated(int radius) const {
    ElementMatrix out(theta_, size_);
    for (std::size_t i = 0; i < entries_.size(); ++i) out.entries_[i] = truncate(entries_[i], radius);
    return out;
  }

  int support_radius() const {
    int r = 0;
    for (const auto& e : entries_) r = std::max(r, e.support_radius());
    return r;
  }

  double max_abs_coeff() const {
    double m = 0.0;
    for (const auto& e : entries_) m = std::max(m, e.max_abs_coeff());
    return m;
  }

  /// Matrix of coefficient l1 norms; its spectral norm bounds the C*-norm.
  Eigen::MatrixXd l1_matrix() const {
    Eigen::MatrixXd out(size_, size_);
    for (int j = 0; j < size_; ++j)
      for (int k = 0; k < size_; ++k) out(j, k) = (*this)(j, k).l1_norm();
    return out;
  }

  double l1_spectral_bound() const {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(l1_matrix());
    return svd.singularValues()(0);
  }

  bool is_hermitian(double tol = 1e-12) const {
    for (int j = 0; j < size_; ++j)
      for (int k = j; k < size_; ++k)
        if (max_abs_diff((*this)(j, k), qtorus::adjoint((*this)(k, j))) > tol) return false;
    return true;
  }

 private:
  void check(const ElementMatrix& o) const {
    if (size_ != o.size_ || !same_algebra(theta_, o.theta_)) {
      throw InputError("element matrices have mismatched size or theta");
    }
  }

  Theta theta_;
  int size_;
  std::vector<TorusElement> entries_;
};

inline double max_abs_diff(const ElementMatrix& a, const ElementMatrix& b) {
  return (a - b).max_abs_coeff();
}

}  // namespace qtorus
