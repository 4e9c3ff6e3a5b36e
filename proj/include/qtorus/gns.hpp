// Certified operator-norm intervals.
//
// Upper bounds come from the coefficient l1 norm (each u^k is unitary).
// Lower bounds come from two sound sources:
//   * compressions of the left regular representation on l2(Z^n) of the
//     trace to a lattice box; any vector gives |<y, P pi(a) P y>| <= ||a||;
//   * characters of the commutative subalgebra generated by the support, when
//     all support points commute (always the case for rank-one supports and
//     for Theta = 0).
#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qtorus/algebra.hpp"
#include "qtorus/element_matrix.hpp"
#include "qtorus/random.hpp"

namespace qtorus {

class TruncationBox {
 public:
  TruncationBox(int n, int radius) : n_(n), radius_(radius) {
    if (radius < 0) throw InputError("truncation box radius must be nonnegative");
    if (n < 1 || n > kMaxDim) throw InputError("truncation box dimension out of range");
    size_ = 1;
    for (int j = 0; j < n; ++j) size_ *= static_cast<std::size_t>(2 * radius + 1);
  }

  int dim() const { return n_; }
  int radius() const { return radius_; }
  std::size_t size() const { return size_; }

  bool contains(const Lattice& k) const {
    for (int j = 0; j < n_; ++j)
      if (std::abs(k[j]) > radius_) return false;
    return true;
  }

  std::size_t index(const Lattice& k) const {
    std::size_t idx = 0;
    for (int j = n_ - 1; j >= 0; --j) idx = idx * (2 * radius_ + 1) + static_cast<std::size_t>(k[j] + radius_);
    return idx;
  }

  Lattice point(std::size_t idx) const {
    Lattice k{};
    for (int j = 0; j < n_; ++j) {
      k[j] = static_cast<int>(idx % (2 * radius_ + 1)) - radius_;
      idx /= (2 * radius_ + 1);
    }
    return k;
  }

 private:
  int n_;
  int radius_;
  std::size_t size_;
};

/// Enclosure [lower, upper] of a C*-norm.
struct NormInterval {
  double lower = 0.0;
  double upper = 0.0;
  int radius = 0;
  bool converged = true;
  bool truncation_warning = false;
  std::string method = "exact";

  double width() const { return upper - lower; }
  double midpoint() const { return 0.5 * (lower + upper); }
  bool contains(double x, double slack = 0.0) const { return x >= lower - slack && x <= upper + slack; }
  bool overlaps(const NormInterval& o, double slack = 0.0) const {
    return lower <= o.upper + slack && o.lower <= upper + slack;
  }

  static NormInterval exact(double v) {
    NormInterval out;
    out.lower = out.upper = v;
    return out;
  }

  NormInterval scaled(double c) const {
    NormInterval out = *this;
    out.lower = c * lower;
    out.upper = c * upper;
    return out;
  }

  NormInterval sqrt() const {
    NormInterval out = *this;
    out.lower = std::sqrt(std::max(0.0, lower));
    out.upper = std::sqrt(std::max(0.0, upper));
    return out;
  }
};

/// Endpoint-wise sum.
inline NormInterval operator+(const NormInterval& a, const NormInterval& b) {
  NormInterval out = a;
  out.lower = a.lower + b.lower;
  out.upper = a.upper + b.upper;
  out.converged = a.converged && b.converged;
  out.truncation_warning = a.truncation_warning || b.truncation_warning;
  return out;
}

/// Endpoint-wise max.
inline NormInterval interval_max(const NormInterval& a, const NormInterval& b) {
  NormInterval out = a;
  out.lower = std::max(a.lower, b.lower);
  out.upper = std::max(a.upper, b.upper);
  out.radius = std::max(a.radius, b.radius);
  out.converged = a.converged && b.converged;
  out.truncation_warning = a.truncation_warning || b.truncation_warning;
  return out;
}

/// Endpoint-wise product of nonnegative intervals.
inline NormInterval operator*(const NormInterval& a, const NormInterval& b) {
  NormInterval out = a;
  out.lower = a.lower * b.lower;
  out.upper = a.upper * b.upper;
  out.converged = a.converged && b.converged;
  return out;
}

inline std::vector<int> default_radii(int n) {
  if (n <= 2) return {4, 8, 12};
  if (n <= 4) return {2, 4, 6};
  return {1, 2};
}

struct GnsConfig {
  std::vector<int> radii = {4, 8, 12};
  /// Relative residual at which a Krylov probe counts as converged.
  double tol = 1e-10;
  std::uint64_t seed = 20180304;
  int restarts = 3;
  int krylov_steps = 40;
  /// Stop walking the radius schedule once lower bounds move less than this.
  double stop_delta = 1e-8;
  bool use_characters = true;

  static GnsConfig for_dim(int n) {
    GnsConfig c;
    c.radii = default_radii(n);
    return c;
  }
};

inline void validate(const GnsConfig& cfg) {
  if (cfg.radii.empty()) throw InputError("gns: radius schedule is empty");
  for (std::size_t i = 0; i < cfg.radii.size(); ++i) {
    if (cfg.radii[i] < 1) throw InputError("gns: radii must be positive");
    if (i > 0 && cfg.radii[i] <= cfg.radii[i - 1]) throw InputError("gns: radii must be increasing");
  }
  if (!(cfg.tol > 0.0)) throw InputError("gns: tol must be positive");
  if (cfg.restarts < 1 || cfg.krylov_steps < 2) throw InputError("gns: invalid Krylov settings");
}

using SparseMatrix = Eigen::SparseMatrix<Complex>;

/// Compression P pi(a) P of the left regular representation to a box.
struct Compression {
  SparseMatrix matrix;
  bool support_warning = false;
};

/// Entry (p+q, q) = c_p lambda(p,q) for q and p+q in the box.
inline Compression represent(const TorusElement& a, const TruncationBox& box) {
  if (box.dim() != a.dim()) throw InputError("represent: box dimension differs from element dimension");
  const ThetaMatrix& th = *a.theta();
  const auto dim = static_cast<Eigen::Index>(box.size());
  std::vector<Eigen::Triplet<Complex>> triplets;
  triplets.reserve(std::min<std::size_t>(box.size() * a.size(), 1u << 26));
  for (std::size_t col = 0; col < box.size(); ++col) {
    const Lattice q = box.point(col);
    for (const Term& t : a.terms()) {
      const Lattice target = t.k + q;
      if (!box.contains(target)) continue;
      triplets.emplace_back(static_cast<Eigen::Index>(box.index(target)), static_cast<Eigen::Index>(col),
                            t.c * th.twist(t.k, q));
    }
  }
  Compression out;
  out.matrix.resize(dim, dim);
  out.matrix.setFromTriplets(triplets.begin(), triplets.end());
  out.support_warning = a.support_radius() > box.radius();
  return out;
}

/// Block compression of a matrix over the algebra acting on n copies of the box.
inline Compression represent(const ElementMatrix& m, const TruncationBox& box) {
  const auto block = static_cast<Eigen::Index>(box.size());
  const int n = m.size();
  std::vector<Eigen::Triplet<Complex>> triplets;
  bool warn = false;
  for (int j = 0; j < n; ++j) {
    for (int k = 0; k < n; ++k) {
      if (m(j, k).is_zero()) continue;
      Compression c = represent(m(j, k), box);
      warn = warn || c.support_warning;
      for (Eigen::Index outer = 0; outer < c.matrix.outerSize(); ++outer) {
        for (SparseMatrix::InnerIterator it(c.matrix, outer); it; ++it) {
          triplets.emplace_back(j * block + it.row(), k * block + it.col(), it.value());
        }
      }
    }
  }
  Compression out;
  out.matrix.resize(n * block, n * block);
  out.matrix.setFromTriplets(triplets.begin(), triplets.end());
  out.support_warning = warn;
  return out;
}

namespace detail {

struct SpectralProbe {
  double value = 0.0;  // |<y, H y>| / <y, y> at the best Ritz vector
  bool converged = false;
  Eigen::VectorXcd vector;
};

/// Lanczos with full reorthogonalisation on a Hermitian operator; returns the
/// explicitly evaluated Rayleigh quotient of the Ritz vector of largest
/// modulus, which never exceeds the operator norm. The first restart begins
/// from `start` when it is nonzero.
template <class Apply>
SpectralProbe lanczos_extreme(Apply&& apply, Eigen::Index dim, const GnsConfig& cfg, Rng& rng,
                              const Eigen::VectorXcd* start = nullptr) {
  using Vec = Eigen::VectorXcd;
  SpectralProbe best;
  if (dim == 0) {
    best.converged = true;
    return best;
  }
  const Eigen::Index steps = std::min<Eigen::Index>(cfg.krylov_steps, dim);
  for (int restart = 0; restart < cfg.restarts; ++restart) {
    Eigen::MatrixXcd basis(dim, steps);
    std::vector<double> alpha, beta;
    Vec v(dim);
    if (restart == 0 && start && start->size() == dim && start->norm() > 0.0) {
      v = *start;
    } else {
      for (Eigen::Index i = 0; i < dim; ++i) v(i) = complex_gaussian(rng);
    }
    v.normalize();
    basis.col(0) = v;
    Eigen::Index m = 0;
    bool breakdown = false;
    double scale = 0.0;
    for (Eigen::Index j = 0; j < steps; ++j) {
      Vec w = apply(basis.col(j));
      const double a = basis.col(j).dot(w).real();
      alpha.push_back(a);
      scale = std::max(scale, std::abs(a) + (j > 0 ? beta[j - 1] : 0.0));
      for (int pass = 0; pass < 2; ++pass) {
        const Vec coeff = basis.leftCols(j + 1).adjoint() * w;
        w -= basis.leftCols(j + 1) * coeff;
      }
      const double b = w.norm();
      m = j + 1;
      if (j + 1 == steps) {
        beta.push_back(b);
        break;
      }
      if (b <= 1e-13 * std::max(scale, 1e-300)) {
        beta.push_back(0.0);
        breakdown = true;
        break;
      }
      beta.push_back(b);
      basis.col(j + 1) = w / b;
    }
    Eigen::MatrixXd tri = Eigen::MatrixXd::Zero(m, m);
    for (Eigen::Index i = 0; i < m; ++i) {
      tri(i, i) = alpha[i];
      if (i + 1 < m) tri(i, i + 1) = tri(i + 1, i) = beta[i];
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(tri);
    const auto& vals = eig.eigenvalues();
    Eigen::Index pick = 0;
    for (Eigen::Index i = 1; i < m; ++i)
      if (std::abs(vals(i)) > std::abs(vals(pick))) pick = i;
    const Eigen::VectorXd s = eig.eigenvectors().col(pick);
    Vec y = basis.leftCols(m) * s.cast<Complex>();
    const double ynorm2 = y.squaredNorm();
    double rayleigh = 0.0;
    if (ynorm2 > 0.0) rayleigh = std::abs(y.dot(apply(y))) / ynorm2;
    const double resid = std::abs(beta[m - 1] * s(m - 1));
    const bool conv = breakdown || m == dim || resid <= cfg.tol * std::max(std::abs(vals(pick)), 1e-300);
    if (rayleigh > best.value || best.vector.size() == 0) {
      best.value = rayleigh;
      best.vector = y / std::sqrt(std::max(ynorm2, 1e-300));
    }
    best.converged = best.converged || conv;
  }
  return best;
}

/// Lower bound for ||A|| from a compression, Hermitian or not.
inline SpectralProbe compression_norm_lower(const SparseMatrix& a, bool hermitian, const GnsConfig& cfg, Rng& rng,
                                            const Eigen::VectorXcd* start = nullptr) {
  if (a.nonZeros() == 0) return {0.0, true, {}};
  if (hermitian) {
    return lanczos_extreme([&](const Eigen::VectorXcd& x) -> Eigen::VectorXcd { return a * x; }, a.cols(), cfg,
                           rng, start);
  }
  const SparseMatrix at = a.adjoint();
  SpectralProbe p = lanczos_extreme(
      [&](const Eigen::VectorXcd& x) -> Eigen::VectorXcd { return at * (a * x); }, a.cols(), cfg, rng, start);
  p.value = std::sqrt(p.value);
  return p;
}

/// Zero-pads a vector on `blocks` copies of a box into a larger box.
inline Eigen::VectorXcd embed(const Eigen::VectorXcd& v, const TruncationBox& from, const TruncationBox& to,
                              int blocks) {
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(to.size()) * blocks);
  if (v.size() != static_cast<Eigen::Index>(from.size()) * blocks) return out;
  for (int b = 0; b < blocks; ++b) {
    for (std::size_t i = 0; i < from.size(); ++i) {
      out(b * static_cast<Eigen::Index>(to.size()) + static_cast<Eigen::Index>(to.index(from.point(i)))) =
          v(b * static_cast<Eigen::Index>(from.size()) + static_cast<Eigen::Index>(i));
    }
  }
  return out;
}

struct ScheduleResult {
  std::vector<double> values;
  int last_radius = 0;
  bool converged = false;
  bool support_warning = false;
};

/// Walks the radius schedule. Each radius starts from the previous Ritz
/// vector; boxes are nested, so the per-radius values are nondecreasing.
template <class Build>
ScheduleResult run_schedule(Build&& build, int n, int blocks, bool hermitian, const GnsConfig& cfg,
                            bool early_stop) {
  ScheduleResult out;
  Eigen::VectorXcd carry;
  std::optional<TruncationBox> prev_box;
  for (std::size_t i = 0; i < cfg.radii.size(); ++i) {
    const TruncationBox box(n, cfg.radii[i]);
    const Compression c = build(box);
    Rng rng = substream(cfg.seed, static_cast<std::uint64_t>(cfg.radii[i]));
    Eigen::VectorXcd start;
    if (prev_box && carry.size() > 0) start = embed(carry, *prev_box, box, blocks);
    SpectralProbe p = compression_norm_lower(c.matrix, hermitian, cfg, rng, start.size() ? &start : nullptr);
    out.values.push_back(p.value);
    out.last_radius = box.radius();
    out.converged = p.converged;
    out.support_warning = c.support_warning;
    carry = p.vector;
    prev_box = box;
    if (early_stop && i > 0 && std::abs(out.values[i] - out.values[i - 1]) < cfg.stop_delta) break;
  }
  return out;
}

/// Maximises a function on [0,1)^n: uniform grid then coordinate pattern
/// search from the best grid points.
inline double maximize_on_torus(const std::function<double(std::span<const double>)>& f, int n, int per_axis,
                                std::vector<double>* argmax = nullptr) {
  per_axis = std::max(per_axis, 3);
  while (per_axis > 3 && std::pow(static_cast<double>(per_axis), n) > 20000.0) --per_axis;
  std::size_t total = 1;
  for (int j = 0; j < n; ++j) total *= static_cast<std::size_t>(per_axis);
  struct Candidate {
    double value;
    std::vector<double> s;
  };
  std::vector<Candidate> top;
  std::vector<double> s(n);
  for (std::size_t idx = 0; idx < total; ++idx) {
    std::size_t rem = idx;
    for (int j = 0; j < n; ++j) {
      s[j] = static_cast<double>(rem % per_axis) / per_axis;
      rem /= per_axis;
    }
    const double v = f(s);
    top.push_back({v, s});
    std::sort(top.begin(), top.end(), [](const Candidate& a, const Candidate& b) { return a.value > b.value; });
    if (top.size() > 3) top.pop_back();
  }
  Candidate best = top.front();
  for (Candidate c : top) {
    double h = 0.5 / per_axis;
    int evals = 0;
    while (h > 1e-12 && evals < 4000) {
      bool improved = false;
      for (int j = 0; j < n && !improved; ++j) {
        for (double dir : {1.0, -1.0}) {
          std::vector<double> t = c.s;
          t[j] += dir * h;
          const double v = f(t);
          ++evals;
          if (v > c.value) {
            c.value = v;
            c.s = std::move(t);
            improved = true;
            break;
          }
        }
      }
      if (!improved) h *= 0.5;
    }
    if (c.value > best.value) best = c;
  }
  if (argmax) *argmax = best.s;
  return best.value;
}

/// beta(k) exp(2 pi i s.k) with beta(k) = exp(-pi i sum_{j<l} Theta_jl k_l k_j);
/// multiplicative on any sublattice of pairwise commuting points.
inline Complex character_phase(const ThetaMatrix& th, const Lattice& k, std::span<const double> s) {
  double turns = -0.5 * th.twist_turns(k, k);
  for (int j = 0; j < th.dim(); ++j) turns += s[j] * k[j];
  return std::polar(1.0, kTwoPi * turns);
}

inline Complex character_value(const TorusElement& a, std::span<const double> s) {
  Complex acc{};
  for (const Term& t : a.terms()) acc += t.c * character_phase(*a.theta(), t.k, s);
  return acc;
}

inline Eigen::MatrixXcd character_matrix(const ElementMatrix& m, std::span<const double> s) {
  Eigen::MatrixXcd out(m.size(), m.size());
  for (int j = 0; j < m.size(); ++j)
    for (int k = 0; k < m.size(); ++k) out(j, k) = character_value(m(j, k), s);
  return out;
}

inline double spectral_norm(const Eigen::MatrixXcd& m) {
  if (m.size() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(m.adjoint() * m, Eigen::EigenvaluesOnly);
  return std::sqrt(std::max(0.0, eig.eigenvalues().maxCoeff()));
}

inline bool matrix_has_commuting_support(const ElementMatrix& m) {
  std::vector<Term> all;
  for (int j = 0; j < m.size(); ++j)
    for (int k = 0; k < m.size(); ++k)
      for (const Term& t : m(j, k).terms()) all.push_back(Term{t.k, 1.0});
  return has_commuting_support(TorusElement::from_terms(m.theta(), std::move(all)));
}

}  // namespace detail

/// Compression lower bound at each radius of the schedule (no early stop).
inline std::vector<double> norm_lower_profile(const TorusElement& a, const GnsConfig& cfg) {
  validate(cfg);
  const bool herm = is_self_adjoint(a, 1e-13 * std::max(1.0, a.max_abs_coeff()));
  return detail::run_schedule([&](const TruncationBox& box) { return represent(a, box); }, a.dim(), 1, herm, cfg,
                              false)
      .values;
}

/// Best character lower bound for an element with commuting support.
inline double character_lower(const TorusElement& a, int per_axis, std::vector<double>* witness = nullptr) {
  return detail::maximize_on_torus(
      [&](std::span<const double> s) { return std::abs(detail::character_value(a, s)); }, a.dim(), per_axis,
      witness);
}

inline NormInterval norm_interval(const TorusElement& a, const GnsConfig& cfg) {
  validate(cfg);
  NormInterval out;
  if (a.is_zero()) {
    out.method = "exact-zero";
    return out;
  }
  out.upper = a.l1_norm();
  if (a.size() == 1) {
    // c u^k with u^k unitary
    out.lower = out.upper;
    out.method = "exact-monomial";
    return out;
  }
  const bool herm = is_self_adjoint(a, 1e-13 * std::max(1.0, a.max_abs_coeff()));
  const detail::ScheduleResult sched = detail::run_schedule(
      [&](const TruncationBox& box) { return represent(a, box); }, a.dim(), 1, herm, cfg, true);
  double best = *std::max_element(sched.values.begin(), sched.values.end());
  out.radius = sched.last_radius;
  out.converged = sched.converged;
  out.truncation_warning = sched.support_warning;
  out.method = "gns-compression";
  if (cfg.use_characters && has_commuting_support(a)) {
    const double ch = character_lower(a, 2 * cfg.radii.back() + 1);
    if (ch > best) {
      best = ch;
      out.method = "character";
    }
    out.converged = true;
  }
  out.lower = std::min(best, out.upper);
  return out;
}

/// Norm of a matrix over the algebra, i.e. of the operator T_g on the free module.
inline NormInterval matrix_norm_interval(const ElementMatrix& m, const GnsConfig& cfg) {
  validate(cfg);
  NormInterval out;
  if (m.max_abs_coeff() == 0.0) {
    out.method = "exact-zero";
    return out;
  }
  out.upper = m.l1_spectral_bound();
  const bool herm = m.is_hermitian(1e-13 * std::max(1.0, m.max_abs_coeff()));
  const detail::ScheduleResult sched = detail::run_schedule(
      [&](const TruncationBox& box) { return represent(m, box); }, m.theta()->dim(), m.size(), herm, cfg, true);
  double best = *std::max_element(sched.values.begin(), sched.values.end());
  out.radius = sched.last_radius;
  out.converged = sched.converged;
  out.truncation_warning = sched.support_warning;
  out.method = "gns-compression";
  if (cfg.use_characters && detail::matrix_has_commuting_support(m)) {
    const double ch = detail::maximize_on_torus(
        [&](std::span<const double> s) { return detail::spectral_norm(detail::character_matrix(m, s)); },
        m.theta()->dim(), 2 * cfg.radii.back() + 1);
    if (ch > best) {
      best = ch;
      out.method = "character";
    }
    out.converged = true;
  }
  out.lower = std::min(best, out.upper);
  return out;
}

enum class PositivityVerdict { plausible, inconclusive, non_positive };

inline const char* to_string(PositivityVerdict v) {
  switch (v) {
    case PositivityVerdict::plausible:
      return "plausible";
    case PositivityVerdict::inconclusive:
      return "inconclusive";
    case PositivityVerdict::non_positive:
      return "non-positive";
  }
  return "unknown";
}

/// Compression eigenvalue evidence. A compression of a positive operator is
/// positive, so a negative minimum certifies non-positivity; a positive one
/// is only a necessary condition.
struct PositivityEvidence {
  double min_eig = 0.0;
  int radius = 0;
  double tolerance = 1e-9;
  PositivityVerdict verdict = PositivityVerdict::inconclusive;

  PositivityEvidence scaled(double r) const {
    PositivityEvidence out = *this;
    out.min_eig *= r;
    return out;
  }
};

inline Eigen::MatrixXcd dense_hermitian_compression(const ElementMatrix& m, const TruncationBox& box) {
  if (!m.is_hermitian(1e-12 * std::max(1.0, m.max_abs_coeff()))) {
    throw InputError("matrix over the algebra is not Hermitian (m* != m)");
  }
  Eigen::MatrixXcd dense = Eigen::MatrixXcd(represent(m, box).matrix);
  return 0.5 * (dense + dense.adjoint());
}

inline PositivityEvidence positivity_check(const ElementMatrix& m, const TruncationBox& box, double tol = 1e-9) {
  const Eigen::MatrixXcd h = dense_hermitian_compression(m, box);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(h, Eigen::EigenvaluesOnly);
  PositivityEvidence ev;
  ev.min_eig = eig.eigenvalues().minCoeff();
  ev.radius = box.radius();
  ev.tolerance = tol;
  if (ev.min_eig > tol) {
    ev.verdict = PositivityVerdict::plausible;
  } else if (ev.min_eig < -tol) {
    ev.verdict = PositivityVerdict::non_positive;
  } else {
    ev.verdict = PositivityVerdict::inconclusive;
  }
  return ev;
}

/// Hermitian square root of the compression. Heuristic as an estimate for the
/// square root of the operator itself: compression does not commute with
/// functional calculus.
inline Eigen::MatrixXcd compression_sqrt(const ElementMatrix& m, const TruncationBox& box, double tol = 1e-9) {
  const Eigen::MatrixXcd h = dense_hermitian_compression(m, box);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(h);
  if (eig.eigenvalues().minCoeff() < -tol) {
    throw InputError("compression_sqrt: compression has a negative eigenvalue");
  }
  const Eigen::VectorXd roots = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return eig.eigenvectors() * roots.cast<Complex>().asDiagonal() * eig.eigenvectors().adjoint();
}

/// Estimate of ||sqrt(h) sqrt(g^{-1})|| through compressions.
inline double compression_sqrt_norm(const ElementMatrix& h, const ElementMatrix& g, const TruncationBox& box) {
  const Eigen::MatrixXcd sh = compression_sqrt(h, box);
  const Eigen::MatrixXcd sg = compression_sqrt(g, box);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(sg);
  if (eig.eigenvalues().minCoeff() <= 0.0) throw InputError("compression_sqrt_norm: g compression is singular");
  const Eigen::VectorXd inv = eig.eigenvalues().cwiseInverse();
  const Eigen::MatrixXcd sg_inv = eig.eigenvectors() * inv.cast<Complex>().asDiagonal() * eig.eigenvectors().adjoint();
  return detail::spectral_norm(sh * sg_inv);
}

/// Estimate of ||sqrt(g)||.
inline double compression_sqrt_norm(const ElementMatrix& g, const TruncationBox& box) {
  return detail::spectral_norm(compression_sqrt(g, box));
}

/// Estimate of ||sqrt(g^{-1})|| = 1 / sqrt(min spec g).
inline double compression_inverse_sqrt_norm(const ElementMatrix& g, const TruncationBox& box) {
  const Eigen::MatrixXcd h = dense_hermitian_compression(g, box);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(h, Eigen::EigenvaluesOnly);
  const double lo = eig.eigenvalues().minCoeff();
  if (lo <= 0.0) throw InputError("compression_inverse_sqrt_norm: compression is not positive definite");
  return 1.0 / std::sqrt(lo);
}

}  // namespace qtorus
