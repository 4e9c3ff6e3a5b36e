// Lipschitz seminorm L, the connection D-norm and the inequality checkers.
//
// Every quantity is an interval. Inequality checks run in sound mode:
// lower(LHS) <= upper(RHS) + tol.
#pragma once

#include <bit>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "qtorus/ball_search.hpp"
#include "qtorus/connection.hpp"

namespace qtorus {

struct AdSearchConfig {
  int radius = 1;        // lattice radius of candidate monomials
  int max_pairs = 3;     // monomial pairs combined in one candidate
  int restarts = 2;      // random restarts of the coefficient ascent
  int ascent_rounds = 6; // step halvings per ascent
};

struct SeminormConfig {
  NormChoice norm;
  GnsConfig gns;
  BallSearchConfig search;
  AdSearchConfig ad;
  double tol = 1e-6;

  static SeminormConfig for_dim(int n) {
    SeminormConfig c;
    c.gns = GnsConfig::for_dim(n);
    return c;
  }
};

/// Single-radius, single-restart settings used to rank grid points.
inline GnsConfig coarse_config(const GnsConfig& cfg) {
  GnsConfig c = cfg;
  c.radii = {cfg.radii.front()};
  c.restarts = 1;
  c.krylov_steps = std::min(cfg.krylov_steps, 24);
  c.use_characters = false;
  return c;
}

inline bool is_scalar(const TorusElement& a) {
  for (const Term& t : a.terms())
    if (!is_origin(t.k)) return false;
  return true;
}

/// L(a) = sup_{N(r) <= 1} ||sum_j r_j d_j a||.
inline SeminormEstimate lipschitz_L(const TorusElement& a, const SeminormConfig& cfg) {
  if (!is_self_adjoint(a, 1e-12 * std::max(1.0, a.max_abs_coeff()))) {
    throw InputError("lipschitz_L: element is not self-adjoint");
  }
  const int n = a.dim();
  if (is_scalar(a)) {
    SeminormEstimate out;
    out.witness.assign(n, 0.0);
    out.witness[0] = 1.0;
    out.method = "exact-scalar";
    out.interval.method = out.method;
    return out;
  }
  std::vector<TorusElement> partials;
  BallBounds bounds;
  for (int m = 0; m < n; ++m) {
    partials.push_back(derive(a, m));
    bounds.axis_upper.push_back(partials.back().l1_norm());
  }
  // ||sum r_j d_j u^k|| = 2 pi |r.k| <= 2 pi N(r) N*(k)
  bounds.direct_upper = 0.0;
  for (const Term& t : a.terms()) bounds.direct_upper += kTwoPi * std::abs(t.c) * cfg.norm.dual_of(t.k, n);
  const GnsConfig coarse = coarse_config(cfg.gns);
  auto objective = [&](std::span<const double> r, Fidelity fid) {
    TorusElement e(a.theta());
    for (int m = 0; m < n; ++m)
      if (r[m] != 0.0) e.axpy(r[m], partials[m]);
    return norm_interval(e, fid == Fidelity::fine ? cfg.gns : coarse);
  };
  return ball_search(objective, n, cfg.norm, bounds, cfg.search);
}

/// Evaluates the L objective at a given direction.
inline NormInterval lipschitz_objective(const TorusElement& a, std::span<const double> r, const GnsConfig& gns) {
  TorusElement e(a.theta());
  for (int m = 0; m < a.dim(); ++m)
    if (r[m] != 0.0) e.axpy(r[m], derive(a, m));
  return norm_interval(e, gns);
}

/// Lower bound for sup_t ||alpha_t(a) - a|| / N(t) over sample points of the torus.
inline SeminormEstimate lipschitz_L_def(const TorusElement& a, NormChoice norm,
                                        const std::vector<std::vector<double>>& samples, const GnsConfig& gns) {
  if (!is_self_adjoint(a, 1e-12 * std::max(1.0, a.max_abs_coeff()))) {
    throw InputError("lipschitz_L_def: element is not self-adjoint");
  }
  SeminormEstimate out;
  out.method = "sampled";
  out.interval.method = out.method;
  out.interval.upper = std::numeric_limits<double>::infinity();
  for (const auto& t : samples) {
    if (t.size() != static_cast<std::size_t>(a.dim())) throw InputError("lipschitz_L_def: sample has wrong length");
    std::vector<double> rep(t.size());
    for (std::size_t j = 0; j < t.size(); ++j) rep[j] = t[j] - std::floor(t[j] + 0.5);  // in [-1/2, 1/2)
    const double len = norm(rep);
    if (len <= 0.0) continue;
    const double v = norm_interval(act(a, rep) - a, gns).lower / len;
    if (out.witness.empty() || v > out.interval.lower) {
      out.interval.lower = v;
      out.witness = rep;
    }
  }
  return out;
}

/// Metric, inverse and Christoffel data of one Riemannian metric.
struct GeometryContext {
  MetricMatrix metric;
  InverseApprox inverse;
  ChristoffelTensor gamma;
};

inline GeometryContext make_context(const MetricMatrix& g, int inverse_radius = 0, double inverse_tol = 1e-10) {
  if (inverse_radius <= 0) inverse_radius = default_inverse_radius(g);
  InverseApprox inv = invert_metric(g, inverse_radius, inverse_tol);
  ChristoffelTensor gamma = christoffel(g, inv);
  return GeometryContext{g, std::move(inv), std::move(gamma)};
}

/// S_d(X) = sup_{N(r) <= 1} ||sum_m r_m nabla_{d_m} X||_g, through the Gram
/// elements G_{mm'} = <nabla_m X | nabla_m' X>_g.
inline SeminormEstimate s_partial(const GeometryContext& ctx, const ModuleVector& x, const SeminormConfig& cfg) {
  const int n = x.dim();
  std::vector<ModuleVector> v;
  for (int m = 0; m < n; ++m) v.push_back(covariant_derivative(ctx.gamma, Derivation::coordinate(x.theta(), m), x));
  bool all_zero = true;
  for (const auto& vm : v) all_zero = all_zero && vm.is_zero();
  if (all_zero) {
    SeminormEstimate out;
    out.witness.assign(n, 0.0);
    out.witness[0] = 1.0;
    out.method = "exact-zero";
    out.interval.method = out.method;
    return out;
  }
  std::vector<TorusElement> gram(n * n, TorusElement(x.theta()));
  Eigen::MatrixXd l1(n, n);
  for (int m = 0; m < n; ++m) {
    for (int p = m; p < n; ++p) {
      gram[m * n + p] = inner_g(ctx.metric, v[m], v[p]);
      gram[p * n + m] = adjoint(gram[m * n + p]);
      l1(m, p) = l1(p, m) = gram[m * n + p].l1_norm();
    }
  }
  BallBounds bounds;
  for (int m = 0; m < n; ++m) bounds.axis_upper.push_back(std::sqrt(l1(m, m)));
  if (cfg.norm.kind == NormKind::l2) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(l1, Eigen::EigenvaluesOnly);
    bounds.direct_upper = std::sqrt(std::max(0.0, eig.eigenvalues().maxCoeff()));
  }
  const GnsConfig coarse = coarse_config(cfg.gns);
  auto objective = [&](std::span<const double> r, Fidelity fid) {
    TorusElement e(x.theta());
    for (int m = 0; m < n; ++m)
      for (int p = 0; p < n; ++p)
        if (r[m] * r[p] != 0.0) e.axpy(r[m] * r[p], gram[m * n + p]);
    return norm_interval(real_part(e), fid == Fidelity::fine ? cfg.gns : coarse).sqrt();
  };
  return ball_search(objective, n, cfg.norm, bounds, cfg.search);
}

inline NormInterval s_partial_objective(const GeometryContext& ctx, const ModuleVector& x,
                                        std::span<const double> r, const GnsConfig& gns) {
  std::vector<double> rv(r.begin(), r.end());
  const ModuleVector w = covariant_derivative(ctx.gamma, Derivation(rv, TorusElement(x.theta())), x);
  return norm_g(ctx.metric, w, gns);
}

/// i (c u^k + (c u^k)*): skew-adjoint, traceless for k != 0.
inline TorusElement skew_pair(const Theta& theta, const Lattice& k, Complex c) {
  TorusElement m = TorusElement::monomial(theta, std::span<const int>(k.data(), theta->dim()), c);
  return (m + adjoint(m)) * Complex(0.0, 1.0);
}

/// Value of the S_ad objective at a given b.
inline double s_ad_objective(const GeometryContext& ctx, const ModuleVector& x, const TorusElement& b,
                             const GnsConfig& gns) {
  return norm_g(ctx.metric, b * x, gns).lower / b.l1_norm();
}

/// Lower bound of sup ||b X||_g over skew-adjoint traceless b with ||b|| <= 1,
/// upper bound ||X||_g.
inline SeminormEstimate s_ad(const GeometryContext& ctx, const ModuleVector& x, const SeminormConfig& cfg,
                             const NormInterval* norm_x = nullptr) {
  SeminormEstimate out;
  out.method = "sampled";
  const NormInterval nx = norm_x ? *norm_x : norm_g(ctx.metric, x, cfg.gns);
  out.interval.upper = nx.upper;
  out.interval.method = out.method;
  if (x.is_zero()) {
    out.method = "exact-zero";
    out.interval.method = out.method;
    return out;
  }
  const Theta& theta = x.theta();
  const int n = theta->dim();
  const GnsConfig coarse = coarse_config(cfg.gns);
  // ranking uses the cheap objective; the best few are re-evaluated in full
  auto value = [&](const TorusElement& b) {
    const double bn = b.l1_norm();
    if (bn <= 0.0) return 0.0;
    return norm_g(ctx.metric, b * x, coarse).lower / bn;
  };
  std::vector<std::pair<double, TorusElement>> pool;
  auto consider = [&](const TorusElement& b, double v) {
    pool.emplace_back(v, b);
    std::stable_sort(pool.begin(), pool.end(), [](const auto& p, const auto& q) { return p.first > q.first; });
    if (pool.size() > 3) pool.pop_back();
  };

  // positive half of the candidate box
  std::vector<Lattice> ks;
  const TruncationBox box(n, cfg.ad.radius);
  for (std::size_t i = 0; i < box.size(); ++i) {
    const Lattice k = box.point(i);
    if (k > -k) ks.push_back(k);
  }
  const std::vector<Complex> phases = {1.0, Complex(0.0, 1.0), std::polar(1.0, std::numbers::pi / 4),
                                       std::polar(1.0, 3 * std::numbers::pi / 4)};
  struct Single {
    double v;
    Lattice k;
    Complex c;
  };
  std::vector<Single> singles;
  for (const Lattice& k : ks) {
    for (Complex c : phases) {
      const TorusElement b = skew_pair(theta, k, c);
      const double v = value(b);
      consider(b, v);
      singles.push_back({v, k, c});
    }
  }
  std::stable_sort(singles.begin(), singles.end(), [](const Single& a, const Single& b) { return a.v > b.v; });
  // best phase per lattice point, then sums of up to max_pairs of them
  std::vector<Single> lead;
  for (const Single& s : singles) {
    bool seen = false;
    for (const Single& l : lead) seen = seen || l.k == s.k;
    if (!seen) lead.push_back(s);
    if (lead.size() >= 4) break;
  }
  const int m = static_cast<int>(lead.size());
  for (int mask = 1; mask < (1 << m); ++mask) {
    const int bits = std::popcount(static_cast<unsigned>(mask));
    if (bits < 2 || bits > cfg.ad.max_pairs) continue;
    TorusElement b(theta);
    for (int i = 0; i < m; ++i)
      if (mask & (1 << i)) b += skew_pair(theta, lead[i].k, lead[i].c);
    consider(b, value(b));
  }

  // coordinate ascent on the coefficients of the leading pairs
  Rng rng = substream(cfg.gns.seed, 0x5ad);
  const int pairs = std::min(m, cfg.ad.max_pairs);
  for (int restart = 0; restart < cfg.ad.restarts; ++restart) {
    std::vector<Complex> coef(pairs);
    for (int i = 0; i < pairs; ++i) coef[i] = restart == 0 && i == 0 ? lead[0].c : complex_gaussian(rng);
    auto build = [&](const std::vector<Complex>& c) {
      TorusElement b(theta);
      for (int i = 0; i < pairs; ++i) b += skew_pair(theta, lead[i].k, c[i]);
      return b;
    };
    TorusElement best_b = build(coef);
    double best = value(best_b);
    double step = 0.5;
    for (int round = 0; round < cfg.ad.ascent_rounds; ++round) {
      for (int i = 0; i < pairs; ++i) {
        for (Complex d : {Complex(step, 0), Complex(-step, 0), Complex(0, step), Complex(0, -step)}) {
          std::vector<Complex> trial = coef;
          trial[i] += d * std::max(1.0, std::abs(coef[i]));
          const TorusElement b = build(trial);
          const double v = value(b);
          if (v > best) {
            best = v;
            best_b = b;
            coef = trial;
          }
        }
      }
      step *= 0.5;
    }
    consider(best_b, best);
  }
  for (const auto& [v, b] : pool) {
    const TorusElement unit = b * (1.0 / b.l1_norm());
    const double fine = s_ad_objective(ctx, x, unit, cfg.gns);
    if (!out.witness_element || fine > out.interval.lower) {
      out.interval.lower = fine;
      out.witness_element = unit;
    }
  }
  out.interval.upper = std::max(out.interval.upper, out.interval.lower);
  out.gap = out.interval.upper - out.interval.lower;
  return out;
}

struct DNormEstimate {
  NormInterval norm;        // ||X||_g
  SeminormEstimate partial; // S_d
  SeminormEstimate ad;      // S_ad
  NormInterval op;          // max(S_d, S_ad)
  NormInterval d;           // max(||X||_g, op)
  NormInterval dp;          // max(||X||_g, S_d)
};

/// D_g(X) = max(||X||_g, sup_{||delta|| <= 1} ||nabla_delta X||_g). The sup over
/// the derivation ball splits into the coordinate part and the inner part.
inline DNormEstimate d_norm(const GeometryContext& ctx, const ModuleVector& x, const SeminormConfig& cfg) {
  DNormEstimate out;
  if (x.is_zero()) {
    out.norm = NormInterval::exact(0.0);
    out.partial.method = out.ad.method = "exact-zero";
    out.op = out.d = out.dp = out.norm;
    return out;
  }
  out.norm = norm_g(ctx.metric, x, cfg.gns);
  out.partial = s_partial(ctx, x, cfg);
  out.ad = s_ad(ctx, x, cfg, &out.norm);
  out.op = interval_max(out.partial.interval, out.ad.interval);
  out.d = interval_max(out.norm, out.op);
  out.dp = interval_max(out.norm, out.partial.interval);
  out.op.method = out.d.method = out.dp.method = "max";
  return out;
}

struct InequalityCheck {
  std::string name;
  double lhs_lower = 0.0;
  double rhs_upper = 0.0;
  double tol = 0.0;
  bool passed = false;
  // advisory comparison of estimates at the stabilised truncation
  bool sharp_holds = true;
  double sharp_lhs = 0.0;
  double sharp_rhs = 0.0;
};

inline InequalityCheck make_check(std::string name, double lhs, double rhs, double tol) {
  InequalityCheck c;
  c.name = std::move(name);
  c.lhs_lower = lhs;
  c.rhs_upper = rhs;
  c.tol = tol;
  c.passed = lhs <= rhs + tol;
  return c;
}

struct GReport {
  InequalityCheck check;
  NormInterval d_ax;
  NormInterval a_norm;
  NormInterval l_a;
  NormInterval d_x;
};

/// D(aX) <= (3||a|| + L(a)) D(X).
inline GReport check_G_inequality(const GeometryContext& ctx, const TorusElement& a, const ModuleVector& x,
                                  const SeminormConfig& cfg) {
  GReport r;
  r.a_norm = norm_interval(a, cfg.gns);
  r.l_a = lipschitz_L(a, cfg).interval;
  r.d_x = d_norm(ctx, x, cfg).d;
  r.d_ax = d_norm(ctx, a * x, cfg).d;
  r.check = make_check("G", r.d_ax.lower, (3.0 * r.a_norm.upper + r.l_a.upper) * r.d_x.upper, cfg.tol);
  r.check.sharp_lhs = r.d_ax.upper;
  r.check.sharp_rhs = (3.0 * r.a_norm.lower + r.l_a.lower) * r.d_x.lower;
  r.check.sharp_holds = r.check.sharp_lhs <= r.check.sharp_rhs + cfg.tol;
  return r;
}

struct HReport {
  InequalityCheck check;  // against 2 D(X) D(Y)
  InequalityCheck sharp;  // against S_d(X)||Y|| + ||X|| S_d(Y)
  NormInterval l_re;
  NormInterval l_im;
  DNormEstimate d_x;
  DNormEstimate d_y;
};

/// max(L(Re <X|Y>_g), L(Im <X|Y>_g)) <= 2 D(X) D(Y).
inline HReport check_H_inequality(const GeometryContext& ctx, const ModuleVector& x, const ModuleVector& y,
                                  const SeminormConfig& cfg) {
  HReport r;
  const TorusElement m = inner_g(ctx.metric, x, y);
  r.l_re = lipschitz_L(hermitize(real_part(m)), cfg).interval;
  r.l_im = lipschitz_L(hermitize(imag_part(m)), cfg).interval;
  r.d_x = d_norm(ctx, x, cfg);
  r.d_y = d_norm(ctx, y, cfg);
  const double lhs = std::max(r.l_re.lower, r.l_im.lower);
  r.check = make_check("H", lhs, 2.0 * r.d_x.d.upper * r.d_y.d.upper, cfg.tol);
  r.sharp = make_check("H-sharp", lhs,
                       r.d_x.partial.interval.upper * r.d_y.norm.upper + r.d_x.norm.upper * r.d_y.partial.interval.upper,
                       cfg.tol);
  return r;
}

struct LeibnizReport {
  InequalityCheck jordan;
  InequalityCheck lie;
};

/// L of the Jordan and Lie products against ||a|| L(b) + L(a) ||b||.
inline LeibnizReport check_leibniz_L(const TorusElement& a, const TorusElement& b, const SeminormConfig& cfg) {
  const NormInterval na = norm_interval(a, cfg.gns);
  const NormInterval nb = norm_interval(b, cfg.gns);
  const NormInterval la = lipschitz_L(a, cfg).interval;
  const NormInterval lb = lipschitz_L(b, cfg).interval;
  const double rhs = na.upper * lb.upper + la.upper * nb.upper;
  const TorusElement ab = a * b;
  const TorusElement ba = b * a;
  const TorusElement jordan = hermitize((ab + ba) * 0.5);
  const TorusElement lie = hermitize((ab - ba) * Complex(0.0, -0.5));
  LeibnizReport r;
  r.jordan = make_check("leibniz-jordan", lipschitz_L(jordan, cfg).interval.lower, rhs, cfg.tol);
  r.lie = make_check("leibniz-lie", lipschitz_L(lie, cfg).interval.lower, rhs, cfg.tol);
  return r;
}

/// ||delta(a)|| <= (2||a|| + L(a)) ||delta||.
inline InequalityCheck check_derivation_bound(const Derivation& delta, const TorusElement& a, const SeminormConfig& cfg) {
  const NormInterval lhs = norm_interval(delta(a), cfg.gns);
  const NormInterval na = norm_interval(a, cfg.gns);
  const NormInterval la = lipschitz_L(a, cfg).interval;
  const NormInterval nd = der_norm(delta, cfg.norm, cfg.gns);
  return make_check("derivation_bound", lhs.lower, (2.0 * na.upper + la.upper) * nd.upper, cfg.tol);
}

}  // namespace qtorus
