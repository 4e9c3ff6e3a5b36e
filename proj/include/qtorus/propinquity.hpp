// States, Monge-Kantorovich lower bounds and modular bridges between two
// metrics on the same free module.
#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "qtorus/seminorms.hpp"

namespace qtorus {

/// A state given by a density matrix on a lattice box: phi(a) = tr(rho P pi(a) P).
/// Compressions of positive operators are positive, so this is a state of the
/// algebra. The trace state is tagged and evaluated exactly.
class State {
 public:
  static State trace_state(int n) { return State(TruncationBox(n, 0), Eigen::MatrixXcd::Ones(1, 1), true); }

  static State from_density(const TruncationBox& box, Eigen::MatrixXcd rho) {
    if (rho.rows() != static_cast<Eigen::Index>(box.size()) || rho.cols() != rho.rows()) {
      throw InputError("state density has the wrong size for its box");
    }
    if ((rho - rho.adjoint()).cwiseAbs().maxCoeff() > 1e-12) throw InputError("state density is not Hermitian");
    if (std::abs(rho.trace() - Complex(1.0)) > 1e-12) throw InputError("state density does not have trace 1");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(rho, Eigen::EigenvaluesOnly);
    if (eig.eigenvalues().minCoeff() < -1e-12) throw InputError("state density is not positive semidefinite");
    return State(box, std::move(rho), false);
  }

  /// Vector state of a unit vector on the box.
  static State from_vector(const TruncationBox& box, Eigen::VectorXcd v) {
    v.normalize();
    Eigen::MatrixXcd rho = v * v.adjoint();
    rho = 0.5 * (rho + rho.adjoint()).eval();
    return from_density(box, rho);
  }

  bool is_trace() const { return trace_tag_; }
  const TruncationBox& box() const { return box_; }
  const Eigen::MatrixXcd& density() const { return rho_; }

  Complex operator()(const TorusElement& a) const {
    if (trace_tag_) return trace(a);
    const SparseMatrix m = represent(a, box_).matrix;
    Complex acc{};
    for (Eigen::Index col = 0; col < m.outerSize(); ++col)
      for (SparseMatrix::InnerIterator it(m, col); it; ++it) acc += rho_(it.col(), it.row()) * it.value();
    return acc;
  }

 private:
  State(TruncationBox box, Eigen::MatrixXcd rho, bool tag) : box_(box), rho_(std::move(rho)), trace_tag_(tag) {}

  TruncationBox box_;
  Eigen::MatrixXcd rho_;
  bool trace_tag_;
};

/// Mixed state of `rank` random vectors on a box.
inline State random_state(int n, int radius, int rank, Rng& rng) {
  const TruncationBox box(n, radius);
  const auto d = static_cast<Eigen::Index>(box.size());
  Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(d, d);
  for (int i = 0; i < rank; ++i) {
    Eigen::VectorXcd v(d);
    for (Eigen::Index j = 0; j < d; ++j) v(j) = complex_gaussian(rng);
    v.normalize();
    rho += v * v.adjoint();
  }
  rho /= rho.trace();
  rho = 0.5 * (rho + rho.adjoint()).eval();
  return State::from_density(box, rho);
}

/// phi((1-p)*(1-p)) and phi((1-p)(1-p)*) both vanish (up to tol).
inline bool level_set_member(const State& phi, const TorusElement& pivot, double tol) {
  const TorusElement e = one(pivot.theta()) - pivot;
  const TorusElement ee = adjoint(e) * e;
  const TorusElement ee2 = e * adjoint(e);
  return std::abs(phi(ee)) <= tol && std::abs(phi(ee2)) <= tol;
}

/// Divides each witness by its L upper bound; scalars (L = 0) are dropped.
inline std::vector<TorusElement> normalize_lipschitz_witnesses(const std::vector<TorusElement>& ws,
                                                               const SeminormConfig& cfg) {
  std::vector<TorusElement> out;
  for (const auto& w : ws) {
    const double up = lipschitz_L(w, cfg).interval.upper;
    if (up <= 0.0) continue;
    out.push_back(w * (1.0 / up));
  }
  return out;
}

/// max_w |phi(w) - psi(w)| over witnesses with L(w) <= 1.
inline double mk_lower(const State& phi, const State& psi, const std::vector<TorusElement>& witnesses) {
  double best = 0.0;
  for (const auto& w : witnesses) best = std::max(best, std::abs(phi(w) - psi(w)));
  return best;
}

/// Divides each module vector by its D upper bound.
inline std::vector<ModuleVector> normalize_d_witnesses(const GeometryContext& ctx, const std::vector<ModuleVector>& ws,
                                                       const SeminormConfig& cfg) {
  std::vector<ModuleVector> out;
  for (const auto& w : ws) {
    if (w.is_zero()) continue;
    out.push_back(w * (1.0 / d_norm(ctx, w, cfg).d.upper));
  }
  return out;
}

/// max_theta ||<zeta - eta | theta>_g|| lower bound over witnesses with D(theta) <= 1.
inline double modular_mk_lower(const GeometryContext& ctx, const ModuleVector& zeta, const ModuleVector& eta,
                               const std::vector<ModuleVector>& witnesses, const GnsConfig& gns) {
  const ModuleVector diff = zeta - eta;
  double best = 0.0;
  if (diff.is_zero()) return 0.0;
  for (const auto& w : witnesses) best = std::max(best, norm_interval(inner_g(ctx.metric, diff, w), gns).lower);
  return best;
}

struct ModularBridge {
  GeometryContext domain;
  GeometryContext codomain;
  TorusElement pivot;
  bool identity_embeddings = true;
  /// The anchor maps are declared to range over the whole unit D-balls.
  bool anchors_cover_unit_balls = false;
  std::vector<ModuleVector> alpha;
  std::vector<ModuleVector> beta;
  std::vector<NormInterval> alpha_d;
  std::vector<NormInterval> beta_d;
};

/// ||a1 p - p a2||.
inline NormInterval bridge_seminorm(const ModularBridge& br, const TorusElement& a1, const TorusElement& a2,
                                    const GnsConfig& gns) {
  return norm_interval(a1 * br.pivot - br.pivot * a2, gns);
}

inline bool is_unit(const TorusElement& p) {
  return p.size() == 1 && is_origin(p.terms()[0].k) && p.terms()[0].c == Complex(1.0);
}

struct Quantity {
  std::string name;
  NormInterval value;
  bool structural = false;
  std::string justification;

  static Quantity structural_zero(std::string name, std::string why) {
    Quantity q{std::move(name), NormInterval::exact(0.0), true, std::move(why)};
    q.value.method = "structural";
    return q;
  }
};

struct QuantityReport {
  std::vector<NormInterval> bridge_samples;
  std::vector<NormInterval> deck;
  Quantity basic_reach;
  Quantity height;
  Quantity modular_reach;
  Quantity imprint;
  Quantity reach;
  Quantity length;

  static NormInterval assemble_reach(const NormInterval& basic, const NormInterval& modular,
                                     const NormInterval& imprint) {
    return interval_max(basic, modular + imprint);
  }
};

/// Sample sets for the quantities that are not structurally zero.
struct BridgeSamples {
  std::vector<std::pair<TorusElement, TorusElement>> bridge_pairs;
  std::vector<TorusElement> lipschitz_domain;    // L <= 1
  std::vector<TorusElement> lipschitz_codomain;  // L <= 1
  std::vector<State> states;
  std::vector<TorusElement> mk_witnesses;        // L <= 1
  std::vector<ModuleVector> ball_domain;         // D <= 1
  std::vector<ModuleVector> ball_codomain;       // D <= 1
  std::vector<ModuleVector> modular_witnesses_domain;
  std::vector<ModuleVector> modular_witnesses_codomain;
};

/// Deck seminorm dn(zeta, eta): sup over anchors of both orientations.
inline NormInterval deck_seminorm(const ModularBridge& br, const ModuleVector& zeta, const ModuleVector& eta,
                                  const GnsConfig& gns) {
  NormInterval best = NormInterval::exact(0.0);
  for (std::size_t v = 0; v < br.alpha.size(); ++v) {
    const NormInterval left = bridge_seminorm(br, inner_g(br.domain.metric, zeta, br.alpha[v]),
                                              inner_g(br.codomain.metric, eta, br.beta[v]), gns);
    const NormInterval right = bridge_seminorm(br, inner_g(br.domain.metric, br.alpha[v], zeta),
                                               inner_g(br.codomain.metric, br.beta[v], eta), gns);
    best = interval_max(best, interval_max(left, right));
  }
  return best;
}

inline QuantityReport bridge_quantities(const ModularBridge& br, const BridgeSamples& samples,
                                        const SeminormConfig& cfg) {
  if (br.alpha.size() != br.beta.size()) throw InputError("bridge anchors alpha and beta differ in size");
  if (br.alpha_d.size() != br.alpha.size() || br.beta_d.size() != br.beta.size()) {
    throw InputError("bridge anchors lack D-norm evidence");
  }
  for (std::size_t i = 0; i < br.alpha.size(); ++i) {
    if (br.alpha_d[i].upper > 1.0 + 1e-9 || br.beta_d[i].upper > 1.0 + 1e-9) {
      throw InputError("bridge anchor " + std::to_string(i) + " is outside the unit D-ball");
    }
  }
  const NormInterval pn = norm_interval(br.pivot, cfg.gns);
  if (!pn.contains(1.0, 1e-12)) throw InputError("bridge pivot does not have norm 1");
  const GnsConfig& gns = cfg.gns;
  QuantityReport rep;
  for (const auto& [a1, a2] : samples.bridge_pairs) rep.bridge_samples.push_back(bridge_seminorm(br, a1, a2, gns));

  const bool unit_pivot = is_unit(br.pivot);
  const bool same_l = same_algebra(br.domain.metric.theta(), br.codomain.metric.theta());
  if (unit_pivot && br.identity_embeddings && same_l) {
    rep.basic_reach = Quantity::structural_zero(
        "basic_reach", "pivot is the unit and both embeddings are the identity of one algebra with one L");
  } else {
    // max-min over the supplied Lipschitz samples
    auto directed = [&](const std::vector<TorusElement>& from, const std::vector<TorusElement>& to, bool forward) {
      double worst = 0.0;
      for (const auto& a : from) {
        double nearest = std::numeric_limits<double>::infinity();
        for (const auto& b : to) {
          nearest = std::min(nearest, (forward ? bridge_seminorm(br, a, b, gns) : bridge_seminorm(br, b, a, gns)).lower);
        }
        if (!to.empty()) worst = std::max(worst, nearest);
      }
      return worst;
    };
    const double v = std::max(directed(samples.lipschitz_domain, samples.lipschitz_codomain, true),
                              directed(samples.lipschitz_codomain, samples.lipschitz_domain, false));
    rep.basic_reach = {"basic_reach", NormInterval::exact(v), false, ""};
    rep.basic_reach.value.upper = std::numeric_limits<double>::infinity();
    rep.basic_reach.value.method = "sampled";
  }

  if (unit_pivot) {
    rep.height = Quantity::structural_zero("height", "pivot is the unit, so its 1-level set is the whole state space");
  } else {
    std::vector<const State*> level;
    for (const auto& s : samples.states)
      if (level_set_member(s, br.pivot, 1e-12)) level.push_back(&s);
    double v = 0.0;
    for (const auto& s : samples.states) {
      double nearest = std::numeric_limits<double>::infinity();
      for (const State* t : level) nearest = std::min(nearest, mk_lower(s, *t, samples.mk_witnesses));
      if (!level.empty()) v = std::max(v, nearest);
    }
    rep.height = {"height", NormInterval::exact(v), false, ""};
    rep.height.value.upper = std::numeric_limits<double>::infinity();
    rep.height.value.method = "sampled";
  }

  NormInterval modular = NormInterval::exact(0.0);
  for (std::size_t v = 0; v < br.alpha.size(); ++v) {
    rep.deck.push_back(deck_seminorm(br, br.alpha[v], br.beta[v], gns));
    modular = interval_max(modular, rep.deck.back());
  }
  modular.method = "deck-max";
  rep.modular_reach = {"modular_reach", modular, false, ""};

  if (br.anchors_cover_unit_balls) {
    rep.imprint = Quantity::structural_zero("imprint", "anchor ranges are declared to be the unit D-balls");
  } else {
    auto directed = [&](const GeometryContext& ctx, const std::vector<ModuleVector>& ball,
                        const std::vector<ModuleVector>& anchors, const std::vector<ModuleVector>& wit) {
      double worst = 0.0;
      for (const auto& z : ball) {
        double nearest = std::numeric_limits<double>::infinity();
        for (const auto& a : anchors) nearest = std::min(nearest, modular_mk_lower(ctx, z, a, wit, gns));
        if (!anchors.empty()) worst = std::max(worst, nearest);
      }
      return worst;
    };
    const double v =
        std::max(directed(br.domain, samples.ball_domain, br.alpha, samples.modular_witnesses_domain),
                 directed(br.codomain, samples.ball_codomain, br.beta, samples.modular_witnesses_codomain));
    rep.imprint = {"imprint", NormInterval::exact(v), false, ""};
    rep.imprint.value.upper = std::numeric_limits<double>::infinity();
    rep.imprint.value.method = "sampled";
  }

  rep.reach = {"reach", QuantityReport::assemble_reach(rep.basic_reach.value, modular, rep.imprint.value), false, ""};
  rep.reach.value.method = "max(basic_reach, modular_reach + imprint)";
  rep.length = {"length", interval_max(rep.height.value, rep.reach.value), false, ""};
  rep.length.value.method = "max(height, reach)";
  return rep;
}

/// gamma_{r,s}: pivot 1, identity embeddings, anchors X / D_{r g}(X).upper on
/// the domain and sqrt(r/s) times them on the codomain. Both D-norms are
/// measured, so the unit-ball check on the codomain is not taken on trust.
inline ModularBridge scaling_bridge(const MetricMatrix& g, double r, double s, int anchors, std::uint64_t seed,
                                    const SeminormConfig& cfg, int inverse_radius = 0, double inverse_tol = 1e-10,
                                    int anchor_radius = 1, int anchor_terms = 3) {
  if (!(r > 0.0) || !(s > 0.0)) throw InputError("scaling bridge needs r > 0 and s > 0");
  if (anchors < 0) throw InputError("anchor count must be nonnegative");
  const Theta& theta = g.theta();
  ModularBridge br{make_context(g.scaled(r), inverse_radius, inverse_tol),
                   make_context(g.scaled(s), inverse_radius, inverse_tol),
                   one(theta),
                   true,
                   true,
                   {},
                   {},
                   {},
                   {}};
  Rng rng = substream(seed, 0xb1d9e);
  const double factor = std::sqrt(r / s);
  for (int i = 0; i < anchors; ++i) {
    ModuleVector x = random_module_vector(theta, rng, anchor_radius, anchor_terms);
    if (x.is_zero()) x = ModuleVector::basis(theta, 0);
    const NormInterval d = d_norm(br.domain, x, cfg).d;
    const double c = 1.0 / d.upper;
    br.alpha.push_back(x * c);
    br.alpha_d.push_back(d.scaled(c));
    br.beta.push_back(br.alpha.back() * factor);
    br.beta_d.push_back(d_norm(br.codomain, br.beta.back(), cfg).d);
  }
  return br;
}

struct IsometryReport {
  double lipschitz_defect = 0.0;  // L o Id = L, identically
  double action_defect = 0.0;
  double inner_defect = 0.0;
  std::vector<std::pair<NormInterval, NormInterval>> d_pairs;
  bool d_overlap = true;

  bool passed(double exact_tol = 1e-12) const {
    return lipschitz_defect <= exact_tol && action_defect <= exact_tol && inner_defect <= exact_tol && d_overlap;
  }
};

/// Checks that (Id, sqrt(r/s) Id) is a full quantum isometry from the r g
/// context to the s g context on samples.
inline IsometryReport isometry_check(const GeometryContext& ctx_r, const GeometryContext& ctx_s, double r, double s,
                                     const std::vector<ModuleVector>& vectors, const std::vector<TorusElement>& elements,
                                     const SeminormConfig& cfg, bool with_d = true) {
  IsometryReport rep;
  const double factor = std::sqrt(r / s);
  auto map = [&](const ModuleVector& x) { return x * factor; };
  for (const auto& a : elements) {
    for (const auto& x : vectors) {
      rep.action_defect = std::max(rep.action_defect, (map(a * x) - a * map(x)).l1_norm());
    }
  }
  for (std::size_t i = 0; i < vectors.size(); ++i) {
    for (std::size_t j = 0; j < vectors.size(); ++j) {
      const TorusElement lhs = inner_g(ctx_s.metric, map(vectors[i]), map(vectors[j]));
      const TorusElement rhs = inner_g(ctx_r.metric, vectors[i], vectors[j]);
      rep.inner_defect = std::max(rep.inner_defect, (lhs - rhs).l1_norm());
    }
    if (with_d) {
      const NormInterval ds = d_norm(ctx_s, map(vectors[i]), cfg).d;
      const NormInterval dr = d_norm(ctx_r, vectors[i], cfg).d;
      rep.d_pairs.emplace_back(ds, dr);
      rep.d_overlap = rep.d_overlap && ds.overlaps(dr, 1e-9 * std::max(1.0, dr.upper));
    }
  }
  return rep;
}

}  // namespace qtorus
