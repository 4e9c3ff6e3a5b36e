// Fixture loading and command dispatch for the qtorus tool.
#pragma once

#include <chrono>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "qtorus/serialization.hpp"

namespace qtorus {

struct BridgeParams {
  double r = 2.0;
  double s = 5.0;
  int anchors = 32;
  int anchor_radius = 1;
  int anchor_terms = 3;
  std::optional<TorusElement> pivot;
};

struct Fixture {
  std::string path;
  Json raw;
  Theta theta;
  std::optional<MetricSpec> metric;
  int evidence_radius = 0;
  int inverse_radius = 0;
  double inverse_tol = 1e-10;
  SeminormConfig cfg;
  std::optional<TorusElement> element;
  std::optional<TorusElement> element2;
  std::vector<ModuleVector> vectors;
  std::optional<Derivation> derivation;
  BridgeParams bridge;
  int samples = 8;
};

/// Command-line values that take precedence over fixture fields.
struct Overrides {
  std::optional<int> radius;
  std::optional<double> tol;
  std::optional<std::string> norm;
  std::optional<std::uint64_t> seed;
  std::optional<double> r;
  std::optional<double> s;
  std::optional<int> samples;
  std::optional<int> anchors;
};

/// Three-step radius schedule ending at R.
inline std::vector<int> schedule_for(int radius) {
  std::vector<int> out;
  for (int r : {(radius + 2) / 3, (2 * radius + 2) / 3, radius})
    if (r >= 1 && (out.empty() || r > out.back())) out.push_back(r);
  return out;
}

namespace detail {

inline std::string location(const std::string& text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < std::min(byte, text.size()); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

}  // namespace detail

inline Fixture fixture_from_json(const Json& j, const std::string& path = "<memory>") {
  Fixture f;
  f.path = path;
  f.raw = j;
  if (!j.is_object()) throw FieldError("$", "fixture must be an object");
  f.theta = theta_from_json(io::require(j, "theta", "$"), "$.theta");
  const int n = f.theta->dim();
  f.cfg = SeminormConfig::for_dim(n);
  if (j.contains("norm")) {
    if (!j["norm"].is_string()) throw FieldError("$.norm", "expected l1, l2 or linf");
    try {
      f.cfg.norm.kind = parse_norm_kind(j["norm"].get<std::string>());
    } catch (const InputError& e) {
      throw FieldError("$.norm", e.what());
    }
  }
  if (j.contains("gns")) {
    const Json& g = j["gns"];
    if (g.contains("radii")) {
      const Json& r = io::array(g["radii"], "$.gns.radii");
      f.cfg.gns.radii.clear();
      for (std::size_t i = 0; i < r.size(); ++i) f.cfg.gns.radii.push_back(io::integer(r[i], io::idx("$.gns.radii", i)));
    }
    if (g.contains("tol")) f.cfg.gns.tol = io::number(g["tol"], "$.gns.tol");
    if (g.contains("seed")) f.cfg.gns.seed = io::seed(g["seed"], "$.gns.seed");
    if (g.contains("restarts")) f.cfg.gns.restarts = io::integer(g["restarts"], "$.gns.restarts");
    if (g.contains("krylov")) f.cfg.gns.krylov_steps = io::integer(g["krylov"], "$.gns.krylov");
    if (g.contains("evidence_radius")) f.evidence_radius = io::integer(g["evidence_radius"], "$.gns.evidence_radius");
    try {
      validate(f.cfg.gns);
    } catch (const InputError& e) {
      throw FieldError("$.gns", e.what());
    }
  }
  if (j.contains("search")) {
    const Json& s = j["search"];
    if (s.contains("circle_points")) f.cfg.search.circle_points = io::integer(s["circle_points"], "$.search.circle_points");
    if (s.contains("face_points")) f.cfg.search.face_points = io::integer(s["face_points"], "$.search.face_points");
    if (s.contains("ascent_halvings")) f.cfg.search.ascent_halvings = io::integer(s["ascent_halvings"], "$.search.ascent_halvings");
    if (s.contains("ad_radius")) f.cfg.ad.radius = io::integer(s["ad_radius"], "$.search.ad_radius");
    if (s.contains("ad_restarts")) f.cfg.ad.restarts = io::integer(s["ad_restarts"], "$.search.ad_restarts");
    if (s.contains("ad_rounds")) f.cfg.ad.ascent_rounds = io::integer(s["ad_rounds"], "$.search.ad_rounds");
  }
  if (j.contains("tolerance")) f.cfg.tol = io::number(j["tolerance"], "$.tolerance");
  if (j.contains("samples")) f.samples = io::integer(j["samples"], "$.samples");
  if (j.contains("metric")) f.metric = metric_spec_from_json(f.theta, j["metric"], "$.metric");
  if (j.contains("inverse")) {
    const Json& inv = j["inverse"];
    if (inv.contains("radius")) f.inverse_radius = io::integer(inv["radius"], "$.inverse.radius");
    if (inv.contains("tol")) f.inverse_tol = io::number(inv["tol"], "$.inverse.tol");
  }
  if (j.contains("element")) f.element = element_from_json(f.theta, j["element"], "$.element");
  if (j.contains("element2")) f.element2 = element_from_json(f.theta, j["element2"], "$.element2");
  if (j.contains("vectors")) {
    const Json& v = io::array(j["vectors"], "$.vectors");
    for (std::size_t i = 0; i < v.size(); ++i) f.vectors.push_back(vector_from_json(f.theta, v[i], io::idx("$.vectors", i)));
  }
  if (j.contains("derivation")) f.derivation = derivation_from_json(f.theta, j["derivation"], "$.derivation");
  if (j.contains("bridge")) {
    const Json& b = j["bridge"];
    if (b.contains("r")) f.bridge.r = io::number(b["r"], "$.bridge.r");
    if (b.contains("s")) f.bridge.s = io::number(b["s"], "$.bridge.s");
    if (b.contains("anchors")) f.bridge.anchors = io::integer(b["anchors"], "$.bridge.anchors");
    if (b.contains("anchor_radius")) f.bridge.anchor_radius = io::integer(b["anchor_radius"], "$.bridge.anchor_radius");
    if (b.contains("anchor_terms")) f.bridge.anchor_terms = io::integer(b["anchor_terms"], "$.bridge.anchor_terms");
    if (b.contains("pivot")) f.bridge.pivot = element_from_json(f.theta, b["pivot"], "$.bridge.pivot");
  }
  if (f.samples < 1) throw FieldError("$.samples", "must be positive");
  if (f.bridge.anchors < 0) throw FieldError("$.bridge.anchors", "must be nonnegative");
  return f;
}

inline Fixture load_fixture(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open fixture '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();
  Json j;
  try {
    j = Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw InputError(path + ": parse error at " + detail::location(text, e.byte) + ": " + e.what());
  }
  return fixture_from_json(j, path);
}

inline void apply(Fixture& f, const Overrides& o) {
  if (o.radius) {
    if (*o.radius < 1) throw InputError("--radius must be positive");
    f.cfg.gns.radii = schedule_for(*o.radius);
  }
  if (o.tol) {
    if (!(*o.tol > 0.0)) throw InputError("--tol must be positive");
    f.cfg.tol = *o.tol;
  }
  if (o.norm) f.cfg.norm.kind = parse_norm_kind(*o.norm);
  if (o.seed) f.cfg.gns.seed = *o.seed;
  if (o.r) f.bridge.r = *o.r;
  if (o.s) f.bridge.s = *o.s;
  if (o.samples) {
    if (*o.samples < 1) throw InputError("--samples must be positive");
    f.samples = *o.samples;
  }
  if (o.anchors) f.bridge.anchors = *o.anchors;
}

struct RunResult {
  Json report;
  std::string text;
  int exit_code = 0;
};

namespace harness {

struct Check {
  std::string name;
  bool passed;
  Json detail;
};

struct TaskOutput {
  Json results = Json::object();
  std::vector<Check> checks;
};

inline TorusElement unit_l1(TorusElement a) {
  const double s = a.l1_norm();
  return s > 0.0 ? a * (1.0 / s) : a;
}

/// Coefficientwise difference without the drop threshold applied by subtraction.
inline double raw_diff(const TorusElement& x, const TorusElement& y) {
  double out = 0.0;
  for (const Term& t : x.terms()) out = std::max(out, std::abs(t.c - y.coeff(t.k)));
  for (const Term& t : y.terms()) out = std::max(out, std::abs(t.c - x.coeff(t.k)));
  return out;
}

inline TorusElement random_unit_element(const Theta& th, Rng& rng, int radius = 2, int terms = 4) {
  return unit_l1(random_element(th, rng, radius, terms));
}

inline TorusElement random_sa(const Theta& th, Rng& rng, int radius = 1, int terms = 3) {
  return hermitize(unit_l1(random_element(th, rng, radius, terms)));
}

inline TorusElement random_skew_traceless(const Theta& th, Rng& rng, int radius = 1, int terms = 2) {
  TorusElement h = random_sa(th, rng, radius, terms);
  h -= TorusElement::scalar(th, trace(h));
  return hermitize(h) * Complex(0.0, 1.0);
}

inline Derivation random_derivation(const Theta& th, Rng& rng) {
  std::vector<double> r;
  for (int j = 0; j < th->dim(); ++j) r.push_back(gaussian(rng));
  return Derivation(std::move(r), random_skew_traceless(th, rng) * 0.5);
}

inline MetricMatrix require_metric(const Fixture& f) {
  if (!f.metric) throw FieldError("$.metric", "this command needs a metric");
  try {
    return make_metric(f.theta, *f.metric, f.evidence_radius);
  } catch (const FieldError&) {
    throw;
  } catch (const InputError& e) {
    throw FieldError("$.metric", e.what());
  }
}

inline GeometryContext require_context(const Fixture& f) {
  return make_context(require_metric(f), f.inverse_radius, f.inverse_tol);
}

inline const TorusElement& require_element(const std::optional<TorusElement>& e, const char* field) {
  if (!e) throw FieldError(std::string("$.") + field, "this command needs this element");
  return *e;
}

inline std::vector<ModuleVector> vectors_or_random(const Fixture& f, Rng& rng, int count) {
  if (!f.vectors.empty()) return f.vectors;
  std::vector<ModuleVector> out;
  for (int i = 0; i < count; ++i) out.push_back(random_module_vector(f.theta, rng, 1, 3));
  return out;
}

inline TaskOutput algebra_check(const Fixture& f) {
  TaskOutput out;
  const Theta& th = f.theta;
  const int n = th->dim();
  Rng rng = substream(f.cfg.gns.seed, 1);
  double relation = 0.0;
  for (int j = 0; j < n; ++j) {
    for (int k = j + 1; k < n; ++k) {
      const TorusElement uj = TorusElement::generator(th, j);
      const TorusElement uk = TorusElement::generator(th, k);
      const TorusElement lhs = uk * uj;
      const TorusElement rhs = (uj * uk) * std::polar(1.0, kTwoPi * (*th)(j, k));
      relation = std::max(relation, raw_diff(lhs, rhs));
    }
  }
  double assoc = 0.0, tr = 0.0, adj = 0.0, invol = 0.0, leib = 0.0, star = 0.0, action = 0.0;
  for (int i = 0; i < f.samples; ++i) {
    const TorusElement a = random_unit_element(th, rng);
    const TorusElement b = random_unit_element(th, rng);
    const TorusElement c = random_unit_element(th, rng);
    assoc = std::max(assoc, raw_diff((a * b) * c, a * (b * c)));
    tr = std::max(tr, std::abs(trace(a * b) - trace(b * a)));
    adj = std::max(adj, raw_diff(adjoint(a * b), adjoint(b) * adjoint(a)));
    invol = std::max(invol, raw_diff(adjoint(adjoint(a)), a));
    for (int j = 0; j < n; ++j) {
      leib = std::max(leib, raw_diff(derive(a * b, j), derive(a, j) * b + a * derive(b, j)));
      star = std::max(star, raw_diff(derive(adjoint(a), j), adjoint(derive(a, j))));
    }
    std::vector<double> t(n);
    for (double& v : t) v = uniform01(rng);
    action = std::max(action, raw_diff(act(a * b, t), act(a, t) * act(b, t)));
  }
  const double tol = 1e-12;
  auto add = [&](const char* name, double v) {
    out.results[name] = v;
    out.checks.push_back({name, v <= tol, {{"defect", v}, {"tol", tol}}});
  };
  out.results["instances"] = f.samples;
  add("defining_relation", relation);
  add("associativity", assoc);
  add("trace_property", tr);
  add("adjoint_antimultiplicative", adj);
  add("adjoint_involution", invol);
  add("derivation_leibniz", leib);
  add("derivation_star", star);
  add("action_multiplicative", action);
  return out;
}

inline TaskOutput norm_task(const Fixture& f) {
  TaskOutput out;
  const TorusElement& a = require_element(f.element, "element");
  const NormInterval iv = norm_interval(a, f.cfg.gns);
  GnsConfig raw = f.cfg.gns;
  raw.use_characters = false;
  const std::vector<double> profile = norm_lower_profile(a, raw);
  out.results["interval"] = to_json(iv);
  Json prof = Json::array();
  bool monotone = true;
  for (std::size_t i = 0; i < profile.size(); ++i) {
    prof.push_back({{"radius", f.cfg.gns.radii[i]}, {"lower", profile[i]}});
    if (i > 0 && profile[i] < profile[i - 1] - 1e-12 * std::max(1.0, profile[i - 1])) monotone = false;
  }
  out.results["compression_profile"] = std::move(prof);
  out.checks.push_back({"enclosure", iv.lower <= iv.upper, {{"width", iv.width()}}});
  out.checks.push_back({"profile_monotone", monotone, Json::object()});
  return out;
}

inline TaskOutput metric_validate(const Fixture& f) {
  TaskOutput out;
  const MetricMatrix g = require_metric(f);
  out.results["kind"] = to_string(g.kind());
  out.results["evidence"] = to_json(g.evidence());
  out.results["support_radius"] = g.entries().support_radius();
  Json entries = Json::array();
  for (int j = 0; j < g.dim(); ++j) {
    Json row = Json::array();
    for (int k = 0; k < g.dim(); ++k) row.push_back(to_json(g(j, k)));
    entries.push_back(std::move(row));
  }
  out.results["entries"] = std::move(entries);
  double sa = 0.0, sym = 0.0;
  for (int j = 0; j < g.dim(); ++j)
    for (int k = 0; k < g.dim(); ++k) {
      sa = std::max(sa, max_abs_diff(g(j, k), adjoint(g(j, k))));
      sym = std::max(sym, max_abs_diff(g(j, k), g(k, j)));
    }
  out.checks.push_back({"entries_self_adjoint", sa <= 1e-12, {{"defect", sa}}});
  out.checks.push_back({"symmetric", sym == 0.0, {{"defect", sym}}});
  out.checks.push_back({"positivity_evidence", g.evidence().verdict == PositivityVerdict::plausible,
                        {{"verdict", to_string(g.evidence().verdict)}}});
  return out;
}

inline Json inverse_json(const InverseApprox& inv) {
  Json out;
  out["eta"] = inv.eta;
  out["radius"] = inv.radius;
  out["iterations"] = inv.iterations;
  out["converged"] = inv.converged;
  out["history"] = inv.history;
  return out;
}

inline TaskOutput connection_compute(const Fixture& f) {
  TaskOutput out;
  const GeometryContext ctx = require_context(f);
  out.results["inverse"] = inverse_json(ctx.inverse);
  Json gamma = Json::array();
  const int n = ctx.gamma.dim();
  double torsion = 0.0;
  for (int m = 0; m < n; ++m)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        gamma.push_back({{"m", m + 1}, {"j", j + 1}, {"k", k + 1}, {"terms", to_json(ctx.gamma(m, j, k))}});
        torsion = std::max(torsion, max_abs_diff(ctx.gamma(m, j, k), ctx.gamma(m, k, j)));
      }
  out.results["christoffel"] = std::move(gamma);
  out.checks.push_back({"inverse_converged", ctx.inverse.converged, {{"eta", ctx.inverse.eta}, {"tol", f.inverse_tol}}});
  out.checks.push_back({"torsion_symmetry", torsion == 0.0, {{"defect", torsion}}});
  return out;
}

inline TaskOutput connection_check(const Fixture& f) {
  TaskOutput out;
  const GeometryContext ctx = require_context(f);
  Rng rng = substream(f.cfg.gns.seed, 2);
  std::vector<CompatibilitySample> samples;
  for (int i = 0; i < f.samples; ++i) {
    // cycle through pure translations, inner derivations and mixed ones
    Derivation d = random_derivation(f.theta, rng);
    if (i % 3 == 0) d = Derivation(d.r, TorusElement(f.theta));
    if (i % 3 == 1) d = Derivation::inner(d.b);
    ModuleVector x = random_module_vector(f.theta, rng, 1, 3);
    ModuleVector y = random_module_vector(f.theta, rng, 1, 3);
    samples.push_back({std::move(d), std::move(x), std::move(y)});
  }
  const AxiomReport rep = check_axioms(ctx.metric, ctx.gamma, samples);
  out.results["axioms"] = to_json(rep);
  out.results["inverse"] = inverse_json(ctx.inverse);
  out.checks.push_back({"torsion", rep.torsion_defect <= 1e-12, {{"defect", rep.torsion_defect}}});
  out.checks.push_back({"self_adjointness", rep.self_adjoint_defect <= rep.threshold,
                        {{"defect", rep.self_adjoint_defect}, {"threshold", rep.threshold}}});
  out.checks.push_back({"compatibility", rep.max_compatibility() <= rep.threshold,
                        {{"max_residual", rep.max_compatibility()}, {"threshold", rep.threshold}}});
  return out;
}

inline TaskOutput seminorm_L(const Fixture& f) {
  TaskOutput out;
  const TorusElement& a = require_element(f.element, "element");
  const SeminormEstimate est = lipschitz_L(a, f.cfg);
  out.results["L"] = to_json(est, f.cfg.gns.seed);
  Rng rng = substream(f.cfg.gns.seed, 3);
  std::vector<std::vector<double>> ts;
  for (int i = 0; i < f.samples; ++i) {
    std::vector<double> t(f.theta->dim());
    const double scale = std::pow(10.0, -uniform(rng, 1.0, 4.0));
    for (double& v : t) v = scale * gaussian(rng);
    ts.push_back(std::move(t));
  }
  const SeminormEstimate def = lipschitz_L_def(a, f.cfg.norm, ts, f.cfg.gns);
  out.results["L_def_lower"] = def.interval.lower;
  out.checks.push_back({"enclosure", est.interval.lower <= est.interval.upper, Json::object()});
  out.checks.push_back({"definition_consistent", def.interval.lower <= est.interval.upper + f.cfg.tol,
                        {{"def_lower", def.interval.lower}, {"upper", est.interval.upper}}});
  return out;
}

inline TaskOutput seminorm_D(const Fixture& f) {
  TaskOutput out;
  const GeometryContext ctx = require_context(f);
  Rng rng = substream(f.cfg.gns.seed, 4);
  const auto xs = vectors_or_random(f, rng, f.samples);
  Json list = Json::array();
  bool ok = true;
  for (const auto& x : xs) {
    const DNormEstimate d = d_norm(ctx, x, f.cfg);
    list.push_back(to_json(d, f.cfg.gns.seed));
    ok = ok && d.d.lower <= d.d.upper && d.dp.upper <= d.d.upper;
  }
  out.results["estimates"] = std::move(list);
  out.checks.push_back({"enclosures", ok, Json::object()});
  return out;
}

inline TaskOutput inequality(const Fixture& f, const std::string& which) {
  TaskOutput out;
  Rng rng = substream(f.cfg.gns.seed, 5);
  Json list = Json::array();
  bool ok = true;
  if (which == "G" || which == "H") {
    const GeometryContext ctx = require_context(f);
    for (int i = 0; i < f.samples; ++i) {
      if (which == "G") {
        const TorusElement a = f.element && i == 0 ? *f.element : random_sa(f.theta, rng);
        const ModuleVector x = !f.vectors.empty() ? f.vectors[i % f.vectors.size()] : random_module_vector(f.theta, rng, 1, 3);
        const GReport r = check_G_inequality(ctx, a, x, f.cfg);
        list.push_back(to_json(r.check));
        ok = ok && r.check.passed;
      } else {
        const ModuleVector x = f.vectors.size() >= 2 ? f.vectors[(2 * i) % f.vectors.size()] : random_module_vector(f.theta, rng, 1, 3);
        const ModuleVector y = f.vectors.size() >= 2 ? f.vectors[(2 * i + 1) % f.vectors.size()] : random_module_vector(f.theta, rng, 1, 3);
        const HReport r = check_H_inequality(ctx, x, y, f.cfg);
        list.push_back({{"H", to_json(r.check)}, {"H_sharp", to_json(r.sharp)}});
        ok = ok && r.check.passed && r.sharp.passed;
      }
    }
  } else if (which == "leibniz") {
    for (int i = 0; i < f.samples; ++i) {
      const TorusElement a = f.element && i == 0 ? *f.element : random_sa(f.theta, rng);
      const TorusElement b = f.element2 && i == 0 ? *f.element2 : random_sa(f.theta, rng);
      const LeibnizReport r = check_leibniz_L(a, b, f.cfg);
      list.push_back({{"jordan", to_json(r.jordan)}, {"lie", to_json(r.lie)}});
      ok = ok && r.jordan.passed && r.lie.passed;
    }
  } else if (which == "lemma45") {
    for (int i = 0; i < f.samples; ++i) {
      const Derivation d = f.derivation && i == 0 ? *f.derivation : random_derivation(f.theta, rng);
      const TorusElement a = f.element && i == 0 ? *f.element : random_sa(f.theta, rng);
      const InequalityCheck c = check_derivation_bound(d, a, f.cfg);
      list.push_back(to_json(c));
      ok = ok && c.passed;
    }
  } else {
    throw InputError("unknown inequality '" + which + "' (expected G, H, leibniz or lemma45)");
  }
  out.results["cases"] = std::move(list);
  out.checks.push_back({which, ok, {{"cases", f.samples}, {"tol", f.cfg.tol}}});
  return out;
}

inline Json anchors_json(const ModularBridge& br) {
  Json out = Json::array();
  for (std::size_t i = 0; i < br.alpha.size(); ++i) {
    out.push_back({{"alpha_D", to_json(br.alpha_d[i])}, {"beta_D", to_json(br.beta_d[i])}});
  }
  return out;
}

inline void consistency_checks(TaskOutput& out, const QuantityReport& rep) {
  const NormInterval reach = QuantityReport::assemble_reach(rep.basic_reach.value, rep.modular_reach.value, rep.imprint.value);
  const NormInterval length = interval_max(rep.height.value, reach);
  const bool consistent = reach.lower == rep.reach.value.lower && reach.upper == rep.reach.value.upper &&
                          length.lower == rep.length.value.lower && length.upper == rep.length.value.upper;
  out.checks.push_back({"report_consistency", consistent, Json::object()});
}

inline TaskOutput bridge_scaling(const Fixture& f) {
  TaskOutput out;
  const MetricMatrix g = require_metric(f);
  const ModularBridge br = scaling_bridge(g, f.bridge.r, f.bridge.s, f.bridge.anchors, f.cfg.gns.seed, f.cfg,
                                          f.inverse_radius, f.inverse_tol, f.bridge.anchor_radius, f.bridge.anchor_terms);
  const QuantityReport rep = bridge_quantities(br, BridgeSamples{}, f.cfg);
  out.results["r"] = f.bridge.r;
  out.results["s"] = f.bridge.s;
  out.results["anchors"] = anchors_json(br);
  out.results["quantities"] = to_json(rep);
  double deck = 0.0;
  for (const auto& d : rep.deck) deck = std::max(deck, d.upper);
  out.checks.push_back({"deck_zero", deck <= 1e-12, {{"max_deck_upper", deck}}});
  out.checks.push_back({"structural_zeros", rep.basic_reach.structural && rep.height.structural && rep.imprint.structural,
                        Json::object()});
  out.checks.push_back({"length_zero", rep.length.value.upper <= 1e-12, {{"length_upper", rep.length.value.upper}}});
  consistency_checks(out, rep);
  return out;
}

inline TaskOutput bridge_report(const Fixture& f) {
  TaskOutput out;
  const MetricMatrix g = require_metric(f);
  ModularBridge br = scaling_bridge(g, f.bridge.r, f.bridge.s, f.bridge.anchors, f.cfg.gns.seed, f.cfg,
                                    f.inverse_radius, f.inverse_tol, f.bridge.anchor_radius, f.bridge.anchor_terms);
  if (f.bridge.pivot) br.pivot = *f.bridge.pivot;
  br.anchors_cover_unit_balls = false;
  Rng rng = substream(f.cfg.gns.seed, 6);
  BridgeSamples s;
  const int k = std::min(f.samples, 4);
  std::vector<TorusElement> lips;
  for (int i = 0; i < k; ++i) {
    const TorusElement a = random_sa(f.theta, rng);
    const TorusElement b = random_sa(f.theta, rng);
    s.bridge_pairs.emplace_back(a, b);
    lips.push_back(a);
  }
  s.lipschitz_domain = normalize_lipschitz_witnesses(lips, f.cfg);
  s.lipschitz_codomain = s.lipschitz_domain;
  s.mk_witnesses = s.lipschitz_domain;
  s.states.push_back(State::trace_state(f.theta->dim()));
  for (int i = 0; i < k; ++i) s.states.push_back(random_state(f.theta->dim(), 1, 2, rng));
  std::vector<ModuleVector> ball;
  for (int i = 0; i < k; ++i) ball.push_back(random_module_vector(f.theta, rng, 1, 2));
  s.ball_domain = normalize_d_witnesses(br.domain, ball, f.cfg);
  s.ball_codomain = normalize_d_witnesses(br.codomain, ball, f.cfg);
  s.modular_witnesses_domain = s.ball_domain;
  s.modular_witnesses_codomain = s.ball_codomain;
  const QuantityReport rep = bridge_quantities(br, s, f.cfg);
  out.results["pivot"] = to_json(br.pivot);
  out.results["anchors"] = anchors_json(br);
  out.results["quantities"] = to_json(rep);
  consistency_checks(out, rep);
  return out;
}

inline TaskOutput isometry(const Fixture& f) {
  TaskOutput out;
  const MetricMatrix g = require_metric(f);
  const GeometryContext cr = make_context(g.scaled(f.bridge.r), f.inverse_radius, f.inverse_tol);
  const GeometryContext cs = make_context(g.scaled(f.bridge.s), f.inverse_radius, f.inverse_tol);
  Rng rng = substream(f.cfg.gns.seed, 7);
  const auto xs = vectors_or_random(f, rng, f.samples);
  std::vector<TorusElement> as;
  for (int i = 0; i < f.samples; ++i) as.push_back(random_unit_element(f.theta, rng, 1, 3));
  const IsometryReport rep = isometry_check(cr, cs, f.bridge.r, f.bridge.s, xs, as, f.cfg);
  out.results["isometry"] = to_json(rep);
  out.checks.push_back({"lipschitz_exact", rep.lipschitz_defect <= 1e-12, {{"defect", rep.lipschitz_defect}}});
  out.checks.push_back({"module_action_exact", rep.action_defect <= 1e-12, {{"defect", rep.action_defect}}});
  out.checks.push_back({"inner_product_exact", rep.inner_defect <= 1e-12, {{"defect", rep.inner_defect}}});
  out.checks.push_back({"d_norm_overlap", rep.d_overlap, Json::object()});
  return out;
}

inline Json inputs_echo(const Fixture& f) {
  Json in;
  in["theta"] = to_json(*f.theta);
  in["norm"] = to_string(f.cfg.norm.kind);
  if (f.metric) in["metric"] = f.raw.contains("metric") ? f.raw["metric"] : Json(to_string(f.metric->kind));
  if (f.element) in["element"] = to_json(*f.element);
  if (f.element2) in["element2"] = to_json(*f.element2);
  if (!f.vectors.empty()) in["vectors"] = f.vectors.size();
  in["samples"] = f.samples;
  return in;
}

inline void flatten(const Json& j, const std::string& prefix, std::ostringstream& os, int depth) {
  if (j.is_object() && depth < 3) {
    for (auto it = j.begin(); it != j.end(); ++it) flatten(it.value(), prefix.empty() ? it.key() : prefix + "." + it.key(), os, depth + 1);
  } else if (j.is_array()) {
    os << "  " << prefix << ": [" << j.size() << " entries]\n";
  } else if (!j.is_object()) {
    os << "  " << prefix << ": " << j.dump() << "\n";
  }
}

}  // namespace harness

inline const std::vector<std::string>& known_tasks() {
  static const std::vector<std::string> tasks = {
      "algebra check", "norm", "metric validate", "connection compute", "connection check", "seminorm L",
      "seminorm D", "inequality G", "inequality H", "inequality leibniz", "inequality lemma45", "bridge scaling",
      "bridge report", "isometry check"};
  return tasks;
}

/// Runs one task. Input errors propagate as exceptions; numerical failures
/// are reported as failed checks.
inline RunResult run_task(const std::string& task, const Fixture& f) {
  using namespace harness;
  static const std::map<std::string, std::function<TaskOutput(const Fixture&)>> table = {
      {"algebra check", algebra_check},
      {"norm", norm_task},
      {"metric validate", metric_validate},
      {"connection compute", connection_compute},
      {"connection check", connection_check},
      {"seminorm L", seminorm_L},
      {"seminorm D", seminorm_D},
      {"inequality G", [](const Fixture& x) { return inequality(x, "G"); }},
      {"inequality H", [](const Fixture& x) { return inequality(x, "H"); }},
      {"inequality leibniz", [](const Fixture& x) { return inequality(x, "leibniz"); }},
      {"inequality lemma45", [](const Fixture& x) { return inequality(x, "lemma45"); }},
      {"bridge scaling", bridge_scaling},
      {"bridge report", bridge_report},
      {"isometry check", isometry},
  };
  auto it = table.find(task);
  if (it == table.end()) throw InputError("unknown command '" + task + "'");
  TaskOutput out;
  try {
    out = it->second(f);
  } catch (const NumericalError& e) {
    out.results["error"] = e.what();
    out.checks.push_back({"numerical", false, {{"error", e.what()}}});
  }
  bool passed = true;
  Json checks = Json::array();
  for (const auto& c : out.checks) {
    passed = passed && c.passed;
    Json rec;
    rec["name"] = c.name;
    rec["passed"] = c.passed;
    if (!c.detail.empty()) rec["detail"] = c.detail;
    checks.push_back(std::move(rec));
  }
  RunResult res;
  res.report["task"] = task;
  res.report["fixture"] = f.path;
  res.report["inputs"] = inputs_echo(f);
  res.report["results"] = out.results;
  res.report["checks"] = checks;
  res.report["provenance"] = {{"seed", f.cfg.gns.seed},
                              {"radii", f.cfg.gns.radii},
                              {"gns_tol", f.cfg.gns.tol},
                              {"check_tol", f.cfg.tol},
                              {"norm", to_string(f.cfg.norm.kind)},
                              {"inverse_tol", f.inverse_tol}};
  res.report["passed"] = passed;
  res.exit_code = passed ? 0 : 1;
  std::ostringstream os;
  os << "task: " << task << "\n";
  os << "fixture: " << f.path << "\n";
  os << "results:\n";
  flatten(out.results, "", os, 0);
  for (const auto& c : out.checks) os << (c.passed ? "PASS " : "FAIL ") << c.name << "\n";
  os << (passed ? "all checks passed" : "some checks failed") << "\n";
  res.text = os.str();
  return res;
}

}  // namespace qtorus
