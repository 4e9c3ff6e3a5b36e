// JSON reading and writing. Readers track the field path so that validation
// errors can name the offending entry.
#pragma once

#include <json.hpp>

#include <string>
#include <vector>

#include "qtorus/propinquity.hpp"

namespace qtorus {

using Json = nlohmann::ordered_json;

/// Input error at a named field of a fixture.
class FieldError : public InputError {
 public:
  FieldError(const std::string& path, const std::string& what)
      : InputError(path + ": " + what), path_(path) {}
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

namespace io {

inline const Json& require(const Json& j, const std::string& key, const std::string& path) {
  if (!j.is_object()) throw FieldError(path, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) throw FieldError(path + "." + key, "missing required field");
  return *it;
}

inline double number(const Json& j, const std::string& path) {
  if (!j.is_number()) throw FieldError(path, "expected a number");
  return j.get<double>();
}

inline int integer(const Json& j, const std::string& path) {
  if (!j.is_number_integer()) throw FieldError(path, "expected an integer");
  return j.get<int>();
}

inline std::uint64_t seed(const Json& j, const std::string& path) {
  if (!j.is_number_unsigned() && !(j.is_number_integer() && j.get<std::int64_t>() >= 0)) {
    throw FieldError(path, "expected a nonnegative integer");
  }
  return j.get<std::uint64_t>();
}

inline const Json& array(const Json& j, const std::string& path) {
  if (!j.is_array()) throw FieldError(path, "expected an array");
  return j;
}

inline std::string idx(const std::string& path, std::size_t i) { return path + "[" + std::to_string(i) + "]"; }

}  // namespace io

inline Json to_json(const Lattice& k, int n) {
  Json out = Json::array();
  for (int j = 0; j < n; ++j) out.push_back(k[j]);
  return out;
}

/// List of {k, re, im} records in lattice order.
inline Json to_json(const TorusElement& a) {
  Json out = Json::array();
  for (const Term& t : a.terms()) {
    Json rec;
    rec["k"] = to_json(t.k, a.dim());
    rec["re"] = t.c.real();
    rec["im"] = t.c.imag();
    out.push_back(std::move(rec));
  }
  return out;
}

inline TorusElement element_from_json(const Theta& theta, const Json& j, const std::string& path) {
  io::array(j, path);
  std::vector<Term> terms;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const std::string p = io::idx(path, i);
    const Json& rec = j[i];
    const Json& k = io::array(io::require(rec, "k", p), p + ".k");
    if (k.size() != static_cast<std::size_t>(theta->dim())) {
      throw FieldError(p + ".k", "expected " + std::to_string(theta->dim()) + " lattice coordinates");
    }
    Lattice lk{};
    for (std::size_t m = 0; m < k.size(); ++m) lk[m] = io::integer(k[m], io::idx(p + ".k", m));
    const double re = rec.contains("re") ? io::number(rec["re"], p + ".re") : 0.0;
    const double im = rec.contains("im") ? io::number(rec["im"], p + ".im") : 0.0;
    terms.push_back(Term{lk, Complex(re, im)});
  }
  return TorusElement::from_terms(theta, std::move(terms));
}

inline Json to_json(const ModuleVector& x) {
  Json out = Json::array();
  for (const auto& c : x.components()) out.push_back(to_json(c));
  return out;
}

inline ModuleVector vector_from_json(const Theta& theta, const Json& j, const std::string& path) {
  io::array(j, path);
  if (j.size() != static_cast<std::size_t>(theta->dim())) {
    throw FieldError(path, "expected " + std::to_string(theta->dim()) + " components");
  }
  std::vector<TorusElement> comps;
  for (std::size_t i = 0; i < j.size(); ++i) comps.push_back(element_from_json(theta, j[i], io::idx(path, i)));
  return ModuleVector(theta, std::move(comps));
}

inline Theta theta_from_json(const Json& j, const std::string& path) {
  const int n = io::integer(io::require(j, "n", path), path + ".n");
  if (n < 1 || n > kMaxDim) throw FieldError(path + ".n", "dimension must be between 1 and " + std::to_string(kMaxDim));
  std::vector<double> entries(static_cast<std::size_t>(n) * n, 0.0);
  if (j.contains("entries")) {
    const Json& e = io::array(j["entries"], path + ".entries");
    // row-major flat list, or nested rows
    if (e.size() == static_cast<std::size_t>(n) * n && (e.empty() || !e[0].is_array())) {
      for (std::size_t i = 0; i < e.size(); ++i) {
        if (e[i].is_object() || e[i].is_array()) throw FieldError(io::idx(path + ".entries", i), "expected a real number (complex Theta is not supported)");
        entries[i] = io::number(e[i], io::idx(path + ".entries", i));
      }
    } else if (e.size() == static_cast<std::size_t>(n)) {
      for (int r = 0; r < n; ++r) {
        const std::string rp = io::idx(path + ".entries", r);
        const Json& row = io::array(e[r], rp);
        if (row.size() != static_cast<std::size_t>(n)) throw FieldError(rp, "row has wrong length");
        for (int c = 0; c < n; ++c) entries[r * n + c] = io::number(row[c], io::idx(rp, c));
      }
    } else {
      throw FieldError(path + ".entries", "expected n*n numbers");
    }
  }
  try {
    return make_theta(n, std::move(entries));
  } catch (const InputError& e) {
    throw FieldError(path + ".entries", e.what());
  }
}

inline Json to_json(const ThetaMatrix& th) {
  Json out;
  out["n"] = th.dim();
  out["entries"] = th.entries();
  return out;
}

inline MetricSpec metric_spec_from_json(const Theta& theta, const Json& j, const std::string& path) {
  MetricSpec spec;
  const Json& kind = io::require(j, "kind", path);
  if (!kind.is_string()) throw FieldError(path + ".kind", "expected a string");
  const std::string k = kind.get<std::string>();
  const int n = theta->dim();
  if (j.contains("epsilon")) spec.epsilon = io::number(j["epsilon"], path + ".epsilon");
  if (k == "conformal") {
    spec.kind = MetricKind::conformal;
    spec.profile = {j.contains("h") ? element_from_json(theta, j["h"], path + ".h") : TorusElement(theta)};
  } else if (k == "rotated-diagonal") {
    spec.kind = MetricKind::rotated_diagonal;
    const Json& d = io::array(io::require(j, "d", path), path + ".d");
    if (d.size() != static_cast<std::size_t>(n)) throw FieldError(path + ".d", "expected one element per dimension");
    for (std::size_t i = 0; i < d.size(); ++i) spec.profile.push_back(element_from_json(theta, d[i], io::idx(path + ".d", i)));
    if (j.contains("O")) {
      const Json& o = io::array(j["O"], path + ".O");
      if (o.size() != static_cast<std::size_t>(n)) throw FieldError(path + ".O", "expected n rows");
      for (int r = 0; r < n; ++r) {
        const std::string rp = io::idx(path + ".O", r);
        const Json& row = io::array(o[r], rp);
        if (row.size() != static_cast<std::size_t>(n)) throw FieldError(rp, "row has wrong length");
        for (int c = 0; c < n; ++c) spec.rotation.push_back(io::number(row[c], io::idx(rp, c)));
      }
    }
  } else if (k == "explicit") {
    spec.kind = MetricKind::explicit_entries;
    const Json& e = io::array(io::require(j, "entries", path), path + ".entries");
    if (e.size() != static_cast<std::size_t>(n)) throw FieldError(path + ".entries", "expected n rows");
    ElementMatrix m(theta, n);
    for (int r = 0; r < n; ++r) {
      const std::string rp = io::idx(path + ".entries", r);
      const Json& row = io::array(e[r], rp);
      if (row.size() != static_cast<std::size_t>(n)) throw FieldError(rp, "row has wrong length");
      for (int c = 0; c < n; ++c) m(r, c) = element_from_json(theta, row[c], io::idx(rp, c));
    }
    spec.entries = std::move(m);
  } else {
    throw FieldError(path + ".kind", "unknown metric kind '" + k + "' (expected conformal, rotated-diagonal or explicit)");
  }
  return spec;
}

inline Json to_json(const NormInterval& v) {
  Json out;
  out["lower"] = v.lower;
  out["upper"] = v.upper;
  out["radius"] = v.radius;
  out["converged"] = v.converged;
  out["method"] = v.method;
  if (v.truncation_warning) out["truncation_warning"] = true;
  return out;
}

inline Json to_json(const SeminormEstimate& e, std::uint64_t seed) {
  Json out;
  out["lower"] = e.interval.lower;
  out["upper"] = e.interval.upper;
  out["witness"] = e.witness_element ? to_json(*e.witness_element) : Json(e.witness);
  out["method"] = e.method;
  out["gap"] = e.gap;
  out["seed"] = seed;
  out["truncation"] = e.interval.radius;
  return out;
}

inline Json to_json(const PositivityEvidence& ev) {
  Json out;
  out["min_eig"] = ev.min_eig;
  out["radius"] = ev.radius;
  out["tolerance"] = ev.tolerance;
  out["verdict"] = to_string(ev.verdict);
  return out;
}

inline Json to_json(const Derivation& d) {
  Json out;
  out["r"] = d.r;
  out["b"] = to_json(d.b);
  return out;
}

inline Derivation derivation_from_json(const Theta& theta, const Json& j, const std::string& path) {
  const Json& r = io::array(io::require(j, "r", path), path + ".r");
  if (r.size() != static_cast<std::size_t>(theta->dim())) throw FieldError(path + ".r", "expected n coordinates");
  std::vector<double> rv;
  for (std::size_t i = 0; i < r.size(); ++i) rv.push_back(io::number(r[i], io::idx(path + ".r", i)));
  TorusElement b = j.contains("b") ? element_from_json(theta, j["b"], path + ".b") : TorusElement(theta);
  try {
    return Derivation(std::move(rv), std::move(b));
  } catch (const InputError& e) {
    throw FieldError(path + ".b", e.what());
  }
}

inline Json to_json(const AxiomReport& rep) {
  Json out;
  out["torsion_defect"] = rep.torsion_defect;
  out["self_adjoint_defect"] = rep.self_adjoint_defect;
  Json comp = Json::array();
  for (const auto& c : rep.compatibility) {
    Json rec;
    rec["delta"] = to_json(c.sample.delta);
    rec["X"] = to_json(c.sample.x);
    rec["Y"] = to_json(c.sample.y);
    rec["residual_upper"] = c.residual_upper;
    comp.push_back(std::move(rec));
  }
  out["compatibility"] = std::move(comp);
  out["eta"] = rep.eta;
  out["threshold"] = rep.threshold;
  return out;
}

inline Json to_json(const InequalityCheck& c) {
  Json out;
  out["name"] = c.name;
  out["lhs_lower"] = c.lhs_lower;
  out["rhs_upper"] = c.rhs_upper;
  out["tol"] = c.tol;
  out["passed"] = c.passed;
  out["sharp"] = {{"lhs", c.sharp_lhs}, {"rhs", c.sharp_rhs}, {"holds", c.sharp_holds}};
  return out;
}

inline Json to_json(const DNormEstimate& d, std::uint64_t seed) {
  Json out;
  out["norm"] = to_json(d.norm);
  out["s_partial"] = to_json(d.partial, seed);
  out["s_ad"] = to_json(d.ad, seed);
  out["op"] = to_json(d.op);
  out["D"] = to_json(d.d);
  out["Dp"] = to_json(d.dp);
  return out;
}

inline Json to_json(const Quantity& q) {
  Json out = to_json(q.value);
  out["structural"] = q.structural;
  if (q.structural) out["justification"] = q.justification;
  return out;
}

inline Json to_json(const QuantityReport& rep) {
  Json out;
  Json bn = Json::array();
  for (const auto& v : rep.bridge_samples) bn.push_back(to_json(v));
  out["bridge_seminorm_samples"] = std::move(bn);
  out["basic_reach"] = to_json(rep.basic_reach);
  out["height"] = to_json(rep.height);
  Json deck = Json::array();
  for (const auto& v : rep.deck) deck.push_back(to_json(v));
  out["deck"] = std::move(deck);
  out["modular_reach"] = to_json(rep.modular_reach);
  out["imprint"] = to_json(rep.imprint);
  out["reach"] = to_json(rep.reach);
  out["length"] = to_json(rep.length);
  return out;
}

inline Json to_json(const IsometryReport& rep) {
  Json out;
  out["lipschitz_defect"] = rep.lipschitz_defect;
  out["action_defect"] = rep.action_defect;
  out["inner_defect"] = rep.inner_defect;
  Json d = Json::array();
  for (const auto& [a, b] : rep.d_pairs) d.push_back({{"D_s_mapped", to_json(a)}, {"D_r", to_json(b)}});
  out["d_pairs"] = std::move(d);
  out["d_overlap"] = rep.d_overlap;
  return out;
}

}  // namespace qtorus
