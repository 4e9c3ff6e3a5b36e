// Maximisation of r -> ||L(r)|| over the unit ball of a norm N on R^n, for
// L linear with values in the algebra. The objective is convex, even and
// positively homogeneous, so its sup over the ball is attained on the
// extreme points: the vertices for l1 and l-infinity, the sphere for l2.
#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qtorus/gns.hpp"

namespace qtorus {

enum class NormKind { l1, l2, linf };

struct NormChoice {
  NormKind kind = NormKind::l2;

  double operator()(std::span<const double> r) const {
    double acc = 0.0;
    for (double x : r) {
      switch (kind) {
        case NormKind::l1:
          acc += std::abs(x);
          break;
        case NormKind::l2:
          acc += x * x;
          break;
        case NormKind::linf:
          acc = std::max(acc, std::abs(x));
          break;
      }
    }
    return kind == NormKind::l2 ? std::sqrt(acc) : acc;
  }

  /// Dual norm N*, so that |k.r| <= N*(k) N(r).
  NormChoice dual() const {
    switch (kind) {
      case NormKind::l1:
        return {NormKind::linf};
      case NormKind::linf:
        return {NormKind::l1};
      case NormKind::l2:
        break;
    }
    return {NormKind::l2};
  }

  double dual_of(const Lattice& k, int n) const {
    std::vector<double> v(k.begin(), k.begin() + n);
    return dual()(v);
  }
};

inline const char* to_string(NormKind k) {
  switch (k) {
    case NormKind::l1:
      return "l1";
    case NormKind::l2:
      return "l2";
    case NormKind::linf:
      return "linf";
  }
  return "unknown";
}

inline NormKind parse_norm_kind(const std::string& s) {
  if (s == "l1") return NormKind::l1;
  if (s == "l2") return NormKind::l2;
  if (s == "linf") return NormKind::linf;
  throw InputError("unknown norm '" + s + "' (expected l1, l2 or linf)");
}

/// Interval estimate of a supremum together with the point achieving its lower end.
struct SeminormEstimate {
  NormInterval interval;
  std::vector<double> witness;
  std::optional<TorusElement> witness_element;
  std::string method = "exact";
  double gap = 0.0;
};

enum class Fidelity { coarse, fine };

struct BallSearchConfig {
  int circle_points = 32;  // half-circle grid size, n = 2
  int face_points = 4;     // per-axis cells on each cube face, n >= 3
  int ascent_halvings = 24;
  int refine_top = 2;
};

/// Objective evaluation at r; `fine` requests the full-quality lower bound.
using BallObjective = std::function<NormInterval(std::span<const double>, Fidelity)>;

struct BallBounds {
  /// U_m >= ||L(e_m)||; the objective is Lipschitz with constant ||U||_2 in l2.
  std::vector<double> axis_upper;
  /// Optional bound on the whole supremum from another argument.
  double direct_upper = std::numeric_limits<double>::infinity();
};

namespace detail {

inline std::vector<std::vector<double>> l2_grid(int n, const BallSearchConfig& cfg, double& covering) {
  std::vector<std::vector<double>> pts;
  if (n == 1) {
    pts.push_back({1.0});
    covering = 0.0;
    return pts;
  }
  if (n == 2) {
    const int m = std::max(cfg.circle_points, 2);
    for (int i = 0; i < m; ++i) {
      const double a = std::numbers::pi * (i + 0.5) / m;
      pts.push_back({std::cos(a), std::sin(a)});
    }
    // every unit vector is within angle pi/(2m) of a grid point up to sign
    covering = 2.0 * std::sin(std::numbers::pi / (4.0 * m));
    return pts;
  }
  // cell centres on the faces x_f = +1 of the cube, projected radially; the
  // -1 faces are covered by evenness of the objective
  const int d = std::max(cfg.face_points, 1);
  std::size_t cells = 1;
  for (int j = 0; j < n - 1; ++j) cells *= static_cast<std::size_t>(d);
  for (int f = 0; f < n; ++f) {
    for (std::size_t c = 0; c < cells; ++c) {
      std::vector<double> x(n);
      std::size_t rem = c;
      for (int j = 0; j < n; ++j) {
        if (j == f) {
          x[j] = 1.0;
          continue;
        }
        x[j] = -1.0 + (2.0 * static_cast<double>(rem % d) + 1.0) / d;
        rem /= d;
      }
      double nrm = 0.0;
      for (double v : x) nrm += v * v;
      nrm = std::sqrt(nrm);
      for (double& v : x) v /= nrm;
      pts.push_back(std::move(x));
    }
  }
  // half-diagonal of a face cell; radial projection onto the ball is 1-Lipschitz outside it
  covering = std::sqrt(static_cast<double>(n - 1)) / d;
  return pts;
}

inline std::vector<double> normalized(std::vector<double> x) {
  double nrm = 0.0;
  for (double v : x) nrm += v * v;
  nrm = std::sqrt(nrm);
  if (nrm > 0.0)
    for (double& v : x) v /= nrm;
  return x;
}

}  // namespace detail

inline SeminormEstimate ball_search(const BallObjective& f, int n, NormChoice norm, const BallBounds& bounds,
                                    const BallSearchConfig& cfg = {}) {
  SeminormEstimate out;
  auto record = [&out](const NormInterval& v, const std::vector<double>& r) {
    if (out.witness.empty() || v.lower > out.interval.lower) {
      out.interval.lower = v.lower;
      out.interval.radius = v.radius;
      out.interval.converged = v.converged;
      out.interval.truncation_warning = v.truncation_warning;
      out.witness = r;
    }
  };
  double upper = 0.0;
  if (norm.kind == NormKind::l1 || norm.kind == NormKind::linf || n == 1) {
    std::vector<std::vector<double>> vertices;
    if (norm.kind == NormKind::l1 || n == 1) {
      for (int j = 0; j < n; ++j) {
        std::vector<double> e(n, 0.0);
        e[j] = 1.0;
        vertices.push_back(std::move(e));
      }
    } else {
      // sign vectors with a leading +1; the rest follow by evenness
      for (int mask = 0; mask < (1 << (n - 1)); ++mask) {
        std::vector<double> e(n, 1.0);
        for (int j = 1; j < n; ++j)
          if (mask & (1 << (j - 1))) e[j] = -1.0;
        vertices.push_back(std::move(e));
      }
    }
    for (const auto& v : vertices) {
      const NormInterval val = f(v, Fidelity::fine);
      record(val, v);
      upper = std::max(upper, val.upper);
    }
    out.method = "exact-vertex";
    out.interval.upper = std::max(std::min(upper, bounds.direct_upper), out.interval.lower);
    out.interval.method = out.method;
    out.gap = out.interval.upper - out.interval.lower;
    return out;
  }

  double covering = 0.0;
  const auto grid = detail::l2_grid(n, cfg, covering);
  std::vector<std::pair<double, std::size_t>> ranked;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const NormInterval val = f(grid[i], Fidelity::coarse);
    upper = std::max(upper, val.upper);
    ranked.emplace_back(val.lower, i);
  }
  std::stable_sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
  double lip = 0.0;
  for (double u : bounds.axis_upper) lip += u * u;
  lip = std::sqrt(lip);
  upper = std::min({upper + lip * covering, lip, bounds.direct_upper});

  const std::size_t top = std::min<std::size_t>(ranked.size(), static_cast<std::size_t>(std::max(cfg.refine_top, 1)));
  std::vector<std::vector<double>> starts;
  for (std::size_t i = 0; i < top; ++i) starts.push_back(grid[ranked[i].second]);
  for (const auto& s : starts) record(f(s, Fidelity::fine), s);

  // pattern search on the sphere with the cheap objective, along great
  // circles through the tangent projections of the coordinate axes
  std::vector<double> x = out.witness;
  double fx = f(x, Fidelity::coarse).lower;
  double step = covering > 0.0 ? 2.0 * std::asin(0.5 * covering) : 0.1;
  bool moved = false;
  for (int h = 0; h < cfg.ascent_halvings; ++h) {
    bool improved = true;
    int moves = 0;
    while (improved && moves < 8) {
      improved = false;
      for (int j = 0; j < n && !improved; ++j) {
        std::vector<double> t(n, 0.0);
        t[j] = 1.0;
        for (int i = 0; i < n; ++i) t[i] -= x[j] * x[i];
        double tn = 0.0;
        for (double v : t) tn += v * v;
        if (tn < 1e-16) continue;
        for (double& v : t) v /= std::sqrt(tn);
        for (double dir : {1.0, -1.0}) {
          std::vector<double> y(n);
          for (int i = 0; i < n; ++i) y[i] = std::cos(step) * x[i] + dir * std::sin(step) * t[i];
          y = detail::normalized(std::move(y));
          const double v = f(y, Fidelity::coarse).lower;
          if (v > fx) {
            fx = v;
            x = std::move(y);
            improved = moved = true;
            ++moves;
            break;
          }
        }
      }
    }
    step *= 0.5;
  }
  if (moved) record(f(x, Fidelity::fine), x);
  out.method = "grid";
  out.interval.upper = std::max(upper, out.interval.lower);
  out.interval.method = out.method;
  out.gap = out.interval.upper - out.interval.lower;
  return out;
}

}  // namespace qtorus
