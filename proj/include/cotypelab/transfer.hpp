/*
 * Copyright 2026 The cotypelab Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "cotypelab/cotype.hpp"
#include "cotypelab/error.hpp"
#include "cotypelab/metric_space.hpp"

namespace cotypelab {

enum class MapKind { BiLipschitz, Snowflake, LinearQuasisymmetric, RoughIsometry };

inline std::string_view to_string(MapKind kind) {
  switch (kind) {
    case MapKind::BiLipschitz: return "bilip";
    case MapKind::Snowflake: return "snowflake";
    case MapKind::LinearQuasisymmetric: return "linear_qs";
    case MapKind::RoughIsometry: return "rough_isometry";
  }
  return "?";
}

// Non-owning: both spaces must outlive the map.
struct PointMap {
  const FiniteMetricSpace* source = nullptr;
  const FiniteMetricSpace* target = nullptr;
  std::vector<std::size_t> assignment;  // source point -> target point
};

inline PointMap make_map(const FiniteMetricSpace& source, const FiniteMetricSpace& target,
                         std::vector<std::size_t> assignment) {
  if (assignment.size() != source.size())
    throw Error(ErrorCode::DimensionMismatch, "assignment must cover every source point");
  for (std::size_t i = 0; i < assignment.size(); ++i)
    if (assignment[i] >= target.size()) throw Error(ErrorCode::OutOfRange, "assignment leaves the target", {i, assignment[i]});
  return {&source, &target, std::move(assignment)};
}

inline PointMap identity_map(const FiniteMetricSpace& source, const FiniteMetricSpace& target) {
  std::vector<std::size_t> a(source.size());
  std::iota(a.begin(), a.end(), std::size_t{0});
  return make_map(source, target, std::move(a));
}

// second ∘ first
inline PointMap compose(const PointMap& first, const PointMap& second) {
  if (first.target != second.source) throw Error(ErrorCode::DimensionMismatch, "maps do not compose");
  std::vector<std::size_t> a(first.assignment.size());
  for (std::size_t i = 0; i < a.size(); ++i) a[i] = second.assignment[first.assignment[i]];
  return make_map(*first.source, *second.target, std::move(a));
}

// Declared constants; unset ones are only fitted, not judged.
struct MapParams {
  std::optional<double> scale;     // c in the scaled bi-Lipschitz / snowflake definitions
  std::optional<double> L;
  double alpha = 1;                // snowflake exponent
  std::optional<double> K;         // linear modulus eta(t) = K t
  std::optional<double> additive;  // rough isometry constant
};

struct MapReport {
  MapKind kind = MapKind::BiLipschitz;
  bool passes = true;
  double fitted_scale = 1;     // optimal c (bilip, snowflake)
  double fitted_L = 1;         // smallest L at the declared scale, or at fitted_scale
  double fitted_K = 0;         // smallest K (linear_qs)
  double fitted_additive = 0;  // smallest c (rough_isometry)
  double alpha = 1;
  std::vector<std::size_t> witness;  // worst pair or triple of source points
  std::string detail;
};

/// Fits the infimal constants of the chosen embedding class and judges the
/// declared ones. For bilip and snowflake the ratio r = d_X(phi x, phi y) /
/// d_Y(x,y)^alpha ranges over [rmin, rmax]; the best scale is
/// 1/sqrt(rmin rmax) and the best L is sqrt(rmax/rmin). linear_qs checks
/// ratio_target <= K ratio_source over all triples of distinct points.
inline MapReport check_map(const PointMap& map, MapKind kind, const MapParams& declared = {}) {
  if (!map.source || !map.target) throw Error(ErrorCode::BadParameter, "map without spaces");
  const auto& y = *map.source;
  const auto& x = *map.target;
  if (y.empty()) throw Error(ErrorCode::EmptySource, "map has an empty source");
  if (map.assignment.size() != y.size()) throw Error(ErrorCode::DimensionMismatch, "assignment size");
  const auto& phi = map.assignment;
  const double tol = y.tolerance();
  MapReport r;
  r.kind = kind;
  r.alpha = kind == MapKind::Snowflake ? declared.alpha : 1.0;
  if (!(r.alpha > 0)) throw Error(ErrorCode::BadParameter, "alpha must be positive");

  switch (kind) {
    case MapKind::BiLipschitz:
    case MapKind::Snowflake: {
      double rmin = std::numeric_limits<double>::infinity(), rmax = 0;
      std::vector<std::size_t> wmin, wmax;
      for (std::size_t i = 0; i < y.size(); ++i)
        for (std::size_t j = i + 1; j < y.size(); ++j) {
          const double ratio = x(phi[i], phi[j]) / std::pow(y(i, j), r.alpha);
          if (ratio < rmin) { rmin = ratio; wmin = {i, j}; }
          if (ratio > rmax) { rmax = ratio; wmax = {i, j}; }
        }
      if (y.size() < 2) {
        r.fitted_scale = declared.scale.value_or(1.0);
        r.fitted_L = 1;
        r.passes = !declared.L || *declared.L >= 1;
        return r;
      }
      if (rmin == 0) {
        r.fitted_scale = declared.scale.value_or(1.0);
        r.fitted_L = std::numeric_limits<double>::infinity();
        r.passes = false;
        r.witness = wmin;
        r.detail = "map collapses a pair";
        return r;
      }
      r.fitted_scale = 1 / std::sqrt(rmin * rmax);
      const double c = declared.scale.value_or(r.fitted_scale);
      if (!(c > 0)) throw Error(ErrorCode::BadParameter, "scale must be positive");
      const double upper = c * rmax, lower = 1 / (c * rmin);
      r.fitted_L = std::max({1.0, upper, lower});
      r.witness = upper >= lower ? wmax : wmin;
      if (declared.L) {
        r.passes = r.fitted_L <= *declared.L * (1 + tol);
        if (!r.passes) r.detail = "declared L below the fitted value";
      }
      return r;
    }
    case MapKind::LinearQuasisymmetric: {
      for (std::size_t a = 0; a < y.size(); ++a)
        for (std::size_t b = 0; b < y.size(); ++b)
          for (std::size_t c = 0; c < y.size(); ++c) {
            if (a == b || a == c || b == c) continue;
            const double denom = x(phi[a], phi[c]);
            const double ratio_src = y(a, b) / y(a, c);
            const double k = denom == 0 ? std::numeric_limits<double>::infinity()
                                        : x(phi[a], phi[b]) / denom / ratio_src;
            if (k > r.fitted_K) {
              r.fitted_K = k;
              r.witness = {a, b, c};
            }
          }
      if (std::isinf(r.fitted_K)) {
        r.passes = false;
        r.detail = "map collapses a pair";
      } else if (declared.K) {
        r.passes = r.fitted_K <= *declared.K * (1 + tol);
        if (!r.passes) r.detail = "declared K below the fitted value";
      }
      return r;
    }
    case MapKind::RoughIsometry: {
      for (std::size_t i = 0; i < y.size(); ++i)
        for (std::size_t j = i + 1; j < y.size(); ++j) {
          const double gap = std::abs(y(i, j) - x(phi[i], phi[j]));
          if (gap > r.fitted_additive) {
            r.fitted_additive = gap;
            r.witness = {i, j};
          }
        }
      if (declared.additive) {
        r.passes = r.fitted_additive <= *declared.additive * (1 + tol) + tol * diameter(y);
        if (!r.passes) r.detail = "declared additive constant below the fitted value";
      }
      return r;
    }
  }
  return r;
}

struct RoughInverse {
  PointMap inverse;             // target -> source
  double density = 0;           // max over target points of the distance to the image
  double max_displacement = 0;  // max d_X(phi(inverse(x)), x)
};

/// For each target point, a source point whose image is nearest (lowest index
/// on ties). Throws NotDense when some target point is farther than c from
/// the image.
inline RoughInverse rough_inverse(const PointMap& map, double c) {
  if (!map.source || !map.target) throw Error(ErrorCode::BadParameter, "map without spaces");
  if (map.source->empty()) throw Error(ErrorCode::EmptySource, "map has an empty source");
  if (!(c >= 0)) throw Error(ErrorCode::BadParameter, "density constant must be >= 0");
  const auto& x = *map.target;
  RoughInverse out;
  std::vector<std::size_t> back(x.size());
  for (std::size_t t = 0; t < x.size(); ++t) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t s = 0; s < map.assignment.size(); ++s) {
      const double d = x(map.assignment[s], t);
      if (d < best) {
        best = d;
        back[t] = s;
      }
    }
    if (best > c * (1 + x.tolerance())) throw Error(ErrorCode::NotDense, "image is not c-dense", {t});
    out.density = std::max(out.density, best);
  }
  out.max_displacement = out.density;
  out.inverse = make_map(x, *map.source, std::move(back));
  return out;
}

namespace detail {

inline void require(bool ok, const char* what) {
  if (!ok) throw Error(ErrorCode::OutOfRange, what);
}

}  // namespace detail

// Scaled L-bi-Lipschitz Y -> X, X with constant Gamma: Y inherits L^2 Gamma.
inline double bilip_transfer_constant(double L, double gamma) {
  detail::require(L >= 1, "L must be >= 1");
  detail::require(gamma >= 1, "gamma must be >= 1");
  return L * L * gamma;
}

struct SnowflakeTransfer {
  double p_prime = 1;  // alpha p
  double gamma = 1;    // L^(2p/p') Gamma^((p+p')/p') K^(p/p')
};

inline SnowflakeTransfer snowflake_transfer(double alpha, double L, double gamma, double K, double p, double q) {
  detail::require(alpha > 0, "alpha must be positive");
  detail::require(L >= 1, "L must be >= 1");
  detail::require(gamma >= 1, "gamma must be >= 1");
  detail::require(K >= 1, "K must be >= 1");
  detail::require(p >= 1 && p <= q, "need 1 <= p <= q");
  const double pp = alpha * p;
  detail::require(pp >= 1, "alpha p must be >= 1");
  return {pp, std::pow(L, 2 * p / pp) * std::pow(gamma, (p + pp) / pp) * std::pow(K, p / pp)};
}

struct QuasisymmetryChain {
  double eta_at_one = 1;  // eta(t) = L^2 t
  double separation = 2;  // C = 2 eta(1)
};

inline QuasisymmetryChain qs_chain(double L) {
  detail::require(L >= 1, "L must be >= 1");
  return {L * L, 2 * L * L};
}

// eta(t) = K t quasisymmetry carries the C-separation property to 2 eta(C).
inline double fsp_qs_constant(double K, double C) {
  detail::require(K > 0, "K must be positive");
  detail::require(C >= 1, "C must be >= 1");
  return 2 * K * C;
}

struct RoughTransfer {
  double gamma = 4;  // 4 Gamma
  double slack = 0;  // (6c)^p (n + 2^p Gamma^p m^p n^(1-p/q))
};

inline RoughTransfer gh_transfer(double gamma, double p, double q, std::size_t n, std::size_t m, double c) {
  detail::require(gamma >= 1, "gamma must be >= 1");
  detail::require(p >= 1 && p <= q, "need 1 <= p <= q");
  detail::require(n >= 1 && m >= 2 && m % 2 == 0, "need n >= 1 and even m");
  detail::require(c >= 0, "c must be >= 0");
  const double nd = static_cast<double>(n), md = static_cast<double>(m);
  const double scale = std::pow(md, p) * std::pow(nd, 1 - p / q);
  const double slack = std::pow(6 * c, p) * (nd + std::pow(2.0, p) * std::pow(gamma, p) * scale);
  return {4 * gamma, slack};
}

struct BiLipRequest { double L, gamma; };
struct SnowflakeRequest { double alpha, L, gamma, K, p, q; };
struct QsChainRequest { double L; };
struct FspQsRequest { double K, C; };
struct GhRequest { double gamma, p, q; std::size_t n, m; double c; };
using TransferRequest = std::variant<BiLipRequest, SnowflakeRequest, QsChainRequest, FspQsRequest, GhRequest>;

// Uniform view of the transferred data; fields a given kind does not produce
// stay at their defaults.
struct TransferredConstants {
  double constant = 1;               // new Gamma, C, or eta(1)
  std::optional<double> exponent;    // new p (snowflake)
  std::optional<double> separation;  // C (qs chain)
  double slack = 0;                  // additive term (rough isometry)
};

inline TransferredConstants transfer_constants(const TransferRequest& request) {
  TransferredConstants out;
  if (const auto* r = std::get_if<BiLipRequest>(&request)) {
    out.constant = bilip_transfer_constant(r->L, r->gamma);
  } else if (const auto* r = std::get_if<SnowflakeRequest>(&request)) {
    const auto t = snowflake_transfer(r->alpha, r->L, r->gamma, r->K, r->p, r->q);
    out.constant = t.gamma;
    out.exponent = t.p_prime;
  } else if (const auto* r = std::get_if<QsChainRequest>(&request)) {
    const auto t = qs_chain(r->L);
    out.constant = t.eta_at_one;
    out.separation = t.separation;
  } else if (const auto* r = std::get_if<FspQsRequest>(&request)) {
    out.constant = fsp_qs_constant(r->K, r->C);
  } else {
    const auto& g = std::get<GhRequest>(request);
    const auto t = gh_transfer(g.gamma, g.p, g.q, g.n, g.m, g.c);
    out.constant = t.gamma;
    out.slack = t.slack;
  }
  return out;
}

struct TransferVerification {
  MapKind kind = MapKind::BiLipschitz;
  MapReport map_report;
  double exponent = 1;   // p used on the inheriting space
  double constant = 1;   // transferred Gamma
  double slack = 0;      // additive term (rough isometry only)
  std::size_t samples = 0;
  std::size_t violations = 0;          // transferred inequality failed
  double max_violation = -std::numeric_limits<double>::infinity();  // (lhs - bound) / bound
  std::size_t worst_sample = 0;
  std::size_t premise_violations = 0;  // pushed-forward f broke Gamma on the base space
  double max_premise_violation = -std::numeric_limits<double>::infinity();

  bool passed() const { return violations == 0 && premise_violations == 0; }
};

inline constexpr double kTransferTolerance = 1e-9;

/// Samples seeded random f on the inheriting space and checks the cotype
/// inequality with the transferred constants.
///
/// For bilip and snowflake, `map` goes from the inheriting space Y into the
/// base space X, which supports the (p,q) inequality with params.gamma. For
/// rough_isometry, `map` goes from X onto Y (c-dense image) and f is pulled
/// back through a rough inverse. Each pushed or pulled f is also checked
/// against Gamma on X; failures there count as premise violations.
/// `K` bounds the scaling function, m <= K n^(1/q) (snowflake only).
inline TransferVerification empirical_transfer_verify(const PointMap& map, MapKind kind, const MapParams& declared,
                                                      const CotypeParams& params, std::size_t samples,
                                                      std::uint64_t seed, double K = 1) {
  params.validate();
  if (!params.gamma) throw Error(ErrorCode::BadParameter, "base constant gamma is required");
  if (samples == 0) throw Error(ErrorCode::BudgetTooSmall, "need at least one sample");
  const double gamma = *params.gamma;
  TransferVerification out;
  out.kind = kind;
  out.map_report = check_map(map, kind, declared);
  if (!out.map_report.passes)
    throw Error(ErrorCode::BadParameter, "map fails its declared class: " + out.map_report.detail, out.map_report.witness);

  const double nd = static_cast<double>(params.n), md = static_cast<double>(params.m);
  const FiniteMetricSpace* base = nullptr;
  const FiniteMetricSpace* inheriting = nullptr;
  std::vector<std::size_t> carry;  // inheriting point -> base point
  out.exponent = params.p;
  switch (kind) {
    case MapKind::BiLipschitz:
      base = map.target;
      inheriting = map.source;
      carry = map.assignment;
      out.constant = bilip_transfer_constant(out.map_report.fitted_L, gamma);
      break;
    case MapKind::Snowflake: {
      base = map.target;
      inheriting = map.source;
      carry = map.assignment;
      detail::require(md <= K * std::pow(nd, 1 / params.q) * (1 + kTransferTolerance),
                      "m exceeds K n^(1/q)");
      detail::require(md >= scaling_lower_bound(gamma, params.q, params.n) * (1 - kTransferTolerance),
                      "m below Gamma^-1 n^(1/q)");
      const auto t = snowflake_transfer(declared.alpha, out.map_report.fitted_L, gamma, K, params.p, params.q);
      out.exponent = t.p_prime;
      out.constant = t.gamma;
      break;
    }
    case MapKind::RoughIsometry: {
      base = map.source;
      inheriting = map.target;
      const double c0 = std::max(out.map_report.fitted_additive, declared.additive.value_or(0.0));
      // density first, then one c covering both roughness and density
      double density = 0;
      for (std::size_t t = 0; t < inheriting->size(); ++t) {
        double best = std::numeric_limits<double>::infinity();
        for (auto s : map.assignment) best = std::min(best, (*inheriting)(s, t));
        density = std::max(density, best);
      }
      const double c = std::max(c0, density);
      carry = rough_inverse(map, c).inverse.assignment;
      const auto t = gh_transfer(gamma, params.p, params.q, params.n, params.m, c);
      out.constant = t.gamma;
      out.slack = t.slack;
      break;
    }
    case MapKind::LinearQuasisymmetric:
      throw Error(ErrorCode::BadParameter, "no cotype transfer for linear quasisymmetric maps");
  }

  const CotypeStencil stencil(TorusShape(params.n, params.m));
  const std::size_t v = stencil.shape().vertex_count();
  const double q = params.q;
  const double bound_scale = std::pow(out.constant, out.exponent) * std::pow(md, out.exponent) *
                             std::pow(nd, 1 - out.exponent / q);
  const double premise_scale = std::pow(gamma, params.p) * std::pow(md, params.p) * std::pow(nd, 1 - params.p / q);
  for (std::size_t s = 0; s < samples; ++s) {
    TorusFunction f{params.n, params.m, detail::random_values(seed, s, v, inheriting->size())};
    const auto ev = evaluate_cotype(*inheriting, f, out.exponent, q, &stencil);
    const double bound = bound_scale * ev.rhs + out.slack;
    const double excess = bound > 0 ? (ev.lhs - bound) / bound : (ev.lhs > 0 ? 1.0 : 0.0);
    if (excess > out.max_violation) {
      out.max_violation = excess;
      out.worst_sample = s;
    }
    if (excess > kTransferTolerance) ++out.violations;

    TorusFunction g{params.n, params.m, f.values};
    for (auto& val : g.values) val = carry[val];
    const auto eb = evaluate_cotype(*base, g, params.p, q, &stencil);
    const double pb = premise_scale * eb.rhs;
    const double pexcess = pb > 0 ? (eb.lhs - pb) / pb : (eb.lhs > 0 ? 1.0 : 0.0);
    out.max_premise_violation = std::max(out.max_premise_violation, pexcess);
    if (pexcess > kTransferTolerance) ++out.premise_violations;
  }
  out.samples = samples;
  return out;
}

}  // namespace cotypelab
