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
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "cotypelab/error.hpp"
#include "cotypelab/metric_space.hpp"
#include "cotypelab/parallel.hpp"
#include "cotypelab/separation.hpp"
#include "cotypelab/torus.hpp"

namespace cotypelab {

struct CotypeParams {
  double p = 2;
  double q = 2;
  std::size_t n = 1;
  std::size_t m = 4;
  std::optional<double> gamma;

  void validate() const {
    if (!(p >= 1) || !(q >= p) || !std::isfinite(q))
      throw Error(ErrorCode::BadParameter, "need 1 <= p <= q < inf");
    if (n < 1) throw Error(ErrorCode::BadParameter, "n must be >= 1");
    if (m < 2 || m % 2 != 0) throw Error(ErrorCode::BadParameter, "m must be even and >= 2", {m});
    if (gamma && !(*gamma >= 1)) throw Error(ErrorCode::BadParameter, "gamma must be >= 1");
  }
};

/// f: Z_m^n -> X, stored densely by torus vertex index.
struct TorusFunction {
  std::size_t n = 1;
  std::size_t m = 2;
  std::vector<std::size_t> values;

  TorusShape shape() const { return TorusShape(n, m); }
  bool operator==(const TorusFunction&) const = default;
};

inline void check_function(const FiniteMetricSpace& x, const TorusFunction& f) {
  const TorusShape shape = f.shape();
  if (f.values.size() != shape.vertex_count())
    throw Error(ErrorCode::DimensionMismatch, "function has " + std::to_string(f.values.size()) +
                                                  " values, torus has " + std::to_string(shape.vertex_count()));
  for (std::size_t v = 0; v < f.values.size(); ++v)
    if (f.values[v] >= x.size()) throw Error(ErrorCode::OutOfRange, "function value is not a point of X", {v, f.values[v]});
}

struct CotypeEvaluation {
  double lhs = 0;       // E_eps sum_j d(f, f_j)^p
  double rhs = 0;       // E_eps E_delta d(f, f_delta)^p
  double lhs_edge = 0;  // 2 m^-n sum over E_L
  double rhs_edge = 0;  // 2 (3m)^-n sum over E_R
  double implied_gamma = 0;
  CotypeParams params;
};

/// Precomputed shift tables for one torus; shared by evaluation and search.
class CotypeStencil {
 public:
  explicit CotypeStencil(TorusShape shape) : shape_(shape) {
    const std::size_t v = shape.vertex_count();
    const std::size_t n = shape.n();
    offsets_ = 1;
    for (std::size_t j = 0; j < n; ++j) offsets_ *= 3;
    if (v * offsets_ > (std::size_t{1} << 26)) throw Error(ErrorCode::TooLarge, "torus too large to tabulate", {v, offsets_});
    half_.resize(v * n);
    cube_.resize(v * offsets_);
    for (std::size_t e = 0; e < v; ++e) {
      for (std::size_t j = 0; j < n; ++j) {
        const std::size_t w = shape.shift(e, j, static_cast<std::ptrdiff_t>(shape.m() / 2));
        half_[e * n + j] = w;
        if (shape.coords(e)[j] < shape.m() / 2) l_edges_.push_back({e, w});
      }
      std::vector<std::ptrdiff_t> delta(n, -1);
      for (std::size_t t = 0; t < offsets_; ++t) {
        cube_[e * offsets_ + t] = shape.translate(e, delta);
        for (std::size_t j = 0; j < n && ++delta[j] > 1; ++j) delta[j] = -1;
      }
      for (auto w : neighbors(shape, e, TorusGraph::R))
        if (w > e) r_edges_.push_back({e, w});
    }
  }

  const TorusShape& shape() const noexcept { return shape_; }
  std::size_t offset_count() const noexcept { return offsets_; }
  // f_j partner of e.
  std::size_t half(std::size_t e, std::size_t j) const noexcept { return half_[e * shape_.n() + j]; }
  // e + delta for delta number t in {-1,0,1}^n (all 3^n, including 0).
  std::size_t cube(std::size_t e, std::size_t t) const noexcept { return cube_[e * offsets_ + t]; }
  const std::vector<TorusEdge>& l_edges() const noexcept { return l_edges_; }
  const std::vector<TorusEdge>& r_edges() const noexcept { return r_edges_; }

 private:
  TorusShape shape_;
  std::size_t offsets_ = 1;
  std::vector<std::size_t> half_;
  std::vector<std::size_t> cube_;
  std::vector<TorusEdge> l_edges_;
  std::vector<TorusEdge> r_edges_;
};

// Row-major table of d^p.
inline std::vector<double> powered_distances(const FiniteMetricSpace& x, double p) {
  std::vector<double> t = x.distances();
  if (p == 1) return t;
  for (auto& v : t) v = p == 2 ? v * v : std::pow(v, p);
  return t;
}

namespace detail {

struct RawSums {
  double lhs = 0;  // sum_eps sum_j
  double rhs = 0;  // sum_eps sum_delta
};

inline RawSums raw_sums(const CotypeStencil& st, const std::vector<double>& dp, std::size_t k,
                        const std::vector<std::size_t>& f) {
  RawSums s;
  const std::size_t v = st.shape().vertex_count(), n = st.shape().n(), t = st.offset_count();
  for (std::size_t e = 0; e < v; ++e) {
    const double* row = dp.data() + f[e] * k;
    for (std::size_t j = 0; j < n; ++j) s.lhs += row[f[st.half(e, j)]];
    for (std::size_t o = 0; o < t; ++o) s.rhs += row[f[st.cube(e, o)]];
  }
  return s;
}

inline bool close_relative(double a, double b, double tol) {
  return std::abs(a - b) <= tol * std::max(std::abs(a), std::abs(b));
}

}  // namespace detail

inline constexpr double kIdentityTolerance = 1e-12;

/// Both sides of the (p,q) metric cotype inequality for f, plus the smallest
/// Gamma for which this f satisfies it. For m >= 4 the sides are also
/// computed as edge sums over the graphs L and R and must agree.
inline CotypeEvaluation evaluate_cotype(const FiniteMetricSpace& x, const TorusFunction& f, double p, double q,
                                        const CotypeStencil* stencil = nullptr) {
  CotypeParams params{p, q, f.n, f.m, std::nullopt};
  params.validate();
  check_function(x, f);
  std::optional<CotypeStencil> own;
  if (!stencil || !(stencil->shape() == f.shape())) stencil = &own.emplace(f.shape());
  const auto dp = powered_distances(x, p);
  const std::size_t k = x.size();
  const double vcount = static_cast<double>(stencil->shape().vertex_count());
  const double cube = static_cast<double>(stencil->offset_count());

  const auto sums = detail::raw_sums(*stencil, dp, k, f.values);
  double l_edges = 0, r_edges = 0;
  for (const auto& e : stencil->l_edges()) l_edges += dp[f.values[e.inside] * k + f.values[e.outside]];
  for (const auto& e : stencil->r_edges()) r_edges += dp[f.values[e.inside] * k + f.values[e.outside]];

  CotypeEvaluation ev;
  ev.params = params;
  ev.lhs = sums.lhs / vcount;
  ev.rhs = sums.rhs / (vcount * cube);
  ev.lhs_edge = 2 * l_edges / vcount;
  ev.rhs_edge = 2 * r_edges / (vcount * cube);
  if (f.m >= 4 && (!detail::close_relative(ev.lhs, ev.lhs_edge, kIdentityTolerance) ||
                   !detail::close_relative(ev.rhs, ev.rhs_edge, kIdentityTolerance)))
    throw Error(ErrorCode::IdentityMismatch, "direct and edge-sum evaluations disagree");
  if (ev.rhs > 0) {
    ev.implied_gamma = std::pow(ev.lhs / (std::pow(static_cast<double>(f.m), p) *
                                          std::pow(static_cast<double>(f.n), 1 - p / q) * ev.rhs),
                                1 / p);
  } else if (ev.lhs != 0) {
    throw Error(ErrorCode::IdentityMismatch, "rhs vanishes but lhs does not");
  }
  return ev;
}

/// Smallest even m with m^(q-1) >= n 3^n.
inline std::size_t mn_scaling_function(double q, std::size_t n) {
  if (!(q > 1) || !std::isfinite(q)) throw Error(ErrorCode::OutOfRange, "scaling function needs q > 1");
  if (n < 1) throw Error(ErrorCode::BadParameter, "n must be >= 1");
  using ld = long double;
  const ld target = static_cast<ld>(n) * std::pow(3.0L, static_cast<ld>(n));
  const ld threshold = std::exp(std::log(target) / (static_cast<ld>(q) - 1));
  if (!std::isfinite(static_cast<double>(threshold)) || threshold > 1e15L)
    throw Error(ErrorCode::Overflow, "scaling threshold (n 3^n)^(1/(q-1)) too large");
  auto holds = [&](std::size_t m) { return std::pow(static_cast<ld>(m), static_cast<ld>(q) - 1) >= target; };
  std::size_t m = 2 * static_cast<std::size_t>(std::ceil(threshold / 2));
  m = std::max<std::size_t>(m, 2);
  while (m > 2 && holds(m - 2)) m -= 2;
  while (!holds(m)) m += 2;
  return m;
}

/// n^(1/q) / Gamma: any m admissible with constant Gamma is at least this.
inline double scaling_lower_bound(double gamma, double q, std::size_t n) {
  if (!(gamma >= 1)) throw Error(ErrorCode::BadParameter, "gamma must be >= 1");
  if (!(q >= 1)) throw Error(ErrorCode::BadParameter, "q must be >= 1");
  return std::pow(static_cast<double>(n), 1 / q) / gamma;
}

enum class SearchStrategy { Exhaustive, Random, Local };

inline std::string_view to_string(SearchStrategy s) {
  switch (s) {
    case SearchStrategy::Exhaustive: return "exhaustive";
    case SearchStrategy::Random: return "random";
    case SearchStrategy::Local: return "local";
  }
  return "?";
}

struct SearchResult {
  TorusFunction best;
  double best_gamma = 0;
  std::size_t best_index = 0;  // enumeration index, sample, or restart number
  std::size_t evaluated = 0;   // functions evaluated in full or by delta
  CotypeEvaluation evaluation;
};

inline constexpr double kExhaustiveLimit = 1e6;

namespace detail {

// Stream `index` of the seeded sequence; independent of worker layout.
inline std::mt19937_64 sample_rng(std::uint64_t seed, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
  return std::mt19937_64(seq);
}

inline std::vector<std::size_t> random_values(std::uint64_t seed, std::uint64_t index, std::size_t count,
                                              std::size_t points) {
  auto rng = sample_rng(seed, index);
  std::uniform_int_distribution<std::size_t> pick(0, points - 1);
  std::vector<std::size_t> values(count);
  for (auto& v : values) v = pick(rng);
  return values;
}

// Greedy first-improvement ascent on lhs/rhs: change f at one vertex to another
// point, scanning (vertex, point) in increasing order, until a full pass makes
// no progress.
inline std::size_t local_ascent(const CotypeStencil& st, const std::vector<double>& dp, std::size_t k,
                                std::vector<std::size_t>& f) {
  const std::size_t v = st.shape().vertex_count(), n = st.shape().n(), t = st.offset_count();
  auto sums = raw_sums(st, dp, k, f);
  auto ratio = [](double l, double r) { return r > 0 ? l / r : 0.0; };
  double current = ratio(sums.lhs, sums.rhs);
  std::size_t evaluated = 1;
  for (bool improved = true; improved;) {
    improved = false;
    for (std::size_t e = 0; e < v; ++e) {
      for (std::size_t cand = 0; cand < k; ++cand) {
        const std::size_t old = f[e];
        if (cand == old) continue;
        const double* now = dp.data() + old * k;
        const double* next = dp.data() + cand * k;
        double dl = 0, dr = 0;
        for (std::size_t j = 0; j < n; ++j) {
          const std::size_t w = f[st.half(e, j)];
          dl += next[w] - now[w];
        }
        for (std::size_t o = 0; o < t; ++o) {
          const std::size_t w = st.cube(e, o);
          if (w == e) continue;
          dr += next[f[w]] - now[f[w]];
        }
        ++evaluated;
        const double nl = sums.lhs + 2 * dl, nr = sums.rhs + 2 * dr;
        const double r = ratio(nl, nr);
        if (r > current * (1 + 1e-12) && r > current) {
          f[e] = cand;
          sums = {nl, nr};
          current = r;
          improved = true;
        }
      }
    }
    sums = raw_sums(st, dp, k, f);  // drop accumulated rounding
    current = ratio(sums.lhs, sums.rhs);
  }
  return evaluated;
}

}  // namespace detail

/// Searches for functions f with large implied Gamma.
///
/// exhaustive enumerates all |X|^(m^n) functions; random evaluates `budget`
/// seeded uniform functions; local runs `budget` restarts, each a seeded
/// uniform start followed by greedy ascent to a fixpoint. Sample i always
/// uses stream i of `seed`, so results do not depend on `threads`.
inline SearchResult gamma_search(const FiniteMetricSpace& x, const CotypeParams& params, SearchStrategy strategy,
                                 std::size_t budget, std::uint64_t seed, unsigned threads = 1) {
  params.validate();
  if (x.empty()) throw Error(ErrorCode::TooSmall, "empty space");
  const CotypeStencil stencil(TorusShape(params.n, params.m));
  const std::size_t v = stencil.shape().vertex_count();
  const std::size_t k = x.size();
  const auto dp = powered_distances(x, params.p);

  std::size_t count = budget;
  if (strategy == SearchStrategy::Exhaustive) {
    const double total = std::pow(static_cast<double>(k), static_cast<double>(v));
    if (total > kExhaustiveLimit)
      throw Error(ErrorCode::TooLargeForExhaustive, "|X|^(m^n) exceeds 1e6", {k, v});
    count = static_cast<std::size_t>(std::llround(total));
  } else if (budget == 0) {
    throw Error(ErrorCode::BudgetTooSmall, "budget must be positive");
  }

  auto function_at = [&](std::size_t index) {
    if (strategy == SearchStrategy::Exhaustive) {
      std::vector<std::size_t> values(v);
      for (std::size_t e = 0; e < v; ++e, index /= k) values[e] = index % k;
      return values;
    }
    return detail::random_values(seed, index, v, k);
  };

  struct Best {
    double ratio = -1;
    std::size_t index = 0;
    std::vector<std::size_t> values;
    std::size_t evaluated = 0;
  };
  threads = std::max(1u, threads);
  std::vector<Best> per_worker(threads);
  parallel_chunks(count, threads, [&](unsigned w, std::size_t begin, std::size_t end) {
    Best best;
    for (std::size_t i = begin; i < end; ++i) {
      auto values = function_at(i);
      if (strategy == SearchStrategy::Local) {
        best.evaluated += detail::local_ascent(stencil, dp, k, values);
      } else {
        ++best.evaluated;
      }
      const auto s = detail::raw_sums(stencil, dp, k, values);
      const double r = s.rhs > 0 ? s.lhs / s.rhs : 0.0;
      if (r > best.ratio) {
        best.ratio = r;
        best.index = i;
        best.values = std::move(values);
      }
    }
    per_worker[w] = std::move(best);
  });

  SearchResult out;
  double best_ratio = -1;
  for (auto& b : per_worker) {
    out.evaluated += b.evaluated;
    if (b.ratio > best_ratio) {  // ascending chunks: first strict maximum wins
      best_ratio = b.ratio;
      out.best_index = b.index;
      out.best.values = std::move(b.values);
    }
  }
  out.best.n = params.n;
  out.best.m = params.m;
  out.evaluation = evaluate_cotype(x, out.best, params.p, params.q, &stencil);
  out.evaluation.params = params;
  out.best_gamma = out.evaluation.implied_gamma;
  return out;
}

/// One level i of the spine 1_i of the separated tree on f(Z_m^n).
struct CertificateRow {
  std::size_t level = 0;
  std::size_t subset_size = 0;    // |F_{1_i 0}|, normalized to <= m^n / 2
  std::size_t complement_size = 0;  // |F_{1_{i+1}}|
  double diam = 0;                // diam A_{1_i}
  std::size_t boundary = 0;       // |boundary_R F_{1_i 0}|
  double lhs_level = 0;           // m^-n 2n |F| diam^q
  double rhs_level = 0;           // m^-n 3^-n m^q |dF| diam^q
  double calc_lhs = 0;            // 3^-n m^q |dF|
  double calc_rhs = 0;            // 2n |F|
  bool calc_ok = false;
};

struct Certificate {
  std::vector<CertificateRow> rows;
  double c = 1;           // separation constant used for the tree
  double q = 2;
  std::size_t n = 1, m = 2;
  std::size_t required_m = 2;
  bool scaling_too_small = false;
  double lhs = 0, rhs = 0;
  double lhs_level_sum = 0;  // upper bound for lhs
  double rhs_level_sum = 0;  // lower bound for C^q m^q rhs
  bool lhs_estimate_ok = false;
  bool rhs_estimate_ok = false;
  bool calculation_ok = false;
  bool inequality_ok = false;  // lhs <= C^q m^q rhs

  bool passed() const { return lhs_estimate_ok && rhs_estimate_ok && calculation_ok && inequality_ok; }
};

inline constexpr double kCertificateTolerance = 1e-9;

/// Replays the level-by-level argument bounding the (q,q) cotype inequality
/// with Gamma = C for one function f.
///
/// A C-separated tree is built on the image f(Z_m^n) (C defaults to the image's
/// separation constant). Walking the spine 1_i, the two children are swapped
/// when needed so that |F_{1_i 0}| <= m^n/2, and each level reports its
/// contributions to both sides and the counting inequality
/// 3^-n m^q |boundary_R F| >= 2n |F|.
inline Certificate sts_certificate(const FiniteMetricSpace& x, const TorusFunction& f, double q,
                                   std::optional<double> c = std::nullopt) {
  const auto ev = evaluate_cotype(x, f, q, q);
  Certificate cert;
  cert.q = q;
  cert.n = f.n;
  cert.m = f.m;
  cert.required_m = mn_scaling_function(q, f.n);
  cert.scaling_too_small = f.m < cert.required_m;
  cert.lhs = ev.lhs;
  cert.rhs = ev.rhs;

  PointSet image(f.values.begin(), f.values.end());
  std::sort(image.begin(), image.end());
  image.erase(std::unique(image.begin(), image.end()), image.end());
  if (image.size() < 2) {
    cert.c = c.value_or(1.0);
    cert.lhs_estimate_ok = cert.rhs_estimate_ok = cert.calculation_ok = cert.inequality_ok = true;
    return cert;
  }
  const auto sub = x.subspace(image);
  cert.c = c ? *c : separation_constant(sub).c_sep;
  const auto tree = build_tree_structure(sub, cert.c);

  const TorusShape shape = f.shape();
  const std::size_t v = shape.vertex_count();
  const double vd = static_cast<double>(v);
  const double md = static_cast<double>(f.m), nd = static_cast<double>(f.n);
  const double three_n = std::pow(3.0, nd);
  const double mq = std::pow(md, q);
  // image position of each vertex's value
  std::vector<std::size_t> slot(v);
  for (std::size_t e = 0; e < v; ++e)
    slot[e] = static_cast<std::size_t>(std::lower_bound(image.begin(), image.end(), f.values[e]) - image.begin());
  auto preimage = [&](const PointSet& pts) {
    std::vector<char> in(sub.size(), 0);
    for (auto p : pts) in[p] = 1;
    TorusSubset s(shape);
    for (std::size_t e = 0; e < v; ++e)
      if (in[slot[e]]) s.insert(e);
    return s;
  };

  cert.calculation_ok = true;
  std::size_t node = 0;
  for (std::size_t level = 0; !tree.is_leaf(node); ++level) {
    auto [c0, c1] = *tree.nodes[node].children;
    auto f0 = preimage(tree.nodes[c0].points);
    auto f1 = preimage(tree.nodes[c1].points);
    if (2 * f0.size() > v) {
      std::swap(c0, c1);
      std::swap(f0, f1);
    }
    CertificateRow row;
    row.level = level;
    row.subset_size = f0.size();
    row.complement_size = f1.size();
    row.diam = diameter(sub, tree.nodes[node].points);
    row.boundary = edge_boundary(f0, TorusGraph::R);
    const double dq = std::pow(row.diam, q);
    const double size = static_cast<double>(row.subset_size);
    row.lhs_level = 2 * nd * size * dq / vd;
    row.rhs_level = mq * static_cast<double>(row.boundary) * dq / (three_n * vd);
    row.calc_lhs = mq * static_cast<double>(row.boundary) / three_n;
    row.calc_rhs = 2 * nd * size;
    row.calc_ok = row.calc_lhs >= row.calc_rhs * (1 - kCertificateTolerance);
    cert.calculation_ok = cert.calculation_ok && row.calc_ok;
    cert.lhs_level_sum += row.lhs_level;
    cert.rhs_level_sum += row.rhs_level;
    cert.rows.push_back(row);
    node = c1;
  }
  const double scaled_rhs = std::pow(cert.c, q) * mq * cert.rhs;
  cert.lhs_estimate_ok = cert.lhs <= cert.lhs_level_sum * (1 + kCertificateTolerance);
  cert.rhs_estimate_ok = scaled_rhs >= cert.rhs_level_sum * (1 - kCertificateTolerance);
  cert.inequality_ok = cert.lhs <= scaled_rhs * (1 + kCertificateTolerance);
  return cert;
}

}  // namespace cotypelab
