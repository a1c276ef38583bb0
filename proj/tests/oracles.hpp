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

// Independent reference implementations used as test oracles. Nothing here
// calls into the library's algorithms; only the data types are shared.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <random>
#include <set>
#include <utility>
#include <vector>

#include "cotypelab/metric_space.hpp"

namespace oracle {

using cotypelab::FiniteMetricSpace;
using Points = std::vector<std::size_t>;

inline FiniteMetricSpace from_matrix(const std::vector<std::vector<double>>& m) {
  return cotypelab::validate_metric(m);
}

inline FiniteMetricSpace line(const std::vector<double>& xs) {
  std::vector<std::vector<double>> m(xs.size(), std::vector<double>(xs.size()));
  for (std::size_t i = 0; i < xs.size(); ++i)
    for (std::size_t j = 0; j < xs.size(); ++j) m[i][j] = std::abs(xs[i] - xs[j]);
  return from_matrix(m);
}

inline FiniteMetricSpace equilateral(std::size_t k, double d = 1) {
  std::vector<std::vector<double>> m(k, std::vector<double>(k, d));
  for (std::size_t i = 0; i < k; ++i) m[i][i] = 0;
  return from_matrix(m);
}

// Shortest-path metric of a complete graph with integer weights 1..w; plenty
// of ties.
inline FiniteMetricSpace random_graph_metric(std::size_t k, std::uint64_t seed, int w = 5) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> weight(1, w);
  std::vector<std::vector<double>> d(k, std::vector<double>(k, 0));
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = i + 1; j < k; ++j) d[i][j] = d[j][i] = weight(rng);
  for (std::size_t via = 0; via < k; ++via)
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t j = 0; j < k; ++j) d[i][j] = std::min(d[i][j], d[i][via] + d[via][j]);
  return from_matrix(d);
}

inline FiniteMetricSpace random_plane(std::size_t k, std::uint64_t seed, std::size_t dim = 2) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0, 1);
  std::vector<std::vector<double>> pts(k, std::vector<double>(dim));
  for (auto& p : pts)
    for (auto& c : p) c = u(rng);
  std::vector<std::vector<double>> d(k, std::vector<double>(k, 0));
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < k; ++j) {
      double s = 0;
      for (std::size_t c = 0; c < dim; ++c) s += (pts[i][c] - pts[j][c]) * (pts[i][c] - pts[j][c]);
      d[i][j] = std::sqrt(s);
    }
  return from_matrix(d);
}

// Ultrametric from nested random clusters with integer heights.
inline FiniteMetricSpace random_tree_ultrametric(std::size_t k, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<std::vector<std::size_t>> clusters(k);
  for (std::size_t i = 0; i < k; ++i) clusters[i] = {i};
  std::vector<std::vector<double>> d(k, std::vector<double>(k, 0));
  double h = 0;
  while (clusters.size() > 1) {
    h += 1 + static_cast<double>(rng() % 3);
    const std::size_t a = rng() % clusters.size();
    std::size_t b = rng() % (clusters.size() - 1);
    if (b >= a) ++b;
    for (auto i : clusters[a])
      for (auto j : clusters[b]) d[i][j] = d[j][i] = h;
    clusters[a].insert(clusters[a].end(), clusters[b].begin(), clusters[b].end());
    clusters.erase(clusters.begin() + static_cast<std::ptrdiff_t>(b));
  }
  return from_matrix(d);
}

// Seeded corpus of small spaces (2..10 points) mixing ties, Euclidean and
// ultrametric geometry.
inline FiniteMetricSpace corpus(std::size_t i) {
  const std::size_t k = 2 + (i * 7) % 9;
  switch (i % 4) {
    case 0: return random_graph_metric(k, 1000 + i);
    case 1: return random_plane(k, 2000 + i, 1 + i % 3);
    case 2: return random_tree_ultrametric(k, 3000 + i);
    default: return random_graph_metric(k, 4000 + i, 2);
  }
}

inline double diam(const FiniteMetricSpace& x, const Points& s) {
  double best = 0;
  for (auto a : s)
    for (auto b : s) best = std::max(best, x(a, b));
  return best;
}

inline double dist(const FiniteMetricSpace& x, const Points& a, const Points& b) {
  double best = std::numeric_limits<double>::infinity();
  for (auto i : a)
    for (auto j : b) best = std::min(best, x(i, j));
  return best;
}

inline Points from_mask(const Points& s, std::uint64_t mask) {
  Points out;
  for (std::size_t i = 0; i < s.size(); ++i)
    if (mask >> i & 1) out.push_back(s[i]);
  return out;
}

// max over nontrivial bipartitions of dist(A, S \ A)
inline double max_split(const FiniteMetricSpace& x, const Points& s) {
  double best = 0;
  const std::uint64_t full = (std::uint64_t{1} << s.size()) - 1;
  for (std::uint64_t mask = 1; mask < full; ++mask) {
    if (mask & 1) continue;  // each bipartition once: point s[0] always in the complement
    best = std::max(best, dist(x, from_mask(s, mask), from_mask(s, full ^ mask)));
  }
  return best;
}

inline double separation_constant(const FiniteMetricSpace& x) {
  Points all(x.size());
  std::iota(all.begin(), all.end(), std::size_t{0});
  double best = 1;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << x.size()); ++mask) {
    const auto s = from_mask(all, mask);
    if (s.size() < 2) continue;
    best = std::max(best, diam(x, s) / max_split(x, s));
  }
  return best;
}

// min over simple chains from a to b of the longest step
inline double minimax(const FiniteMetricSpace& x, std::size_t a, std::size_t b) {
  double best = std::numeric_limits<double>::infinity();
  std::vector<bool> used(x.size());
  auto walk = [&](auto&& self, std::size_t at, double worst) -> void {
    if (worst >= best) return;
    if (at == b) {
      best = worst;
      return;
    }
    for (std::size_t next = 0; next < x.size(); ++next) {
      if (used[next]) continue;
      used[next] = true;
      self(self, next, std::max(worst, x(at, next)));
      used[next] = false;
    }
  };
  used[a] = true;
  walk(walk, a, 0.0);
  return a == b ? 0.0 : best;
}

struct UnionFind {
  std::vector<std::size_t> parent;
  explicit UnionFind(std::size_t k) : parent(k) { std::iota(parent.begin(), parent.end(), std::size_t{0}); }
  std::size_t find(std::size_t i) { return parent[i] == i ? i : parent[i] = find(parent[i]); }
  void unite(std::size_t a, std::size_t b) { parent[find(a)] = find(b); }
};

inline bool connected_below(const FiniteMetricSpace& x, std::size_t a, std::size_t b, double eps) {
  UnionFind uf(x.size());
  for (std::size_t i = 0; i < x.size(); ++i)
    for (std::size_t j = 0; j < x.size(); ++j)
      if (x(i, j) < eps) uf.unite(i, j);
  return uf.find(a) == uf.find(b);
}

// ---- torus

inline std::vector<std::size_t> decode(std::size_t v, std::size_t n, std::size_t m) {
  std::vector<std::size_t> c(n);
  for (std::size_t j = 0; j < n; ++j) {
    c[j] = v % m;
    v /= m;
  }
  return c;
}

inline std::size_t encode(const std::vector<long>& c, std::size_t m) {
  std::size_t v = 0;
  for (std::size_t j = c.size(); j-- > 0;) {
    const long r = ((c[j] % static_cast<long>(m)) + static_cast<long>(m)) % static_cast<long>(m);
    v = v * m + static_cast<std::size_t>(r);
  }
  return v;
}

inline std::size_t ipow(std::size_t b, std::size_t e) {
  std::size_t r = 1;
  while (e--) r *= b;
  return r;
}

// Unordered simple-graph edge set of R (kind 'R') or T (kind 'T').
inline std::set<std::pair<std::size_t, std::size_t>> edges(std::size_t n, std::size_t m, char kind) {
  std::set<std::pair<std::size_t, std::size_t>> out;
  const std::size_t v = ipow(m, n);
  for (std::size_t e = 0; e < v; ++e) {
    const auto c = decode(e, n, m);
    for (std::size_t code = 0; code < ipow(3, n); ++code) {
      const auto delta = decode(code, n, 3);
      std::size_t nonzero = 0;
      std::vector<long> w(n);
      for (std::size_t j = 0; j < n; ++j) {
        const long dj = static_cast<long>(delta[j]) - 1;
        nonzero += dj != 0;
        w[j] = static_cast<long>(c[j]) + dj;
      }
      if (nonzero == 0 || (kind == 'T' && nonzero != 1)) continue;
      const auto f = encode(w, m);
      if (f != e) out.insert({std::min(e, f), std::max(e, f)});
    }
  }
  return out;
}

inline std::size_t boundary(const std::set<std::pair<std::size_t, std::size_t>>& es, std::uint64_t mask) {
  std::size_t count = 0;
  for (const auto& [a, b] : es) count += ((mask >> a) & 1) != ((mask >> b) & 1);
  return count;
}

struct Cotype {
  double lhs = 0, rhs = 0;
};

// Expectations of the metric cotype inequality by direct coordinate loops.
inline Cotype cotype(const FiniteMetricSpace& x, const std::vector<std::size_t>& f, std::size_t n, std::size_t m,
                     double p) {
  const std::size_t v = ipow(m, n);
  Cotype out;
  for (std::size_t e = 0; e < v; ++e) {
    const auto c = decode(e, n, m);
    for (std::size_t j = 0; j < n; ++j) {
      std::vector<long> w(c.begin(), c.end());
      w[j] += static_cast<long>(m / 2);
      out.lhs += std::pow(x(f[e], f[encode(w, m)]), p);
    }
    for (std::size_t code = 0; code < ipow(3, n); ++code) {
      const auto delta = decode(code, n, 3);
      std::vector<long> w(n);
      for (std::size_t j = 0; j < n; ++j) w[j] = static_cast<long>(c[j]) + static_cast<long>(delta[j]) - 1;
      out.rhs += std::pow(x(f[e], f[encode(w, m)]), p);
    }
  }
  out.lhs /= static_cast<double>(v);
  out.rhs /= static_cast<double>(v * ipow(3, n));
  return out;
}

inline double implied_gamma(const Cotype& c, double p, double q, std::size_t n, std::size_t m) {
  if (c.rhs == 0) return 0;
  const double nd = static_cast<double>(n), md = static_cast<double>(m);
  return std::pow(c.lhs / (std::pow(md, p) * std::pow(nd, 1 - p / q) * c.rhs), 1 / p);
}

}  // namespace oracle
