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
#include <array>
#include <cmath>
#include <cstddef>
#include <deque>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "cotypelab/error.hpp"

namespace cotypelab {

// Sorted list of point indices.
using PointSet = std::vector<std::size_t>;

inline constexpr double kDefaultTolerance = 1e-9;

/// A finite metric space: labels plus a symmetric row-major distance matrix.
///
/// Instances are produced by validate_metric (checked) or assume_valid (for
/// derived spaces whose axioms hold by construction, e.g. a subspace).
class FiniteMetricSpace {
 public:
  FiniteMetricSpace() = default;

  static FiniteMetricSpace assume_valid(std::vector<std::string> labels, std::vector<double> dist,
                                        double tolerance = kDefaultTolerance) {
    FiniteMetricSpace x;
    x.labels_ = std::move(labels);
    x.dist_ = std::move(dist);
    x.tolerance_ = tolerance;
    return x;
  }

  std::size_t size() const noexcept { return labels_.size(); }
  bool empty() const noexcept { return labels_.empty(); }
  double operator()(std::size_t i, std::size_t j) const noexcept { return dist_[i * size() + j]; }
  std::span<const double> row(std::size_t i) const noexcept {
    return {dist_.data() + i * size(), size()};
  }

  const std::vector<std::string>& labels() const noexcept { return labels_; }
  const std::vector<double>& distances() const noexcept { return dist_; }
  double tolerance() const noexcept { return tolerance_; }

  std::vector<std::vector<double>> matrix() const {
    std::vector<std::vector<double>> m(size());
    for (std::size_t i = 0; i < size(); ++i) m[i].assign(row(i).begin(), row(i).end());
    return m;
  }

  FiniteMetricSpace subspace(std::span<const std::size_t> points) const {
    std::vector<std::string> labels;
    std::vector<double> dist(points.size() * points.size());
    for (std::size_t a = 0; a < points.size(); ++a) {
      labels.push_back(labels_.at(points[a]));
      for (std::size_t b = 0; b < points.size(); ++b)
        dist[a * points.size() + b] = (*this)(points[a], points[b]);
    }
    return assume_valid(std::move(labels), std::move(dist), tolerance_);
  }

  // (X, lambda * d).
  FiniteMetricSpace scaled(double lambda) const {
    if (!(lambda > 0) || !std::isfinite(lambda))
      throw Error(ErrorCode::BadParameter, "scale factor must be positive");
    auto dist = dist_;
    for (auto& v : dist) v *= lambda;
    return assume_valid(labels_, std::move(dist), tolerance_);
  }

  FiniteMetricSpace with_tolerance(double tolerance) const {
    auto x = *this;
    x.tolerance_ = tolerance;
    return x;
  }

  bool operator==(const FiniteMetricSpace&) const = default;

 private:
  std::vector<std::string> labels_;
  std::vector<double> dist_;
  double tolerance_ = kDefaultTolerance;
};

inline std::vector<std::string> default_labels(std::size_t k) {
  std::vector<std::string> labels(k);
  for (std::size_t i = 0; i < k; ++i) labels[i] = std::to_string(i);
  return labels;
}

/// Checks every metric axiom and returns the first witness of each violated
/// one. An empty result means the matrix is a valid metric. Entries are
/// compared with relative tolerance `tolerance`.
inline std::vector<Witnessed> check_metric(const std::vector<std::vector<double>>& matrix,
                                           std::size_t label_count, double tolerance) {
  const std::size_t k = matrix.size();
  std::vector<Witnessed> found;
  auto note = [&](ErrorCode code, std::vector<std::size_t> w) {
    for (const auto& v : found)
      if (v.code == code) return;
    found.push_back({code, std::move(w)});
  };
  for (std::size_t i = 0; i < k; ++i)
    if (matrix[i].size() != k) return {{ErrorCode::NonSquare, {i}}};
  if (label_count != k) note(ErrorCode::LabelMismatch, {label_count, k});

  bool finite = true;
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < k; ++j) {
      const double v = matrix[i][j];
      if (!std::isfinite(v)) {
        note(ErrorCode::NonFiniteEntry, {i, j});
        finite = false;
        continue;
      }
      if (v < 0) note(ErrorCode::NegativeEntry, {i, j});
      if (i == j && v != 0) note(ErrorCode::NonzeroDiagonal, {i, i});
      if (i < j) {
        const double w = matrix[j][i];
        if (std::isfinite(w) && std::abs(v - w) > tolerance * std::max(std::abs(v), std::abs(w)))
          note(ErrorCode::AsymmetricEntry, {i, j});
        if (v == 0) note(ErrorCode::ZeroDistance, {i, j});
      }
    }
  }
  if (!finite) return found;

  // Upper-triangle values are authoritative once symmetry holds.
  auto d = [&](std::size_t a, std::size_t b) { return a < b ? matrix[a][b] : matrix[b][a]; };
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = i + 1; j < k; ++j)
      for (std::size_t m = 0; m < k; ++m) {
        if (m == i || m == j) continue;
        if (d(i, j) > (d(i, m) + d(m, j)) * (1 + tolerance)) {
          note(ErrorCode::TriangleViolation, {i, j, m});
          return found;
        }
      }
  return found;
}

/// Validates a square distance matrix and builds the space. Throws
/// MetricError listing every violated axiom. Empty `labels` means 0..k-1.
inline FiniteMetricSpace validate_metric(const std::vector<std::vector<double>>& matrix,
                                         std::vector<std::string> labels = {},
                                         double tolerance = kDefaultTolerance) {
  if (!(tolerance >= 0)) throw Error(ErrorCode::BadParameter, "tolerance must be nonnegative");
  const std::size_t k = matrix.size();
  if (labels.empty()) labels = default_labels(k);
  auto violations = check_metric(matrix, labels.size(), tolerance);
  if (!violations.empty()) throw MetricError(std::move(violations));
  std::vector<double> dist(k * k);
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < k; ++j) dist[i * k + j] = i <= j ? matrix[i][j] : matrix[j][i];
  return FiniteMetricSpace::assume_valid(std::move(labels), std::move(dist), tolerance);
}

// diam of a point set; 0 for empty and singleton sets.
inline double diameter(const FiniteMetricSpace& x, std::span<const std::size_t> s) {
  double best = 0;
  for (std::size_t a = 0; a < s.size(); ++a)
    for (std::size_t b = a + 1; b < s.size(); ++b) best = std::max(best, x(s[a], s[b]));
  return best;
}

inline double diameter(const FiniteMetricSpace& x) {
  return x.empty() ? 0.0 : *std::max_element(x.distances().begin(), x.distances().end());
}

// dist(A, B) = min over a in A, b in B. Both sets must be non-empty.
inline double set_distance(const FiniteMetricSpace& x, std::span<const std::size_t> a,
                           std::span<const std::size_t> b) {
  if (a.empty() || b.empty()) throw Error(ErrorCode::EmptyArgument, "dist() of an empty set");
  double best = std::numeric_limits<double>::infinity();
  for (auto i : a)
    for (auto j : b) best = std::min(best, x(i, j));
  return best;
}

struct TripleVerdict {
  bool holds = true;
  std::optional<std::array<std::size_t, 3>> witness;  // (x, y, z) with d(x,y) too large
};

/// d(x,y) <= max{d(x,z), d(z,y)} for all triples, up to relative `tolerance`.
inline TripleVerdict check_ultrametric(const FiniteMetricSpace& x, double tolerance) {
  const std::size_t k = x.size();
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = i + 1; j < k; ++j)
      for (std::size_t m = 0; m < k; ++m) {
        if (m == i || m == j) continue;
        if (x(i, j) > std::max(x(i, m), x(m, j)) * (1 + tolerance))
          return {false, std::array<std::size_t, 3>{i, j, m}};
      }
  return {};
}

inline TripleVerdict check_ultrametric(const FiniteMetricSpace& x) {
  return check_ultrametric(x, x.tolerance());
}

struct LsExponent {
  double value = std::numeric_limits<double>::infinity();  // +inf iff ultrametric
  bool capped = false;  // some triple needs s above the search ceiling
  std::optional<std::array<std::size_t, 3>> witness;  // triple attaining the minimum
};

namespace detail {

inline constexpr double kLsCeiling = 64.0;
inline constexpr double kLsPrecision = 1e-10;

// Solves (a/c)^s + (b/c)^s = 1 for s in [1, kLsCeiling], c > max(a, b).
inline double critical_exponent(double a, double b, double c) {
  const double la = std::log(a / c);
  const double lb = std::log(b / c);
  auto excess = [&](double s) { return std::exp(s * la) + std::exp(s * lb) - 1.0; };
  if (excess(1.0) <= 0) return 1.0;
  if (excess(kLsCeiling) > 0) return kLsCeiling;
  double lo = 1.0, hi = kLsCeiling;
  while (hi - lo > kLsPrecision) {
    const double mid = 0.5 * (lo + hi);
    (excess(mid) > 0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace detail

/// Largest s such that d(x,y) <= (d(x,z)^s + d(z,y)^s)^(1/s) on every triple.
/// Values above 64 are reported as 64 with `capped` set, unless the space is
/// ultrametric, in which case the exponent is infinite.
inline LsExponent ls_metric_exponent(const FiniteMetricSpace& x) {
  if (x.size() < 2) throw Error(ErrorCode::TooSmall, "L^s exponent needs at least 2 points");
  LsExponent out;
  if (check_ultrametric(x).holds) return out;
  const double tol = x.tolerance();
  for (std::size_t i = 0; i < x.size(); ++i)
    for (std::size_t j = i + 1; j < x.size(); ++j)
      for (std::size_t m = 0; m < x.size(); ++m) {
        if (m == i || m == j) continue;
        const double a = x(i, m), b = x(m, j), c = x(i, j);
        if (c <= std::max(a, b) * (1 + tol)) continue;
        const double s = detail::critical_exponent(a, b, c);
        if (s < out.value) {
          out.value = s;
          out.witness = std::array<std::size_t, 3>{i, j, m};
        }
      }
  out.capped = out.value >= detail::kLsCeiling;
  return out;
}

/// (X, d^alpha). For alpha > 1 the result is re-validated and a MetricError
/// with the violated triangle is thrown if d^alpha is not a metric.
inline FiniteMetricSpace snowflake_transform(const FiniteMetricSpace& x, double alpha) {
  if (!(alpha > 0) || !std::isfinite(alpha))
    throw Error(ErrorCode::BadParameter, "snowflake exponent must be positive");
  auto dist = x.distances();
  for (auto& v : dist) v = std::pow(v, alpha);
  if (alpha <= 1) return FiniteMetricSpace::assume_valid(x.labels(), std::move(dist), x.tolerance());
  const std::size_t k = x.size();
  std::vector<std::vector<double>> m(k);
  for (std::size_t i = 0; i < k; ++i) m[i].assign(dist.begin() + i * k, dist.begin() + (i + 1) * k);
  return validate_metric(m, x.labels(), x.tolerance());
}

struct MstEdge {
  std::size_t u = 0;
  std::size_t v = 0;
  double weight = 0;
};

/// Prim's algorithm on the complete graph over `s` (point indices of x).
/// Deterministic: ties go to the lowest position in `s`.
inline std::vector<MstEdge> minimum_spanning_tree(const FiniteMetricSpace& x,
                                                  std::span<const std::size_t> s) {
  std::vector<MstEdge> edges;
  if (s.size() < 2) return edges;
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> key(s.size(), inf);
  std::vector<std::size_t> parent(s.size(), 0);
  std::vector<char> in_tree(s.size(), 0);
  key[0] = 0;
  for (std::size_t step = 0; step < s.size(); ++step) {
    std::size_t best = s.size();
    for (std::size_t a = 0; a < s.size(); ++a)
      if (!in_tree[a] && (best == s.size() || key[a] < key[best])) best = a;
    in_tree[best] = 1;
    if (step > 0) edges.push_back({s[parent[best]], s[best], key[best]});
    for (std::size_t a = 0; a < s.size(); ++a) {
      if (in_tree[a]) continue;
      const double w = x(s[best], s[a]);
      if (w < key[a]) {
        key[a] = w;
        parent[a] = best;
      }
    }
  }
  return edges;
}

// One agglomeration step of single linkage; cluster ids below x.size() are
// leaves, id x.size()+t is the cluster created by merge t.
struct Merge {
  std::size_t left = 0;
  std::size_t right = 0;
  double height = 0;
  PointSet members;  // sorted
};

/// Single-linkage dendrogram (Kruskal order over the minimum spanning tree).
inline std::vector<Merge> single_linkage(const FiniteMetricSpace& x) {
  const std::size_t k = x.size();
  PointSet all(k);
  std::iota(all.begin(), all.end(), std::size_t{0});
  auto edges = minimum_spanning_tree(x, all);
  std::stable_sort(edges.begin(), edges.end(),
                   [](const MstEdge& a, const MstEdge& b) { return a.weight < b.weight; });

  std::vector<std::size_t> root(k);  // union-find over points
  std::iota(root.begin(), root.end(), std::size_t{0});
  std::vector<std::size_t> cluster_of(k);  // representative -> cluster id
  std::iota(cluster_of.begin(), cluster_of.end(), std::size_t{0});
  auto find = [&](std::size_t a) {
    while (root[a] != a) a = root[a] = root[root[a]];
    return a;
  };
  std::vector<PointSet> members(k);
  for (std::size_t i = 0; i < k; ++i) members[i] = {i};

  std::vector<Merge> merges;
  for (const auto& e : edges) {
    const std::size_t ru = find(e.u), rv = find(e.v);
    Merge m;
    m.left = cluster_of[ru];
    m.right = cluster_of[rv];
    m.height = e.weight;
    const PointSet& a = m.left < k ? members[m.left] : merges[m.left - k].members;
    const PointSet& b = m.right < k ? members[m.right] : merges[m.right - k].members;
    std::merge(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(m.members));
    root[rv] = ru;
    cluster_of[ru] = k + merges.size();
    merges.push_back(std::move(m));
  }
  return merges;
}

inline const PointSet& cluster_members(const std::vector<Merge>& merges, std::size_t id,
                                       std::size_t leaves, PointSet& scratch) {
  if (id >= leaves) return merges[id - leaves].members;
  scratch = {id};
  return scratch;
}

struct SubdominantResult {
  FiniteMetricSpace ultrametric;
  double distortion = 1;                  // max d/rho over distinct pairs
  std::array<std::size_t, 2> witness{};  // pair attaining the distortion
};

/// Minimax-path (single-linkage) metric rho <= d, the largest ultrametric
/// below d, and the distortion max d/rho.
inline SubdominantResult subdominant_ultrametric(const FiniteMetricSpace& x) {
  const std::size_t k = x.size();
  std::vector<double> rho(k * k, 0.0);
  const auto merges = single_linkage(x);
  PointSet sa, sb;
  for (const auto& m : merges) {
    const auto& a = cluster_members(merges, m.left, k, sa);
    const auto& b = cluster_members(merges, m.right, k, sb);
    for (auto i : a)
      for (auto j : b) rho[i * k + j] = rho[j * k + i] = m.height;
  }
  SubdominantResult out;
  out.ultrametric = FiniteMetricSpace::assume_valid(x.labels(), std::move(rho), x.tolerance());
  out.distortion = 0;
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = i + 1; j < k; ++j) {
      const double r = x(i, j) / out.ultrametric(i, j);
      if (r > out.distortion) {
        out.distortion = r;
        out.witness = {i, j};
      }
    }
  out.distortion = std::max(out.distortion, 1.0);
  return out;
}

struct Chain {
  std::vector<std::size_t> points;
  double epsilon = 0;
};

/// Breadth-first search in the strict threshold graph {d < epsilon}; returns a
/// chain from a to b (fewest steps, lowest indices first) or nullopt.
inline std::optional<Chain> find_chain(const FiniteMetricSpace& x, std::size_t a, std::size_t b,
                                       double epsilon) {
  if (a >= x.size() || b >= x.size()) throw Error(ErrorCode::OutOfRange, "chain endpoint", {a, b});
  if (!(epsilon > 0)) throw Error(ErrorCode::BadParameter, "epsilon must be positive");
  constexpr auto none = std::numeric_limits<std::size_t>::max();
  std::vector<std::size_t> prev(x.size(), none);
  std::deque<std::size_t> queue{a};
  prev[a] = a;
  while (!queue.empty() && prev[b] == none) {
    const std::size_t u = queue.front();
    queue.pop_front();
    for (std::size_t v = 0; v < x.size(); ++v)
      if (prev[v] == none && x(u, v) < epsilon) {
        prev[v] = u;
        queue.push_back(v);
      }
  }
  if (prev[b] == none) return std::nullopt;
  Chain chain{{b}, epsilon};
  for (std::size_t v = b; v != a; v = prev[v]) chain.points.push_back(prev[v]);
  std::reverse(chain.points.begin(), chain.points.end());
  return chain;
}

}  // namespace cotypelab
