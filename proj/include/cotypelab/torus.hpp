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
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string_view>
#include <vector>

#include "cotypelab/error.hpp"
#include "cotypelab/parallel.hpp"

namespace cotypelab {

// Graphs on Z_m^n: L joins half-period shifts along one axis, R joins all
// offsets in {-1,0,1}^n \ {0} (the l-infinity torus), T joins unit steps
// along one axis (the l-1 torus).
enum class TorusGraph { L, R, T };

inline std::string_view to_string(TorusGraph g) {
  switch (g) {
    case TorusGraph::L: return "L";
    case TorusGraph::R: return "R";
    case TorusGraph::T: return "T";
  }
  return "?";
}

inline constexpr std::size_t kMaxTorusVertices = std::size_t{1} << 24;

/// Z_m^n with m even. Vertices are numbered by mixed radix with coordinate 0
/// least significant.
class TorusShape {
 public:
  TorusShape(std::size_t n, std::size_t m) : n_(n), m_(m) {
    if (n < 1) throw Error(ErrorCode::BadParameter, "torus dimension n must be >= 1");
    if (m < 2 || m % 2 != 0) throw Error(ErrorCode::BadParameter, "torus side m must be even and >= 2", {m});
    std::size_t v = 1;
    for (std::size_t j = 0; j < n; ++j) {
      if (v > kMaxTorusVertices / m) throw Error(ErrorCode::TooLarge, "m^n too large", {n, m});
      v *= m;
    }
    vertices_ = v;
  }

  std::size_t n() const noexcept { return n_; }
  std::size_t m() const noexcept { return m_; }
  std::size_t vertex_count() const noexcept { return vertices_; }

  std::vector<std::size_t> coords(std::size_t index) const {
    std::vector<std::size_t> c(n_);
    for (std::size_t j = 0; j < n_; ++j, index /= m_) c[j] = index % m_;
    return c;
  }

  std::size_t index(const std::vector<std::size_t>& coords) const {
    if (coords.size() != n_) throw Error(ErrorCode::DimensionMismatch, "coordinate vector length");
    std::size_t idx = 0;
    for (std::size_t j = n_; j-- > 0;) {
      if (coords[j] >= m_) throw Error(ErrorCode::OutOfRange, "coordinate out of range", {j, coords[j]});
      idx = idx * m_ + coords[j];
    }
    return idx;
  }

  // index + delta * e_j (mod m along axis j).
  std::size_t shift(std::size_t index, std::size_t j, std::ptrdiff_t delta) const noexcept {
    std::size_t stride = 1;
    for (std::size_t a = 0; a < j; ++a) stride *= m_;
    const std::size_t c = index / stride % m_;
    const auto mm = static_cast<std::ptrdiff_t>(m_);
    const std::size_t nc = static_cast<std::size_t>(((static_cast<std::ptrdiff_t>(c) + delta) % mm + mm) % mm);
    return index + (nc - c) * stride;  // unsigned wrap is intended
  }

  // index + offset (componentwise mod m).
  std::size_t translate(std::size_t index, const std::vector<std::ptrdiff_t>& offset) const {
    for (std::size_t j = 0; j < n_; ++j)
      if (offset[j] != 0) index = shift(index, j, offset[j]);
    return index;
  }

  bool operator==(const TorusShape&) const = default;

 private:
  std::size_t n_;
  std::size_t m_;
  std::size_t vertices_ = 0;
};

/// Neighbours of a vertex, duplicates collapsed (only possible when m = 2),
/// sorted by vertex index.
inline std::vector<std::size_t> neighbors(const TorusShape& shape, std::size_t v, TorusGraph kind) {
  std::vector<std::size_t> out;
  const std::size_t n = shape.n();
  switch (kind) {
    case TorusGraph::L:
      for (std::size_t j = 0; j < n; ++j)
        out.push_back(shape.shift(v, j, static_cast<std::ptrdiff_t>(shape.m() / 2)));
      break;
    case TorusGraph::T:
      for (std::size_t j = 0; j < n; ++j) {
        out.push_back(shape.shift(v, j, 1));
        out.push_back(shape.shift(v, j, -1));
      }
      break;
    case TorusGraph::R: {
      std::vector<std::ptrdiff_t> delta(n, -1);
      while (true) {
        if (std::any_of(delta.begin(), delta.end(), [](auto d) { return d != 0; }))
          out.push_back(shape.translate(v, delta));
        std::size_t j = 0;
        while (j < n && delta[j] == 1) delta[j++] = -1;
        if (j == n) break;
        ++delta[j];
      }
      break;
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

inline std::vector<std::vector<std::size_t>> neighbors(const TorusShape& shape,
                                                       const std::vector<std::size_t>& coords,
                                                       TorusGraph kind) {
  std::vector<std::vector<std::size_t>> out;
  for (auto v : neighbors(shape, shape.index(coords), kind)) out.push_back(shape.coords(v));
  return out;
}

/// A ⊆ Z_m^n as a membership vector.
class TorusSubset {
 public:
  explicit TorusSubset(TorusShape shape) : shape_(shape), bits_(shape.vertex_count(), false) {}

  static TorusSubset from_indices(TorusShape shape, const std::vector<std::size_t>& indices) {
    TorusSubset s(shape);
    for (auto i : indices) s.insert(i);
    return s;
  }

  // Bit v of `mask` selects vertex v; needs m^n <= 64.
  static TorusSubset from_mask(TorusShape shape, std::uint64_t mask) {
    if (shape.vertex_count() > 64) throw Error(ErrorCode::TooLarge, "mask form needs m^n <= 64");
    TorusSubset s(shape);
    for (std::size_t v = 0; v < shape.vertex_count(); ++v)
      if (mask >> v & 1) s.bits_[v] = true;
    return s;
  }

  const TorusShape& shape() const noexcept { return shape_; }
  bool contains(std::size_t v) const { return bits_.at(v); }
  void insert(std::size_t v) {
    if (v >= bits_.size()) throw Error(ErrorCode::OutOfRange, "vertex out of range", {v});
    bits_[v] = true;
  }
  void erase(std::size_t v) { bits_.at(v) = false; }
  std::size_t size() const { return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), true)); }

  std::vector<std::size_t> indices() const {
    std::vector<std::size_t> out;
    for (std::size_t v = 0; v < bits_.size(); ++v)
      if (bits_[v]) out.push_back(v);
    return out;
  }

  TorusSubset complement() const {
    TorusSubset c(shape_);
    for (std::size_t v = 0; v < bits_.size(); ++v) c.bits_[v] = !bits_[v];
    return c;
  }

  TorusSubset translated(const std::vector<std::ptrdiff_t>& offset) const {
    TorusSubset t(shape_);
    for (std::size_t v = 0; v < bits_.size(); ++v)
      if (bits_[v]) t.bits_[shape_.translate(v, offset)] = true;
    return t;
  }

  bool operator==(const TorusSubset&) const = default;

 private:
  TorusShape shape_;
  std::vector<bool> bits_;
};

struct TorusEdge {
  std::size_t inside = 0;
  std::size_t outside = 0;
};

/// Unordered edges of the chosen graph with exactly one endpoint in A.
inline std::vector<TorusEdge> boundary_edges(const TorusSubset& a, TorusGraph kind) {
  std::vector<TorusEdge> out;
  for (auto v : a.indices())
    for (auto w : neighbors(a.shape(), v, kind))
      if (!a.contains(w)) out.push_back({v, w});
  return out;
}

inline std::size_t edge_boundary(const TorusSubset& a, TorusGraph kind) {
  return boundary_edges(a, kind).size();
}

struct IsoperimetricBounds {
  double linfty = 0;       // 2 a^((n-1)/n)
  double bollobas_leader = 0;  // min_r 2 a^(1-1/r) r m^(n/r-1)
  std::size_t minimizing_r = 1;
  bool beyond_half = false;  // a > m^n / 2: the guarantees do not apply
};

/// Lower bounds on the edge boundary of a set of size a in Z_m^n. Both bounds
/// are taken to be 0 for the empty set.
inline IsoperimetricBounds isoperimetric_bounds(std::size_t a, std::size_t n, std::size_t m) {
  if (n < 1 || m < 2) throw Error(ErrorCode::BadParameter, "need n >= 1 and m >= 2");
  IsoperimetricBounds b;
  const double half = 0.5 * std::pow(static_cast<double>(m), static_cast<double>(n));
  b.beyond_half = static_cast<double>(a) > half;
  if (a == 0) return b;
  const double ad = static_cast<double>(a), nd = static_cast<double>(n), md = static_cast<double>(m);
  b.linfty = 2 * std::pow(ad, (nd - 1) / nd);
  b.bollobas_leader = std::numeric_limits<double>::infinity();
  for (std::size_t r = 1; r <= n; ++r) {
    const double rd = static_cast<double>(r);
    const double v = 2 * std::pow(ad, 1 - 1 / rd) * rd * std::pow(md, nd / rd - 1);
    if (v < b.bollobas_leader) {
      b.bollobas_leader = v;
      b.minimizing_r = r;
    }
  }
  return b;
}

struct MinBoundary {
  std::size_t min_count = 0;
  TorusSubset minimizer;
};

inline constexpr std::size_t kBruteForceVertexLimit = 16;

namespace detail {

inline std::uint64_t binomial(std::size_t n, std::size_t k) {
  if (k > n) return 0;
  std::uint64_t r = 1;
  for (std::size_t i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

// The rank-th k-subset of {0..v-1} in colexicographic order, which is the
// order of increasing bitmask value.
inline std::uint64_t unrank_colex(std::uint64_t rank, std::size_t k, std::size_t v) {
  std::uint64_t mask = 0;
  for (std::size_t i = k; i >= 1; --i) {
    std::size_t c = i - 1;
    while (c + 1 < v && binomial(c + 1, i) <= rank) ++c;
    rank -= binomial(c, i);
    mask |= std::uint64_t{1} << c;
    v = c;
  }
  return mask;
}

inline std::uint64_t next_combination(std::uint64_t x) {
  const std::uint64_t low = x & (~x + 1);
  const std::uint64_t ripple = x + low;
  return ripple | (((x ^ ripple) >> 2) / low);
}

}  // namespace detail

/// Exhaustive minimum of the edge boundary over all subsets of the given
/// size. The minimizer is the one with the lowest bitmask value.
inline MinBoundary brute_force_min_boundary(std::size_t n, std::size_t m, std::size_t size, TorusGraph kind,
                                            std::size_t vertex_limit = kBruteForceVertexLimit,
                                            unsigned threads = 1) {
  const TorusShape shape(n, m);
  const std::size_t v = shape.vertex_count();
  if (v > vertex_limit || v > 32) throw Error(ErrorCode::TooLarge, "exhaustive search limited to m^n <= " + std::to_string(std::min<std::size_t>(vertex_limit, 32)), {v});
  if (size > v) throw Error(ErrorCode::BadParameter, "subset size exceeds m^n", {size, v});
  if (size == 0) return {0, TorusSubset(shape)};

  std::vector<std::uint64_t> nbr(v, 0);
  for (std::size_t a = 0; a < v; ++a)
    for (auto b : neighbors(shape, a, kind)) nbr[a] |= std::uint64_t{1} << b;
  auto boundary = [&](std::uint64_t mask) {
    std::size_t count = 0;
    for (std::uint64_t rest = mask; rest; rest &= rest - 1)
      count += static_cast<std::size_t>(std::popcount(nbr[std::countr_zero(rest)] & ~mask));
    return count;
  };

  const std::uint64_t total = detail::binomial(v, size);
  struct Best {
    std::size_t count = std::numeric_limits<std::size_t>::max();
    std::uint64_t mask = 0;
  };
  threads = std::max(1u, threads);
  std::vector<Best> per_worker(threads);
  parallel_chunks(static_cast<std::size_t>(total), threads, [&](unsigned w, std::size_t begin, std::size_t end) {
    Best best;
    std::uint64_t mask = detail::unrank_colex(begin, size, v);
    for (std::size_t r = begin; r < end; ++r, mask = detail::next_combination(mask)) {
      const std::size_t c = boundary(mask);
      if (c < best.count) best = {c, mask};
    }
    per_worker[w] = best;
  });
  Best best;
  for (const auto& b : per_worker)
    if (b.count < best.count) best = b;
  return {best.count, TorusSubset::from_mask(shape, best.mask)};
}

}  // namespace cotypelab
