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

#include <bit>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "cotypelab/error.hpp"
#include "cotypelab/metric_space.hpp"

namespace cotypelab {

enum class GeneratorKind { CantorLevel, Dyadic, Cycle, Hypercube, RandomUltrametric, RandomEuclidean };

struct GeneratorSpec {
  GeneratorKind kind = GeneratorKind::Cycle;
  std::size_t size = 1;  // level k, cycle length m, cube dimension n, or point count
  std::size_t dim = 2;   // random-euclidean only
  std::uint64_t seed = 0;

  bool operator==(const GeneratorSpec&) const = default;
};

inline std::string_view to_string(GeneratorKind kind) {
  switch (kind) {
    case GeneratorKind::CantorLevel: return "cantor-level";
    case GeneratorKind::Dyadic: return "dyadic";
    case GeneratorKind::Cycle: return "cycle";
    case GeneratorKind::Hypercube: return "hypercube";
    case GeneratorKind::RandomUltrametric: return "random-ultrametric";
    case GeneratorKind::RandomEuclidean: return "random-euclidean";
  }
  return "unknown";
}

inline bool is_randomized(GeneratorKind kind) {
  return kind == GeneratorKind::RandomUltrametric || kind == GeneratorKind::RandomEuclidean;
}

// Inclusive bounds on GeneratorSpec::size per kind.
inline std::pair<std::size_t, std::size_t> generator_size_range(GeneratorKind kind) {
  switch (kind) {
    case GeneratorKind::CantorLevel: return {0, 8};
    case GeneratorKind::Dyadic: return {0, 60};
    case GeneratorKind::Cycle: return {1, 512};
    case GeneratorKind::Hypercube: return {0, 9};
    case GeneratorKind::RandomUltrametric: return {1, 512};
    case GeneratorKind::RandomEuclidean: return {1, 512};
  }
  return {0, 0};
}

/// Parses "kind=N[,key=value...]", e.g. "random-euclidean=10,dim=3,seed=4".
inline GeneratorSpec parse_generator_spec(const std::string& text) {
  auto fail = [&](const std::string& why) -> GeneratorSpec {
    throw Error(ErrorCode::BadParameter, "generator '" + text + "': " + why);
  };
  GeneratorSpec spec;
  bool have_kind = false;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t end = std::min(text.find(',', start), text.size());
    const std::string item = text.substr(start, end - start);
    const std::size_t eq = item.find('=');
    if (eq == std::string::npos) return fail("expected key=value in '" + item + "'");
    const std::string key = item.substr(0, eq);
    std::uint64_t value = 0;
    try {
      std::size_t used = 0;
      value = std::stoull(item.substr(eq + 1), &used);
      if (used != item.size() - eq - 1) return fail("bad integer in '" + item + "'");
    } catch (const std::logic_error&) {
      return fail("bad integer in '" + item + "'");
    }
    if (!have_kind) {
      const GeneratorKind kinds[] = {GeneratorKind::CantorLevel, GeneratorKind::Dyadic,
                                     GeneratorKind::Cycle, GeneratorKind::Hypercube,
                                     GeneratorKind::RandomUltrametric,
                                     GeneratorKind::RandomEuclidean};
      bool known = false;
      for (auto k : kinds)
        if (key == to_string(k)) {
          spec.kind = k;
          known = true;
        }
      if (!known) return fail("unknown kind '" + key + "'");
      spec.size = value;
      have_kind = true;
    } else if (key == "seed") {
      spec.seed = value;
    } else if (key == "dim") {
      spec.dim = value;
    } else {
      return fail("unknown parameter '" + key + "'");
    }
    start = end + 1;
  }
  return spec;
}

inline std::string format_generator_spec(const GeneratorSpec& spec) {
  std::string s = std::string(to_string(spec.kind)) + "=" + std::to_string(spec.size);
  if (spec.kind == GeneratorKind::RandomEuclidean) s += ",dim=" + std::to_string(spec.dim);
  if (is_randomized(spec.kind)) s += ",seed=" + std::to_string(spec.seed);
  return s;
}

namespace detail {

inline FiniteMetricSpace from_function(std::size_t k, std::vector<std::string> labels,
                                       auto&& distance) {
  std::vector<double> dist(k * k, 0.0);
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = i + 1; j < k; ++j) dist[i * k + j] = dist[j * k + i] = distance(i, j);
  return FiniteMetricSpace::assume_valid(std::move(labels), std::move(dist));
}

inline std::string bits(std::size_t value, std::size_t width) {
  std::string s(width, '0');
  for (std::size_t b = 0; b < width; ++b)
    if (value >> (width - 1 - b) & 1) s[b] = '1';
  return s;
}

}  // namespace detail

/// Builds one of the standard example spaces. Deterministic in (spec, seed).
/// Cantor, dyadic, cycle, hypercube and random-ultrametric distances are
/// exact (integers, powers of two, or integer differences over 3^k).
inline FiniteMetricSpace generate(const GeneratorSpec& spec) {
  const auto [lo, hi] = generator_size_range(spec.kind);
  if (spec.size < lo || spec.size > hi)
    throw Error(ErrorCode::BadParameter, std::string(to_string(spec.kind)) + " size must be in [" +
                                             std::to_string(lo) + ", " + std::to_string(hi) + "]");
  const std::size_t n = spec.size;
  switch (spec.kind) {
    case GeneratorKind::CantorLevel: {
      // Left endpoints sum_i a_i * 2 * 3^(k-i) / 3^k for a in {0,1}^k.
      const std::size_t k = std::size_t{1} << n;
      const double scale = std::pow(3.0, static_cast<double>(n));
      std::vector<std::int64_t> numer(k, 0);
      std::vector<std::string> labels(k);
      for (std::size_t a = 0; a < k; ++a) {
        std::int64_t v = 0;
        for (std::size_t i = 0; i < n; ++i) v = 3 * v + 2 * static_cast<std::int64_t>(a >> (n - 1 - i) & 1);
        numer[a] = v;
        labels[a] = "c" + detail::bits(a, n);
      }
      return detail::from_function(k, std::move(labels), [&](std::size_t i, std::size_t j) {
        return static_cast<double>(std::llabs(numer[i] - numer[j])) / scale;
      });
    }
    case GeneratorKind::Dyadic: {
      std::vector<std::string> labels(n + 1);
      for (std::size_t i = 0; i <= n; ++i) labels[i] = "2^-" + std::to_string(i);
      return detail::from_function(n + 1, std::move(labels), [](std::size_t i, std::size_t j) {
        return std::ldexp(1.0, -static_cast<int>(i)) - std::ldexp(1.0, -static_cast<int>(j));
      });
    }
    case GeneratorKind::Cycle:
      return detail::from_function(n, default_labels(n), [n](std::size_t i, std::size_t j) {
        const std::size_t gap = j - i;
        return static_cast<double>(std::min(gap, n - gap));
      });
    case GeneratorKind::Hypercube: {
      const std::size_t k = std::size_t{1} << n;
      std::vector<std::string> labels(k);
      for (std::size_t a = 0; a < k; ++a) labels[a] = n ? detail::bits(a, n) : "e";
      return detail::from_function(k, std::move(labels), [](std::size_t i, std::size_t j) {
        return static_cast<double>(std::popcount(i ^ j));
      });
    }
    case GeneratorKind::RandomUltrametric: {
      // Random agglomeration; merge t happens at height h_t with h strictly
      // increasing, so heights strictly decrease from the root down.
      std::mt19937_64 rng(spec.seed);
      std::vector<PointSet> clusters(n);
      for (std::size_t i = 0; i < n; ++i) clusters[i] = {i};
      std::vector<double> dist(n * n, 0.0);
      double height = 0;
      std::uniform_int_distribution<int> step(1, 4);
      while (clusters.size() > 1) {
        std::uniform_int_distribution<std::size_t> pick(0, clusters.size() - 1);
        std::size_t a = pick(rng), b = pick(rng);
        while (b == a) b = pick(rng);
        if (a > b) std::swap(a, b);
        height += step(rng);
        for (auto i : clusters[a])
          for (auto j : clusters[b]) dist[i * n + j] = dist[j * n + i] = height;
        clusters[a].insert(clusters[a].end(), clusters[b].begin(), clusters[b].end());
        clusters.erase(clusters.begin() + static_cast<std::ptrdiff_t>(b));
      }
      return FiniteMetricSpace::assume_valid(default_labels(n), std::move(dist));
    }
    case GeneratorKind::RandomEuclidean: {
      if (spec.dim < 1 || spec.dim > 16)
        throw Error(ErrorCode::BadParameter, "random-euclidean dim must be in [1, 16]");
      std::mt19937_64 rng(spec.seed);
      std::uniform_real_distribution<double> unit(0.0, 1.0);
      std::vector<std::vector<double>> pts(n, std::vector<double>(spec.dim));
      for (auto& p : pts)
        for (auto& c : p) c = unit(rng);
      return detail::from_function(n, default_labels(n), [&](std::size_t i, std::size_t j) {
        double s = 0;
        for (std::size_t c = 0; c < spec.dim; ++c) s += (pts[i][c] - pts[j][c]) * (pts[i][c] - pts[j][c]);
        return std::sqrt(s);
      });
    }
  }
  throw Error(ErrorCode::BadParameter, "unknown generator");
}

}  // namespace cotypelab
