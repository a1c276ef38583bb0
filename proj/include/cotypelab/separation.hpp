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
#include <bit>
#include <cstdint>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "cotypelab/error.hpp"
#include "cotypelab/metric_space.hpp"
#include "cotypelab/parallel.hpp"

namespace cotypelab {

struct Bipartition {
  double value = 0;  // dist(part, rest)
  PointSet part;     // the chosen side A (child 0)
  PointSet rest;     // S \ A
};

namespace detail {

inline PointSet normalized(std::span<const std::size_t> s, std::size_t limit) {
  PointSet out(s.begin(), s.end());
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  for (auto p : out)
    if (p >= limit) throw Error(ErrorCode::OutOfRange, "point index out of range", {p});
  return out;
}

// Connected components of {d < threshold} on s, each sorted.
inline std::vector<PointSet> threshold_components(const FiniteMetricSpace& x, const PointSet& s,
                                                  double threshold) {
  std::vector<PointSet> comps;
  std::vector<char> seen(s.size(), 0);
  for (std::size_t start = 0; start < s.size(); ++start) {
    if (seen[start]) continue;
    std::vector<std::size_t> stack{start};
    seen[start] = 1;
    PointSet comp;
    while (!stack.empty()) {
      const std::size_t u = stack.back();
      stack.pop_back();
      comp.push_back(s[u]);
      for (std::size_t v = 0; v < s.size(); ++v)
        if (!seen[v] && x(s[u], s[v]) < threshold) {
          seen[v] = 1;
          stack.push_back(v);
        }
    }
    std::sort(comp.begin(), comp.end());
    comps.push_back(std::move(comp));
  }
  return comps;
}

}  // namespace detail

/// Maximum of dist(A, S \ A) over non-trivial bipartitions of S.
///
/// The maximum equals the heaviest edge w of a minimum spanning tree of S, and
/// the maximizing bipartitions are exactly those where A is a union of
/// components of {d < w}. Among them we return the smallest A, breaking
/// size ties by the lexicographically smallest index list.
inline Bipartition max_split_separation(const FiniteMetricSpace& x, std::span<const std::size_t> s) {
  const PointSet pts = detail::normalized(s, x.size());
  if (pts.size() < 2) throw Error(ErrorCode::TooSmall, "split needs at least 2 points");
  double w = 0;
  for (const auto& e : minimum_spanning_tree(x, pts)) w = std::max(w, e.weight);
  auto comps = detail::threshold_components(x, pts, w);
  auto best = std::min_element(comps.begin(), comps.end(), [](const PointSet& a, const PointSet& b) {
    return a.size() != b.size() ? a.size() < b.size() : a < b;
  });
  Bipartition out;
  out.value = w;
  out.part = *best;
  std::set_difference(pts.begin(), pts.end(), out.part.begin(), out.part.end(),
                      std::back_inserter(out.rest));
  return out;
}

enum class SeparationMode { Exact, Dendrogram };

inline std::string_view to_string(SeparationMode mode) {
  return mode == SeparationMode::Exact ? "exact" : "dendrogram";
}

struct SeparationReport {
  double c_sep = 1;
  PointSet witness_subset;
  SeparationMode mode = SeparationMode::Exact;
};

inline constexpr std::size_t kExactSeparationLimit = 15;

/// Optimal finite-separation constant max_S diam(S) / max_split(S).
///
/// Exact mode enumerates every subset with at least two points. Dendrogram
/// mode restricts S to single-linkage clusters, where max_split(S) is the
/// merge height; it is a lower bound on the exact value.
inline SeparationReport separation_constant(const FiniteMetricSpace& x, SeparationMode mode,
                                            std::size_t exact_limit = kExactSeparationLimit,
                                            unsigned threads = 1) {
  const std::size_t k = x.size();
  if (k < 2) throw Error(ErrorCode::TooSmall, "separation constant needs at least 2 points");
  SeparationReport report;
  report.mode = mode;

  if (mode == SeparationMode::Dendrogram) {
    const auto merges = single_linkage(x);
    std::vector<double> diam(merges.size());
    PointSet sa, sb;
    double best = 0;
    std::size_t best_at = 0;
    for (std::size_t t = 0; t < merges.size(); ++t) {
      const auto& m = merges[t];
      const auto& a = cluster_members(merges, m.left, k, sa);
      const auto& b = cluster_members(merges, m.right, k, sb);
      double d = std::max(m.left >= k ? diam[m.left - k] : 0.0, m.right >= k ? diam[m.right - k] : 0.0);
      for (auto i : a)
        for (auto j : b) d = std::max(d, x(i, j));
      diam[t] = d;
      const double ratio = d / m.height;
      if (ratio > best) {
        best = ratio;
        best_at = t;
      }
    }
    report.c_sep = best;
    report.witness_subset = merges[best_at].members;
    return report;
  }

  if (k > exact_limit || k > 30)
    throw Error(ErrorCode::TooLarge, "exact separation constant limited to " +
                                         std::to_string(std::min<std::size_t>(exact_limit, 30)) +
                                         " points",
                {k});
  const std::uint64_t total = std::uint64_t{1} << k;
  struct Best {
    double ratio = 0;
    std::uint64_t mask = 0;
  };
  threads = std::max(1u, threads);
  std::vector<Best> per_worker(threads);
  parallel_chunks(static_cast<std::size_t>(total), threads, [&](unsigned w, std::size_t begin, std::size_t end) {
    Best best;
    std::vector<std::size_t> pts;
    std::vector<double> key;
    std::vector<char> in_tree;
    for (std::uint64_t mask = begin; mask < end; ++mask) {
      if (std::popcount(mask) < 2) continue;
      pts.clear();
      for (std::size_t i = 0; i < k; ++i)
        if (mask >> i & 1) pts.push_back(i);
      const std::size_t s = pts.size();
      // Prim over the subset, tracking the heaviest tree edge and the diameter.
      key.assign(s, std::numeric_limits<double>::infinity());
      in_tree.assign(s, 0);
      key[0] = 0;
      double heaviest = 0, diam = 0;
      for (std::size_t step = 0; step < s; ++step) {
        std::size_t u = s;
        for (std::size_t a = 0; a < s; ++a)
          if (!in_tree[a] && (u == s || key[a] < key[u])) u = a;
        in_tree[u] = 1;
        heaviest = std::max(heaviest, key[u]);
        for (std::size_t a = 0; a < s; ++a) {
          const double d = x(pts[u], pts[a]);
          diam = std::max(diam, d);
          if (!in_tree[a] && d < key[a]) key[a] = d;
        }
      }
      const double ratio = diam / heaviest;
      if (ratio > best.ratio) best = {ratio, mask};
    }
    per_worker[w] = best;
  });
  Best best;
  // Chunks are ascending, so the first strict maximum has the smallest mask.
  for (const auto& b : per_worker)
    if (b.ratio > best.ratio) best = b;
  report.c_sep = best.ratio;
  for (std::size_t i = 0; i < k; ++i)
    if (best.mask >> i & 1) report.witness_subset.push_back(i);
  return report;
}

// Exact when the space is small enough, dendrogram otherwise.
inline SeparationReport separation_constant(const FiniteMetricSpace& x, unsigned threads = 1) {
  return separation_constant(
      x, x.size() <= kExactSeparationLimit ? SeparationMode::Exact : SeparationMode::Dendrogram,
      kExactSeparationLimit, threads);
}

struct TreeNode {
  std::string address;  // over {0,1}; "" is the root
  PointSet points;
  std::optional<std::array<std::size_t, 2>> children;  // node indices
};

/// Rooted binary tree of point subsets {A_alpha}; nodes[0] is the root.
struct SeparatedTreeStructure {
  double c = 1;
  std::vector<TreeNode> nodes;

  const TreeNode& root() const { return nodes.front(); }
  bool is_leaf(std::size_t node) const { return !nodes[node].children.has_value(); }
};

/// Recursive construction: each multi-point subset is split by
/// max_split_separation, which must reach diam/C. Throws NoValidSplit with the
/// offending subset as witness otherwise.
inline SeparatedTreeStructure build_tree_structure(const FiniteMetricSpace& x, double c) {
  if (!(c >= 1)) throw Error(ErrorCode::BadParameter, "separation constant must be >= 1");
  if (x.empty()) throw Error(ErrorCode::TooSmall, "tree structure needs at least one point");
  SeparatedTreeStructure tree;
  tree.c = c;
  PointSet all(x.size());
  std::iota(all.begin(), all.end(), std::size_t{0});
  tree.nodes.push_back({"", std::move(all), std::nullopt});
  for (std::size_t at = 0; at < tree.nodes.size(); ++at) {
    if (tree.nodes[at].points.size() < 2) continue;
    const PointSet pts = tree.nodes[at].points;
    auto split = max_split_separation(x, pts);
    const double diam = diameter(x, pts);
    if (diam > c * split.value * (1 + x.tolerance()))
      throw Error(ErrorCode::NoValidSplit,
                  "best split separates by " + std::to_string(split.value) + " < diam/C = " +
                      std::to_string(diam / c),
                  pts);
    const std::string address = tree.nodes[at].address;
    const std::size_t first = tree.nodes.size();
    tree.nodes.push_back({address + "0", std::move(split.part), std::nullopt});
    tree.nodes.push_back({address + "1", std::move(split.rest), std::nullopt});
    tree.nodes[at].children = std::array<std::size_t, 2>{first, first + 1};
  }
  return tree;
}

struct PropertyResult {
  bool ok = true;
  std::string detail;  // first violation, empty when ok
};

struct TreeValidation {
  PropertyResult structure;          // addresses and child links well formed
  PropertyResult root;               // A_root = X
  PropertyResult separation;         // distinct points lie in incomparable nodes
  PropertyResult partition;          // A_alpha = A_alpha0 u A_alpha1, disjoint
  PropertyResult nontrivial;         // |A| > 1 => both children non-empty
  PropertyResult gap;                // diam A <= C dist(A_alpha0, A_alpha1)
  PropertyResult earlier_branches;   // incomparable nodes: dist >= max diam / C

  bool all_ok() const {
    return structure.ok && root.ok && separation.ok && partition.ok && nontrivial.ok && gap.ok &&
           earlier_branches.ok;
  }
};

namespace detail {

inline bool is_ancestor(const std::string& a, const std::string& b) {
  return a.size() <= b.size() && b.compare(0, a.size(), a) == 0;
}

inline bool comparable(const std::string& a, const std::string& b) {
  return is_ancestor(a, b) || is_ancestor(b, a);
}

inline std::string show_address(const std::string& a) { return a.empty() ? "<root>" : a; }

inline void fail_once(PropertyResult& r, const std::string& detail) {
  if (r.ok) {
    r.ok = false;
    r.detail = detail;
  }
}

}  // namespace detail

/// Checks the five defining properties of a C-separated tree structure and
/// the separation of incomparable branches. Violations are reported, not
/// thrown; each property keeps its first violation.
inline TreeValidation validate_tree_structure(const FiniteMetricSpace& x, const SeparatedTreeStructure& t) {
  using detail::fail_once;
  using detail::show_address;
  TreeValidation v;
  const double tol = x.tolerance();
  if (t.nodes.empty()) {
    fail_once(v.structure, "tree has no nodes");
    fail_once(v.root, "missing root");
    return v;
  }
  if (!t.nodes[0].address.empty()) fail_once(v.structure, "first node is not the root address");
  std::vector<int> parents(t.nodes.size(), 0);
  for (std::size_t i = 0; i < t.nodes.size(); ++i) {
    const auto& node = t.nodes[i];
    for (auto p : node.points)
      if (p >= x.size()) fail_once(v.structure, "node " + show_address(node.address) + " has point " + std::to_string(p) + " outside X");
    if (!std::is_sorted(node.points.begin(), node.points.end()) ||
        std::adjacent_find(node.points.begin(), node.points.end()) != node.points.end())
      fail_once(v.structure, "node " + show_address(node.address) + " points not sorted/unique");
    if (!node.children) continue;
    for (int side = 0; side < 2; ++side) {
      const std::size_t c = (*node.children)[side];
      if (c >= t.nodes.size() || c == 0) {
        fail_once(v.structure, "node " + show_address(node.address) + " has a dangling child");
        continue;
      }
      ++parents[c];
      if (t.nodes[c].address != node.address + static_cast<char>('0' + side))
        fail_once(v.structure, "child address " + show_address(t.nodes[c].address) + " under " + show_address(node.address));
    }
  }
  for (std::size_t i = 1; i < t.nodes.size(); ++i)
    if (parents[i] != 1) fail_once(v.structure, "node " + show_address(t.nodes[i].address) + " reached " + std::to_string(parents[i]) + " times");
  if (!v.structure.ok) return v;

  PointSet all(x.size());
  std::iota(all.begin(), all.end(), std::size_t{0});
  if (t.root().points != all) fail_once(v.root, "root subset is not all of X");

  std::vector<double> diam(t.nodes.size());
  for (std::size_t i = 0; i < t.nodes.size(); ++i) diam[i] = diameter(x, t.nodes[i].points);

  for (std::size_t i = 0; i < t.nodes.size(); ++i) {
    const auto& node = t.nodes[i];
    const std::string where = "node " + show_address(node.address);
    if (!node.children) {
      if (node.points.size() > 1) fail_once(v.nontrivial, where + " has " + std::to_string(node.points.size()) + " points but no children");
      continue;
    }
    const auto& a = t.nodes[(*node.children)[0]].points;
    const auto& b = t.nodes[(*node.children)[1]].points;
    PointSet joined, common;
    std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(joined));
    std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(common));
    if (joined != node.points) fail_once(v.partition, where + " is not the union of its children");
    else if (!common.empty()) fail_once(v.partition, where + " children overlap at point " + std::to_string(common.front()));
    if (node.points.size() > 1) {
      if (a.empty() || b.empty()) {
        fail_once(v.nontrivial, where + " has an empty child");
      } else {
        const double gap = set_distance(x, a, b);
        if (diam[i] > t.c * gap * (1 + tol)) {
          std::ostringstream os;
          os << where << ": diam " << diam[i] << " > C * dist " << t.c * gap;
          fail_once(v.gap, os.str());
        }
      }
    }
  }

  // Distinct points must sit in some pair of incomparable nodes.
  std::vector<std::vector<std::size_t>> holding(x.size());
  for (std::size_t i = 0; i < t.nodes.size(); ++i)
    for (auto p : t.nodes[i].points)
      if (p < x.size()) holding[p].push_back(i);
  auto deepest = [&](std::size_t p) {
    std::size_t best = holding[p].front();
    for (auto i : holding[p])
      if (t.nodes[i].address.size() > t.nodes[best].address.size()) best = i;
    return best;
  };
  for (std::size_t p = 0; p < x.size() && v.separation.ok; ++p)
    for (std::size_t q = p + 1; q < x.size() && v.separation.ok; ++q) {
      if (holding[p].empty() || holding[q].empty()) {
        fail_once(v.separation, "point " + std::to_string(holding[p].empty() ? p : q) + " is in no node");
        break;
      }
      if (!detail::comparable(t.nodes[deepest(p)].address, t.nodes[deepest(q)].address)) continue;
      bool found = false;
      for (auto i : holding[p])
        for (auto j : holding[q])
          found = found || !detail::comparable(t.nodes[i].address, t.nodes[j].address);
      if (!found) fail_once(v.separation, "points " + std::to_string(p) + " and " + std::to_string(q) + " are never separated");
    }

  for (std::size_t i = 0; i < t.nodes.size() && v.earlier_branches.ok; ++i)
    for (std::size_t j = i + 1; j < t.nodes.size(); ++j) {
      const auto& a = t.nodes[i];
      const auto& b = t.nodes[j];
      if (a.points.empty() || b.points.empty() || detail::comparable(a.address, b.address)) continue;
      const double gap = set_distance(x, a.points, b.points);
      if (std::max(diam[i], diam[j]) > t.c * gap * (1 + tol)) {
        std::ostringstream os;
        os << "nodes " << show_address(a.address) << " and " << show_address(b.address) << ": dist " << gap
           << " < max diam / C = " << std::max(diam[i], diam[j]) / t.c;
        fail_once(v.earlier_branches, os.str());
        break;
      }
    }
  return v;
}

/// Graphviz rendering: one node per address, labeled with its subset and diam.
inline std::string tree_to_dot(const FiniteMetricSpace& x, const SeparatedTreeStructure& t) {
  std::ostringstream os;
  os << "digraph separated_tree {\n  node [shape=box];\n";
  auto id = [](const std::string& a) { return "n" + (a.empty() ? std::string("_") : a); };
  for (const auto& node : t.nodes) {
    os << "  " << id(node.address) << " [label=\"" << detail::show_address(node.address) << "\\n{";
    for (std::size_t i = 0; i < node.points.size(); ++i) os << (i ? "," : "") << x.labels()[node.points[i]];
    os << "}\\ndiam=" << diameter(x, node.points) << "\"];\n";
  }
  for (const auto& node : t.nodes)
    if (node.children)
      for (auto c : *node.children) os << "  " << id(node.address) << " -> " << id(t.nodes[c].address) << ";\n";
  os << "}\n";
  return os.str();
}

struct UnseparatedWitness {
  PointSet subset;        // S with no C-split
  std::size_t a = 0, b = 0;  // d(a,b) = diam S
  Chain chain;            // (diam S / C)-chain in S from a to b, as indices of X
};

/// For C below the separation constant, a subset S admitting no C-split and
/// an (diam S / C)-chain inside S joining a diametral pair. nullopt when
/// every subset has a C-split.
inline std::optional<UnseparatedWitness> unseparated_chain(const FiniteMetricSpace& x, double c) {
  if (!(c >= 1)) throw Error(ErrorCode::BadParameter, "C must be >= 1");
  if (x.size() < 2) return std::nullopt;
  const auto report = separation_constant(x);
  if (report.c_sep <= c) return std::nullopt;
  UnseparatedWitness w;
  w.subset = report.witness_subset;
  const auto sub = x.subspace(w.subset);
  double best = -1;
  std::size_t ia = 0, ib = 0;
  for (std::size_t i = 0; i < sub.size(); ++i)
    for (std::size_t j = i + 1; j < sub.size(); ++j)
      if (sub(i, j) > best) {
        best = sub(i, j);
        ia = i;
        ib = j;
      }
  auto chain = find_chain(sub, ia, ib, best / c);
  if (!chain) return std::nullopt;
  w.a = w.subset[ia];
  w.b = w.subset[ib];
  w.chain.epsilon = chain->epsilon;
  for (auto p : chain->points) w.chain.points.push_back(w.subset[p]);
  return w;
}

}  // namespace cotypelab
