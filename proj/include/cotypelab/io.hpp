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

#include <charconv>
#include <cstddef>
#include <fstream>
#include <iomanip>
#include <optional>
#include <sstream>
#include <string>
#include <system_error>
#include <vector>

#include <json.hpp>

#include "cotypelab/cotype.hpp"
#include "cotypelab/error.hpp"
#include "cotypelab/metric_space.hpp"
#include "cotypelab/separation.hpp"
#include "cotypelab/torus.hpp"
#include "cotypelab/transfer.hpp"

namespace cotypelab::io {

using json = nlohmann::ordered_json;

// Shortest text that parses back to the same double.
inline std::string format_double(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc{}) throw Error(ErrorCode::ParseError, "cannot format number");
  return std::string(buf, end);
}

inline double parse_double(std::string_view text) {
  while (!text.empty() && (text.front() == ' ' || text.front() == '\t')) text.remove_prefix(1);
  while (!text.empty() && (text.back() == ' ' || text.back() == '\t' || text.back() == '\r')) text.remove_suffix(1);
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  double v = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size())
    throw Error(ErrorCode::ParseError, "not a number: '" + std::string(text) + "'");
  return v;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::ParseError, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::ParseError, "cannot write " + path);
  out << text;
}

inline json parse_json(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, e.what());
  }
}

template <typename T, typename F>
T guarded(F&& body) {
  try {
    return body();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, e.what());
  }
}

// ---- spaces

inline json space_to_json(const FiniteMetricSpace& x) {
  json j;
  j["labels"] = x.labels();
  j["matrix"] = x.matrix();
  return j;
}

inline FiniteMetricSpace space_from_json(const json& j, double tolerance = kDefaultTolerance) {
  auto [labels, matrix] = guarded<std::pair<std::vector<std::string>, std::vector<std::vector<double>>>>([&] {
    if (!j.is_object() || !j.contains("matrix")) throw Error(ErrorCode::ParseError, "space needs a \"matrix\"");
    std::vector<std::string> labels;
    if (j.contains("labels")) labels = j.at("labels").get<std::vector<std::string>>();
    return std::pair{labels, j.at("matrix").get<std::vector<std::vector<double>>>()};
  });
  if (!labels.empty() && labels.size() != matrix.size())
    throw Error(ErrorCode::LabelMismatch, "label count differs from matrix size", {labels.size(), matrix.size()});
  return validate_metric(matrix, std::move(labels), tolerance);
}

namespace detail {

inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields(1);
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        fields.back() += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        fields.back() += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.emplace_back();
    } else if (c != '\r') {
      fields.back() += c;
    }
  }
  if (quoted) throw Error(ErrorCode::ParseError, "unterminated quote in CSV");
  return fields;
}

}  // namespace detail

inline std::string space_to_csv(const FiniteMetricSpace& x) {
  std::string out;
  for (std::size_t i = 0; i < x.size(); ++i) out += (i ? "," : "") + detail::csv_field(x.labels()[i]);
  out += '\n';
  for (std::size_t i = 0; i < x.size(); ++i) {
    for (std::size_t j = 0; j < x.size(); ++j) out += (j ? "," : "") + format_double(x(i, j));
    out += '\n';
  }
  return out;
}

inline FiniteMetricSpace space_from_csv(const std::string& text, double tolerance = kDefaultTolerance) {
  std::istringstream in(text);
  std::string line;
  std::vector<std::string> labels;
  std::vector<std::vector<double>> matrix;
  bool header = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto fields = detail::split_csv_line(line);
    if (header) {
      labels = std::move(fields);
      header = false;
      continue;
    }
    std::vector<double> row;
    for (const auto& f : fields) row.push_back(parse_double(f));
    matrix.push_back(std::move(row));
  }
  if (header) throw Error(ErrorCode::ParseError, "CSV has no header row");
  if (labels.size() != matrix.size())
    throw Error(ErrorCode::LabelMismatch, "label count differs from row count", {labels.size(), matrix.size()});
  return validate_metric(matrix, std::move(labels), tolerance);
}

inline bool is_csv_path(const std::string& path) {
  return path.size() >= 4 && path.compare(path.size() - 4, 4, ".csv") == 0;
}

inline FiniteMetricSpace read_space(const std::string& path, double tolerance = kDefaultTolerance) {
  const auto text = read_file(path);
  return is_csv_path(path) ? space_from_csv(text, tolerance) : space_from_json(parse_json(text), tolerance);
}

inline void write_space(const FiniteMetricSpace& x, const std::string& path) {
  write_file(path, is_csv_path(path) ? space_to_csv(x) : space_to_json(x).dump(2) + "\n");
}

// ---- torus functions and subsets

inline json function_to_json(const TorusFunction& f) {
  json j;
  j["n"] = f.n;
  j["m"] = f.m;
  j["values"] = f.values;
  return j;
}

inline TorusFunction function_from_json(const json& j) {
  auto f = guarded<TorusFunction>([&] {
    return TorusFunction{j.at("n").get<std::size_t>(), j.at("m").get<std::size_t>(),
                         j.at("values").get<std::vector<std::size_t>>()};
  });
  const TorusShape shape = f.shape();
  if (f.values.size() != shape.vertex_count())
    throw Error(ErrorCode::DimensionMismatch, "function length differs from m^n", {f.values.size(), shape.vertex_count()});
  return f;
}

inline json subset_to_json(const TorusSubset& a) {
  json j;
  j["n"] = a.shape().n();
  j["m"] = a.shape().m();
  j["indices"] = a.indices();
  return j;
}

inline TorusSubset subset_from_json(const json& j) {
  return guarded<TorusSubset>([&] {
    return TorusSubset::from_indices(TorusShape(j.at("n").get<std::size_t>(), j.at("m").get<std::size_t>()),
                                     j.at("indices").get<std::vector<std::size_t>>());
  });
}

// ---- maps

// Owning counterpart of PointMap, as read from disk.
struct StoredMap {
  FiniteMetricSpace source;
  FiniteMetricSpace target;
  std::vector<std::size_t> assignment;

  PointMap view() const { return make_map(source, target, assignment); }
};

inline json map_to_json(const PointMap& map) {
  json j;
  j["source"] = space_to_json(*map.source);
  j["target"] = space_to_json(*map.target);
  j["assignment"] = map.assignment;
  return j;
}

// "source"/"target" may be inline spaces or paths (relative to `base_dir`).
inline StoredMap map_from_json(const json& j, const std::string& base_dir = "",
                               double tolerance = kDefaultTolerance) {
  auto load = [&](const char* key) {
    const auto& v = guarded<const json&>([&]() -> const json& { return j.at(key); });
    if (v.is_string()) {
      auto path = v.get<std::string>();
      if (!base_dir.empty() && !path.empty() && path.front() != '/') path = base_dir + "/" + path;
      return read_space(path, tolerance);
    }
    return space_from_json(v, tolerance);
  };
  StoredMap out{load("source"), load("target"), {}};
  out.assignment = guarded<std::vector<std::size_t>>([&] { return j.at("assignment").get<std::vector<std::size_t>>(); });
  make_map(out.source, out.target, out.assignment);
  return out;
}

// ---- trees

namespace detail {

inline json tree_node_to_json(const SeparatedTreeStructure& t, std::size_t node) {
  const auto& n = t.nodes[node];
  json j;
  j["address"] = n.address;
  j["points"] = n.points;
  json children = json::array();
  if (n.children)
    for (auto c : *n.children) children.push_back(tree_node_to_json(t, c));
  j["children"] = std::move(children);
  return j;
}

}  // namespace detail

inline json tree_to_json(const SeparatedTreeStructure& t) {
  json j;
  j["C"] = t.c;
  j["root"] = detail::tree_node_to_json(t, 0);
  return j;
}

// Structure only; run validate_tree_structure for the semantic checks. Nodes
// are numbered breadth-first, as build_tree_structure numbers them.
inline SeparatedTreeStructure tree_from_json(const json& j) {
  return guarded<SeparatedTreeStructure>([&] {
    SeparatedTreeStructure t;
    t.c = j.at("C").get<double>();
    auto read = [&](const json& node) {
      t.nodes.push_back({node.at("address").get<std::string>(), node.at("points").get<PointSet>(), std::nullopt});
    };
    std::vector<const json*> pending{&j.at("root")};
    read(*pending.front());
    for (std::size_t at = 0; at < pending.size(); ++at) {
      const auto& children = pending[at]->at("children");
      if (children.empty()) continue;
      if (children.size() != 2) throw Error(ErrorCode::ParseError, "tree nodes have zero or two children");
      const std::size_t first = t.nodes.size();
      for (const auto& c : children) {
        read(c);
        pending.push_back(&c);
      }
      t.nodes[at].children = std::array<std::size_t, 2>{first, first + 1};
    }
    return t;
  });
}

// ---- certificates

inline std::string certificate_csv(const Certificate& c) {
  std::string out = "level,subset_size,complement_size,diam,boundary,lhs_level,rhs_level,calc_lhs,calc_rhs,calc_ok\n";
  for (const auto& r : c.rows) {
    out += std::to_string(r.level) + "," + std::to_string(r.subset_size) + "," + std::to_string(r.complement_size) +
           "," + format_double(r.diam) + "," + std::to_string(r.boundary) + "," + format_double(r.lhs_level) + "," +
           format_double(r.rhs_level) + "," + format_double(r.calc_lhs) + "," + format_double(r.calc_rhs) + "," +
           (r.calc_ok ? "pass" : "fail") + "\n";
  }
  return out;
}

inline json certificate_to_json(const Certificate& c) {
  json j;
  j["C"] = c.c;
  j["q"] = c.q;
  j["n"] = c.n;
  j["m"] = c.m;
  j["required_m"] = c.required_m;
  j["scaling_too_small"] = c.scaling_too_small;
  j["lhs"] = c.lhs;
  j["rhs"] = c.rhs;
  j["lhs_level_sum"] = c.lhs_level_sum;
  j["rhs_level_sum"] = c.rhs_level_sum;
  j["lhs_estimate_ok"] = c.lhs_estimate_ok;
  j["rhs_estimate_ok"] = c.rhs_estimate_ok;
  j["calculation_ok"] = c.calculation_ok;
  j["inequality_ok"] = c.inequality_ok;
  json rows = json::array();
  for (const auto& r : c.rows) {
    json row;
    row["level"] = r.level;
    row["subset_size"] = r.subset_size;
    row["complement_size"] = r.complement_size;
    row["diam"] = r.diam;
    row["boundary"] = r.boundary;
    row["lhs_level"] = r.lhs_level;
    row["rhs_level"] = r.rhs_level;
    row["calc_lhs"] = r.calc_lhs;
    row["calc_rhs"] = r.calc_rhs;
    row["calc_ok"] = r.calc_ok;
    rows.push_back(std::move(row));
  }
  j["rows"] = std::move(rows);
  return j;
}

inline std::string certificate_table(const Certificate& c) {
  std::ostringstream os;
  os << std::setprecision(6);
  os << "level  |F|     |F'|    diam        |dF|    lhs_level     rhs_level     3^-n m^q|dF| >= 2n|F|\n";
  for (const auto& r : c.rows) {
    os << std::left << std::setw(7) << r.level << std::setw(8) << r.subset_size << std::setw(8) << r.complement_size
       << std::setw(12) << r.diam << std::setw(8) << r.boundary << std::setw(14) << r.lhs_level << std::setw(14)
       << r.rhs_level << r.calc_lhs << " >= " << r.calc_rhs << (r.calc_ok ? "  ok" : "  FAIL") << '\n';
  }
  os << "C = " << c.c << ", m = " << c.m << " (threshold " << c.required_m << ")"
     << (c.scaling_too_small ? "  [scaling too small]" : "") << '\n';
  os << "lhs = " << c.lhs << " <= " << c.lhs_level_sum << (c.lhs_estimate_ok ? "  ok" : "  FAIL") << '\n';
  os << "C^q m^q rhs = " << std::pow(c.c, c.q) * std::pow(static_cast<double>(c.m), c.q) * c.rhs
     << " >= " << c.rhs_level_sum << (c.rhs_estimate_ok ? "  ok" : "  FAIL") << '\n';
  os << "verdict: " << (c.passed() ? "pass" : "fail") << '\n';
  return os.str();
}

}  // namespace cotypelab::io
