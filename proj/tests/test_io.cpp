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

#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>

#include "cotypelab/generators.hpp"
#include "cotypelab/io.hpp"
#include "oracles.hpp"

namespace cl = cotypelab;
namespace io = cotypelab::io;

namespace {

cl::ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const cl::Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return cl::ErrorCode::BadParameter;
}

std::filesystem::path temp_dir() {
  auto dir = std::filesystem::temp_directory_path() / ("cotypelab_io_" + std::to_string(::getpid()));
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace

TEST(Numbers, ShortestRoundTrip) {
  for (double v : {0.0, 1.0, 0.1, 1.0 / 3, 2.0 / 9, 1e-300, 6.02e23, std::sqrt(2.0)}) {
    EXPECT_EQ(io::parse_double(io::format_double(v)), v);
  }
  EXPECT_EQ(io::format_double(0.5), "0.5");
  EXPECT_EQ(code_of([] { io::parse_double("1.5x"); }), cl::ErrorCode::ParseError);
  EXPECT_EQ(code_of([] { io::parse_double(""); }), cl::ErrorCode::ParseError);
}

TEST(SpaceIo, JsonRoundTrip) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto x = cl::generate({cl::GeneratorKind::RandomEuclidean, 7, 3, seed});
    const auto back = io::space_from_json(io::parse_json(io::space_to_json(x).dump()));
    EXPECT_EQ(back.matrix(), x.matrix());
    EXPECT_EQ(back.labels(), x.labels());
  }
}

TEST(SpaceIo, CsvRoundTripWithQuotedLabels) {
  const auto base = oracle::line({0, 1, 3});
  const auto x = cl::validate_metric(base.matrix(), {"plain", "with,comma", "say \"hi\""});
  const auto text = io::space_to_csv(x);
  EXPECT_NE(text.find("\"with,comma\""), std::string::npos);
  EXPECT_NE(text.find("\"say \"\"hi\"\"\""), std::string::npos);
  const auto back = io::space_from_csv(text);
  EXPECT_EQ(back.labels(), x.labels());
  EXPECT_EQ(back.matrix(), x.matrix());
  EXPECT_EQ(io::space_from_csv("a,b\r\n0,1\r\n1,0\r\n").size(), 2u);
}

TEST(SpaceIo, FileRoundTrip) {
  const auto dir = temp_dir();
  const auto x = cl::generate({cl::GeneratorKind::CantorLevel, 2, 2, 0});
  for (const char* name : {"x.json", "x.csv"}) {
    const auto path = (dir / name).string();
    io::write_space(x, path);
    EXPECT_EQ(io::read_space(path).matrix(), x.matrix());
  }
  EXPECT_EQ(code_of([&] { io::read_space((dir / "missing.json").string()); }), cl::ErrorCode::ParseError);
  std::filesystem::remove_all(dir);
}

TEST(SpaceIo, CorruptedInputs) {
  EXPECT_EQ(code_of([] { io::parse_json("{\"matrix\": [[0,1],[1,0]"); }), cl::ErrorCode::ParseError);
  EXPECT_EQ(code_of([] { io::space_from_json(io::parse_json("{\"m\": []}")); }), cl::ErrorCode::ParseError);
  EXPECT_EQ(code_of([] { io::space_from_json(io::parse_json("{\"matrix\": [[0,\"x\"],[1,0]]}")); }),
            cl::ErrorCode::ParseError);
  EXPECT_EQ(code_of([] { io::space_from_json(io::parse_json("{\"labels\":[\"a\"],\"matrix\": [[0,1],[1,0]]}")); }),
            cl::ErrorCode::LabelMismatch);
  EXPECT_EQ(code_of([] { io::space_from_csv("a,b\n0,1\n"); }), cl::ErrorCode::LabelMismatch);
  EXPECT_EQ(code_of([] { io::space_from_csv(""); }), cl::ErrorCode::ParseError);
  EXPECT_EQ(code_of([] { io::space_from_csv("\"a,b\n0\n"); }), cl::ErrorCode::ParseError);
  EXPECT_EQ(code_of([] { io::space_from_csv("a,b\n0,one\n1,0\n"); }), cl::ErrorCode::ParseError);

  try {
    io::space_from_json(io::parse_json("{\"matrix\": [[0,1,5],[1,0,1],[5,1,0]]}"));
    FAIL();
  } catch (const cl::MetricError& e) {
    EXPECT_EQ(e.code(), cl::ErrorCode::TriangleViolation);
    EXPECT_EQ(e.violations().front().describe(), "TriangleViolation(0,2,1)");
  }
  try {
    io::space_from_csv("a,b\n0,1\n2,0\n");
    FAIL();
  } catch (const cl::MetricError& e) {
    EXPECT_EQ(e.violations().front().describe(), "AsymmetricEntry(0,1)");
  }
}

TEST(TorusIo, FunctionAndSubsetRoundTrip) {
  const cl::TorusFunction f{2, 4, std::vector<std::size_t>(16, 0)};
  auto g = f;
  for (std::size_t i = 0; i < 16; ++i) g.values[i] = i % 3;
  EXPECT_EQ(io::function_from_json(io::function_to_json(g)), g);
  EXPECT_EQ(code_of([] { io::function_from_json(io::parse_json(R"({"n":2,"m":4,"values":[0,1]})")); }),
            cl::ErrorCode::DimensionMismatch);
  EXPECT_EQ(code_of([] { io::function_from_json(io::parse_json(R"({"n":2,"values":[0,1]})")); }),
            cl::ErrorCode::ParseError);

  const auto a = cl::TorusSubset::from_indices(cl::TorusShape(2, 4), {0, 5, 15});
  const auto b = io::subset_from_json(io::subset_to_json(a));
  EXPECT_EQ(b.indices(), a.indices());
  EXPECT_EQ(b.shape().m(), 4u);
  EXPECT_EQ(code_of([] { io::subset_from_json(io::parse_json(R"({"n":1,"m":4,"indices":[7]})")); }),
            cl::ErrorCode::OutOfRange);
}

TEST(MapIo, InlineAndPathSpaces) {
  const auto y = oracle::line({0, 1, 3});
  const auto x = oracle::line({0, 2, 6});
  const auto map = cl::make_map(y, x, {0, 1, 2});
  const auto back = io::map_from_json(io::parse_json(io::map_to_json(map).dump()));
  EXPECT_EQ(back.assignment, map.assignment);
  EXPECT_EQ(back.source.matrix(), y.matrix());
  EXPECT_EQ(back.view().target->matrix(), x.matrix());

  const auto dir = temp_dir();
  io::write_space(y, (dir / "y.csv").string());
  io::write_space(x, (dir / "x.json").string());
  const auto j = io::parse_json(R"({"source":"y.csv","target":"x.json","assignment":[2,1,0]})");
  const auto stored = io::map_from_json(j, dir.string());
  EXPECT_EQ(stored.target.matrix(), x.matrix());
  EXPECT_EQ(code_of([&] { io::map_from_json(io::parse_json(R"({"source":"y.csv","target":"x.json","assignment":[0,3,1]})"),
                                             dir.string()); }),
            cl::ErrorCode::OutOfRange);
  EXPECT_EQ(code_of([&] { io::map_from_json(io::parse_json(R"({"source":"y.csv","target":"x.json"})"), dir.string()); }),
            cl::ErrorCode::ParseError);
  std::filesystem::remove_all(dir);
}

TEST(TreeIo, RoundTripKeepsValidity) {
  for (std::size_t k : {1, 2, 3}) {
    const auto x = cl::generate({cl::GeneratorKind::CantorLevel, k, 2, 0});
    const auto c = cl::separation_constant(x).c_sep;
    const auto tree = cl::build_tree_structure(x, c);
    const auto back = io::tree_from_json(io::parse_json(io::tree_to_json(tree).dump()));
    ASSERT_EQ(back.nodes.size(), tree.nodes.size());
    EXPECT_EQ(back.c, c);
    for (std::size_t i = 0; i < tree.nodes.size(); ++i) {
      EXPECT_EQ(back.nodes[i].address, tree.nodes[i].address);
      EXPECT_EQ(back.nodes[i].points, tree.nodes[i].points);
      EXPECT_EQ(back.nodes[i].children, tree.nodes[i].children);
    }
    EXPECT_TRUE(cl::validate_tree_structure(x, back).all_ok());
  }
  EXPECT_EQ(code_of([] { io::tree_from_json(io::parse_json(R"({"C":1,"root":{"address":""}})")); }),
            cl::ErrorCode::ParseError);
  EXPECT_EQ(code_of([] {
              io::tree_from_json(io::parse_json(
                  R"({"C":1,"root":{"address":"","points":[0],"children":[{"address":"0","points":[0],"children":[]}]}})"));
            }),
            cl::ErrorCode::ParseError);
}
