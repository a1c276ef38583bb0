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

#include <cmath>
#include <numeric>
#include <random>

#include "cotypelab/generators.hpp"
#include "cotypelab/separation.hpp"
#include "cotypelab/transfer.hpp"
#include "oracles.hpp"

namespace cl = cotypelab;

namespace {

cl::FiniteMetricSpace perturbed(const cl::FiniteMetricSpace& x, double c, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(c / 2, c);
  auto m = x.matrix();
  for (std::size_t i = 0; i < x.size(); ++i)
    for (std::size_t j = i + 1; j < x.size(); ++j) m[i][j] = m[j][i] = m[i][j] + u(rng);
  return cl::validate_metric(m);
}

}  // namespace

TEST(CheckMap, IdentityIsIsometric) {
  const auto x = oracle::line({0, 1, 3, 7});
  const auto r = cl::check_map(cl::identity_map(x, x), cl::MapKind::BiLipschitz, {.L = 1.0});
  EXPECT_TRUE(r.passes);
  EXPECT_DOUBLE_EQ(r.fitted_L, 1);
  EXPECT_DOUBLE_EQ(r.fitted_scale, 1);
}

TEST(CheckMap, SnowflakeOfItself) {
  const auto x = oracle::line({0, 1, 3, 7});
  const auto h = cl::snowflake_transform(x, 0.5);
  const auto r = cl::check_map(cl::identity_map(x, h), cl::MapKind::Snowflake, {.L = 1.0, .alpha = 0.5});
  EXPECT_TRUE(r.passes);
  EXPECT_NEAR(r.fitted_L, 1, 1e-15);
  EXPECT_NEAR(r.fitted_scale, 1, 1e-15);
}

TEST(CheckMap, RoughIsometryExample) {
  const auto a = oracle::line({0, 1, 2});
  const auto b = oracle::line({0, 1, 3});
  const auto r = cl::check_map(cl::identity_map(a, b), cl::MapKind::RoughIsometry);
  EXPECT_EQ(r.fitted_additive, 1);
  EXPECT_EQ(r.witness, (std::vector<std::size_t>{0, 2}));
}

TEST(CheckMap, CollapsedPairAndEmptySource) {
  const auto a = oracle::line({0, 1, 2});
  const auto b = oracle::line({0, 1});
  const auto m = cl::make_map(a, b, {0, 1, 1});
  const auto r = cl::check_map(m, cl::MapKind::BiLipschitz);
  EXPECT_FALSE(r.passes);
  EXPECT_TRUE(std::isinf(r.fitted_L));
  EXPECT_EQ(r.witness, (std::vector<std::size_t>{1, 2}));
  EXPECT_FALSE(cl::check_map(m, cl::MapKind::LinearQuasisymmetric).passes);
  const cl::FiniteMetricSpace empty;
  try {
    cl::check_map(cl::make_map(empty, b, {}), cl::MapKind::BiLipschitz);
    FAIL();
  } catch (const cl::Error& e) {
    EXPECT_EQ(e.code(), cl::ErrorCode::EmptySource);
  }
  EXPECT_THROW(cl::make_map(a, b, {0, 1}), cl::Error);
  EXPECT_THROW(cl::make_map(a, b, {0, 1, 2}), cl::Error);
}

TEST(CheckMap, FittedBilipschitzIsTight) {
  for (std::size_t i = 0; i < 40; ++i) {
    const auto y = oracle::corpus(i);
    if (y.size() < 3) continue;
    const auto x = oracle::random_plane(y.size(), 77 + i, 3);
    const auto map = cl::identity_map(y, x);
    const auto fit = cl::check_map(map, cl::MapKind::BiLipschitz);
    // every pair within [1/L, L] after scaling, and some pair on each edge
    double lo = INFINITY, hi = 0;
    for (std::size_t a = 0; a < y.size(); ++a)
      for (std::size_t b = a + 1; b < y.size(); ++b) {
        const double r = fit.fitted_scale * x(a, b) / y(a, b);
        lo = std::min(lo, r);
        hi = std::max(hi, r);
      }
    EXPECT_NEAR(hi, fit.fitted_L, 1e-12 * fit.fitted_L);
    EXPECT_NEAR(1 / lo, fit.fitted_L, 1e-12 * fit.fitted_L);
    const auto L = fit.fitted_L;
    EXPECT_TRUE(cl::check_map(map, cl::MapKind::BiLipschitz, {.scale = fit.fitted_scale, .L = L * 1.001}).passes);
    EXPECT_TRUE(cl::check_map(map, cl::MapKind::BiLipschitz, {.scale = fit.fitted_scale, .L = L}).passes);
    EXPECT_FALSE(cl::check_map(map, cl::MapKind::BiLipschitz, {.scale = fit.fitted_scale, .L = L * 0.999}).passes);
    // a wrong scale only makes things worse
    EXPECT_GE(cl::check_map(map, cl::MapKind::BiLipschitz, {.scale = fit.fitted_scale * 1.1}).fitted_L, L);
  }
}

TEST(CheckMap, LinearQuasisymmetryTriples) {
  const auto y = oracle::line({0, 1, 3, 7});
  const auto x = oracle::line({0, 2, 3, 10});
  const auto map = cl::identity_map(y, x);
  const auto fit = cl::check_map(map, cl::MapKind::LinearQuasisymmetric);
  double worst = 0;
  for (std::size_t a = 0; a < 4; ++a)
    for (std::size_t b = 0; b < 4; ++b)
      for (std::size_t c = 0; c < 4; ++c)
        if (a != b && b != c && a != c) worst = std::max(worst, (x(a, b) / x(a, c)) / (y(a, b) / y(a, c)));
  EXPECT_DOUBLE_EQ(fit.fitted_K, worst);
  EXPECT_TRUE(cl::check_map(map, cl::MapKind::LinearQuasisymmetric, {.K = worst}).passes);
  EXPECT_FALSE(cl::check_map(map, cl::MapKind::LinearQuasisymmetric, {.K = worst * 0.99}).passes);
  // scaled L-bi-Lipschitz maps are L^2-linearly quasisymmetric
  const auto L = cl::check_map(map, cl::MapKind::BiLipschitz).fitted_L;
  EXPECT_LE(fit.fitted_K, L * L * (1 + 1e-12));
}

TEST(CheckMap, RoughIsometryMonotone) {
  const auto x = oracle::random_tree_ultrametric(7, 4);
  const auto y = perturbed(x, 0.1, 3);
  const auto map = cl::identity_map(x, y);
  const auto fit = cl::check_map(map, cl::MapKind::RoughIsometry);
  EXPECT_LE(fit.fitted_additive, 0.1);
  EXPECT_GE(fit.fitted_additive, 0.05);
  EXPECT_TRUE(cl::check_map(map, cl::MapKind::RoughIsometry, {.additive = fit.fitted_additive}).passes);
  EXPECT_FALSE(cl::check_map(map, cl::MapKind::RoughIsometry, {.additive = fit.fitted_additive * 0.9}).passes);
}

TEST(CheckMap, SnowflakeComposesWithBilipschitz) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto y = cl::generate({cl::GeneratorKind::RandomEuclidean, 7, 2, seed});
    const auto h = cl::snowflake_transform(y, 0.5);
    const auto z = cl::subdominant_ultrametric(h).ultrametric;
    const auto snow = cl::identity_map(y, h);
    const auto bilip = cl::identity_map(h, z);
    const double l1 = cl::check_map(snow, cl::MapKind::Snowflake, {.alpha = 0.5}).fitted_L;
    const auto fit2 = cl::check_map(bilip, cl::MapKind::BiLipschitz);
    const auto composed = cl::compose(snow, bilip);
    const auto r = cl::check_map(composed, cl::MapKind::Snowflake,
                                 {.scale = fit2.fitted_scale, .L = l1 * fit2.fitted_L, .alpha = 0.5});
    EXPECT_TRUE(r.passes) << seed;
  }
}

TEST(CheckMap, SubdominantMapAtSeparationConstant) {
  for (std::size_t i = 0; i < 60; ++i) {
    const auto x = oracle::corpus(i);
    if (x.size() < 2) continue;
    const auto sub = cl::subdominant_ultrametric(x);
    const double c = cl::separation_constant(x).c_sep;
    EXPECT_LE(c, 2 * sub.distortion * sub.distortion * (1 + 1e-12));
    const auto map = cl::identity_map(x, sub.ultrametric);
    EXPECT_TRUE(cl::check_map(map, cl::MapKind::BiLipschitz, {.scale = std::sqrt(c), .L = c}).passes) << i;
  }
}

TEST(RoughInverse, Examples) {
  const auto x = oracle::line({0, 1, 3});
  const auto inv = cl::rough_inverse(cl::make_map(x, x, {2, 0, 1}), 0);
  EXPECT_EQ(inv.inverse.assignment, (std::vector<std::size_t>{1, 2, 0}));
  EXPECT_EQ(inv.max_displacement, 0);

  const auto a = oracle::line({0, 2});
  const auto target = oracle::line({0, 0.5, 2});
  const auto dense = cl::rough_inverse(cl::make_map(a, target, {0, 2}), 0.5);
  EXPECT_EQ(dense.inverse.assignment, (std::vector<std::size_t>{0, 0, 1}));
  EXPECT_EQ(dense.density, 0.5);
  for (std::size_t t = 0; t < 3; ++t) EXPECT_LE(target(t, dense.inverse.assignment[t] == 0 ? 0 : 2), 0.5);

  try {
    cl::rough_inverse(cl::make_map(a, target, {0, 2}), 0.25);
    FAIL();
  } catch (const cl::Error& e) {
    EXPECT_EQ(e.code(), cl::ErrorCode::NotDense);
    EXPECT_EQ(e.witness(), (std::vector<std::size_t>{1}));
  }
}

TEST(TransferConstants, Formulas) {
  EXPECT_DOUBLE_EQ(cl::bilip_transfer_constant(2, 3), 12);
  const auto s1 = cl::snowflake_transfer(1, 2, 3, 5, 2, 2);
  EXPECT_DOUBLE_EQ(s1.p_prime, 2);
  EXPECT_DOUBLE_EQ(s1.gamma, 4 * 9 * 5);
  const auto s = cl::snowflake_transfer(0.5, 1.5, 2, 3, 2, 2);
  EXPECT_DOUBLE_EQ(s.p_prime, 1);
  EXPECT_NEAR(s.gamma, std::pow(1.5, 4) * std::pow(2, 3) * std::pow(3, 2), 1e-12);
  const auto qs = cl::qs_chain(2);
  EXPECT_EQ(qs.eta_at_one, 4);
  EXPECT_EQ(qs.separation, 8);
  EXPECT_EQ(cl::fsp_qs_constant(3, 2), 12);
  const auto g0 = cl::gh_transfer(1.5, 2, 2, 4, 6, 0);
  EXPECT_EQ(g0.gamma, 6);
  EXPECT_EQ(g0.slack, 0);
}

TEST(TransferConstants, RangeChecks) {
  auto code = [](auto&& f) {
    try {
      f();
    } catch (const cl::Error& e) {
      return e.code();
    }
    return cl::ErrorCode::BadParameter;
  };
  EXPECT_EQ(code([] { cl::snowflake_transfer(0.4, 1, 1, 1, 2, 2); }), cl::ErrorCode::OutOfRange);
  EXPECT_EQ(code([] { cl::snowflake_transfer(1, 1, 1, 0.5, 2, 2); }), cl::ErrorCode::OutOfRange);
  EXPECT_EQ(code([] { cl::snowflake_transfer(1, 1, 1, 1, 3, 2); }), cl::ErrorCode::OutOfRange);
  EXPECT_EQ(code([] { cl::bilip_transfer_constant(0.5, 1); }), cl::ErrorCode::OutOfRange);
  EXPECT_EQ(code([] { cl::gh_transfer(1, 2, 2, 1, 3, 0.1); }), cl::ErrorCode::OutOfRange);
  EXPECT_EQ(code([] { cl::qs_chain(0.9); }), cl::ErrorCode::OutOfRange);
}

TEST(TransferConstants, GhSlackMonotoneAndVanishing) {
  double prev = -1;
  for (double c : {0.0, 1e-6, 1e-3, 0.01, 0.1, 1.0}) {
    const auto t = cl::gh_transfer(2, 1.5, 2, 3, 8, c);
    EXPECT_EQ(t.gamma, 8);
    EXPECT_GT(t.slack, prev);
    prev = t.slack;
  }
  EXPECT_LT(cl::gh_transfer(2, 1.5, 2, 3, 8, 1e-12).slack, 1e-12);
}

TEST(TransferConstants, Dispatcher) {
  EXPECT_EQ(cl::transfer_constants(cl::BiLipRequest{2, 3}).constant, 12);
  const auto s = cl::transfer_constants(cl::SnowflakeRequest{1, 1, 2, 1, 2, 2});
  EXPECT_EQ(s.constant, 4);
  EXPECT_EQ(s.exponent, 2.0);
  const auto q = cl::transfer_constants(cl::QsChainRequest{2});
  EXPECT_EQ(q.constant, 4);
  EXPECT_EQ(q.separation, 8.0);
  EXPECT_EQ(cl::transfer_constants(cl::FspQsRequest{2, 3}).constant, 12);
  const auto g = cl::transfer_constants(cl::GhRequest{1, 2, 2, 1, 4, 0});
  EXPECT_EQ(g.constant, 4);
  EXPECT_EQ(g.slack, 0);
}

TEST(EmpiricalTransfer, IdentityHasNoViolations) {
  const auto x = cl::generate({cl::GeneratorKind::RandomUltrametric, 6, 2, 2});
  const auto r = cl::empirical_transfer_verify(cl::identity_map(x, x), cl::MapKind::BiLipschitz, {},
                                               {2, 2, 1, 4, 1.0}, 100, 1);
  EXPECT_TRUE(r.passed());
  EXPECT_EQ(r.constant, 1);
  EXPECT_EQ(r.samples, 100u);
}

TEST(EmpiricalTransfer, Snowflake) {
  // Y with base X = Y^(1/2); Y -> X is a (1/2, 1)-snowflaking embedding and p' = 1.
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto y = cl::generate({cl::GeneratorKind::RandomUltrametric, 6, 2, seed});
    const auto x = cl::snowflake_transform(y, 0.5);
    const double gamma = cl::separation_constant(x).c_sep;
    const auto r = cl::empirical_transfer_verify(cl::identity_map(y, x), cl::MapKind::Snowflake, {.alpha = 0.5},
                                                 {2, 2, 1, 4, gamma}, 100, seed, 4);
    EXPECT_EQ(r.exponent, 1);
    EXPECT_TRUE(r.passed()) << r.max_violation;
  }
}

TEST(EmpiricalTransfer, RoughIsometry) {
  for (double c : {0.01, 0.1}) {
    const auto x = cl::generate({cl::GeneratorKind::RandomUltrametric, 6, 2, 11});
    const auto y = perturbed(x, c, 5);
    const auto r = cl::empirical_transfer_verify(cl::identity_map(x, y), cl::MapKind::RoughIsometry, {.additive = c},
                                                 {2, 2, 1, 4, 1.0}, 100, 3);
    EXPECT_EQ(r.constant, 4);
    EXPECT_GT(r.slack, 0);
    EXPECT_TRUE(r.passed()) << r.max_violation;
  }
}

TEST(EmpiricalTransfer, Bilipschitz) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto y = cl::generate({cl::GeneratorKind::RandomEuclidean, 6, 2, seed});
    const auto x = cl::subdominant_ultrametric(y).ultrametric;
    const auto r = cl::empirical_transfer_verify(cl::identity_map(y, x), cl::MapKind::BiLipschitz, {},
                                                 {2, 2, 1, 4, 1.0}, 100, seed);
    const double L = cl::check_map(cl::identity_map(y, x), cl::MapKind::BiLipschitz).fitted_L;
    EXPECT_NEAR(r.constant, L * L, 1e-12 * L * L);
    EXPECT_TRUE(r.passed()) << r.max_violation;
  }
}

TEST(EmpiricalTransfer, RejectsFailingMapsAndMissingGamma) {
  const auto y = oracle::line({0, 1, 2});
  const auto x = oracle::line({0, 1, 5});
  EXPECT_THROW(cl::empirical_transfer_verify(cl::identity_map(y, x), cl::MapKind::BiLipschitz, {.L = 1.0},
                                             {2, 2, 1, 4, 1.0}, 10, 1),
               cl::Error);
  EXPECT_THROW(cl::empirical_transfer_verify(cl::identity_map(y, x), cl::MapKind::BiLipschitz, {},
                                             {2, 2, 1, 4, std::nullopt}, 10, 1),
               cl::Error);
}
