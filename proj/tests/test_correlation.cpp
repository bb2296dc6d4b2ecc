/*
 * Copyright 2026 The chaosidx Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *   http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "oracles.hpp"

#include <chaosidx/correlation.hpp>
#include <chaosidx/series.hpp>
#include <chaosidx/synth.hpp>

#include <gtest/gtest.h>

#include <cmath>
#include <vector>

using namespace chaosidx;

namespace {

std::vector<double> uniforms(std::size_t n, std::uint64_t seed) {
  Xoshiro256 rng(seed);
  std::vector<double> x(n);
  for (double& v : x) v = rng.uniform();
  return x;
}

DelayVectors square_points(std::size_t n, std::uint64_t seed) {
  Xoshiro256 rng(seed);
  std::vector<std::vector<double>> rows;
  for (std::size_t i = 0; i < n; ++i) {
    const double u = rng.uniform();
    rows.push_back({u, rng.uniform()});
  }
  return points_from_rows(rows);
}

std::vector<double> henon(std::size_t n) {
  GeneratorSpec g;
  g.kind = GeneratorKind::Henon;
  g.n_samples = n;
  g.transient_skip = 1000;
  return generate_samples(g);
}

CorrelationCurve power_law_curve(double slope, std::size_t n) {
  CorrelationCurve c;
  for (std::size_t k = 0; k < n; ++k) {
    const double r = std::pow(10.0, -3.0 + 3.0 * static_cast<double>(k) / static_cast<double>(n));
    c.radii.push_back(r);
    c.c_values.push_back(std::pow(r, slope));
    c.pair_counts.push_back(static_cast<std::uint64_t>(1e9 * std::pow(r, slope)));
  }
  return c;
}

}  // namespace

TEST(CorrelationSum, TrivialCases) {
  const auto two = points_from_rows({{0.0, 0.0}, {3.0, 4.0}});
  EXPECT_DOUBLE_EQ(correlation_sum(two, 5.5, 0), 1.0);
  EXPECT_DOUBLE_EQ(correlation_sum(two, 5.0, 0), 1.0);  // distance exactly R counts
  EXPECT_DOUBLE_EQ(correlation_sum(two, 4.9, 0), 0.0);
  EXPECT_THROW(correlation_sum(two, 5.0, 1), Error);  // no admissible pairs
  EXPECT_THROW(correlation_sum(two, 0.0, 0), Error);
  const auto x = uniforms(300, 2);
  const auto v = delay_embed(x, {2, 1, 0});
  EXPECT_DOUBLE_EQ(correlation_sum(v, 1e-9, 0), 0.0);
  EXPECT_DOUBLE_EQ(correlation_sum(v, 2.0, 0), 1.0);
}

TEST(CorrelationSum, BruteForceEquivalence) {
  for (std::size_t dim : {1u, 2u, 3u}) {
    const auto x = henon(2000);
    const auto v = delay_embed(x, {static_cast<int>(dim), 1, 0});
    const std::vector<double> pts(v.data().begin(), v.data().end());
    for (int w : {0, 1, 10})
      for (double r : {0.001, 0.01, 0.05, 0.2, 1.0}) {
        const double want = static_cast<double>(oracle::pair_count(pts, dim, r, w)) /
                            static_cast<double>(admissible_pair_count(v.size(), w));
        ASSERT_EQ(correlation_sum(v, r, w), want) << dim << " " << w << " " << r;
      }
  }
}

TEST(CorrelationCurve, SegmentMatchesDirectCountAtEveryRadius) {
  const auto x = uniforms(1000, 5);
  const auto v = delay_embed(x, {1, 1, 0});
  const auto curve = correlation_curve(v, 0);
  for (std::size_t k = 0; k < curve.radii.size(); ++k)
    ASSERT_EQ(curve.pair_counts[k], oracle::pair_count(x, 1, curve.radii[k], 0)) << k;
}

TEST(CorrelationCurve, CountsIndependentOfThreadCount) {
  const auto v = delay_embed(henon(3000), {2, 1, 0});
  CurveOptions one;
  one.threads = 1;
  CurveOptions many;
  many.threads = 5;
  const auto a = correlation_curve(v, 2, one), b = correlation_curve(v, 2, many);
  EXPECT_EQ(a.radii, b.radii);
  EXPECT_EQ(a.pair_counts, b.pair_counts);
}

TEST(CorrelationCurve, MonotoneAndBounded) {
  for (auto v : {delay_embed(henon(3000), {2, 1, 0}), delay_embed(uniforms(2000, 9), {3, 2, 0}), square_points(2000, 4)}) {
    const auto c = correlation_curve(v, 1);
    ASSERT_EQ(c.radii.size(), 24u);
    for (std::size_t k = 0; k < c.radii.size(); ++k) {
      EXPECT_GE(c.c_values[k], 0.0);
      EXPECT_LE(c.c_values[k], 1.0);
      if (k > 0) {
        EXPECT_GT(c.radii[k], c.radii[k - 1]);
        EXPECT_GE(c.c_values[k], c.c_values[k - 1]);
      }
    }
    // the top radius is the largest sampled distance, so at most a sliver of pairs lies beyond it
    EXPECT_GE(c.c_values.back(), 0.999);
  }
  // every pair enumerated: the top radius is the true maximum
  const auto exact = correlation_curve(delay_embed(uniforms(1000, 9), {2, 1, 0}), 1);
  EXPECT_EQ(exact.c_values.back(), 1.0);
}

TEST(CorrelationCurve, DoublingCoordinatesDoublesRadii) {
  const auto v = delay_embed(henon(2000), {2, 1, 0});
  const auto v2 = v.affine(2.0, 0.0);
  const auto a = correlation_curve(v, 1), b = correlation_curve(v2, 1);
  for (std::size_t k = 0; k < a.radii.size(); ++k) {
    EXPECT_NEAR(b.radii[k], 2.0 * a.radii[k], 1e-12 * a.radii[k]);
    EXPECT_EQ(a.c_values[k], b.c_values[k]);
  }
  for (double r : {0.01, 0.1, 0.5}) {
    EXPECT_EQ(correlation_sum(v2, 2.0 * r, 1), correlation_sum(v, r, 1));
    EXPECT_EQ(v.affine(0.5, 0.0).size(), v.size());
    EXPECT_EQ(correlation_sum(v.affine(0.5, 0.0), 0.5 * r, 1), correlation_sum(v, r, 1));
  }
}

TEST(CorrelationCurve, TheilerWindowNeverAddsPairs) {
  std::uint64_t prev = admissible_pair_count(500, 0);
  EXPECT_EQ(prev, 500u * 499u / 2u);
  for (int w = 1; w < 520; ++w) {
    const auto now = admissible_pair_count(500, w);
    EXPECT_LE(now, prev);
    prev = now;
  }
  EXPECT_EQ(admissible_pair_count(500, 499), 0u);
  EXPECT_EQ(admissible_pair_count(500, 498), 1u);
}

TEST(CorrelationCurve, PairSamplingIsSeededAndBounded) {
  const auto v = delay_embed(uniforms(3000, 1), {1, 1, 0});
  const auto a = sample_pair_distances(v, 0, 10000, 7), b = sample_pair_distances(v, 0, 10000, 7);
  EXPECT_EQ(a.size(), 10000u);
  EXPECT_EQ(a, b);
  EXPECT_EQ(sample_pair_distances(delay_embed(uniforms(50, 1), {1, 1, 0}), 3, 10000, 7).size(),
            admissible_pair_count(50, 3));
}

TEST(CorrelationDimension, ExactPowerLaw) {
  const auto est = correlation_dimension(power_law_curve(1.7, 24));
  EXPECT_NEAR(est.d2, 1.7, 1e-9);
  EXPECT_NEAR(est.fit_r2, 1.0, 1e-12);
  EXPECT_LT(est.r_low, est.r_high);
  // perfect line everywhere: the widest window wins
  EXPECT_EQ(est.n_radii_in_fit, 24u);
}

TEST(CorrelationDimension, WindowAtLeastFortyPercent) {
  // a kinked curve: slope 2 then slope 0.5; the fit must still span >= 40%
  CorrelationCurve c;
  for (std::size_t k = 0; k < 20; ++k) {
    const double lr = -6.0 + 0.3 * static_cast<double>(k);
    c.radii.push_back(std::exp(lr));
    const double lc = k < 10 ? 2.0 * lr : 2.0 * (-6.0 + 2.7) + 0.5 * (lr + 3.3);
    c.c_values.push_back(std::exp(lc - 2.0));
    c.pair_counts.push_back(k);
  }
  const auto est = correlation_dimension(c);
  EXPECT_GE(est.n_radii_in_fit, 8u);
  EXPECT_GE(est.fit_r2, 0.98);
}

TEST(CorrelationDimension, NoScalingRegion) {
  CorrelationCurve c;
  Xoshiro256 rng(3);
  for (std::size_t k = 0; k < 20; ++k) {
    c.radii.push_back(static_cast<double>(k + 1));
    c.c_values.push_back(0.01 + 0.9 * rng.uniform());
    c.pair_counts.push_back(k);
  }
  try {
    correlation_dimension(c);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NoScalingRegion);
  }
  EXPECT_THROW(correlation_dimension(power_law_curve(1.0, 7)), Error);
}

TEST(CorrelationDimension, Segment) {
  const auto v = delay_embed(uniforms(10000, 42), {1, 1, 0});
  const auto est = correlation_dimension(correlation_curve(v, 0));
  EXPECT_GE(est.d2, 0.95);
  EXPECT_LE(est.d2, 1.05);
}

TEST(CorrelationDimension, Square) {
  const auto est = correlation_dimension(correlation_curve(square_points(10000, 42), 0));
  EXPECT_GE(est.d2, 1.90);
  EXPECT_LE(est.d2, 2.05);
}

TEST(CorrelationDimension, ScaleInvariant) {
  const auto v = square_points(3000, 8);
  const auto a = correlation_dimension(correlation_curve(v, 0));
  const auto b = correlation_dimension(correlation_curve(v.affine(1000.0, -3.0), 0));
  EXPECT_NEAR(a.d2, b.d2, 1e-6);
}

TEST(CorrelationDimension, HenonAcrossEmbeddings) {
  const auto x = henon(20000);
  const int w = theiler_window(x, 100).lag;
  std::vector<double> d2;
  for (int m : {2, 3, 4}) {
    const auto est = correlation_dimension(correlation_curve(delay_embed(x, {m, 1, w}), w));
    d2.push_back(est.d2);
  }
  EXPECT_GE(d2[0], 1.15);
  EXPECT_LE(d2[0], 1.30);
  EXPECT_GE(d2[1], 1.15);
  EXPECT_LE(d2[1], 1.30);
  for (double a : d2)
    for (double b : d2) EXPECT_LT(std::fabs(a - b), 0.15);
}
