// Copyright 2026 The fairdp Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include "fairdp/numeric.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "fairdp/errors.h"
#include "gtest/gtest.h"

namespace fairdp {
namespace {

TEST(L2NormTest, MatchesPythagoreanTriple) {
  EXPECT_DOUBLE_EQ(L2Norm(ParamVector{3.0, 4.0}), 5.0);
}

TEST(L2NormTest, MatchesLongDoubleReference) {
  RngStream rng = RngStream::Root(7);
  std::vector<double> v(257);
  for (double& x : v) x = 10.0 * (rng.NextUniform() - 0.5);
  long double acc = 0.0L;
  for (double x : v) acc += static_cast<long double>(x) * x;
  EXPECT_NEAR(L2Norm(v), static_cast<double>(std::sqrt(acc)), 1e-12);
}

TEST(L2NormTest, EmptyThrows) {
  EXPECT_THROW(L2Norm(std::vector<double>{}), UsageError);
}

TEST(ParamVectorTest, DimensionMismatchThrows) {
  ParamVector a{1.0, 2.0};
  EXPECT_THROW(a += ParamVector{1.0}, UsageError);
  EXPECT_THROW(a -= (ParamVector{1.0, 2.0, 3.0}), UsageError);
}

TEST(ParamVectorTest, Arithmetic) {
  ParamVector a{1.0, -2.0};
  const ParamVector b{0.5, 0.5};
  EXPECT_EQ(a + b, (ParamVector{1.5, -1.5}));
  EXPECT_EQ(a - b, (ParamVector{0.5, -2.5}));
  EXPECT_EQ(2.0 * a, (ParamVector{2.0, -4.0}));
  a[1] = std::nan("");
  EXPECT_FALSE(a.AllFinite());
  EXPECT_TRUE(b.AllFinite());
}

TEST(ExactSumTest, SurvivesCancellation) {
  const std::vector<double> xs = {1e100, 1.0, -1e100, 1e-3};
  EXPECT_EQ(ExactSum(xs), 1.001);
}

TEST(ExactSumTest, OrderInvariant) {
  RngStream rng = RngStream::Root(3);
  std::vector<double> xs(1000);
  for (double& x : xs) x = std::ldexp(rng.NextUniform(), rng.NextBelow(60) - 30);
  const double forward = ExactSum(xs);
  for (int trial = 0; trial < 10; ++trial) {
    Shuffle(xs, rng);
    EXPECT_EQ(ExactSum(xs), forward);
  }
}

TEST(ExactSumTest, RepeatedValueIsExactMultiple) {
  const std::vector<double> xs(50, 0.1);
  EXPECT_EQ(ExactSum(xs), 50 * 0.1);
}

TEST(MedianTest, OddAndEven) {
  EXPECT_EQ(Median(std::vector<double>{5.0, 1.0, 3.0}), 3.0);
  EXPECT_EQ(Median(std::vector<double>{4.0, 1.0, 3.0, 2.0}), 2.5);
  EXPECT_EQ(Median(std::vector<double>{7.0}), 7.0);
  EXPECT_THROW(Median(std::vector<double>{}), UsageError);
}

TEST(RngStreamTest, SamePathSameSequence) {
  RngStream a = RngStream::Root(42).Derive("round", 3).Derive("client", 7);
  RngStream b = RngStream::Root(42).Derive("round", 3).Derive("client", 7);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(a.NextU64(), b.NextU64());
}

TEST(RngStreamTest, DifferentPathsDiffer) {
  const RngStream root = RngStream::Root(42);
  EXPECT_NE(root.Derive("round", 0).key(), root.Derive("round", 1).key());
  EXPECT_NE(root.Derive("round", 0).key(), root.Derive("noise", 0).key());
  EXPECT_NE(RngStream::Root(1).key(), RngStream::Root(2).key());
}

TEST(RngStreamTest, DeriveLeavesParentUntouched) {
  RngStream root = RngStream::Root(5);
  const RngStream copy = root;
  (void)root.Derive("child", 1);
  EXPECT_EQ(root, copy);
}

TEST(RngStreamTest, UniformInOpenInterval) {
  RngStream rng = RngStream::Root(11);
  double sum = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double u = rng.NextUniform();
    ASSERT_GT(u, 0.0);
    ASSERT_LT(u, 1.0);
    sum += u;
  }
  EXPECT_NEAR(sum / n, 0.5, 4.0 * std::sqrt(1.0 / 12.0 / n));
}

TEST(RngStreamTest, NextBelowCoversRangeUniformly) {
  RngStream rng = RngStream::Root(12);
  std::vector<int> counts(7, 0);
  const int n = 70000;
  for (int i = 0; i < n; ++i) ++counts[rng.NextBelow(7)];
  for (int c : counts) EXPECT_NEAR(c, n / 7.0, 5.0 * std::sqrt(n / 7.0));
}

TEST(GaussianVectorTest, MomentsMatchStandardNormalScaled) {
  RngStream rng = RngStream::Root(13);
  const ParamVector v = GaussianVector(rng, 3.0, 400001);
  const auto x = v.values();
  const double n = static_cast<double>(x.size());
  const double mean = std::accumulate(x.begin(), x.end(), 0.0) / n;
  double m2 = 0.0, m4 = 0.0;
  for (double xi : x) {
    const double d = xi - mean;
    m2 += d * d;
    m4 += d * d * d * d;
  }
  m2 /= n;
  m4 /= n;
  EXPECT_NEAR(mean, 0.0, 4.0 * 3.0 / std::sqrt(n));
  EXPECT_NEAR(std::sqrt(m2), 3.0, 0.02);
  EXPECT_NEAR(m4 / (m2 * m2), 3.0, 0.05);
}

TEST(GaussianVectorTest, ZeroStdIsExactZerosAndConsumesNothing) {
  RngStream rng = RngStream::Root(14);
  const RngStream before = rng;
  EXPECT_EQ(GaussianVector(rng, 0.0, 5), ParamVector::Zeros(5));
  EXPECT_EQ(rng, before);
  EXPECT_THROW(GaussianVector(rng, -1.0, 5), UsageError);
}

TEST(GaussianVectorTest, OddDimension) {
  RngStream rng = RngStream::Root(15);
  EXPECT_EQ(GaussianVector(rng, 1.0, 3).dim(), 3u);
}

TEST(DirichletSampleTest, OnSimplexWithExpectedMean) {
  RngStream rng = RngStream::Root(16);
  std::vector<double> mean(4, 0.0);
  const int n = 20000;
  for (int i = 0; i < n; ++i) {
    const auto p = DirichletSample(rng, 0.5, 4);
    ASSERT_EQ(p.size(), 4u);
    EXPECT_NEAR(std::accumulate(p.begin(), p.end(), 0.0), 1.0, 1e-12);
    for (int j = 0; j < 4; ++j) {
      ASSERT_GE(p[j], 0.0);
      mean[j] += p[j] / n;
    }
  }
  for (double m : mean) EXPECT_NEAR(m, 0.25, 0.01);
}

TEST(GammaTest, MeanEqualsShape) {
  RngStream rng = RngStream::Root(17);
  for (double shape : {0.3, 1.0, 4.5}) {
    double sum = 0.0;
    const int n = 100000;
    for (int i = 0; i < n; ++i) sum += rng.NextGamma(shape);
    EXPECT_NEAR(sum / n, shape, 5.0 * std::sqrt(shape / n)) << shape;
  }
}

TEST(ShuffleTest, IsPermutation) {
  RngStream rng = RngStream::Root(18);
  std::vector<int> items(100);
  std::iota(items.begin(), items.end(), 0);
  Shuffle(items, rng);
  std::vector<int> sorted = items;
  std::sort(sorted.begin(), sorted.end());
  for (int i = 0; i < 100; ++i) EXPECT_EQ(sorted[i], i);
  EXPECT_FALSE(std::is_sorted(items.begin(), items.end()));
}

}  // namespace
}  // namespace fairdp
