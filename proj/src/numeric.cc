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
#include <numbers>
#include <string>

#include "fairdp/errors.h"

namespace fairdp {
namespace {

constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

// SplitMix64 finalizer.
constexpr std::uint64_t Mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t Fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

void CheckSameDim(std::size_t a, std::size_t b) {
  if (a != b) {
    throw UsageError("dimension mismatch: " + std::to_string(a) + " vs " +
                     std::to_string(b));
  }
}

}  // namespace

ParamVector::ParamVector(std::vector<double> values)
    : values_(std::move(values)) {}

ParamVector::ParamVector(std::initializer_list<double> values)
    : values_(values) {}

ParamVector ParamVector::Zeros(std::size_t dim) {
  return ParamVector(std::vector<double>(dim, 0.0));
}

bool ParamVector::AllFinite() const {
  return std::all_of(values_.begin(), values_.end(),
                     [](double x) { return std::isfinite(x); });
}

ParamVector& ParamVector::operator+=(const ParamVector& other) {
  CheckSameDim(dim(), other.dim());
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += other[i];
  return *this;
}

ParamVector& ParamVector::operator-=(const ParamVector& other) {
  CheckSameDim(dim(), other.dim());
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= other[i];
  return *this;
}

ParamVector& ParamVector::operator*=(double scale) {
  for (double& x : values_) x *= scale;
  return *this;
}

double L2Norm(std::span<const double> v) {
  if (v.empty()) throw UsageError("l2 norm of an empty vector");
  double sum = 0.0;
  for (double x : v) sum += x * x;
  return std::sqrt(sum);
}

double ExactSum(std::span<const double> xs) {
  std::vector<double> partials;
  for (double x : xs) {
    if (!std::isfinite(x)) {
      double plain = 0.0;
      for (double y : xs) plain += y;
      return plain;
    }
    std::size_t used = 0;
    for (double y : partials) {
      if (std::abs(x) < std::abs(y)) std::swap(x, y);
      const double hi = x + y;
      const double lo = y - (hi - x);
      if (lo != 0.0) partials[used++] = lo;
      x = hi;
    }
    partials.resize(used);
    partials.push_back(x);
  }
  if (partials.empty()) return 0.0;
  // Sum the partials from the top, then fix up a half-way rounding case.
  std::size_t n = partials.size();
  double hi = partials[--n];
  double lo = 0.0;
  while (n > 0) {
    const double x = hi;
    const double y = partials[--n];
    hi = x + y;
    lo = y - (hi - x);
    if (lo != 0.0) break;
  }
  if (n > 0 && ((lo < 0.0 && partials[n - 1] < 0.0) ||
                (lo > 0.0 && partials[n - 1] > 0.0))) {
    const double y = lo * 2.0;
    const double x = hi + y;
    if (y == x - hi) hi = x;
  }
  return hi;
}

double Median(std::span<const double> xs) {
  if (xs.empty()) throw UsageError("median of an empty sequence");
  std::vector<double> sorted(xs.begin(), xs.end());
  std::sort(sorted.begin(), sorted.end());
  const std::size_t n = sorted.size();
  if (n % 2 == 1) return sorted[n / 2];
  return 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
}

RngStream RngStream::Root(std::uint64_t master_seed) {
  return RngStream(Mix64(master_seed ^ 0x6a09e667f3bcc909ULL), 0);
}

RngStream RngStream::Derive(std::string_view label, std::uint64_t index) const {
  std::uint64_t k = Mix64(key_ ^ Mix64(Fnv1a(label)));
  k = Mix64(k + Mix64(index + 0x632be59bd9b4e019ULL));
  return RngStream(k, 0);
}

std::uint64_t RngStream::NextU64() {
  ++counter_;
  return Mix64(key_ + counter_ * kGolden);
}

double RngStream::NextUniform() {
  return (static_cast<double>(NextU64() >> 11) + 0.5) * 0x1.0p-53;
}

std::uint64_t RngStream::NextBelow(std::uint64_t n) {
  if (n == 0) throw UsageError("NextBelow requires n > 0");
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  std::uint64_t x;
  do {
    x = NextU64();
  } while (x >= limit);
  return x % n;
}

double RngStream::NextNormal() {
  const double u1 = NextUniform();
  const double u2 = NextUniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

double RngStream::NextGamma(double shape) {
  if (!(shape > 0.0)) throw UsageError("gamma shape must be positive");
  if (shape < 1.0) {
    const double boost = std::pow(NextUniform(), 1.0 / shape);
    return NextGamma(shape + 1.0) * boost;
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  while (true) {
    double x, v;
    do {
      x = NextNormal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = NextUniform();
    if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
    if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
  }
}

ParamVector GaussianVector(RngStream& rng, double std, std::size_t dim) {
  if (std < 0.0 || std::isnan(std)) {
    throw UsageError("gaussian std must be non-negative");
  }
  ParamVector out = ParamVector::Zeros(dim);
  if (std == 0.0) return out;
  for (std::size_t i = 0; i < dim; i += 2) {
    const double r = std::sqrt(-2.0 * std::log(rng.NextUniform()));
    const double theta = 2.0 * std::numbers::pi * rng.NextUniform();
    out[i] = std * r * std::cos(theta);
    if (i + 1 < dim) out[i + 1] = std * r * std::sin(theta);
  }
  return out;
}

std::vector<double> DirichletSample(RngStream& rng, double alpha,
                                    std::size_t k) {
  if (k == 0) throw UsageError("dirichlet needs at least one category");
  std::vector<double> g(k);
  double sum = 0.0;
  for (double& x : g) {
    x = rng.NextGamma(alpha);
    sum += x;
  }
  if (sum <= 0.0) {
    // All draws underflowed; collapse onto one category.
    std::fill(g.begin(), g.end(), 0.0);
    g[rng.NextBelow(k)] = 1.0;
    return g;
  }
  for (double& x : g) x /= sum;
  return g;
}

}  // namespace fairdp
