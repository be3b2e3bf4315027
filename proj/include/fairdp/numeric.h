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

#ifndef FAIRDP_NUMERIC_H_
#define FAIRDP_NUMERIC_H_

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <string_view>
#include <vector>

namespace fairdp {

// Flat real-valued parameter or update vector. Holds global weights, local
// weights and per-client update differences alike.
class ParamVector {
 public:
  ParamVector() = default;
  explicit ParamVector(std::vector<double> values);
  ParamVector(std::initializer_list<double> values);

  static ParamVector Zeros(std::size_t dim);

  std::size_t dim() const { return values_.size(); }
  bool empty() const { return values_.empty(); }

  double operator[](std::size_t i) const { return values_[i]; }
  double& operator[](std::size_t i) { return values_[i]; }

  std::span<const double> values() const { return values_; }
  std::span<double> mutable_values() { return values_; }

  bool AllFinite() const;

  // Elementwise arithmetic. Dimension mismatch throws UsageError.
  ParamVector& operator+=(const ParamVector& other);
  ParamVector& operator-=(const ParamVector& other);
  ParamVector& operator*=(double scale);

  friend ParamVector operator+(ParamVector lhs, const ParamVector& rhs) {
    return lhs += rhs;
  }
  friend ParamVector operator-(ParamVector lhs, const ParamVector& rhs) {
    return lhs -= rhs;
  }
  friend ParamVector operator*(ParamVector v, double scale) {
    return v *= scale;
  }
  friend ParamVector operator*(double scale, ParamVector v) {
    return v *= scale;
  }

  bool operator==(const ParamVector&) const = default;

 private:
  std::vector<double> values_;
};

// Euclidean norm. Throws UsageError on empty input.
double L2Norm(std::span<const double> v);
inline double L2Norm(const ParamVector& v) { return L2Norm(v.values()); }

// Correctly rounded sum of `xs` (Shewchuk partials), so the result does not
// depend on the order of the inputs. Non-finite inputs fall back to plain
// summation.
double ExactSum(std::span<const double> xs);

// Odd length: middle order statistic. Even length: mean of the two middle
// order statistics. Throws UsageError on empty input.
double Median(std::span<const double> xs);

// Counter-based random stream. A stream is the pair (key, counter); each draw
// hashes the pair and bumps the counter, so copies are independent and two
// streams with the same derivation path produce identical sequences.
//
// Substreams are derived by label and index, e.g.
//   RngStream::Root(seed).Derive("round", t).Derive("client", i)
// and never share state with their parent.
class RngStream {
 public:
  static RngStream Root(std::uint64_t master_seed);

  RngStream Derive(std::string_view label, std::uint64_t index = 0) const;

  std::uint64_t NextU64();
  // Uniform on the open interval (0, 1).
  double NextUniform();
  // Uniform integer in [0, n). n must be positive.
  std::uint64_t NextBelow(std::uint64_t n);
  double NextNormal();
  // Gamma(shape, 1) via Marsaglia-Tsang.
  double NextGamma(double shape);

  std::uint64_t key() const { return key_; }
  std::uint64_t counter() const { return counter_; }

  bool operator==(const RngStream&) const = default;

 private:
  RngStream(std::uint64_t key, std::uint64_t counter)
      : key_(key), counter_(counter) {}

  std::uint64_t key_ = 0;
  std::uint64_t counter_ = 0;
};

// `dim` i.i.d. draws from Normal(0, std^2); std == 0 yields exact zeros and
// leaves the stream untouched. Negative std throws UsageError.
ParamVector GaussianVector(RngStream& rng, double std, std::size_t dim);

// Dirichlet(alpha, ..., alpha) over `k` categories.
std::vector<double> DirichletSample(RngStream& rng, double alpha,
                                    std::size_t k);

// In-place Fisher-Yates shuffle driven by `rng`.
template <typename T>
void Shuffle(std::vector<T>& items, RngStream& rng) {
  for (std::size_t i = items.size(); i > 1; --i) {
    std::size_t j = static_cast<std::size_t>(rng.NextBelow(i));
    std::swap(items[i - 1], items[j]);
  }
}

}  // namespace fairdp

#endif  // FAIRDP_NUMERIC_H_
