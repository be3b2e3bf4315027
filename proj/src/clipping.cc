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

#include "fairdp/clipping.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "fairdp/errors.h"

namespace fairdp {

std::string_view ToString(ClippedBy reason) {
  switch (reason) {
    case ClippedBy::kNone:
      return "none";
    case ClippedBy::kDpBound:
      return "dp_bound";
    case ClippedBy::kBiasBound:
      return "bias_bound";
  }
  return "unknown";
}

ClippedBy ClippedByFromString(std::string_view name) {
  if (name == "none") return ClippedBy::kNone;
  if (name == "dp_bound") return ClippedBy::kDpBound;
  if (name == "bias_bound") return ClippedBy::kBiasBound;
  throw UsageError("unknown clip reason '" + std::string(name) + "'");
}

ParamVector ClipByValue(const ParamVector& v, double lo, double hi) {
  if (!(lo <= hi)) throw UsageError("clip_by_value requires lo <= hi");
  ParamVector out = v;
  for (double& x : out.mutable_values()) x = std::min(hi, std::max(lo, x));
  return out;
}

Clipped<ParamVector> ClipByNorm(const ParamVector& v, double c) {
  if (!(c > 0.0)) throw UsageError("clip norm must be positive");
  ClipReport report;
  report.pre_norm = L2Norm(v);
  if (report.pre_norm <= c) return {v, report};
  report.factor = c / report.pre_norm;
  report.clipped_by = ClippedBy::kDpBound;
  return {v * report.factor, report};
}

ParamVector ModelClip(const ParamVector& w, double c) {
  return ClipByNorm(w, c).value;
}

ParamVector ComputeUpdate(const ParamVector& w_final,
                          const ParamVector& w_init) {
  if (w_final.dim() != w_init.dim()) {
    throw UsageError("update endpoints differ in dimension");
  }
  return w_final - w_init;
}

Clipped<ParamVector> DualClip(const ParamVector& delta, double s, double m) {
  if (!(s > 0.0) || !(m > 0.0)) {
    throw UsageError("clip thresholds S and M must be positive");
  }
  ClipReport report;
  report.pre_norm = L2Norm(delta);
  const double denom =
      std::max({1.0, report.pre_norm / s, report.pre_norm / m});
  if (denom == 1.0) return {delta, report};
  report.factor = 1.0 / denom;
  report.clipped_by = s <= m ? ClippedBy::kDpBound : ClippedBy::kBiasBound;
  ParamVector out = delta;
  for (double& x : out.mutable_values()) x /= denom;
  return {std::move(out), report};
}

}  // namespace fairdp
