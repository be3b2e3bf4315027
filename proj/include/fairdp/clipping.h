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

#ifndef FAIRDP_CLIPPING_H_
#define FAIRDP_CLIPPING_H_

#include <string_view>
#include <utility>

#include "fairdp/numeric.h"

namespace fairdp {

enum class ClippedBy { kNone, kDpBound, kBiasBound };

std::string_view ToString(ClippedBy reason);
ClippedBy ClippedByFromString(std::string_view name);

// Outcome of one norm clip: the output is factor * input.
struct ClipReport {
  double pre_norm = 0.0;
  double factor = 1.0;  // in (0, 1]; 1 iff clipped_by == kNone
  ClippedBy clipped_by = ClippedBy::kNone;
};

template <typename T>
struct Clipped {
  T value;
  ClipReport report;
};

// Coordinate-wise clamp to [lo, hi].
ParamVector ClipByValue(const ParamVector& v, double lo, double hi);

// Rescales v onto the ball of radius c if it lies outside.
Clipped<ParamVector> ClipByNorm(const ParamVector& v, double c);

// Norm clip of a full parameter vector (as opposed to an update).
ParamVector ModelClip(const ParamVector& w, double c);

// Update difference w_final - w_init.
ParamVector ComputeUpdate(const ParamVector& w_final,
                          const ParamVector& w_init);

// Dual-threshold clip: delta / max(1, |delta|/S, |delta|/M). The report
// names the binding bound; when S == M the dp bound is reported.
// M may be +infinity.
Clipped<ParamVector> DualClip(const ParamVector& delta, double s, double m);

}  // namespace fairdp

#endif  // FAIRDP_CLIPPING_H_
