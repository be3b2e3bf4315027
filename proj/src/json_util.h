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

#ifndef FAIRDP_SRC_JSON_UTIL_H_
#define FAIRDP_SRC_JSON_UTIL_H_

#include <cmath>
#include <limits>
#include <stdexcept>

#include "json.hpp"

namespace fairdp::internal {

// JSON has no infinity literal; +inf is written as the string "inf".
inline nlohmann::json RealToJson(double x) {
  if (std::isinf(x) && x > 0) return "inf";
  return x;
}

inline double RealFromJson(const nlohmann::json& j) {
  if (j.is_string()) {
    if (j.get<std::string>() == "inf") {
      return std::numeric_limits<double>::infinity();
    }
    throw std::invalid_argument("expected a number or \"inf\"");
  }
  return j.get<double>();
}

}  // namespace fairdp::internal

#endif  // FAIRDP_SRC_JSON_UTIL_H_
