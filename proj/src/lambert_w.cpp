// Copyright 2026 The MCB-MSN Authors
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

#include "mcb/lambert_w.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mcb/common.hpp"

namespace mcb {

namespace {

constexpr double kE = 2.718281828459045235;
constexpr double kInvE = 0.36787944117144232160;

double initial_guess(double z) {
  if (z < -0.32) {
    // Series about the branch point in p = sqrt(2 (e z + 1)).
    const double p = std::sqrt(std::max(0.0, 2.0 * (kE * z + 1.0)));
    return -1.0 + p - p * p / 3.0 + 11.0 / 72.0 * p * p * p;
  }
  if (z < 3.0) {
    const double l = std::log1p(z);
    return l * (1.0 - std::log1p(l) / (2.0 + l));
  }
  const double l1 = std::log(z);
  const double l2 = std::log(l1);
  return l1 - l2 + l2 / l1;
}

}  // namespace

double lambert_w0(double z) {
  if (std::isnan(z)) return z;
  if (z < -kInvE) {
    // Allow the last-ulp rounding of -1/e itself.
    if (z >= -kInvE * (1.0 + 4.0 * std::numeric_limits<double>::epsilon())) return -1.0;
    throw DomainError("lambert_w0: z must be >= -1/e");
  }
  if (z == 0.0) return 0.0;
  if (std::isinf(z)) return z;

  double w = initial_guess(z);
  for (int iter = 0; iter < 64; ++iter) {
    const double ew = std::exp(w);
    const double f = w * ew - z;
    const double wp1 = w + 1.0;
    if (wp1 == 0.0 || f == 0.0) break;
    const double step = f / (ew * wp1 - (w + 2.0) * f / (2.0 * wp1));
    const double next = w - step;
    if (std::abs(next - w) <= 4.0 * std::numeric_limits<double>::epsilon() * (1.0 + std::abs(next))) {
      w = next;
      break;
    }
    w = next;
  }
  return w;
}

}  // namespace mcb
