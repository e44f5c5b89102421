// softalign/softmin.hpp

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#ifndef SOFTALIGN_SOFTMIN_HPP
#define SOFTALIGN_SOFTMIN_HPP

#include <cmath>
#include <span>

#include "softalign/common.hpp"
#include "softalign/sequence.hpp"

namespace softalign {

// Smoothed minimum: min(values) at gamma 0, otherwise
//   -gamma * log(sum_i exp(-values[i] / gamma)).
// Stabilized by shifting with min(values) before exponentiation, so values up
// to |1e300| neither overflow nor underflow the result. +inf entries carry
// zero weight (they stand for unreachable dynamic-programming cells); the
// result is +inf only when every entry is +inf.
template <typename Scalar>
Scalar soft_min(std::span<const Scalar> values, Scalar gamma) {
  if (values.empty()) throw UsageError("soft_min of an empty list");

  Scalar lowest = std::numeric_limits<Scalar>::infinity();
  for (const Scalar v : values) {
    if (v < lowest) lowest = v;
  }
  if (gamma == Scalar(0) || lowest == std::numeric_limits<Scalar>::infinity()) {
    return lowest;
  }

  Scalar total = Scalar(0);
  for (const Scalar v : values) {
    if (v == std::numeric_limits<Scalar>::infinity()) continue;
    total += std::exp(-(v - lowest) / gamma);
  }
  return lowest - gamma * std::log(total);
}

inline double soft_min(std::span<const double> values, const Gamma& gamma) {
  return soft_min(values, gamma.value());
}

}  // namespace softalign

#endif  // SOFTALIGN_SOFTMIN_HPP
