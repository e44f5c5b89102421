// softalign/cost.hpp

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

#ifndef SOFTALIGN_COST_HPP
#define SOFTALIGN_COST_HPP

#include <string>
#include <string_view>

#include "softalign/common.hpp"
#include "softalign/sequence.hpp"

namespace softalign {

// Frame-to-frame distance. Euclidean is the default; squared Euclidean is
// smooth at coincident frames, which matters for gradient-based training.
enum class CostKind { kEuclidean, kSquaredEuclidean };

inline CostKind parse_cost_kind(std::string_view name) {
  if (name == "euclidean") return CostKind::kEuclidean;
  if (name == "sqeuclidean") return CostKind::kSquaredEuclidean;
  throw UsageError("unknown cost kind '" + std::string(name) +
                   "' (expected euclidean or sqeuclidean)");
}

// All pairwise frame distances between a and b: entry (i, j) is the distance
// of a's frame i and b's frame j, so the result is length(a) x length(b).
template <typename Derived>
Matrix pairwise_cost(const Eigen::MatrixBase<Derived>& a,
                     const Eigen::MatrixBase<Derived>& b, CostKind kind) {
  if (a.cols() != b.cols()) {
    throw UsageError("pairwise_cost: dimension mismatch (" +
                     std::to_string(a.cols()) + " vs " + std::to_string(b.cols()) + ")");
  }
  Matrix delta(a.rows(), b.rows());
  for (Index i = 0; i < a.rows(); ++i) {
    for (Index j = 0; j < b.rows(); ++j) {
      const double sq = (a.row(i) - b.row(j)).squaredNorm();
      delta(i, j) = kind == CostKind::kEuclidean ? std::sqrt(sq) : sq;
    }
  }
  return delta;
}

inline Matrix pairwise_cost(const Sequence& a, const Sequence& b, CostKind kind) {
  return pairwise_cost(a.frames(), b.frames(), kind);
}

}  // namespace softalign

#endif  // SOFTALIGN_COST_HPP
