// softalign/dtw.hpp

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

#ifndef SOFTALIGN_DTW_HPP
#define SOFTALIGN_DTW_HPP

#include <array>
#include <utility>
#include <vector>

#include "softalign/common.hpp"
#include "softalign/cost.hpp"
#include "softalign/sequence.hpp"
#include "softalign/softmin.hpp"

namespace softalign {

// Accumulated alignment costs with one boundary row and column:
// r(0,0) = 0, r(i,0) = r(0,j) = +inf, and interior cell (i, j) holds the
// (soft) cost of aligning the first i frames of a with the first j of b.
struct DpTable {
  Matrix r;     // (m+1) x (n+1)
  Gamma gamma;

  Index m() const { return r.rows() - 1; }
  Index n() const { return r.cols() - 1; }
};

// Monotone, continuous alignment: 1-based frame pairs from (1,1) to (m,n)
// advancing by (1,0), (0,1) or (1,1) at each step.
struct AlignmentPath {
  std::vector<std::pair<Index, Index>> pairs;
};

namespace detail {

// Shared forward recursion over a precomputed cost matrix. gamma == 0 runs
// the hard-minimum recursion, gamma > 0 the smoothed one; both go through
// soft_min so table cells match it bit for bit.
inline Matrix dp_forward(const Matrix& delta, double gamma) {
  const Index m = delta.rows();
  const Index n = delta.cols();
  Matrix r = Matrix::Constant(m + 1, n + 1, kInf);
  r(0, 0) = 0.0;
  for (Index i = 1; i <= m; ++i) {
    for (Index j = 1; j <= n; ++j) {
      const std::array<double, 3> prev = {r(i - 1, j), r(i, j - 1), r(i - 1, j - 1)};
      r(i, j) = delta(i - 1, j - 1) + soft_min(std::span<const double>(prev), gamma);
    }
  }
  return r;
}

}  // namespace detail

struct DtwResult {
  double distance;
  DpTable table;
};

// Exact dynamic time warping distance: the minimum over all monotone,
// continuous alignments of the summed frame costs.
inline DtwResult dtw(const Sequence& a, const Sequence& b,
                     CostKind kind = CostKind::kEuclidean) {
  const Matrix delta = pairwise_cost(a, b, kind);
  Matrix r = detail::dp_forward(delta, 0.0);
  const double distance = r(a.length(), b.length());
  return {distance, DpTable{std::move(r), Gamma(0.0)}};
}

// Recovers one optimal alignment from a hard-minimum table. Among equally
// cheap alignments the result is canonical: walking from (1,1), the step
// taken is the first optimal one in the order diagonal, then a-advance
// (i+1, j), then b-advance (i, j+1). Requires a gamma = 0 table; a smoothed
// table has no discrete path.
inline AlignmentPath backtrack(const DpTable& table) {
  if (!table.gamma.is_zero()) {
    throw UsageError("backtrack requires a gamma = 0 table");
  }
  const Index m = table.m();
  const Index n = table.n();
  const Matrix& r = table.r;

  const auto min_pred = [&](Index i, Index j) {
    return std::min({r(i - 1, j - 1), r(i - 1, j), r(i, j - 1)});
  };

  // Mark every cell that lies on at least one optimal alignment, sweeping
  // from (m, n) so each cell's successors are settled first.
  Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> on_optimal(m + 1, n + 1);
  on_optimal.setConstant(false);
  on_optimal(m, n) = true;
  for (Index i = m; i >= 1; --i) {
    for (Index j = n; j >= 1; --j) {
      if (!on_optimal(i, j)) continue;
      const double best = min_pred(i, j);
      if (i > 1 && j > 1 && r(i - 1, j - 1) == best) on_optimal(i - 1, j - 1) = true;
      if (i > 1 && r(i - 1, j) == best) on_optimal(i - 1, j) = true;
      if (j > 1 && r(i, j - 1) == best) on_optimal(i, j - 1) = true;
    }
  }

  AlignmentPath path;
  path.pairs.reserve(static_cast<std::size_t>(m + n - 1));
  Index i = 1, j = 1;
  path.pairs.emplace_back(i, j);
  constexpr std::array<std::pair<Index, Index>, 3> kSteps = {
      {{1, 1}, {1, 0}, {0, 1}}};
  while (i != m || j != n) {
    bool stepped = false;
    for (const auto& [di, dj] : kSteps) {
      const Index ni = i + di, nj = j + dj;
      if (ni > m || nj > n || !on_optimal(ni, nj)) continue;
      if (r(i, j) != min_pred(ni, nj)) continue;  // (i,j) must launch an optimal step
      i = ni;
      j = nj;
      path.pairs.emplace_back(i, j);
      stepped = true;
      break;
    }
    if (!stepped) throw DataError("backtrack: table violates the DP recursion");
  }
  return path;
}

}  // namespace softalign

#endif  // SOFTALIGN_DTW_HPP
