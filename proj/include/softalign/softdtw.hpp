// softalign/softdtw.hpp

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

#ifndef SOFTALIGN_SOFTDTW_HPP
#define SOFTALIGN_SOFTDTW_HPP

#include <cmath>
#include <utility>
#include <vector>

#include "softalign/common.hpp"
#include "softalign/cost.hpp"
#include "softalign/dtw.hpp"
#include "softalign/sequence.hpp"
#include "softalign/softmin.hpp"

namespace softalign {

struct SoftDtwResult {
  double loss;
  DpTable table;
};

// Smoothed alignment cost: the hard-minimum of the DTW recursion replaced by
// soft_min at temperature gamma. Equals the soft minimum of the summed costs
// over all feasible alignments; gamma = 0 reproduces dtw exactly.
inline SoftDtwResult soft_dtw(const Sequence& a, const Sequence& b, const Gamma& gamma,
                              CostKind kind = CostKind::kEuclidean) {
  const Matrix delta = pairwise_cost(a, b, kind);
  Matrix r = detail::dp_forward(delta, gamma.value());
  const double loss = r(a.length(), b.length());
  return {loss, DpTable{std::move(r), gamma}};
}

// Gradients of the smoothed alignment cost. d_delta(i, j) is the soft
// occupancy of cell (i, j) -- how much of the alignment mass crosses that
// frame pair -- and d_a is the chain-ruled gradient with respect to a's
// frames, treating b as fixed.
struct SoftDtwGrad {
  Matrix d_delta;  // m x n
  Matrix d_a;      // m x D
};

namespace detail {

// Reverse sweep over the forward table: occupancy(i, j) accumulates from the
// three successor cells with weights exp((r_succ - r(i,j) - delta_succ) / gamma).
inline Matrix dp_backward(const Matrix& delta, const Matrix& r, double gamma) {
  const Index m = delta.rows();
  const Index n = delta.cols();
  Matrix occupancy = Matrix::Zero(m + 2, n + 2);
  occupancy(m + 1, n + 1) = 1.0;

  // Padded copies so the sweep needs no branches at the top/right borders:
  // past-the-end cells carry -inf cost, which zeroes their weight.
  Matrix rp = Matrix::Constant(m + 2, n + 2, -kInf);
  rp.topLeftCorner(m + 1, n + 1) = r;
  rp(m + 1, n + 1) = r(m, n);
  Matrix dp = Matrix::Zero(m + 2, n + 2);
  dp.block(1, 1, m, n) = delta;

  const auto weight = [&](Index from_i, Index from_j, Index to_i, Index to_j) {
    if (rp(to_i, to_j) == -kInf) return 0.0;
    return std::exp((rp(to_i, to_j) - rp(from_i, from_j) - dp(to_i, to_j)) / gamma);
  };

  for (Index i = m; i >= 1; --i) {
    for (Index j = n; j >= 1; --j) {
      occupancy(i, j) = weight(i, j, i + 1, j) * occupancy(i + 1, j) +
                        weight(i, j, i, j + 1) * occupancy(i, j + 1) +
                        weight(i, j, i + 1, j + 1) * occupancy(i + 1, j + 1);
    }
  }
  return occupancy.block(1, 1, m, n);
}

}  // namespace detail

inline SoftDtwGrad soft_dtw_grad(const Sequence& a, const Sequence& b, const Gamma& gamma,
                                 CostKind kind = CostKind::kEuclidean) {
  if (gamma.is_zero()) {
    throw UsageError("soft_dtw_grad requires gamma > 0 (the hard minimum is not differentiable)");
  }
  const Matrix delta = pairwise_cost(a, b, kind);
  const Matrix r = detail::dp_forward(delta, gamma.value());
  Matrix d_delta = detail::dp_backward(delta, r, gamma.value());

  // d_a(i) = sum_j d_delta(i, j) * d delta(i, j) / d a_i. Euclidean cost has
  // no derivative at coincident frames; those cells contribute the zero
  // subgradient.
  Matrix d_a = Matrix::Zero(a.length(), a.dim());
  for (Index i = 0; i < a.length(); ++i) {
    for (Index j = 0; j < b.length(); ++j) {
      const Eigen::RowVectorXd diff = a.frame(i) - b.frame(j);
      if (kind == CostKind::kSquaredEuclidean) {
        d_a.row(i) += d_delta(i, j) * 2.0 * diff;
      } else if (delta(i, j) > 0.0) {
        d_a.row(i) += (d_delta(i, j) / delta(i, j)) * diff;
      }
    }
  }
  return {std::move(d_delta), std::move(d_a)};
}

// Testing oracle: enumerates every feasible alignment outright and soft-mins
// the per-path costs. Exponential in the table size, hence the m*n cap.
inline double brute_force_dtw(const Sequence& a, const Sequence& b, const Gamma& gamma,
                              CostKind kind = CostKind::kEuclidean) {
  const Index m = a.length();
  const Index n = b.length();
  if (m * n > 49) {
    throw UsageError("brute_force_dtw is capped at m*n <= 49");
  }
  const Matrix delta = pairwise_cost(a, b, kind);

  std::vector<double> path_costs;
  const auto enumerate = [&](auto&& self, Index i, Index j, double cost) -> void {
    cost += delta(i, j);
    if (i == m - 1 && j == n - 1) {
      path_costs.push_back(cost);
      return;
    }
    if (i + 1 < m) self(self, i + 1, j, cost);
    if (j + 1 < n) self(self, i, j + 1, cost);
    if (i + 1 < m && j + 1 < n) self(self, i + 1, j + 1, cost);
  };
  enumerate(enumerate, 0, 0, 0.0);
  return soft_min(std::span<const double>(path_costs), gamma.value());
}

}  // namespace softalign

#endif  // SOFTALIGN_SOFTDTW_HPP
