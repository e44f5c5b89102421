// softalign/softdtw_test.cpp

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

#include <cmath>

#include <doctest.h>

#include "softalign/dtw.hpp"
#include "softalign/softdtw.hpp"
#include "testing_util.hpp"

using namespace softalign;
using softalign::testing::random_sequence;
using softalign::testing::rel_err;

namespace {

Sequence seq1d(std::initializer_list<double> values) {
  Matrix f(static_cast<Index>(values.size()), 1);
  Index i = 0;
  for (double v : values) f(i++, 0) = v;
  return Sequence(std::move(f));
}

}  // namespace

TEST_SUITE("softdtw") {

TEST_CASE("hand example at gamma 1") {
  const Sequence a = seq1d({0, 1, 2});
  const Sequence b = seq1d({0, 2});
  // Five feasible paths with costs 1, 1, 2, 3, 3.
  const double expected =
      -std::log(2.0 * std::exp(-1.0) + std::exp(-2.0) + 2.0 * std::exp(-3.0));
  CHECK(soft_dtw(a, b, Gamma(1.0)).loss == doctest::Approx(expected).epsilon(1e-12));
  CHECK(soft_dtw(a, b, Gamma(1.0)).loss == doctest::Approx(0.0297705).epsilon(1e-5));
}

TEST_CASE("matches the per-path soft-min oracle") {
  Rng rng(31);
  for (int rep = 0; rep < 40; ++rep) {
    const Index m = 1 + rng.integer(6);
    const Index n = 1 + rng.integer(6);
    const Index d = 1 + rng.integer(3);
    const Sequence a = random_sequence(rng, m, d);
    const Sequence b = random_sequence(rng, n, d);
    for (double gamma : {0.1, 1.0, 10.0}) {
      const double fast = soft_dtw(a, b, Gamma(gamma)).loss;
      const double oracle = brute_force_dtw(a, b, Gamma(gamma));
      CHECK(std::abs(fast - oracle) < 1e-9);
    }
  }
}

TEST_CASE("gamma zero reproduces hard dtw exactly") {
  Rng rng(32);
  const Sequence a = random_sequence(rng, 8, 2);
  const Sequence b = random_sequence(rng, 6, 2);
  CHECK(soft_dtw(a, b, Gamma(0.0)).loss == dtw(a, b).distance);
}

TEST_CASE("small gamma converges to hard dtw") {
  Rng rng(33);
  for (int rep = 0; rep < 5; ++rep) {
    const Sequence a = random_sequence(rng, 30, 4);
    const Sequence b = random_sequence(rng, 25, 4);
    const double hard = dtw(a, b).distance;
    const double soft = soft_dtw(a, b, Gamma(1e-6)).loss;
    CHECK(std::abs(soft - hard) < 1e-4);
  }
}

TEST_CASE("loss decreases as gamma grows and lower-bounds hard dtw") {
  Rng rng(34);
  const Sequence a = random_sequence(rng, 10, 3);
  const Sequence b = random_sequence(rng, 12, 3);
  const double hard = dtw(a, b).distance;
  double prev = hard;
  for (double gamma : {0.01, 0.1, 1.0, 10.0}) {
    const double soft = soft_dtw(a, b, Gamma(gamma)).loss;
    CHECK(soft <= prev + 1e-12);
    prev = soft;
  }
}

TEST_CASE("gradient matches central finite differences") {
  Rng rng(35);
  for (int rep = 0; rep < 10; ++rep) {
    const Index m = 3 + rng.integer(4);
    const Index n = 3 + rng.integer(4);
    const Index d = 1 + rng.integer(3);
    const Sequence a = random_sequence(rng, m, d);
    const Sequence b = random_sequence(rng, n, d);
    for (double gamma : {0.1, 1.0}) {
      for (CostKind kind : {CostKind::kEuclidean, CostKind::kSquaredEuclidean}) {
        const SoftDtwGrad grad = soft_dtw_grad(a, b, Gamma(gamma), kind);
        Matrix frames = a.frames();
        for (Index i = 0; i < m; ++i) {
          for (Index k = 0; k < d; ++k) {
            const double h = 1e-5;
            const double saved = frames(i, k);
            frames(i, k) = saved + h;
            const double up = soft_dtw(Sequence(frames), b, Gamma(gamma), kind).loss;
            frames(i, k) = saved - h;
            const double down = soft_dtw(Sequence(frames), b, Gamma(gamma), kind).loss;
            frames(i, k) = saved;
            const double numeric = (up - down) / (2.0 * h);
            CHECK(rel_err(numeric, grad.d_a(i, k)) < 1e-6);
          }
        }
      }
    }
  }
}

TEST_CASE("occupancy matrix is a path-visit distribution") {
  Rng rng(36);
  for (int rep = 0; rep < 10; ++rep) {
    const Index m = 2 + rng.integer(6);
    const Index n = 2 + rng.integer(6);
    const Sequence a = random_sequence(rng, m, 2);
    const Sequence b = random_sequence(rng, n, 2);
    const SoftDtwGrad grad = soft_dtw_grad(a, b, Gamma(0.5));
    REQUIRE(grad.d_delta.rows() == m);
    REQUIRE(grad.d_delta.cols() == n);
    CHECK(grad.d_delta.minCoeff() >= -1e-12);
    CHECK(grad.d_delta.maxCoeff() <= 1.0 + 1e-9);
    // Every feasible path visits the two corners.
    CHECK(grad.d_delta(0, 0) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(grad.d_delta(m - 1, n - 1) == doctest::Approx(1.0).epsilon(1e-9));
    // A path visits each row between 1 and n times, each column between 1
    // and m times; expectations inherit the bounds.
    for (Index i = 0; i < m; ++i) {
      const double row = grad.d_delta.row(i).sum();
      CHECK(row >= 1.0 - 1e-9);
      CHECK(row <= static_cast<double>(n) + 1e-9);
    }
    for (Index j = 0; j < n; ++j) {
      const double col = grad.d_delta.col(j).sum();
      CHECK(col >= 1.0 - 1e-9);
      CHECK(col <= static_cast<double>(m) + 1e-9);
    }
  }
}

TEST_CASE("self-alignment gradient sums to zero per dimension") {
  // For a = b under the squared cost the loss is invariant to moving both
  // copies together, so the frame-summed gradient of one side vanishes.
  Rng rng(37);
  const Sequence a = random_sequence(rng, 6, 3);
  const SoftDtwGrad grad = soft_dtw_grad(a, a, Gamma(1.0), CostKind::kSquaredEuclidean);
  const Eigen::RowVectorXd colsum = grad.d_a.colwise().sum();
  CHECK(colsum.cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("gradient requires positive gamma") {
  const Sequence a = seq1d({0, 1});
  CHECK_THROWS_AS(soft_dtw_grad(a, a, Gamma(0.0)), UsageError);
}

TEST_CASE("brute force rejects oversized problems") {
  Rng rng(38);
  const Sequence a = random_sequence(rng, 10, 1);
  const Sequence b = random_sequence(rng, 10, 1);
  CHECK_THROWS_AS(brute_force_dtw(a, b, Gamma(1.0)), UsageError);
}

}  // TEST_SUITE
