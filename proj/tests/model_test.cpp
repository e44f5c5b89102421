// softalign/model_test.cpp

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
#include <string>
#include <vector>

#include <doctest.h>

#include "softalign/io.hpp"
#include "softalign/model.hpp"
#include "softalign/softdtw.hpp"
#include "testing_util.hpp"

using namespace softalign;
using softalign::testing::TempDir;
using softalign::testing::random_stack;
using softalign::testing::rel_err;

namespace {

ShapeConfig small_shape() {
  ShapeConfig shape;
  shape.num_layers = 2;
  shape.input_dim = 3;
  shape.conv1_channels = 4;
  shape.conv2_channels = 4;
  shape.hidden_dim = 4;
  shape.output_dim = 2;
  shape.rnn_layers = 2;
  return shape;
}

// Scalar probe loss: sum of squares of the prediction, so d_pred = 2 * pred.
double probe_loss(const Sequence& pred) { return pred.frames().squaredNorm(); }

}  // namespace

TEST_SUITE("model") {

TEST_CASE("fuse with uniform logits averages the layers") {
  Rng rng(41);
  const FeatureStack stack = random_stack(rng, 3, 5, 2);
  FusionWeights fusion;
  fusion.logits = Vector::Zero(3);
  const Sequence fused = fuse(stack, fusion);
  Matrix mean = Matrix::Zero(5, 2);
  for (Index i = 0; i < 3; ++i) mean += stack.layer(i);
  mean /= 3.0;
  CHECK((fused.frames() - mean).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("fuse with a dominant logit picks that layer") {
  Rng rng(42);
  const FeatureStack stack = random_stack(rng, 2, 4, 3);
  FusionWeights fusion;
  fusion.logits = Vector::Zero(2);
  fusion.logits(1) = 50.0;
  const Sequence fused = fuse(stack, fusion);
  CHECK((fused.frames() - stack.layer(1)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("fusion weights form a simplex") {
  FusionWeights fusion;
  fusion.logits = Vector(4);
  fusion.logits << -2.0, 0.5, 3.0, 1.0;
  const Vector alpha = fusion.alphas();
  CHECK(alpha.sum() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(alpha.minCoeff() > 0.0);
  CHECK(alpha.maxCoeff() < 1.0);
}

TEST_CASE("forward halves the frame count") {
  Rng rng(43);
  const ShapeConfig shape = small_shape();
  const RegressorParams params = init_params(7, shape);
  for (Index t : {8, 9, 15, 16}) {
    const FeatureStack stack = random_stack(rng, shape.num_layers, t, shape.input_dim);
    const ForwardResult result = forward(params, stack);
    CHECK(result.pred.length() == t / 2);
    CHECK(result.pred.dim() == shape.output_dim);
  }
}

TEST_CASE("forward rejects too-short inputs and wrong shapes") {
  Rng rng(44);
  const ShapeConfig shape = small_shape();
  const RegressorParams params = init_params(7, shape);
  CHECK_THROWS_AS(forward(params, random_stack(rng, shape.num_layers, 3, shape.input_dim)),
                  UsageError);
  CHECK_THROWS_AS(forward(params, random_stack(rng, shape.num_layers + 1, 8, shape.input_dim)),
                  UsageError);
  CHECK_THROWS_AS(forward(params, random_stack(rng, shape.num_layers, 8, shape.input_dim + 1)),
                  UsageError);
}

TEST_CASE("forward is deterministic") {
  Rng rng(45);
  const ShapeConfig shape = small_shape();
  const RegressorParams params = init_params(3, shape);
  const FeatureStack stack = random_stack(rng, shape.num_layers, 10, shape.input_dim);
  const Sequence p1 = forward(params, stack).pred;
  const Sequence p2 = forward(params, stack).pred;
  CHECK((p1.frames() - p2.frames()).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("init draws stay inside the fan-in bound and reproduce by seed") {
  const ShapeConfig shape = small_shape();
  const RegressorParams a = init_params(11, shape);
  const RegressorParams b = init_params(11, shape);
  const RegressorParams c = init_params(12, shape);
  CHECK((flatten(a) - flatten(b)).cwiseAbs().maxCoeff() == 0.0);
  CHECK((flatten(a) - flatten(c)).cwiseAbs().maxCoeff() > 0.0);

  const double head_bound = 1.0 / std::sqrt(2.0 * static_cast<double>(shape.hidden_dim));
  CHECK(a.head_weight.cwiseAbs().maxCoeff() <= head_bound);
  const double conv1_bound = 1.0 / std::sqrt(3.0 * static_cast<double>(shape.input_dim));
  for (const Matrix& tap : a.conv1_kernel) {
    CHECK(tap.cwiseAbs().maxCoeff() <= conv1_bound);
  }
}

TEST_CASE("flatten and unflatten are inverse bijections") {
  const ShapeConfig shape = small_shape();
  const RegressorParams params = init_params(5, shape);
  const Vector theta = flatten(params);
  CHECK(theta.size() == num_params(shape));
  RegressorParams rebuilt = zero_like(params);
  unflatten(theta, rebuilt);
  CHECK((flatten(rebuilt) - theta).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("backward matches finite differences tensor by tensor") {
  Rng rng(46);
  const ShapeConfig shape = small_shape();
  RegressorParams params = init_params(9, shape);
  const FeatureStack stack = random_stack(rng, shape.num_layers, 8, shape.input_dim);

  const ForwardResult result = forward(params, stack);
  const Sequence& pred = result.pred;
  Matrix d_pred = 2.0 * pred.frames();
  const GradientBundle grads = backward(result.tape, d_pred);

  Vector analytic = flatten(grads);
  Vector theta = flatten(params);
  const double h = 1e-5;
  double worst = 0.0;
  for (Index k = 0; k < theta.size(); ++k) {
    const double saved = theta(k);
    RegressorParams probe = zero_like(params);
    theta(k) = saved + h;
    unflatten(theta, probe);
    const double up = probe_loss(forward(probe, stack).pred);
    theta(k) = saved - h;
    unflatten(theta, probe);
    const double down = probe_loss(forward(probe, stack).pred);
    theta(k) = saved;
    const double numeric = (up - down) / (2.0 * h);
    worst = std::max(worst, rel_err(numeric, analytic(k)));
  }
  CHECK(worst < 1e-6);
}

TEST_CASE("backward matches finite differences through the soft-DTW loss") {
  Rng rng(47);
  const ShapeConfig shape = small_shape();
  RegressorParams params = init_params(10, shape);
  const FeatureStack stack = random_stack(rng, shape.num_layers, 8, shape.input_dim);
  const Sequence target = softalign::testing::random_sequence(rng, 3, shape.output_dim);
  const Gamma gamma(0.5);

  const ForwardResult result = forward(params, stack);
  const SoftDtwGrad loss_grad = soft_dtw_grad(result.pred, target, gamma);
  const GradientBundle grads = backward(result.tape, loss_grad.d_a);

  Vector analytic = flatten(grads);
  Vector theta = flatten(params);
  const double h = 1e-5;
  double worst = 0.0;
  for (Index k = 0; k < theta.size(); ++k) {
    const double saved = theta(k);
    RegressorParams probe = zero_like(params);
    theta(k) = saved + h;
    unflatten(theta, probe);
    const double up = soft_dtw(forward(probe, stack).pred, target, gamma).loss;
    theta(k) = saved - h;
    unflatten(theta, probe);
    const double down = soft_dtw(forward(probe, stack).pred, target, gamma).loss;
    theta(k) = saved;
    const double numeric = (up - down) / (2.0 * h);
    worst = std::max(worst, rel_err(numeric, analytic(k)));
  }
  CHECK(worst < 1e-5);
}

TEST_CASE("parameter files round-trip bitwise") {
  TempDir dir("params");
  const ShapeConfig shape = small_shape();
  const RegressorParams params = init_params(13, shape);
  save_params(params, dir.file("p.txt"));
  const RegressorParams back = load_params(dir.file("p.txt"));
  CHECK(back.shape == params.shape);
  CHECK((flatten(back) - flatten(params)).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("load_params rejects corrupted files") {
  TempDir dir("badparams");
  const ShapeConfig shape = small_shape();
  const RegressorParams params = init_params(14, shape);
  save_params(params, dir.file("p.txt"));

  const std::string good = read_text_file(dir.file("p.txt"));
  write_text_file(dir.file("magic.txt"), "not-a-params-file\n" + good);
  CHECK_THROWS_AS(load_params(dir.file("magic.txt")), ParseError);

  const std::string truncated = good.substr(0, good.size() / 2);
  write_text_file(dir.file("short.txt"), truncated);
  CHECK_THROWS_AS(load_params(dir.file("short.txt")), ParseError);

  write_text_file(dir.file("trailing.txt"), good + "extra\n");
  CHECK_THROWS_AS(load_params(dir.file("trailing.txt")), ParseError);
}

TEST_CASE("shape validation rejects nonsense") {
  ShapeConfig shape = small_shape();
  shape.hidden_dim = 0;
  CHECK_THROWS_AS(shape.validate(), UsageError);
  shape = small_shape();
  shape.num_layers = 0;
  CHECK_THROWS_AS(shape.validate(), UsageError);
}

}  // TEST_SUITE
