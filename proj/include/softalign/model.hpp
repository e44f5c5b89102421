// softalign/model.hpp

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

#ifndef SOFTALIGN_MODEL_HPP
#define SOFTALIGN_MODEL_HPP

#include <cstdint>
#include <string>
#include <type_traits>
#include <vector>

#include "softalign/common.hpp"
#include "softalign/sequence.hpp"

namespace softalign {

// Tensor sizes of the regressor. Every field participates in parameter-file
// round trips, so changing names or adding fields is a format change.
struct ShapeConfig {
  Index num_layers = 4;     // N parallel feature streams
  Index input_dim = 8;      // D_in per stream
  Index conv1_channels = 8;
  Index conv2_channels = 8;
  Index hidden_dim = 16;    // H per recurrent direction
  Index output_dim = 6;     // D_out
  Index rnn_layers = 1;

  void validate() const {
    if (num_layers < 1 || input_dim < 1 || conv1_channels < 1 || conv2_channels < 1 ||
        hidden_dim < 1 || output_dim < 1 || rnn_layers < 1) {
      throw UsageError("every shape-config field must be >= 1");
    }
  }
  bool operator==(const ShapeConfig&) const = default;
};

namespace detail {

inline Vector stable_softmax(const Vector& logits) {
  const Vector shifted = (logits.array() - logits.maxCoeff()).matrix();
  const Vector expd = shifted.array().exp().matrix();
  return expd / expd.sum();
}

}  // namespace detail

// Simplex weights for layer fusion, parametrized by free logits so gradient
// steps cannot leave the simplex.
struct FusionWeights {
  Vector logits;

  Vector alphas() const { return detail::stable_softmax(logits); }
};

// One direction of an Elman cell: h_t = tanh(w_in x_t + w_rec h_{t-1} + bias).
struct RecurrentCell {
  Matrix w_in;   // H x input
  Matrix w_rec;  // H x H
  Vector bias;   // H
};

struct BidiLayer {
  RecurrentCell fwd;
  RecurrentCell bwd;
};

// All trainable tensors. Width-3 kernels are stored as three tap matrices
// (tap k applies to the frame at offset k-1).
struct RegressorParams {
  ShapeConfig shape;
  FusionWeights fusion;                // logits: N
  std::vector<Matrix> conv1_kernel;    // 3 x (C1 x D_in)
  Vector conv1_bias;                   // C1
  std::vector<Matrix> conv2_kernel;    // 3 x (C2 x C1)
  Vector conv2_bias;                   // C2
  std::vector<BidiLayer> rnn;          // rnn_layers entries
  Matrix head_weight;                  // D_out x 2H
  Vector head_bias;                    // D_out
};

// Gradients are shape-congruent with the parameters, so the same struct
// carries them; the embedded shape and fusion logits then hold the config
// copy and the logit gradients respectively.
using GradientBundle = RegressorParams;

// Visits every trainable tensor in a fixed canonical order as a 2-D map,
// with the fan-in that scales its initialization. This single order defines
// initialization, flattening, and the parameter file layout.
template <typename Params, typename Visitor>
void visit_tensors(Params& params, Visitor&& visit) {
  using Map = std::conditional_t<std::is_const_v<Params>, Eigen::Map<const Matrix>,
                                 Eigen::Map<Matrix>>;
  const auto mat = [&](const std::string& name, Index fan_in, auto& m) {
    visit(name, fan_in, Map(m.data(), m.rows(), m.cols()));
  };
  const auto vec = [&](const std::string& name, Index fan_in, auto& v) {
    visit(name, fan_in, Map(v.data(), v.size(), 1));
  };
  const ShapeConfig& s = params.shape;
  vec("fusion.logits", s.num_layers, params.fusion.logits);
  for (int k = 0; k < 3; ++k) {
    mat("conv1.k" + std::to_string(k), 3 * s.input_dim, params.conv1_kernel[static_cast<std::size_t>(k)]);
  }
  vec("conv1.bias", 3 * s.input_dim, params.conv1_bias);
  for (int k = 0; k < 3; ++k) {
    mat("conv2.k" + std::to_string(k), 3 * s.conv1_channels, params.conv2_kernel[static_cast<std::size_t>(k)]);
  }
  vec("conv2.bias", 3 * s.conv1_channels, params.conv2_bias);
  for (Index l = 0; l < s.rnn_layers; ++l) {
    const Index in = l == 0 ? s.conv2_channels : 2 * s.hidden_dim;
    auto& layer = params.rnn[static_cast<std::size_t>(l)];
    const std::string base = "rnn" + std::to_string(l);
    mat(base + ".fwd.w_in", in, layer.fwd.w_in);
    mat(base + ".fwd.w_rec", s.hidden_dim, layer.fwd.w_rec);
    vec(base + ".fwd.bias", in, layer.fwd.bias);
    mat(base + ".bwd.w_in", in, layer.bwd.w_in);
    mat(base + ".bwd.w_rec", s.hidden_dim, layer.bwd.w_rec);
    vec(base + ".bwd.bias", in, layer.bwd.bias);
  }
  mat("head.weight", 2 * s.hidden_dim, params.head_weight);
  vec("head.bias", 2 * s.hidden_dim, params.head_bias);
}

// Activation record of one forward call; consumed by exactly one backward.
struct ModelTape {
  RegressorParams params;
  std::vector<Matrix> layers;      // input stack, copied
  Vector alphas;                   // N
  Matrix fused;                    // T x D_in
  Matrix h1;                       // T x C1, post-tanh
  Matrix h2;                       // T_out x C2, post-tanh
  std::vector<Matrix> rnn_inputs;  // entry l feeds rnn layer l; entry rnn_layers feeds the head
  std::vector<Matrix> rnn_h;       // per layer: T_out x H, forward direction
  std::vector<Matrix> rnn_g;       // per layer: T_out x H, backward direction
  Matrix pred;                     // T_out x D_out
};

struct ForwardResult {
  Sequence pred;
  ModelTape tape;
};

Sequence fuse(const FeatureStack& stack, const FusionWeights& weights);
ForwardResult forward(const RegressorParams& params, const FeatureStack& stack);
GradientBundle backward(const ModelTape& tape, const Matrix& d_pred);

RegressorParams init_params(std::uint64_t seed, const ShapeConfig& shape);
// Shape-congruent bundle with every tensor zeroed.
GradientBundle zero_like(const RegressorParams& params);

Index num_params(const ShapeConfig& shape);
Vector flatten(const RegressorParams& params);
void unflatten(const Vector& flat, RegressorParams& params);

void save_params(const RegressorParams& params, const std::string& path);
RegressorParams load_params(const std::string& path);

}  // namespace softalign

#endif  // SOFTALIGN_MODEL_HPP
