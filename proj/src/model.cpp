// softalign/model.cpp

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

#include "softalign/model.hpp"

#include <cmath>
#include <cstddef>
#include <iterator>
#include <sstream>
#include <string>
#include <vector>

#include "softalign/io.hpp"
#include "softalign/rng.hpp"

namespace softalign {

namespace {

using RowVector = Eigen::RowVectorXd;

// Sizes every tensor; values are filled by the caller through visit_tensors.
RegressorParams allocate(const ShapeConfig& shape) {
  shape.validate();
  RegressorParams p;
  p.shape = shape;
  p.fusion.logits.resize(shape.num_layers);
  p.conv1_kernel.assign(3, Matrix(shape.conv1_channels, shape.input_dim));
  p.conv1_bias.resize(shape.conv1_channels);
  p.conv2_kernel.assign(3, Matrix(shape.conv2_channels, shape.conv1_channels));
  p.conv2_bias.resize(shape.conv2_channels);
  p.rnn.resize(static_cast<std::size_t>(shape.rnn_layers));
  for (Index l = 0; l < shape.rnn_layers; ++l) {
    const Index in = l == 0 ? shape.conv2_channels : 2 * shape.hidden_dim;
    for (RecurrentCell* cell : {&p.rnn[static_cast<std::size_t>(l)].fwd,
                                &p.rnn[static_cast<std::size_t>(l)].bwd}) {
      cell->w_in.resize(shape.hidden_dim, in);
      cell->w_rec.resize(shape.hidden_dim, shape.hidden_dim);
      cell->bias.resize(shape.hidden_dim);
    }
  }
  p.head_weight.resize(shape.output_dim, 2 * shape.hidden_dim);
  p.head_bias.resize(shape.output_dim);
  return p;
}

// Width-3 convolution over frame rows; stride 2 reads one zero frame to the
// left of the input so the output keeps exactly floor(T/2) frames.
Matrix conv_tanh(const Matrix& input, const std::vector<Matrix>& kernel, const Vector& bias,
                 Index stride) {
  const Index t_in = input.rows();
  const Index t_out = stride == 1 ? t_in : t_in / 2;
  Matrix out(t_out, bias.size());
  for (Index t = 0; t < t_out; ++t) {
    RowVector acc = bias.transpose();
    for (Index k = 0; k < 3; ++k) {
      const Index src = stride * t + k - 1;
      if (src < 0 || src >= t_in) continue;
      acc.noalias() += input.row(src) * kernel[static_cast<std::size_t>(k)].transpose();
    }
    out.row(t) = acc;
  }
  return out.array().tanh().matrix();
}

void run_cell_forward(const RecurrentCell& cell, const Matrix& input, bool reversed, Matrix& states) {
  const Index t_len = input.rows();
  RowVector prev = RowVector::Zero(cell.w_rec.rows());
  for (Index step = 0; step < t_len; ++step) {
    const Index t = reversed ? t_len - 1 - step : step;
    RowVector z = input.row(t) * cell.w_in.transpose() + prev * cell.w_rec.transpose() +
                  cell.bias.transpose();
    states.row(t) = z.array().tanh().matrix();
    prev = states.row(t);
  }
}

// Reverse-mode pass of one direction. d_states carries dL/d(state) from the
// layer above; d_input accumulates dL/d(input) for the layer below.
void run_cell_backward(const RecurrentCell& cell, RecurrentCell& grad, const Matrix& input,
                       const Matrix& states, const Matrix& d_states, bool reversed,
                       Matrix& d_input) {
  const Index t_len = input.rows();
  RowVector carry = RowVector::Zero(cell.w_rec.rows());
  for (Index step = t_len - 1; step >= 0; --step) {
    const Index t = reversed ? t_len - 1 - step : step;
    const RowVector dh = d_states.row(t) + carry;
    const RowVector dz =
        (dh.array() * (1.0 - states.row(t).array().square())).matrix();
    grad.w_in.noalias() += dz.transpose() * input.row(t);
    const Index prev_t = reversed ? t + 1 : t - 1;
    if (prev_t >= 0 && prev_t < t_len) {
      grad.w_rec.noalias() += dz.transpose() * states.row(prev_t);
    }
    grad.bias += dz.transpose();
    d_input.row(t) += dz * cell.w_in;
    carry = dz * cell.w_rec;
  }
}

void check_stack_shape(const RegressorParams& params, const FeatureStack& stack) {
  if (stack.num_layers() != params.shape.num_layers || stack.dim() != params.shape.input_dim) {
    std::ostringstream msg;
    msg << "stack shape " << stack.num_layers() << "x" << stack.length() << "x" << stack.dim()
        << " does not match model config (num_layers=" << params.shape.num_layers
        << ", input_dim=" << params.shape.input_dim << ")";
    throw UsageError(msg.str());
  }
}

}  // namespace

Sequence fuse(const FeatureStack& stack, const FusionWeights& weights) {
  if (weights.logits.size() != stack.num_layers()) {
    throw UsageError("fusion weight count does not match the stack layer count");
  }
  const Vector alphas = weights.alphas();
  Matrix fused = Matrix::Zero(stack.length(), stack.dim());
  for (Index i = 0; i < stack.num_layers(); ++i) fused += alphas(i) * stack.layer(i);
  return Sequence(std::move(fused));
}

ForwardResult forward(const RegressorParams& params, const FeatureStack& stack) {
  check_stack_shape(params, stack);
  const Index t_in = stack.length();
  if (t_in < 4) throw UsageError("forward requires at least 4 input frames");

  ModelTape tape;
  tape.params = params;
  tape.layers = stack.layers();
  tape.alphas = params.fusion.alphas();
  tape.fused = Matrix::Zero(t_in, stack.dim());
  for (Index i = 0; i < stack.num_layers(); ++i) {
    tape.fused += tape.alphas(i) * stack.layer(i);
  }

  tape.h1 = conv_tanh(tape.fused, params.conv1_kernel, params.conv1_bias, 1);
  tape.h2 = conv_tanh(tape.h1, params.conv2_kernel, params.conv2_bias, 2);

  const Index t_out = tape.h2.rows();
  const Index hidden = params.shape.hidden_dim;
  tape.rnn_inputs.push_back(tape.h2);
  for (Index l = 0; l < params.shape.rnn_layers; ++l) {
    const Matrix& input = tape.rnn_inputs.back();
    const BidiLayer& layer = params.rnn[static_cast<std::size_t>(l)];
    Matrix h(t_out, hidden);
    Matrix g(t_out, hidden);
    run_cell_forward(layer.fwd, input, false, h);
    run_cell_forward(layer.bwd, input, true, g);
    Matrix joined(t_out, 2 * hidden);
    joined.leftCols(hidden) = h;
    joined.rightCols(hidden) = g;
    tape.rnn_h.push_back(std::move(h));
    tape.rnn_g.push_back(std::move(g));
    tape.rnn_inputs.push_back(std::move(joined));
  }

  tape.pred = (tape.rnn_inputs.back() * params.head_weight.transpose()).rowwise() +
              params.head_bias.transpose();
  Sequence pred(tape.pred);
  return {std::move(pred), std::move(tape)};
}

GradientBundle backward(const ModelTape& tape, const Matrix& d_pred) {
  if (d_pred.rows() != tape.pred.rows() || d_pred.cols() != tape.pred.cols()) {
    throw UsageError("output gradient shape does not match the taped prediction");
  }
  const RegressorParams& params = tape.params;
  const Index hidden = params.shape.hidden_dim;
  GradientBundle grads = zero_like(params);

  grads.head_weight = d_pred.transpose() * tape.rnn_inputs.back();
  grads.head_bias = d_pred.colwise().sum().transpose();

  Matrix d_out = d_pred * params.head_weight;  // gradient w.r.t. the top rnn output
  for (Index l = params.shape.rnn_layers - 1; l >= 0; --l) {
    const auto li = static_cast<std::size_t>(l);
    const Matrix& input = tape.rnn_inputs[li];
    Matrix d_input = Matrix::Zero(input.rows(), input.cols());
    run_cell_backward(params.rnn[li].fwd, grads.rnn[li].fwd, input, tape.rnn_h[li],
                      d_out.leftCols(hidden), false, d_input);
    run_cell_backward(params.rnn[li].bwd, grads.rnn[li].bwd, input, tape.rnn_g[li],
                      d_out.rightCols(hidden), true, d_input);
    d_out = std::move(d_input);
  }

  // d_out is now dL/d(h2).
  const Matrix d_pre2 = (d_out.array() * (1.0 - tape.h2.array().square())).matrix();
  Matrix d_h1 = Matrix::Zero(tape.h1.rows(), tape.h1.cols());
  for (Index t = 0; t < d_pre2.rows(); ++t) {
    for (Index k = 0; k < 3; ++k) {
      const Index src = 2 * t + k - 1;
      if (src < 0 || src >= tape.h1.rows()) continue;
      grads.conv2_kernel[static_cast<std::size_t>(k)].noalias() +=
          d_pre2.row(t).transpose() * tape.h1.row(src);
      d_h1.row(src) += d_pre2.row(t) * params.conv2_kernel[static_cast<std::size_t>(k)];
    }
  }
  grads.conv2_bias = d_pre2.colwise().sum().transpose();

  const Matrix d_pre1 = (d_h1.array() * (1.0 - tape.h1.array().square())).matrix();
  Matrix d_fused = Matrix::Zero(tape.fused.rows(), tape.fused.cols());
  for (Index t = 0; t < d_pre1.rows(); ++t) {
    for (Index k = 0; k < 3; ++k) {
      const Index src = t + k - 1;
      if (src < 0 || src >= tape.fused.rows()) continue;
      grads.conv1_kernel[static_cast<std::size_t>(k)].noalias() +=
          d_pre1.row(t).transpose() * tape.fused.row(src);
      d_fused.row(src) += d_pre1.row(t) * params.conv1_kernel[static_cast<std::size_t>(k)];
    }
  }
  grads.conv1_bias = d_pre1.colwise().sum().transpose();

  Vector d_alpha(tape.alphas.size());
  for (Index i = 0; i < d_alpha.size(); ++i) {
    d_alpha(i) = (d_fused.array() * tape.layers[static_cast<std::size_t>(i)].array()).sum();
  }
  // Softmax Jacobian: d_logit_k = alpha_k * (d_alpha_k - <alpha, d_alpha>).
  const double mean_pull = tape.alphas.dot(d_alpha);
  grads.fusion.logits = (tape.alphas.array() * (d_alpha.array() - mean_pull)).matrix();

  return grads;
}

RegressorParams init_params(std::uint64_t seed, const ShapeConfig& shape) {
  RegressorParams params = allocate(shape);
  Rng rng(seed);
  // Tensor order and elementwise storage order are both fixed, so a seed
  // pins every value.
  visit_tensors(params, [&rng](const std::string&, Index fan_in, Eigen::Map<Matrix> values) {
    const double scale = 1.0 / std::sqrt(static_cast<double>(fan_in));
    for (Index idx = 0; idx < values.size(); ++idx) {
      values.data()[idx] = rng.uniform(-scale, scale);
    }
  });
  return params;
}

GradientBundle zero_like(const RegressorParams& params) {
  GradientBundle out = allocate(params.shape);
  visit_tensors(out, [](const std::string&, Index, Eigen::Map<Matrix> values) { values.setZero(); });
  return out;
}

Index num_params(const ShapeConfig& shape) {
  RegressorParams probe = allocate(shape);
  Index total = 0;
  visit_tensors(probe, [&total](const std::string&, Index, Eigen::Map<Matrix> values) {
    total += values.size();
  });
  return total;
}

Vector flatten(const RegressorParams& params) {
  Vector flat(num_params(params.shape));
  Index cursor = 0;
  visit_tensors(params, [&](const std::string&, Index, Eigen::Map<const Matrix> values) {
    flat.segment(cursor, values.size()) = Eigen::Map<const Vector>(values.data(), values.size());
    cursor += values.size();
  });
  return flat;
}

void unflatten(const Vector& flat, RegressorParams& params) {
  if (flat.size() != num_params(params.shape)) {
    throw UsageError("flat parameter vector size does not match the model shape");
  }
  Index cursor = 0;
  visit_tensors(params, [&](const std::string&, Index, Eigen::Map<Matrix> values) {
    Eigen::Map<Vector>(values.data(), values.size()) = flat.segment(cursor, values.size());
    cursor += values.size();
  });
}

void save_params(const RegressorParams& params, const std::string& path) {
  std::ostringstream out;
  const ShapeConfig& s = params.shape;
  out << "softalign-params v1\n";
  out << "shape num_layers=" << s.num_layers << " input_dim=" << s.input_dim
      << " conv1_channels=" << s.conv1_channels << " conv2_channels=" << s.conv2_channels
      << " hidden_dim=" << s.hidden_dim << " output_dim=" << s.output_dim
      << " rnn_layers=" << s.rnn_layers << "\n";
  visit_tensors(params, [&out](const std::string& name, Index, Eigen::Map<const Matrix> values) {
    out << "tensor " << name << " " << values.rows() << " " << values.cols() << "\n";
    for (Index r = 0; r < values.rows(); ++r) {
      for (Index c = 0; c < values.cols(); ++c) {
        if (c > 0) out << ",";
        out << format_full(values(r, c));
      }
      out << "\n";
    }
  });
  write_text_file(path, out.str());
}

namespace {

Index parse_shape_field(const std::string& token, const std::string& key, const std::string& path) {
  const std::string prefix = key + "=";
  if (token.rfind(prefix, 0) != 0) {
    throw ParseError(path + ": line 2: expected shape field '" + key + "', got '" + token + "'");
  }
  const double v = textio::parse_number(std::string_view(token).substr(prefix.size()), path, 2);
  if (v < 1.0 || v != std::floor(v)) {
    throw ParseError(path + ": line 2: shape field '" + key + "' must be a positive integer");
  }
  return static_cast<Index>(v);
}

}  // namespace

RegressorParams load_params(const std::string& path) {
  const std::vector<std::string> lines = textio::split_lines(read_text_file(path));
  if (lines.size() < 2 || lines[0] != "softalign-params v1") {
    throw ParseError(path + ": not a softalign parameter file (bad magic line)");
  }
  std::istringstream shape_line(lines[1]);
  std::string tag;
  shape_line >> tag;
  if (tag != "shape") throw ParseError(path + ": line 2: expected the shape line");
  std::vector<std::string> fields;
  for (std::string tok; shape_line >> tok;) fields.push_back(tok);
  const char* keys[] = {"num_layers",  "input_dim",  "conv1_channels", "conv2_channels",
                        "hidden_dim",  "output_dim", "rnn_layers"};
  if (fields.size() != std::size(keys)) {
    throw ParseError(path + ": line 2: expected 7 shape fields");
  }
  ShapeConfig shape;
  Index* slots[] = {&shape.num_layers,  &shape.input_dim,  &shape.conv1_channels,
                    &shape.conv2_channels, &shape.hidden_dim, &shape.output_dim,
                    &shape.rnn_layers};
  for (std::size_t i = 0; i < std::size(keys); ++i) {
    *slots[i] = parse_shape_field(fields[i], keys[i], path);
  }

  RegressorParams params = allocate(shape);
  std::size_t cursor = 2;
  visit_tensors(params, [&](const std::string& name, Index, Eigen::Map<Matrix> values) {
    if (cursor >= lines.size()) {
      throw ParseError(path + ": unexpected end of file before tensor '" + name + "'");
    }
    std::ostringstream want;
    want << "tensor " << name << " " << values.rows() << " " << values.cols();
    if (lines[cursor] != want.str()) {
      throw ParseError(path + ": line " + std::to_string(cursor + 1) + ": expected '" +
                       want.str() + "', got '" + lines[cursor] + "'");
    }
    ++cursor;
    for (Index r = 0; r < values.rows(); ++r, ++cursor) {
      if (cursor >= lines.size()) {
        throw ParseError(path + ": unexpected end of file inside tensor '" + name + "'");
      }
      const std::vector<double> row = textio::parse_csv_row(lines[cursor], path, cursor + 1);
      if (static_cast<Index>(row.size()) != values.cols()) {
        throw ParseError(path + ": line " + std::to_string(cursor + 1) + ": expected " +
                         std::to_string(values.cols()) + " columns");
      }
      for (Index c = 0; c < values.cols(); ++c) values(r, c) = row[static_cast<std::size_t>(c)];
    }
  });
  if (cursor != lines.size()) {
    throw ParseError(path + ": trailing content after the last tensor");
  }
  return params;
}

}  // namespace softalign
