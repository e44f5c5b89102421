// softalign/trainer.cpp

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

#include "softalign/trainer.hpp"

#include <cmath>
#include <numeric>
#include <sstream>
#include <utility>

#include "softalign/io.hpp"
#include "softalign/rng.hpp"
#include "softalign/softdtw.hpp"

namespace softalign {

LossKind parse_loss_kind(const std::string& name) {
  if (name == "l1") return LossKind::kL1;
  if (name == "l2") return LossKind::kL2;
  if (name == "softdtw") return LossKind::kSoftDtw;
  throw UsageError("unknown loss '" + name + "' (want l1|l2|softdtw)");
}

std::string loss_name(LossKind kind) {
  switch (kind) {
    case LossKind::kL1: return "l1";
    case LossKind::kL2: return "l2";
    case LossKind::kSoftDtw: return "softdtw";
  }
  throw UsageError("invalid loss value");
}

OptimizerKind parse_optimizer_kind(const std::string& name) {
  if (name == "sgd") return OptimizerKind::kSgd;
  if (name == "adam") return OptimizerKind::kAdam;
  throw UsageError("unknown optimizer '" + name + "' (want sgd|adam)");
}

std::string optimizer_name(OptimizerKind kind) {
  switch (kind) {
    case OptimizerKind::kSgd: return "sgd";
    case OptimizerKind::kAdam: return "adam";
  }
  throw UsageError("invalid optimizer value");
}

void TrainConfig::validate() const {
  if (epochs < 1) throw UsageError("epochs must be >= 1");
  if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate)) {
    throw UsageError("learning-rate must be finite and >= 0");
  }
  if (!(clip_norm > 0.0)) throw UsageError("gradient-clip-norm must be > 0");
  if (loss == LossKind::kSoftDtw && gamma.is_zero()) {
    throw UsageError("softdtw training needs gamma > 0");
  }
}

TrainConfig parse_train_config(const std::string& text, const std::string& context) {
  TrainConfig config;
  const std::vector<std::string> lines = textio::split_lines(text);
  for (std::size_t k = 0; k < lines.size(); ++k) {
    const std::string& line = lines[k];
    if (line.empty() || line[0] == '#') continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) {
      throw ParseError(context + ": line " + std::to_string(k + 1) +
                       ": expected key=value, got '" + line + "'");
    }
    const std::string key = line.substr(0, eq);
    const std::string value = line.substr(eq + 1);
    const auto number = [&] { return textio::parse_number(value, context, k + 1); };
    const auto integer = [&](Index lo) {
      const double v = number();
      if (v != std::floor(v) || v < static_cast<double>(lo)) {
        throw ParseError(context + ": line " + std::to_string(k + 1) + ": bad value for " + key);
      }
      return static_cast<Index>(v);
    };
    try {
      if (key == "loss") {
        config.loss = parse_loss_kind(value);
      } else if (key == "gamma") {
        config.gamma = Gamma(number());
      } else if (key == "epochs") {
        config.epochs = integer(1);
      } else if (key == "learning-rate") {
        config.learning_rate = number();
      } else if (key == "optimizer") {
        config.optimizer = parse_optimizer_kind(value);
      } else if (key == "seed") {
        config.seed = static_cast<std::uint64_t>(integer(0));
      } else if (key == "gradient-clip-norm") {
        config.clip_norm = number();
      } else {
        throw UsageError("unknown key '" + key + "'");
      }
    } catch (const UsageError& err) {
      throw ParseError(context + ": line " + std::to_string(k + 1) + ": " + err.what());
    }
  }
  config.validate();
  return config;
}

TrainConfig load_train_config(const std::string& path) {
  return parse_train_config(read_text_file(path), path);
}

std::string TrainReport::serialize() const {
  std::ostringstream out;
  out << "softalign-train-report v1\n";
  out << "epochs " << epochs.size() << " best_epoch " << best_epoch + 1 << " best_val "
      << format_full(best_val) << "\n";
  for (std::size_t e = 0; e < epochs.size(); ++e) {
    out << "epoch " << e + 1 << " train_loss " << format_full(epochs[e].train_loss)
        << " val_softdtw " << format_full(epochs[e].val_softdtw) << "\n";
  }
  return out.str();
}

LossResult loss_and_grad(const Sequence& pred, const Sequence& target, LossKind kind,
                         const Gamma& gamma) {
  if (pred.dim() != target.dim()) {
    throw UsageError("prediction and target dimensionality differ");
  }
  if (kind == LossKind::kSoftDtw) {
    const SoftDtwResult fwd = soft_dtw(pred, target, gamma);
    SoftDtwGrad grad = soft_dtw_grad(pred, target, gamma);
    return {fwd.loss, std::move(grad.d_a)};
  }
  if (pred.length() != target.length()) {
    throw UsageError("l1/l2 losses require equal lengths (got " + std::to_string(pred.length()) +
                     " vs " + std::to_string(target.length()) +
                     "); use the softdtw loss for misaligned pairs");
  }
  const Matrix diff = pred.frames() - target.frames();
  const double count = static_cast<double>(diff.size());
  if (kind == LossKind::kL2) {
    return {diff.squaredNorm() / count, (2.0 / count) * diff};
  }
  // l1 with the zero subgradient at exact ties.
  const Matrix sign = diff.unaryExpr([](double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); });
  return {diff.cwiseAbs().sum() / count, sign / count};
}

void apply_sgd(Vector& theta, const Vector& grad, double learning_rate) {
  theta -= learning_rate * grad;
}

void apply_adam(Vector& theta, const Vector& grad, double learning_rate, AdamState& state) {
  constexpr double kBeta1 = 0.9;
  constexpr double kBeta2 = 0.999;
  constexpr double kEps = 1e-8;
  if (state.m.size() != theta.size()) {
    state.m = Vector::Zero(theta.size());
    state.v = Vector::Zero(theta.size());
    state.step = 0;
  }
  state.step += 1;
  state.m = kBeta1 * state.m + (1.0 - kBeta1) * grad;
  state.v = (kBeta2 * state.v.array() + (1.0 - kBeta2) * grad.array().square()).matrix();
  const double m_corr = 1.0 - std::pow(kBeta1, static_cast<double>(state.step));
  const double v_corr = 1.0 - std::pow(kBeta2, static_cast<double>(state.step));
  theta -= (learning_rate * (state.m.array() / m_corr) /
            ((state.v.array() / v_corr).sqrt() + kEps))
               .matrix();
}

namespace {

double validation_softdtw(const RegressorParams& params,
                          const std::vector<Utterance>& val_items, const Gamma& gamma) {
  double total = 0.0;
  for (const Utterance& item : val_items) {
    const ForwardResult fwd = forward(params, item.stack);
    total += soft_dtw(fwd.pred, item.target, gamma).loss;
  }
  return total / static_cast<double>(val_items.size());
}

}  // namespace

TrainResult train(const DatasetManifest& manifest, const std::string& data_dir,
                  const ShapeConfig& shape, const TrainConfig& config) {
  config.validate();
  shape.validate();

  const auto load_split = [&](const std::string& split) {
    std::vector<Utterance> items;
    for (const ManifestItem* item : split_items(manifest, split)) {
      items.push_back(load_item(*item, data_dir));
    }
    return items;
  };
  const std::vector<Utterance> train_items = load_split("train");
  const std::vector<Utterance> val_items = load_split("val");
  if (train_items.empty()) throw DataError("manifest has no training items");
  if (val_items.empty()) throw DataError("manifest has no validation items");

  RegressorParams params = init_params(config.seed, shape);
  Vector theta = flatten(params);
  AdamState adam;
  Rng shuffle_rng(Rng(config.seed).fork_seed());

  std::vector<std::size_t> order(train_items.size());
  std::iota(order.begin(), order.end(), 0);

  TrainReport report;
  Vector best_theta = theta;
  double best_val = kInf;
  Index best_epoch = 0;

  for (Index epoch = 0; epoch < config.epochs; ++epoch) {
    shuffle_rng.shuffle(order);
    double loss_sum = 0.0;
    for (const std::size_t idx : order) {
      const Utterance& item = train_items[idx];
      unflatten(theta, params);
      const ForwardResult fwd = forward(params, item.stack);
      const LossResult loss = loss_and_grad(fwd.pred, item.target, config.loss, config.gamma);
      loss_sum += loss.loss;
      const GradientBundle grads = backward(fwd.tape, loss.d_pred);
      Vector grad = flatten(grads);
      const double norm = grad.norm();
      if (norm > config.clip_norm) grad *= config.clip_norm / norm;
      if (config.optimizer == OptimizerKind::kSgd) {
        apply_sgd(theta, grad, config.learning_rate);
      } else {
        apply_adam(theta, grad, config.learning_rate, adam);
      }
    }
    unflatten(theta, params);
    const double val = validation_softdtw(params, val_items, config.gamma);
    report.epochs.push_back({loss_sum / static_cast<double>(train_items.size()), val});
    if (val < best_val) {
      best_val = val;
      best_epoch = epoch;
      best_theta = theta;
    }
  }

  report.best_epoch = best_epoch;
  report.best_val = best_val;
  unflatten(best_theta, params);
  return {std::move(params), std::move(report)};
}

}  // namespace softalign
