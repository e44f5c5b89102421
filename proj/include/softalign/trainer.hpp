// softalign/trainer.hpp

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

#ifndef SOFTALIGN_TRAINER_HPP
#define SOFTALIGN_TRAINER_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "softalign/common.hpp"
#include "softalign/model.hpp"
#include "softalign/sequence.hpp"
#include "softalign/synth.hpp"

namespace softalign {

enum class LossKind { kL1, kL2, kSoftDtw };

LossKind parse_loss_kind(const std::string& name);
std::string loss_name(LossKind kind);

enum class OptimizerKind { kSgd, kAdam };

OptimizerKind parse_optimizer_kind(const std::string& name);
std::string optimizer_name(OptimizerKind kind);

struct TrainConfig {
  LossKind loss = LossKind::kSoftDtw;
  Gamma gamma{1.0};  // soft-DTW temperature, for both training and validation
  Index epochs = 30;
  double learning_rate = 1e-3;
  OptimizerKind optimizer = OptimizerKind::kAdam;
  std::uint64_t seed = 0;
  double clip_norm = 5.0;

  // learning_rate = 0 is allowed (a zero step is well defined and useful for
  // smoke checks); negative rates are not.
  void validate() const;
};

// key=value lines; '#' starts a comment line; unknown keys are errors.
TrainConfig parse_train_config(const std::string& text, const std::string& context);
TrainConfig load_train_config(const std::string& path);

struct EpochRecord {
  double train_loss;   // mean per-step loss at the pre-step parameters
  double val_softdtw;  // mean validation soft-DTW at end of epoch
};

struct TrainReport {
  std::vector<EpochRecord> epochs;
  Index best_epoch = 0;  // 0-based argmin of val_softdtw, first on ties
  double best_val = 0.0;

  std::string serialize() const;
};

struct LossResult {
  double loss;
  Matrix d_pred;  // dL/d(pred frames)
};

// l1/l2 are frame-aligned and require equal lengths; softdtw accepts any
// length pair (that is its point).
LossResult loss_and_grad(const Sequence& pred, const Sequence& target, LossKind kind,
                         const Gamma& gamma);

// Adam moments over the flattened parameter vector.
struct AdamState {
  Vector m;
  Vector v;
  Index step = 0;
};

// One optimizer update in place. grad must already be clipped by the caller.
void apply_sgd(Vector& theta, const Vector& grad, double learning_rate);
void apply_adam(Vector& theta, const Vector& grad, double learning_rate, AdamState& state);

struct TrainResult {
  RegressorParams params;  // snapshot of the best-validation epoch
  TrainReport report;
};

// One gradient step per utterance in seed-shuffled order, global-norm
// clipping, validation soft-DTW after every epoch, best-epoch snapshot.
// data_dir is the directory holding the manifest's files.
TrainResult train(const DatasetManifest& manifest, const std::string& data_dir,
                  const ShapeConfig& shape, const TrainConfig& config);

}  // namespace softalign

#endif  // SOFTALIGN_TRAINER_HPP
