// softalign/eval.hpp

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

#ifndef SOFTALIGN_EVAL_HPP
#define SOFTALIGN_EVAL_HPP

#include <functional>
#include <string>
#include <vector>

#include "softalign/common.hpp"
#include "softalign/model.hpp"
#include "softalign/sequence.hpp"
#include "softalign/synth.hpp"

namespace softalign {

// Frame-level similarity: mean squared difference over all T*D entries.
// Requires equal shapes, like the aligned test pairs it is meant for.
double mse_score(const Sequence& pred, const Sequence& truth);

// Sequence-level similarity: euclidean DTW distance divided by the truth
// length, so scores stay comparable across utterance lengths.
double dtw_score(const Sequence& pred, const Sequence& truth);

struct UtteranceMetrics {
  std::string id;
  double mse;
  double dtw;
};

struct MetricReport {
  double mse_score = 0.0;  // unweighted mean of the breakdown
  double dtw_score = 0.0;
  std::vector<UtteranceMetrics> breakdown;

  std::string serialize() const;
};

// Prediction source for one manifest item; lets tests evaluate stub oracles
// through the same aggregation path as real models.
using Predictor = std::function<Sequence(const ManifestItem& item, const FeatureStack& stack)>;

// Runs the predictor over every item of the split, scoring against the
// item's target. If dump_dir is non-empty, each prediction is also written
// there as <id>.pred in the sequence format.
MetricReport evaluate(const DatasetManifest& manifest, const std::string& data_dir,
                      const std::string& split, const Predictor& predictor,
                      const std::string& dump_dir = "");

MetricReport evaluate(const DatasetManifest& manifest, const std::string& data_dir,
                      const std::string& split, const RegressorParams& params,
                      const std::string& dump_dir = "");

}  // namespace softalign

#endif  // SOFTALIGN_EVAL_HPP
