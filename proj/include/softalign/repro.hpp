// softalign/repro.hpp

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

#ifndef SOFTALIGN_REPRO_HPP
#define SOFTALIGN_REPRO_HPP

#include <cstdint>
#include <string>

#include "softalign/eval.hpp"
#include "softalign/synth.hpp"
#include "softalign/trainer.hpp"

namespace softalign {

// One end-to-end experiment: generate a corpus, train, evaluate on the
// aligned test split, and write every artifact under
//   <out_dir>/run_<layout>_<loss>_seed<seed>/
// (data/ with the corpus, params.txt, train_report.txt, metric_report.txt,
// summary.txt). The summary also compares against sibling run directories
// already present in out_dir. Everything is deterministic in the seed, so a
// rerun with identical settings rewrites byte-identical files.
struct ReproConfig {
  CorpusLayout layout = CorpusLayout::kRec;
  LossKind loss = LossKind::kSoftDtw;
  std::uint64_t seed = 0;
  std::string out_dir;
  Index base_utterances = 10;  // scarce-data regime by default
  Index epochs = 30;
  double learning_rate = 1e-3;
  Gamma gamma{1.0};
};

struct ReproResult {
  std::string run_dir;
  TrainReport train_report;
  MetricReport metrics;
};

ReproResult repro_run(const ReproConfig& config);

}  // namespace softalign

#endif  // SOFTALIGN_REPRO_HPP
