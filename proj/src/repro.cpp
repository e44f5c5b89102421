// softalign/repro.cpp

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

#include "softalign/repro.hpp"

#include <algorithm>
#include <filesystem>
#include <sstream>
#include <vector>

#include "softalign/io.hpp"
#include "softalign/model.hpp"

namespace softalign {

namespace {

namespace fs = std::filesystem;

struct SiblingMetrics {
  std::string name;
  double mse;
  double dtw;
};

// Reads the aggregate line of a sibling's metric report; returns false when
// the directory has none (not a finished run).
bool read_sibling(const fs::path& dir, SiblingMetrics& out) {
  const fs::path report = dir / "metric_report.txt";
  if (!fs::exists(report)) return false;
  const std::vector<std::string> lines = textio::split_lines(read_text_file(report.string()));
  if (lines.size() < 2 || lines[0] != "softalign-metric-report v1") return false;
  std::istringstream header(lines[1]);
  std::string tag, mse_tag, dtw_tag;
  std::size_t count = 0;
  double mse = 0.0, dtw = 0.0;
  if (!(header >> tag >> count >> mse_tag >> mse >> dtw_tag >> dtw) || tag != "utterances" ||
      mse_tag != "mse_score" || dtw_tag != "dtw_score") {
    return false;
  }
  out.name = dir.filename().string();
  out.mse = mse;
  out.dtw = dtw;
  return true;
}

}  // namespace

ReproResult repro_run(const ReproConfig& config) {
  if (config.out_dir.empty()) throw UsageError("repro needs an output directory");
  const std::string run_name = "run_" + layout_name(config.layout) + "_" +
                               loss_name(config.loss) + "_seed" + std::to_string(config.seed);
  const fs::path run_dir = fs::path(config.out_dir) / run_name;
  const fs::path data_dir = run_dir / "data";
  fs::create_directories(data_dir);

  CorpusConfig corpus;
  corpus.layout = config.layout;
  corpus.base_utterances = config.base_utterances;
  const DatasetManifest manifest = gen_corpus(config.seed, corpus, data_dir.string());

  ShapeConfig shape;
  shape.num_layers = corpus.gen.num_layers;
  shape.input_dim = corpus.gen.input_dim;
  shape.output_dim = corpus.gen.target_dim;

  TrainConfig train_config;
  train_config.loss = config.loss;
  train_config.gamma = config.gamma;
  train_config.epochs = config.epochs;
  train_config.learning_rate = config.learning_rate;
  train_config.seed = config.seed;

  TrainResult trained = train(manifest, data_dir.string(), shape, train_config);
  const MetricReport metrics = evaluate(manifest, data_dir.string(), "test", trained.params);

  save_params(trained.params, (run_dir / "params.txt").string());
  write_text_file((run_dir / "train_report.txt").string(), trained.report.serialize());
  write_text_file((run_dir / "metric_report.txt").string(), metrics.serialize());

  // Summary: this run first, then every finished sibling with per-metric
  // winner marks. Sibling order is sorted by name, so reruns are
  // byte-stable.
  std::vector<SiblingMetrics> siblings;
  for (const fs::directory_entry& entry : fs::directory_iterator(config.out_dir)) {
    if (!entry.is_directory() || entry.path().filename() == run_name) continue;
    SiblingMetrics sibling;
    if (read_sibling(entry.path(), sibling)) siblings.push_back(sibling);
  }
  std::sort(siblings.begin(), siblings.end(),
            [](const SiblingMetrics& a, const SiblingMetrics& b) { return a.name < b.name; });

  std::ostringstream summary;
  summary << "softalign-repro-summary v1\n";
  summary << "run " << run_name << " mse_score " << format_full(metrics.mse_score)
          << " dtw_score " << format_full(metrics.dtw_score) << "\n";
  if (siblings.empty()) {
    summary << "siblings none\n";
  } else {
    for (const SiblingMetrics& s : siblings) {
      summary << "sibling " << s.name << " mse_score " << format_full(s.mse) << " dtw_score "
              << format_full(s.dtw) << " mse_winner "
              << (metrics.mse_score < s.mse ? run_name : (s.mse < metrics.mse_score ? s.name : "tie"))
              << " dtw_winner "
              << (metrics.dtw_score < s.dtw ? run_name : (s.dtw < metrics.dtw_score ? s.name : "tie"))
              << "\n";
    }
  }
  write_text_file((run_dir / "summary.txt").string(), summary.str());

  return {run_dir.string(), std::move(trained.report), metrics};
}

}  // namespace softalign
