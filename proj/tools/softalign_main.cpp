// softalign/softalign_main.cpp

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

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "softalign/dtw.hpp"
#include "softalign/eval.hpp"
#include "softalign/io.hpp"
#include "softalign/model.hpp"
#include "softalign/repro.hpp"
#include "softalign/softdtw.hpp"
#include "softalign/synth.hpp"
#include "softalign/trainer.hpp"

namespace {

using namespace softalign;

// Exit codes: 0 success, 1 usage error, 2 data/parse error.
constexpr int kUsageExit = 1;
constexpr int kDataExit = 2;

CostKind cost_from_flag(const std::string& name) { return parse_cost_kind(name); }

int run_gen(const std::string& layout, std::uint64_t seed, const std::string& out,
            Index utterances, Index val, Index test) {
  CorpusConfig config;
  config.layout = parse_layout(layout);
  config.base_utterances = utterances;
  config.val_utterances = val;
  config.test_utterances = test;
  gen_corpus(seed, config, out);
  std::cout << (std::filesystem::path(out) / "manifest.txt").string() << "\n";
  return 0;
}

int run_dist(const std::string& a_path, const std::string& b_path, const std::string& metric,
             double gamma_value, const std::string& cost) {
  const Sequence a = read_sequence(a_path);
  const Sequence b = read_sequence(b_path);
  const CostKind kind = cost_from_flag(cost);
  double value = 0.0;
  if (metric == "dtw") {
    value = dtw(a, b, kind).distance;
  } else if (metric == "softdtw") {
    const Gamma gamma(gamma_value);
    if (gamma.is_zero()) {
      throw UsageError("softdtw needs --gamma > 0; use --metric dtw for the hard distance");
    }
    value = soft_dtw(a, b, gamma, kind).loss;
  } else {
    throw UsageError("unknown metric '" + metric + "' (want dtw|softdtw)");
  }
  std::cout << format_sig9(value) << "\n";
  return 0;
}

int run_align(const std::string& a_path, const std::string& b_path, const std::string& cost) {
  const Sequence a = read_sequence(a_path);
  const Sequence b = read_sequence(b_path);
  const DtwResult result = dtw(a, b, cost_from_flag(cost));
  const AlignmentPath path = backtrack(result.table);
  for (const auto& [i, j] : path.pairs) std::cout << i << "," << j << "\n";
  return 0;
}

int run_train(const std::string& data_dir, const std::string& config_file,
              const CLI::App* cmd, TrainConfig config, const std::string& params_out,
              const std::string& report_out) {
  if (!config_file.empty()) {
    TrainConfig from_file = load_train_config(config_file);
    // Flags given explicitly on the command line override the file.
    if (cmd->count("--loss") == 0) config.loss = from_file.loss;
    if (cmd->count("--gamma") == 0) config.gamma = from_file.gamma;
    if (cmd->count("--epochs") == 0) config.epochs = from_file.epochs;
    if (cmd->count("--learning-rate") == 0) config.learning_rate = from_file.learning_rate;
    if (cmd->count("--optimizer") == 0) config.optimizer = from_file.optimizer;
    if (cmd->count("--seed") == 0) config.seed = from_file.seed;
    if (cmd->count("--clip-norm") == 0) config.clip_norm = from_file.clip_norm;
  }
  const DatasetManifest manifest =
      load_manifest((std::filesystem::path(data_dir) / "manifest.txt").string());
  ShapeConfig shape;
  shape.num_layers = manifest.gen.num_layers;
  shape.input_dim = manifest.gen.input_dim;
  shape.output_dim = manifest.gen.target_dim;
  const TrainResult result = train(manifest, data_dir, shape, config);
  save_params(result.params, params_out);
  if (!report_out.empty()) write_text_file(report_out, result.report.serialize());
  std::cout << "best_epoch " << result.report.best_epoch + 1 << " best_val "
            << format_full(result.report.best_val) << "\n";
  return 0;
}

int run_eval(const std::string& data_dir, const std::string& params_file,
             const std::string& split, const std::string& dump_dir,
             const std::string& report_out) {
  const DatasetManifest manifest =
      load_manifest((std::filesystem::path(data_dir) / "manifest.txt").string());
  const RegressorParams params = load_params(params_file);
  const MetricReport report = evaluate(manifest, data_dir, split, params, dump_dir);
  if (!report_out.empty()) write_text_file(report_out, report.serialize());
  std::cout << report.serialize();
  return 0;
}

int run_repro(const std::string& layout, const std::string& loss, std::uint64_t seed,
              const std::string& out, Index utterances, Index epochs, double learning_rate,
              double gamma_value) {
  ReproConfig config;
  config.layout = parse_layout(layout);
  config.loss = parse_loss_kind(loss);
  config.seed = seed;
  config.out_dir = out;
  config.base_utterances = utterances;
  config.epochs = epochs;
  config.learning_rate = learning_rate;
  config.gamma = Gamma(gamma_value);
  const ReproResult result = repro_run(config);
  std::cout << "run " << std::filesystem::path(result.run_dir).filename().string() << " mse_score "
            << format_full(result.metrics.mse_score) << " dtw_score "
            << format_full(result.metrics.dtw_score) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"sequence alignment and alignment-robust regression toolkit"};
  app.require_subcommand(1);

  // gen
  auto* gen = app.add_subcommand("gen", "generate a synthetic corpus");
  std::string gen_layout = "rec";
  std::uint64_t gen_seed = 0;
  std::string gen_out;
  Index gen_utterances = 40;
  Index gen_val = 8;
  Index gen_test = 8;
  gen->add_option("--config", gen_layout, "corpus layout: rec|tts1|tts13|rec+tts13");
  gen->add_option("--seed", gen_seed, "corpus seed");
  gen->add_option("--out", gen_out, "output directory")->required();
  gen->add_option("--utterances", gen_utterances, "base training utterances");
  gen->add_option("--val", gen_val, "validation utterances");
  gen->add_option("--test", gen_test, "test utterances");

  // dist
  auto* dist = app.add_subcommand("dist", "distance between two sequence files");
  std::string dist_a, dist_b, dist_metric = "dtw", dist_cost = "euclidean";
  double dist_gamma = 1.0;
  dist->add_option("a", dist_a, "first sequence file")->required();
  dist->add_option("b", dist_b, "second sequence file")->required();
  dist->add_option("--metric", dist_metric, "dtw|softdtw");
  dist->add_option("--gamma", dist_gamma, "soft-DTW temperature (softdtw only)");
  dist->add_option("--cost", dist_cost, "euclidean|sqeuclidean");

  // align
  auto* align = app.add_subcommand("align", "optimal alignment path of two sequence files");
  std::string align_a, align_b, align_cost = "euclidean";
  align->add_option("a", align_a, "first sequence file")->required();
  align->add_option("b", align_b, "second sequence file")->required();
  align->add_option("--cost", align_cost, "euclidean|sqeuclidean");

  // train
  auto* train_cmd = app.add_subcommand("train", "train the regressor on a generated corpus");
  std::string train_data, train_config_file, train_params_out = "params.txt", train_report_out;
  TrainConfig train_config;
  std::string train_loss = "softdtw", train_optimizer = "adam";
  double train_gamma = 1.0;
  train_cmd->add_option("--data", train_data, "corpus directory (holds manifest.txt)")->required();
  train_cmd->add_option("--config", train_config_file, "key=value training config file");
  train_cmd->add_option("--loss", train_loss, "l1|l2|softdtw");
  train_cmd->add_option("--gamma", train_gamma, "soft-DTW temperature");
  train_cmd->add_option("--epochs", train_config.epochs, "training epochs");
  train_cmd->add_option("--learning-rate", train_config.learning_rate, "step size");
  train_cmd->add_option("--optimizer", train_optimizer, "sgd|adam");
  train_cmd->add_option("--seed", train_config.seed, "training seed");
  train_cmd->add_option("--clip-norm", train_config.clip_norm, "global gradient norm clip");
  train_cmd->add_option("--params-out", train_params_out, "output parameter file");
  train_cmd->add_option("--report-out", train_report_out, "output training report file");

  // eval
  auto* eval_cmd = app.add_subcommand("eval", "evaluate saved parameters on a corpus split");
  std::string eval_data, eval_params, eval_split = "test", eval_dump, eval_report_out;
  eval_cmd->add_option("--data", eval_data, "corpus directory (holds manifest.txt)")->required();
  eval_cmd->add_option("--params", eval_params, "parameter file")->required();
  eval_cmd->add_option("--split", eval_split, "train|val|test");
  eval_cmd->add_option("--dump-pred", eval_dump, "directory for per-utterance prediction files");
  eval_cmd->add_option("--report-out", eval_report_out, "output metric report file");

  // repro
  auto* repro = app.add_subcommand("repro", "full experiment: gen, train, eval, summarize");
  std::string repro_layout = "rec", repro_loss = "softdtw", repro_out;
  std::uint64_t repro_seed = 0;
  Index repro_utterances = 10;
  Index repro_epochs = 30;
  double repro_lr = 1e-3, repro_gamma = 1.0;
  repro->add_option("--config", repro_layout, "corpus layout: rec|tts1|tts13|rec+tts13");
  repro->add_option("--loss", repro_loss, "l1|l2|softdtw");
  repro->add_option("--seed", repro_seed, "experiment seed");
  repro->add_option("--out", repro_out, "output directory for run directories")->required();
  repro->add_option("--utterances", repro_utterances, "base training utterances");
  repro->add_option("--epochs", repro_epochs, "training epochs");
  repro->add_option("--learning-rate", repro_lr, "step size");
  repro->add_option("--gamma", repro_gamma, "soft-DTW temperature");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help and friends
    std::cerr << e.what() << "\n";
    return kUsageExit;
  }

  try {
    if (gen->parsed()) {
      return run_gen(gen_layout, gen_seed, gen_out, gen_utterances, gen_val, gen_test);
    }
    if (dist->parsed()) return run_dist(dist_a, dist_b, dist_metric, dist_gamma, dist_cost);
    if (align->parsed()) return run_align(align_a, align_b, align_cost);
    if (train_cmd->parsed()) {
      train_config.loss = parse_loss_kind(train_loss);
      train_config.gamma = Gamma(train_gamma);
      train_config.optimizer = parse_optimizer_kind(train_optimizer);
      return run_train(train_data, train_config_file, train_cmd, train_config, train_params_out,
                       train_report_out);
    }
    if (eval_cmd->parsed()) {
      return run_eval(eval_data, eval_params, eval_split, eval_dump, eval_report_out);
    }
    if (repro->parsed()) {
      return run_repro(repro_layout, repro_loss, repro_seed, repro_out, repro_utterances,
                       repro_epochs, repro_lr, repro_gamma);
    }
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kUsageExit;
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kDataExit;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kDataExit;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kDataExit;
  }
  return 0;
}
