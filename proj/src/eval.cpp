// softalign/eval.cpp

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

#include "softalign/eval.hpp"

#include <filesystem>
#include <sstream>

#include "softalign/dtw.hpp"
#include "softalign/io.hpp"

namespace softalign {

double mse_score(const Sequence& pred, const Sequence& truth) {
  if (pred.length() != truth.length() || pred.dim() != truth.dim()) {
    throw UsageError("mse_score requires equal shapes (aligned test pairs)");
  }
  const Matrix diff = pred.frames() - truth.frames();
  return diff.squaredNorm() / static_cast<double>(diff.size());
}

double dtw_score(const Sequence& pred, const Sequence& truth) {
  return dtw(pred, truth).distance / static_cast<double>(truth.length());
}

std::string MetricReport::serialize() const {
  std::ostringstream out;
  out << "softalign-metric-report v1\n";
  out << "utterances " << breakdown.size() << " mse_score " << format_full(mse_score)
      << " dtw_score " << format_full(dtw_score) << "\n";
  for (const UtteranceMetrics& u : breakdown) {
    out << "utterance " << u.id << " mse " << format_full(u.mse) << " dtw " << format_full(u.dtw)
        << "\n";
  }
  return out.str();
}

MetricReport evaluate(const DatasetManifest& manifest, const std::string& data_dir,
                      const std::string& split, const Predictor& predictor,
                      const std::string& dump_dir) {
  const std::vector<const ManifestItem*> items = split_items(manifest, split);
  if (items.empty()) throw DataError("split '" + split + "' is empty");
  if (!dump_dir.empty()) std::filesystem::create_directories(dump_dir);

  MetricReport report;
  for (const ManifestItem* item : items) {
    const Utterance utt = load_item(*item, data_dir);
    const Sequence pred = predictor(*item, utt.stack);
    if (!dump_dir.empty()) {
      write_sequence(pred, (std::filesystem::path(dump_dir) / (item->id + ".pred")).string());
    }
    report.breakdown.push_back(
        {item->id, mse_score(pred, utt.target), dtw_score(pred, utt.target)});
  }
  for (const UtteranceMetrics& u : report.breakdown) {
    report.mse_score += u.mse;
    report.dtw_score += u.dtw;
  }
  report.mse_score /= static_cast<double>(report.breakdown.size());
  report.dtw_score /= static_cast<double>(report.breakdown.size());
  return report;
}

MetricReport evaluate(const DatasetManifest& manifest, const std::string& data_dir,
                      const std::string& split, const RegressorParams& params,
                      const std::string& dump_dir) {
  return evaluate(
      manifest, data_dir, split,
      [&params](const ManifestItem&, const FeatureStack& stack) {
        return forward(params, stack).pred;
      },
      dump_dir);
}

}  // namespace softalign
