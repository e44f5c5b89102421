// softalign/synth.hpp

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

#ifndef SOFTALIGN_SYNTH_HPP
#define SOFTALIGN_SYNTH_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "softalign/common.hpp"
#include "softalign/rng.hpp"
#include "softalign/sequence.hpp"

namespace softalign {

// Piecewise-linear monotone map of normalized time. Knot k maps source
// position u_k in [0,1] to warped position v_k; u_1 = v_1 = 0 and u_K = 1.
// Every segment slope (dv/du) must lie in [0.7, 1.4], so warped durations
// stay within that factor of the original.
struct WarpSpec {
  struct Knot {
    double u;
    double v;
  };
  std::vector<Knot> knots;

  static WarpSpec identity();
  static WarpSpec random(Rng& rng);

  void validate() const;
  double total_scale() const { return knots.back().v; }
  // Source position u for a warped position v in [0, total_scale()].
  double inverse(double v) const;
  // Exact functional inverse, rescaled so u again spans [0,1]: applying the
  // result undoes this warp up to resampling error. Segment slopes invert to
  // reciprocals, which can leave the generation band, so the result is for
  // un-warping and analysis, not for corpus generation.
  WarpSpec inverted() const;

  std::string serialize() const;
  static WarpSpec deserialize(const std::string& text, const std::string& context);
};

// Per-speaker affine feature distortion, near the identity by construction.
struct SpeakerTransform {
  Matrix matrix;  // D_in x D_in, condition number <= 50
  Vector bias;    // D_in
};

SpeakerTransform random_speaker_transform(Rng& rng, Index dim);
FeatureStack apply_transform(const SpeakerTransform& transform, const FeatureStack& stack);

// Knobs of one synthetic utterance. The latent signal is a sum of three
// random-phase sinusoids per latent dimension; stack layers share one affine
// image of it and differ only in their noise level, which rises with the
// layer index so that lower layers carry more signal.
struct GenConfig {
  Index num_layers = 4;   // N streams
  Index input_dim = 8;    // D_in
  Index target_dim = 6;
  Index latent_dim = 4;
  double noise_min = 0.05;  // standard deviation at layer 0
  double noise_max = 0.6;   // standard deviation at layer N-1
  double cycles_min = 0.005;  // sinusoid frequency range, cycles per frame
  double cycles_max = 0.04;

  void validate() const;
};

// Corpus-wide affine maps from the latent signal to stack features and to
// targets. Fixed per corpus so one model can fit every utterance.
struct LatentMaps {
  Matrix stack_map;    // D_in x latent_dim
  Vector stack_bias;   // D_in
  Matrix target_map;   // target_dim x latent_dim
  Vector target_bias;  // target_dim
};

LatentMaps make_latent_maps(Rng& rng, const GenConfig& config);

struct Utterance {
  FeatureStack stack;
  Sequence target;
};

// Target frames sample the latent at every second input frame (half rate,
// T_target = floor(T/2)) and pass through a sigmoid, so values sit in (0,1).
Utterance gen_utterance(std::uint64_t seed, Index t_len, const GenConfig& config,
                        const LatentMaps& maps);

// Resamples every layer along the warped time axis. Output length is
// round(T * total_scale()); frame t' reads the linearly interpolated source
// position inverse(v)*T at v = total_scale()*t'/T'. Positions within 1e-9 of
// an integer snap to it, so the identity warp reproduces the input exactly.
// Accepts any strictly monotone warp, including inverted() results whose
// slopes sit outside the generation band.
FeatureStack apply_warp(const FeatureStack& stack, const WarpSpec& warp);

// Pre-clamp interpolation positions used by apply_warp; strictly increasing.
std::vector<double> warp_source_positions(const WarpSpec& warp, Index t_in, Index t_out);

enum class CorpusLayout { kRec, kTts1, kTts13, kRecPlusTts13 };

CorpusLayout parse_layout(const std::string& name);
std::string layout_name(CorpusLayout layout);

struct CorpusConfig {
  CorpusLayout layout = CorpusLayout::kRec;
  Index base_utterances = 40;  // training bases; see layout rules in gen_corpus
  Index val_utterances = 8;
  Index test_utterances = 8;
  Index t_min = 40;
  Index t_max = 80;
  Index num_speakers = 13;  // TTS speaker pool
  GenConfig gen;

  void validate() const;
};

struct ManifestItem {
  std::string id;
  std::string split;   // "train" | "val" | "test"
  std::string kind;    // "rec" | "tts"
  Index speaker = -1;  // 0-based speaker index; -1 for rec items
  std::string stack_file;   // relative to the manifest directory
  std::string target_file;  // relative; shared with the base utterance for tts
  std::string warp;         // "identity" or a serialized WarpSpec
};

struct DatasetManifest {
  std::uint64_t seed = 0;
  CorpusLayout layout = CorpusLayout::kRec;
  GenConfig gen;
  std::string map_description;
  std::vector<ManifestItem> items;
};

// Generates every file of the corpus under out_dir and returns the manifest
// (also written to out_dir/manifest.txt). Validation and test splits are
// always aligned rec items; the layout decides the training split:
//   rec        base_utterances aligned items;
//   tts1       one speaker, base_utterances warped items;
//   tts13      num_speakers speakers round-robin over base_utterances items;
//   rec+tts13  the rec items plus num_speakers warped copies of each.
// Latent maps, speakers, base utterances, and the val/test splits depend
// only on the seed, not the layout, so layouts are comparable per seed.
DatasetManifest gen_corpus(std::uint64_t seed, const CorpusConfig& config,
                           const std::string& out_dir);

void save_manifest(const DatasetManifest& manifest, const std::string& path);
DatasetManifest load_manifest(const std::string& path);

// Checks that every referenced file exists and parses with the declared
// dimensions; throws DataError on the first violation.
void validate_manifest(const DatasetManifest& manifest, const std::string& dir);

std::vector<const ManifestItem*> split_items(const DatasetManifest& manifest,
                                             const std::string& split);

Utterance load_item(const ManifestItem& item, const std::string& dir);

}  // namespace softalign

#endif  // SOFTALIGN_SYNTH_HPP
