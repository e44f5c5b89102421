// softalign/synth.cpp

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

#include "softalign/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <numbers>
#include <sstream>
#include <utility>

#include "softalign/io.hpp"

namespace softalign {

namespace {

constexpr double kSlopeMin = 0.7;
constexpr double kSlopeMax = 1.4;
constexpr double kSnapTol = 1e-9;
constexpr double kSpeakerMatrixScale = 0.06;
constexpr double kSpeakerBiasScale = 0.05;

std::filesystem::path join(const std::string& dir, const std::string& name) {
  return std::filesystem::path(dir) / name;
}

// Endpoint and monotonicity checks only: enough for well-defined resampling.
// Inverses of band-edge warps carry reciprocal slopes, which can fall just
// outside the generation band that validate() additionally enforces.
void check_monotone(const WarpSpec& warp) {
  if (warp.knots.size() < 2) throw UsageError("warp needs at least 2 knots");
  if (warp.knots.front().u != 0.0 || warp.knots.front().v != 0.0) {
    throw UsageError("warp must start at (0, 0)");
  }
  if (warp.knots.back().u != 1.0) throw UsageError("warp source domain must end at u = 1");
  for (std::size_t k = 1; k < warp.knots.size(); ++k) {
    if (warp.knots[k].u <= warp.knots[k - 1].u || warp.knots[k].v <= warp.knots[k - 1].v) {
      throw UsageError("warp knots must strictly increase");
    }
  }
}

}  // namespace

WarpSpec WarpSpec::identity() { return WarpSpec{{{0.0, 0.0}, {1.0, 1.0}}}; }

WarpSpec WarpSpec::random(Rng& rng) {
  const Index segments = 2 + static_cast<Index>(rng.integer(2));  // 2 or 3
  WarpSpec warp;
  warp.knots.push_back({0.0, 0.0});
  // Evenly spaced anchors with a jitter below half the gap keep u strictly
  // increasing.
  for (Index k = 1; k < segments; ++k) {
    const double base = static_cast<double>(k) / static_cast<double>(segments);
    const double jitter = rng.uniform(-0.3, 0.3) / static_cast<double>(segments);
    warp.knots.push_back({base + jitter, 0.0});
  }
  warp.knots.push_back({1.0, 0.0});
  for (std::size_t k = 1; k < warp.knots.size(); ++k) {
    const double slope = rng.uniform(kSlopeMin, kSlopeMax);
    warp.knots[k].v = warp.knots[k - 1].v + slope * (warp.knots[k].u - warp.knots[k - 1].u);
  }
  warp.validate();
  return warp;
}

void WarpSpec::validate() const {
  check_monotone(*this);
  for (std::size_t k = 1; k < knots.size(); ++k) {
    const double slope =
        (knots[k].v - knots[k - 1].v) / (knots[k].u - knots[k - 1].u);
    if (slope < kSlopeMin - 1e-12 || slope > kSlopeMax + 1e-12) {
      throw UsageError("warp segment slope outside [0.7, 1.4]");
    }
  }
}

double WarpSpec::inverse(double v) const {
  if (v <= 0.0) return 0.0;
  if (v >= knots.back().v) return 1.0;
  // Linear scan; warps hold a handful of knots.
  for (std::size_t k = 1; k < knots.size(); ++k) {
    if (v <= knots[k].v) {
      const double frac = (v - knots[k - 1].v) / (knots[k].v - knots[k - 1].v);
      return knots[k - 1].u + frac * (knots[k].u - knots[k - 1].u);
    }
  }
  return 1.0;
}

WarpSpec WarpSpec::inverted() const {
  validate();
  const double scale = total_scale();
  WarpSpec out;
  out.knots.reserve(knots.size());
  for (const Knot& knot : knots) {
    out.knots.push_back({knot.v / scale, knot.u / scale});
  }
  check_monotone(out);
  return out;
}

std::string WarpSpec::serialize() const {
  std::string out;
  for (std::size_t k = 0; k < knots.size(); ++k) {
    if (k > 0) out += ';';
    out += format_full(knots[k].u);
    out += ':';
    out += format_full(knots[k].v);
  }
  return out;
}

WarpSpec WarpSpec::deserialize(const std::string& text, const std::string& context) {
  if (text == "identity") return identity();
  WarpSpec warp;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t semi = text.find(';', start);
    const std::size_t end = semi == std::string::npos ? text.size() : semi;
    const std::string_view pair = std::string_view(text).substr(start, end - start);
    const std::size_t colon = pair.find(':');
    if (colon == std::string_view::npos) {
      throw ParseError(context + ": warp knot missing ':' in '" + std::string(pair) + "'");
    }
    const double u = textio::parse_number(pair.substr(0, colon), context, 1);
    const double v = textio::parse_number(pair.substr(colon + 1), context, 1);
    warp.knots.push_back({u, v});
    if (semi == std::string::npos) break;
    start = semi + 1;
  }
  try {
    warp.validate();
  } catch (const UsageError& err) {
    throw ParseError(context + ": invalid warp '" + text + "': " + err.what());
  }
  return warp;
}

SpeakerTransform random_speaker_transform(Rng& rng, Index dim) {
  if (dim < 1) throw UsageError("speaker transform needs dim >= 1");
  for (int attempt = 0; attempt < 100; ++attempt) {
    Matrix m(dim, dim);
    for (Index r = 0; r < dim; ++r) {
      for (Index c = 0; c < dim; ++c) {
        m(r, c) = (r == c ? 1.0 : 0.0) + kSpeakerMatrixScale * rng.normal();
      }
    }
    Vector bias(dim);
    for (Index r = 0; r < dim; ++r) bias(r) = kSpeakerBiasScale * rng.normal();
    const Eigen::JacobiSVD<Matrix> svd(m);
    const double cond = svd.singularValues()(0) / svd.singularValues()(dim - 1);
    if (std::isfinite(cond) && cond <= 50.0) return {std::move(m), std::move(bias)};
  }
  throw DataError("could not draw a well-conditioned speaker transform in 100 attempts");
}

FeatureStack apply_transform(const SpeakerTransform& transform, const FeatureStack& stack) {
  if (transform.matrix.rows() != stack.dim()) {
    throw UsageError("speaker transform dimension does not match the stack");
  }
  std::vector<Matrix> out;
  out.reserve(static_cast<std::size_t>(stack.num_layers()));
  for (Index i = 0; i < stack.num_layers(); ++i) {
    Matrix mapped = stack.layer(i) * transform.matrix.transpose();
    mapped.rowwise() += transform.bias.transpose();
    out.push_back(std::move(mapped));
  }
  return FeatureStack(std::move(out));
}

void GenConfig::validate() const {
  if (num_layers < 1 || input_dim < 1 || target_dim < 1 || latent_dim < 1) {
    throw UsageError("generation dims must be >= 1");
  }
  if (noise_min < 0.0 || noise_max < noise_min) {
    throw UsageError("noise levels must satisfy 0 <= noise_min <= noise_max");
  }
  if (cycles_min <= 0.0 || cycles_max < cycles_min || cycles_max >= 0.5) {
    throw UsageError("sinusoid cycles/frame must satisfy 0 < min <= max < 0.5");
  }
}

LatentMaps make_latent_maps(Rng& rng, const GenConfig& config) {
  config.validate();
  const double stack_scale = 1.0 / std::sqrt(static_cast<double>(config.latent_dim));
  const double target_scale = 1.5 / std::sqrt(static_cast<double>(config.latent_dim));
  LatentMaps maps;
  maps.stack_map.resize(config.input_dim, config.latent_dim);
  for (Index r = 0; r < config.input_dim; ++r) {
    for (Index c = 0; c < config.latent_dim; ++c) {
      maps.stack_map(r, c) = rng.uniform(-stack_scale, stack_scale);
    }
  }
  maps.stack_bias.resize(config.input_dim);
  for (Index r = 0; r < config.input_dim; ++r) maps.stack_bias(r) = rng.uniform(-0.5, 0.5);
  maps.target_map.resize(config.target_dim, config.latent_dim);
  for (Index r = 0; r < config.target_dim; ++r) {
    for (Index c = 0; c < config.latent_dim; ++c) {
      maps.target_map(r, c) = rng.uniform(-target_scale, target_scale);
    }
  }
  maps.target_bias.resize(config.target_dim);
  for (Index r = 0; r < config.target_dim; ++r) maps.target_bias(r) = rng.uniform(-0.5, 0.5);
  return maps;
}

Utterance gen_utterance(std::uint64_t seed, Index t_len, const GenConfig& config,
                        const LatentMaps& maps) {
  config.validate();
  if (t_len < 8) throw UsageError("gen_utterance requires at least 8 frames");
  if (maps.stack_map.rows() != config.input_dim || maps.stack_map.cols() != config.latent_dim ||
      maps.target_map.rows() != config.target_dim || maps.target_map.cols() != config.latent_dim) {
    throw UsageError("latent maps do not match the generation config");
  }
  Rng rng(seed);

  // Latent trajectory: per dim, three sinusoids with random amplitude,
  // frequency, and phase.
  Matrix latent(t_len, config.latent_dim);
  for (Index d = 0; d < config.latent_dim; ++d) {
    double amp[3];
    double omega[3];
    double phase[3];
    for (int s = 0; s < 3; ++s) {
      amp[s] = rng.uniform(0.5, 1.0);
      omega[s] = 2.0 * std::numbers::pi * rng.uniform(config.cycles_min, config.cycles_max);
      phase[s] = rng.uniform(0.0, 2.0 * std::numbers::pi);
    }
    for (Index t = 0; t < t_len; ++t) {
      double value = 0.0;
      for (int s = 0; s < 3; ++s) value += amp[s] * std::sin(omega[s] * t + phase[s]);
      latent(t, d) = value;
    }
  }

  const Matrix clean = (latent * maps.stack_map.transpose()).rowwise() +
                       maps.stack_bias.transpose();
  std::vector<Matrix> layers;
  layers.reserve(static_cast<std::size_t>(config.num_layers));
  for (Index i = 0; i < config.num_layers; ++i) {
    const double rise = config.num_layers == 1
                            ? 0.0
                            : static_cast<double>(i) / static_cast<double>(config.num_layers - 1);
    const double sigma = config.noise_min + (config.noise_max - config.noise_min) * rise;
    Matrix layer = clean;
    for (Index t = 0; t < t_len; ++t) {
      for (Index d = 0; d < config.input_dim; ++d) layer(t, d) += sigma * rng.normal();
    }
    layers.push_back(std::move(layer));
  }

  const Index t_target = t_len / 2;
  Matrix target(t_target, config.target_dim);
  for (Index t = 0; t < t_target; ++t) {
    const Vector pre = maps.target_map * latent.row(2 * t).transpose() + maps.target_bias;
    for (Index d = 0; d < config.target_dim; ++d) {
      target(t, d) = 1.0 / (1.0 + std::exp(-pre(d)));
    }
  }
  return {FeatureStack(std::move(layers)), Sequence(std::move(target))};
}

std::vector<double> warp_source_positions(const WarpSpec& warp, Index t_in, Index t_out) {
  const double scale = warp.total_scale();
  std::vector<double> positions(static_cast<std::size_t>(t_out));
  for (Index t = 0; t < t_out; ++t) {
    const double v = scale * static_cast<double>(t) / static_cast<double>(t_out);
    double pos = warp.inverse(v) * static_cast<double>(t_in);
    const double snapped = std::round(pos);
    if (std::abs(pos - snapped) < kSnapTol) pos = snapped;
    positions[static_cast<std::size_t>(t)] = pos;
  }
  return positions;
}

FeatureStack apply_warp(const FeatureStack& stack, const WarpSpec& warp) {
  check_monotone(warp);
  const Index t_in = stack.length();
  const Index t_out = static_cast<Index>(std::round(static_cast<double>(t_in) * warp.total_scale()));
  const std::vector<double> positions = warp_source_positions(warp, t_in, t_out);

  std::vector<Matrix> out;
  out.reserve(static_cast<std::size_t>(stack.num_layers()));
  for (Index i = 0; i < stack.num_layers(); ++i) {
    const Matrix& src = stack.layer(i);
    Matrix warped(t_out, stack.dim());
    for (Index t = 0; t < t_out; ++t) {
      const double pos = std::min(positions[static_cast<std::size_t>(t)],
                                  static_cast<double>(t_in - 1));
      const Index lo = static_cast<Index>(std::floor(pos));
      const Index hi = std::min(lo + 1, t_in - 1);
      const double frac = pos - static_cast<double>(lo);
      warped.row(t) = (1.0 - frac) * src.row(lo) + frac * src.row(hi);
    }
    out.push_back(std::move(warped));
  }
  return FeatureStack(std::move(out));
}

CorpusLayout parse_layout(const std::string& name) {
  if (name == "rec") return CorpusLayout::kRec;
  if (name == "tts1") return CorpusLayout::kTts1;
  if (name == "tts13") return CorpusLayout::kTts13;
  if (name == "rec+tts13") return CorpusLayout::kRecPlusTts13;
  throw UsageError("unknown corpus layout '" + name + "' (want rec|tts1|tts13|rec+tts13)");
}

std::string layout_name(CorpusLayout layout) {
  switch (layout) {
    case CorpusLayout::kRec: return "rec";
    case CorpusLayout::kTts1: return "tts1";
    case CorpusLayout::kTts13: return "tts13";
    case CorpusLayout::kRecPlusTts13: return "rec+tts13";
  }
  throw UsageError("invalid corpus layout value");
}

void CorpusConfig::validate() const {
  gen.validate();
  if (base_utterances < 1) throw UsageError("base_utterances must be >= 1");
  if (val_utterances < 1 || test_utterances < 1) {
    throw UsageError("val and test splits must be non-empty");
  }
  if (t_min < 8 || t_max < t_min) throw UsageError("frame counts must satisfy 8 <= t_min <= t_max");
  if (num_speakers < 1) throw UsageError("num_speakers must be >= 1");
}

namespace {

std::string item_index(Index i) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%04lld", static_cast<long long>(i));
  return buf;
}

}  // namespace

DatasetManifest gen_corpus(std::uint64_t seed, const CorpusConfig& config,
                           const std::string& out_dir) {
  config.validate();
  std::filesystem::create_directories(out_dir);

  Rng root(seed);
  Rng maps_rng(root.fork_seed());
  Rng speakers_rng(root.fork_seed());
  Rng base_rng(root.fork_seed());
  Rng warp_rng(root.fork_seed());

  const LatentMaps maps = make_latent_maps(maps_rng, config.gen);
  std::vector<SpeakerTransform> speakers;
  speakers.reserve(static_cast<std::size_t>(config.num_speakers));
  for (Index s = 0; s < config.num_speakers; ++s) {
    speakers.push_back(random_speaker_transform(speakers_rng, config.gen.input_dim));
  }

  DatasetManifest manifest;
  manifest.seed = seed;
  manifest.layout = config.layout;
  manifest.gen = config.gen;
  manifest.map_description =
      "latent sinusoids through corpus-wide affine maps; layer noise rises with index";

  const auto draw_length = [&](Rng& rng) {
    return config.t_min +
           static_cast<Index>(rng.integer(static_cast<std::uint64_t>(config.t_max - config.t_min + 1)));
  };

  struct Base {
    Utterance utterance;
    std::string target_file;
  };
  std::vector<Base> bases;
  bases.reserve(static_cast<std::size_t>(config.base_utterances));
  const bool rec_in_train =
      config.layout == CorpusLayout::kRec || config.layout == CorpusLayout::kRecPlusTts13;
  for (Index u = 0; u < config.base_utterances; ++u) {
    const std::uint64_t item_seed = base_rng.fork_seed();
    const Index t_len = draw_length(base_rng);
    Utterance utt = gen_utterance(item_seed, t_len, config.gen, maps);
    const std::string id = "train_rec_" + item_index(u);
    const std::string target_file = id + ".target";
    write_sequence(utt.target, join(out_dir, target_file).string());
    if (rec_in_train) {
      const std::string stack_file = id + ".stack";
      write_stack(utt.stack, join(out_dir, stack_file).string());
      manifest.items.push_back({id, "train", "rec", -1, stack_file, target_file, "identity"});
    }
    bases.push_back({std::move(utt), target_file});
  }

  const bool tts_in_train = config.layout != CorpusLayout::kRec;
  if (tts_in_train) {
    // tts1/tts13 match the rec corpus size; rec+tts13 adds every speaker's
    // copy of every base utterance.
    const bool full_grid = config.layout == CorpusLayout::kRecPlusTts13;
    const Index speakers_used = config.layout == CorpusLayout::kTts1 ? 1 : config.num_speakers;
    for (Index u = 0; u < config.base_utterances; ++u) {
      for (Index s = 0; s < speakers_used; ++s) {
        if (!full_grid && s != u % speakers_used) continue;  // round-robin match
        const WarpSpec warp = WarpSpec::random(warp_rng);
        FeatureStack warped = apply_warp(bases[static_cast<std::size_t>(u)].utterance.stack, warp);
        FeatureStack shifted = apply_transform(speakers[static_cast<std::size_t>(s)], warped);
        const std::string id = "train_tts_s" + item_index(s) + "_" + item_index(u);
        const std::string stack_file = id + ".stack";
        write_stack(shifted, join(out_dir, stack_file).string());
        manifest.items.push_back({id, "train", "tts", s, stack_file,
                                  bases[static_cast<std::size_t>(u)].target_file,
                                  warp.serialize()});
      }
    }
  }

  for (const auto& [split, count] :
       {std::pair<std::string, Index>{"val", config.val_utterances},
        std::pair<std::string, Index>{"test", config.test_utterances}}) {
    for (Index u = 0; u < count; ++u) {
      const std::uint64_t item_seed = base_rng.fork_seed();
      const Index t_len = draw_length(base_rng);
      const Utterance utt = gen_utterance(item_seed, t_len, config.gen, maps);
      const std::string id = split + "_" + item_index(u);
      const std::string stack_file = id + ".stack";
      const std::string target_file = id + ".target";
      write_stack(utt.stack, join(out_dir, stack_file).string());
      write_sequence(utt.target, join(out_dir, target_file).string());
      manifest.items.push_back({id, split, "rec", -1, stack_file, target_file, "identity"});
    }
  }

  save_manifest(manifest, join(out_dir, "manifest.txt").string());
  return manifest;
}

void save_manifest(const DatasetManifest& manifest, const std::string& path) {
  std::ostringstream out;
  out << "softalign-manifest v1\n";
  out << "seed " << manifest.seed << "\n";
  out << "layout " << layout_name(manifest.layout) << "\n";
  const GenConfig& g = manifest.gen;
  out << "gen num_layers=" << g.num_layers << " input_dim=" << g.input_dim
      << " target_dim=" << g.target_dim << " latent_dim=" << g.latent_dim
      << " noise_min=" << format_full(g.noise_min) << " noise_max=" << format_full(g.noise_max)
      << " cycles_min=" << format_full(g.cycles_min)
      << " cycles_max=" << format_full(g.cycles_max) << "\n";
  out << "maps " << manifest.map_description << "\n";
  out << "items " << manifest.items.size() << "\n";
  for (const ManifestItem& item : manifest.items) {
    out << "item id=" << item.id << " split=" << item.split << " kind=" << item.kind
        << " speaker=" << item.speaker << " stack=" << item.stack_file
        << " target=" << item.target_file << " warp=" << item.warp << "\n";
  }
  write_text_file(path, out.str());
}

namespace {

std::string take_field(std::istringstream& in, const std::string& key, const std::string& path,
                       std::size_t line_no) {
  std::string token;
  if (!(in >> token) || token.rfind(key + "=", 0) != 0) {
    throw ParseError(path + ": line " + std::to_string(line_no) + ": expected field '" + key +
                     "='");
  }
  return token.substr(key.size() + 1);
}

Index parse_integer_field(const std::string& value, const std::string& path, std::size_t line_no,
                          bool allow_negative) {
  const double v = textio::parse_number(value, path, line_no);
  if (v != std::floor(v) || (!allow_negative && v < 0.0)) {
    throw ParseError(path + ": line " + std::to_string(line_no) + ": bad integer '" + value + "'");
  }
  return static_cast<Index>(v);
}

}  // namespace

DatasetManifest load_manifest(const std::string& path) {
  const std::vector<std::string> lines = textio::split_lines(read_text_file(path));
  if (lines.size() < 6 || lines[0] != "softalign-manifest v1") {
    throw ParseError(path + ": not a softalign manifest (bad magic line)");
  }
  DatasetManifest manifest;

  std::istringstream seed_line(lines[1]);
  std::string tag;
  std::uint64_t seed_value = 0;
  if (!(seed_line >> tag >> seed_value) || tag != "seed") {
    throw ParseError(path + ": line 2: expected 'seed <value>'");
  }
  manifest.seed = seed_value;

  std::istringstream layout_line(lines[2]);
  std::string layout_value;
  if (!(layout_line >> tag >> layout_value) || tag != "layout") {
    throw ParseError(path + ": line 3: expected 'layout <name>'");
  }
  try {
    manifest.layout = parse_layout(layout_value);
  } catch (const UsageError& err) {
    throw ParseError(path + ": line 3: " + err.what());
  }

  std::istringstream gen_line(lines[3]);
  if (!(gen_line >> tag) || tag != "gen") throw ParseError(path + ": line 4: expected 'gen ...'");
  GenConfig& g = manifest.gen;
  g.num_layers = parse_integer_field(take_field(gen_line, "num_layers", path, 4), path, 4, false);
  g.input_dim = parse_integer_field(take_field(gen_line, "input_dim", path, 4), path, 4, false);
  g.target_dim = parse_integer_field(take_field(gen_line, "target_dim", path, 4), path, 4, false);
  g.latent_dim = parse_integer_field(take_field(gen_line, "latent_dim", path, 4), path, 4, false);
  g.noise_min = textio::parse_number(take_field(gen_line, "noise_min", path, 4), path, 4);
  g.noise_max = textio::parse_number(take_field(gen_line, "noise_max", path, 4), path, 4);
  g.cycles_min = textio::parse_number(take_field(gen_line, "cycles_min", path, 4), path, 4);
  g.cycles_max = textio::parse_number(take_field(gen_line, "cycles_max", path, 4), path, 4);

  if (lines[4].rfind("maps ", 0) != 0) throw ParseError(path + ": line 5: expected 'maps ...'");
  manifest.map_description = lines[4].substr(5);

  std::istringstream items_line(lines[5]);
  std::size_t declared = 0;
  if (!(items_line >> tag >> declared) || tag != "items") {
    throw ParseError(path + ": line 6: expected 'items <count>'");
  }
  if (lines.size() != 6 + declared) {
    throw ParseError(path + ": declared " + std::to_string(declared) + " items but file has " +
                     std::to_string(lines.size() - 6) + " item lines");
  }

  for (std::size_t k = 0; k < declared; ++k) {
    const std::size_t line_no = 7 + k;
    std::istringstream item_line(lines[6 + k]);
    if (!(item_line >> tag) || tag != "item") {
      throw ParseError(path + ": line " + std::to_string(line_no) + ": expected 'item ...'");
    }
    ManifestItem item;
    item.id = take_field(item_line, "id", path, line_no);
    item.split = take_field(item_line, "split", path, line_no);
    item.kind = take_field(item_line, "kind", path, line_no);
    item.speaker = parse_integer_field(take_field(item_line, "speaker", path, line_no), path,
                                       line_no, true);
    item.stack_file = take_field(item_line, "stack", path, line_no);
    item.target_file = take_field(item_line, "target", path, line_no);
    item.warp = take_field(item_line, "warp", path, line_no);
    if (item.split != "train" && item.split != "val" && item.split != "test") {
      throw ParseError(path + ": line " + std::to_string(line_no) + ": bad split '" + item.split +
                       "'");
    }
    if (item.kind != "rec" && item.kind != "tts") {
      throw ParseError(path + ": line " + std::to_string(line_no) + ": bad kind '" + item.kind +
                       "'");
    }
    WarpSpec::deserialize(item.warp, path + ": line " + std::to_string(line_no));
    manifest.items.push_back(std::move(item));
  }
  return manifest;
}

void validate_manifest(const DatasetManifest& manifest, const std::string& dir) {
  for (const ManifestItem& item : manifest.items) {
    const std::string stack_path = join(dir, item.stack_file).string();
    const std::string target_path = join(dir, item.target_file).string();
    FeatureStack stack = [&] {
      try {
        return read_stack(stack_path);
      } catch (const ParseError& err) {
        throw DataError("manifest item " + item.id + ": " + err.what());
      }
    }();
    Sequence target = [&] {
      try {
        return read_sequence(target_path);
      } catch (const ParseError& err) {
        throw DataError("manifest item " + item.id + ": " + err.what());
      }
    }();
    if (stack.num_layers() != manifest.gen.num_layers || stack.dim() != manifest.gen.input_dim) {
      throw DataError("manifest item " + item.id + ": stack shape disagrees with the manifest");
    }
    if (target.dim() != manifest.gen.target_dim) {
      throw DataError("manifest item " + item.id + ": target dim disagrees with the manifest");
    }
  }
}

std::vector<const ManifestItem*> split_items(const DatasetManifest& manifest,
                                             const std::string& split) {
  std::vector<const ManifestItem*> out;
  for (const ManifestItem& item : manifest.items) {
    if (item.split == split) out.push_back(&item);
  }
  return out;
}

Utterance load_item(const ManifestItem& item, const std::string& dir) {
  return {read_stack(join(dir, item.stack_file).string()),
          read_sequence(join(dir, item.target_file).string())};
}

}  // namespace softalign
