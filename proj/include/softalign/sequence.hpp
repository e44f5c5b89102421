// softalign/sequence.hpp

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

#ifndef SOFTALIGN_SEQUENCE_HPP
#define SOFTALIGN_SEQUENCE_HPP

#include <string>
#include <utility>
#include <vector>

#include "softalign/common.hpp"

namespace softalign {

// A time series of feature frames: T frames (rows) of dimensionality D
// (columns). Entries are finite doubles; shape is fixed at construction.
class Sequence {
 public:
  explicit Sequence(Matrix frames) : frames_(std::move(frames)) {
    if (frames_.rows() < 1 || frames_.cols() < 1) {
      throw UsageError("sequence needs at least one frame and one dimension");
    }
    if (!frames_.allFinite()) {
      throw UsageError("sequence entries must be finite");
    }
  }

  Index length() const { return frames_.rows(); }
  Index dim() const { return frames_.cols(); }
  const Matrix& frames() const { return frames_; }
  auto frame(Index t) const { return frames_.row(t); }

 private:
  Matrix frames_;
};

// Smoothing temperature of the soft minimum. Zero selects the hard minimum.
class Gamma {
 public:
  explicit Gamma(double value) : value_(value) {
    if (!(value >= 0.0) || value_ == kInf) {
      throw UsageError("gamma must be finite and >= 0");
    }
  }

  double value() const { return value_; }
  bool is_zero() const { return value_ == 0.0; }

 private:
  double value_;
};

// N parallel feature streams over a shared time axis: each layer is a T x D
// matrix and all layers agree on T and D.
class FeatureStack {
 public:
  explicit FeatureStack(std::vector<Matrix> layers) : layers_(std::move(layers)) {
    if (layers_.empty()) throw UsageError("feature stack needs at least one layer");
    const Index t = layers_.front().rows();
    const Index d = layers_.front().cols();
    if (t < 1 || d < 1) throw UsageError("feature stack layers must be non-empty");
    for (const Matrix& layer : layers_) {
      if (layer.rows() != t || layer.cols() != d) {
        throw UsageError("feature stack layers must share one shape");
      }
      if (!layer.allFinite()) throw UsageError("feature stack entries must be finite");
    }
  }

  Index num_layers() const { return static_cast<Index>(layers_.size()); }
  Index length() const { return layers_.front().rows(); }
  Index dim() const { return layers_.front().cols(); }
  const Matrix& layer(Index i) const { return layers_[static_cast<std::size_t>(i)]; }
  const std::vector<Matrix>& layers() const { return layers_; }

 private:
  std::vector<Matrix> layers_;
};

}  // namespace softalign

#endif  // SOFTALIGN_SEQUENCE_HPP
