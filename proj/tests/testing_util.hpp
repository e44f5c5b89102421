// softalign/testing_util.hpp

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

#ifndef SOFTALIGN_TESTS_TESTING_UTIL_HPP_
#define SOFTALIGN_TESTS_TESTING_UTIL_HPP_

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "softalign/rng.hpp"
#include "softalign/sequence.hpp"

namespace softalign::testing {

inline Sequence random_sequence(Rng& rng, Index t, Index d, double lo = -1.0, double hi = 1.0) {
  Matrix frames(t, d);
  for (Index i = 0; i < t; ++i) {
    for (Index j = 0; j < d; ++j) frames(i, j) = rng.uniform(lo, hi);
  }
  return Sequence(std::move(frames));
}

inline FeatureStack random_stack(Rng& rng, Index n, Index t, Index d, double lo = -1.0,
                                 double hi = 1.0) {
  std::vector<Matrix> layers;
  layers.reserve(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) layers.push_back(random_sequence(rng, t, d, lo, hi).frames());
  return FeatureStack(std::move(layers));
}

// Symmetric relative error that degrades to absolute error near zero.
inline double rel_err(double numeric, double analytic) {
  return std::abs(numeric - analytic) /
         std::max({1.0, std::abs(numeric), std::abs(analytic)});
}

// Central finite difference of a scalar function of one perturbed coordinate.
inline double central_diff(const std::function<double(double)>& f, double x, double h = 1e-5) {
  return (f(x + h) - f(x - h)) / (2.0 * h);
}

inline double median(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  return values[values.size() / 2];
}

class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static int counter = 0;
    dir_ = std::filesystem::temp_directory_path() /
           ("softalign_test_" + tag + "_" + std::to_string(counter++));
    std::filesystem::remove_all(dir_);
    std::filesystem::create_directories(dir_);
  }
  ~TempDir() { std::filesystem::remove_all(dir_); }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  std::string path() const { return dir_.string(); }
  std::string file(const std::string& name) const { return (dir_ / name).string(); }

 private:
  std::filesystem::path dir_;
};

}  // namespace softalign::testing

#endif  // SOFTALIGN_TESTS_TESTING_UTIL_HPP_
