// softalign/common.hpp

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

#ifndef SOFTALIGN_COMMON_HPP
#define SOFTALIGN_COMMON_HPP

#include <Eigen/Dense>

#include <cstdio>
#include <limits>
#include <stdexcept>
#include <string>

namespace softalign {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Caller violated an operation contract (bad arguments, mismatched shapes,
// an option combination the operation rejects). CLI exit code 1.
class UsageError : public std::runtime_error {
 public:
  explicit UsageError(const std::string& what) : std::runtime_error(what) {}
};

// A file or stream did not match its declared format. CLI exit code 2.
class ParseError : public std::runtime_error {
 public:
  explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

// Data-level failure that is not a syntax problem: missing files,
// inconsistent corpus contents. CLI exit code 2.
class DataError : public std::runtime_error {
 public:
  explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

// Shortest decimal form that round-trips a double exactly.
inline std::string format_full(double value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  return buf;
}

// Fixed 9-significant-digit scientific form used by the CLI.
inline std::string format_sig9(double value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.8e", value);
  return buf;
}

}  // namespace softalign

#endif  // SOFTALIGN_COMMON_HPP
