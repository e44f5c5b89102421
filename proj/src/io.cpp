// softalign/io.cpp

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

#include "softalign/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

namespace softalign {

namespace textio {

std::vector<std::string> split_lines(const std::string& text) {
  std::vector<std::string> lines;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string::npos) {
      if (start < text.size()) lines.push_back(text.substr(start));
      break;
    }
    std::string line = text.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(std::move(line));
    start = end + 1;
  }
  // A trailing CR survives on the last line when the final newline is absent.
  if (!lines.empty() && !lines.back().empty() && lines.back().back() == '\r') {
    lines.back().pop_back();
  }
  return lines;
}

double parse_number(std::string_view cell, const std::string& context, std::size_t line_no) {
  const auto fail = [&](const char* why) -> double {
    std::ostringstream msg;
    msg << context << ": line " << line_no << ": " << why << " '" << std::string(cell) << "'";
    throw ParseError(msg.str());
  };
  if (cell.empty()) return fail("empty field");
  double value = 0.0;
  const char* first = cell.data();
  const char* last = cell.data() + cell.size();
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last) return fail("unparsable number");
  if (!std::isfinite(value)) return fail("non-finite value");
  return value;
}

std::vector<double> parse_csv_row(const std::string& line, const std::string& context,
                                  std::size_t line_no) {
  std::vector<double> row;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    const std::size_t end = comma == std::string::npos ? line.size() : comma;
    row.push_back(parse_number(std::string_view(line).substr(start, end - start), context, line_no));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return row;
}

}  // namespace textio

namespace {

using textio::parse_csv_row;
using textio::split_lines;

// Parses `count` data rows of fixed width, starting at lines[offset].
Matrix parse_rows(const std::vector<std::string>& lines, std::size_t offset, Index count,
                  Index width, const std::string& path) {
  Matrix out(count, width);
  for (Index r = 0; r < count; ++r) {
    const std::size_t line_no = offset + static_cast<std::size_t>(r) + 1;
    if (offset + static_cast<std::size_t>(r) >= lines.size()) {
      std::ostringstream msg;
      msg << path << ": line " << line_no << ": expected " << count << " data rows, found "
          << (lines.size() - offset);
      throw ParseError(msg.str());
    }
    const std::vector<double> row =
        parse_csv_row(lines[offset + static_cast<std::size_t>(r)], path, line_no);
    if (static_cast<Index>(row.size()) != width) {
      std::ostringstream msg;
      msg << path << ": line " << line_no << ": expected " << width << " columns, got "
          << row.size();
      throw ParseError(msg.str());
    }
    for (Index c = 0; c < width; ++c) out(r, c) = row[static_cast<std::size_t>(c)];
  }
  return out;
}

void append_rows(std::string& out, const Matrix& rows) {
  for (Index r = 0; r < rows.rows(); ++r) {
    for (Index c = 0; c < rows.cols(); ++c) {
      if (c > 0) out += ',';
      out += format_full(rows(r, c));
    }
    out += '\n';
  }
}

}  // namespace

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open file for reading: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw DataError("read failure on file: " + path);
  return buf.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot open file for writing: " + path);
  out << content;
  out.flush();
  if (!out) throw DataError("write failure on file: " + path);
}

Sequence read_sequence(const std::string& path) {
  const std::vector<std::string> lines = split_lines(read_text_file(path));
  if (lines.empty()) throw ParseError(path + ": empty sequence file");
  const std::vector<double> first = parse_csv_row(lines[0], path, 1);
  Matrix frames(static_cast<Index>(lines.size()), static_cast<Index>(first.size()));
  for (Index c = 0; c < frames.cols(); ++c) frames(0, c) = first[static_cast<std::size_t>(c)];
  frames.bottomRows(frames.rows() - 1) =
      parse_rows(lines, 1, frames.rows() - 1, frames.cols(), path);
  return Sequence(std::move(frames));
}

void write_sequence(const Sequence& seq, const std::string& path) {
  std::string out;
  append_rows(out, seq.frames());
  write_text_file(path, out);
}

FeatureStack read_stack(const std::string& path) {
  const std::vector<std::string> lines = split_lines(read_text_file(path));
  if (lines.empty()) throw ParseError(path + ": empty stack file");
  const std::vector<double> header = parse_csv_row(lines[0], path, 1);
  if (header.size() != 3) {
    throw ParseError(path + ": line 1: stack header must be 'N,T,D'");
  }
  Index dims[3];
  for (int k = 0; k < 3; ++k) {
    const double v = header[static_cast<std::size_t>(k)];
    if (v < 1.0 || v != std::floor(v) || v > 1e9) {
      throw ParseError(path + ": line 1: stack header fields must be positive integers");
    }
    dims[k] = static_cast<Index>(v);
  }
  const Index num_layers = dims[0];
  const Index length = dims[1];
  const Index dim = dims[2];
  const std::size_t expected_lines = 1 + static_cast<std::size_t>(num_layers * length);
  if (lines.size() != expected_lines) {
    std::ostringstream msg;
    msg << path << ": expected " << expected_lines << " lines for a " << num_layers << "x"
        << length << "x" << dim << " stack, found " << lines.size();
    throw ParseError(msg.str());
  }
  std::vector<Matrix> layers;
  layers.reserve(static_cast<std::size_t>(num_layers));
  for (Index i = 0; i < num_layers; ++i) {
    layers.push_back(parse_rows(lines, 1 + static_cast<std::size_t>(i * length), length, dim, path));
  }
  return FeatureStack(std::move(layers));
}

void write_stack(const FeatureStack& stack, const std::string& path) {
  std::string out;
  out += std::to_string(stack.num_layers());
  out += ',';
  out += std::to_string(stack.length());
  out += ',';
  out += std::to_string(stack.dim());
  out += '\n';
  for (Index i = 0; i < stack.num_layers(); ++i) append_rows(out, stack.layer(i));
  write_text_file(path, out);
}

}  // namespace softalign
