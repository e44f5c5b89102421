// softalign/io.hpp

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

#ifndef SOFTALIGN_IO_HPP
#define SOFTALIGN_IO_HPP

#include <string>
#include <string_view>
#include <vector>

#include "softalign/common.hpp"
#include "softalign/sequence.hpp"

namespace softalign {

// Strict text plumbing shared by every file format in the toolkit. Parse
// failures throw ParseError naming the context (usually a path) and the
// 1-based line number.
namespace textio {

// Splits on LF; strips one trailing CR per line; a missing final newline
// still yields the last line.
std::vector<std::string> split_lines(const std::string& text);

// Whole-cell finite decimal number; anything else (empty, partial parse,
// inf/nan) is a ParseError.
double parse_number(std::string_view cell, const std::string& context, std::size_t line_no);

std::vector<double> parse_csv_row(const std::string& line, const std::string& context,
                                  std::size_t line_no);

}  // namespace textio

// Sequence files: UTF-8 text, one frame per line, comma-separated decimals,
// no header, LF endings. Values are written with 17 significant digits so a
// write/read round trip is value-identical. Readers tolerate a trailing CR
// per line and a missing final newline; everything else is strict, and parse
// errors name the offending line (1-based).
Sequence read_sequence(const std::string& path);
void write_sequence(const Sequence& seq, const std::string& path);

// Stack files reuse the row format but start with the single header line
// "N,T,D"; the N layer blocks of T rows each follow in order.
FeatureStack read_stack(const std::string& path);
void write_stack(const FeatureStack& stack, const std::string& path);

// Whole-file helpers for the report/manifest writers.
std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

}  // namespace softalign

#endif  // SOFTALIGN_IO_HPP
