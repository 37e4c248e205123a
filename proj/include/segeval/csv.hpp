// Copyright 2026 The segeval Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

/// \file csv.hpp
/// RFC 4180 CSV with '#' comment lines, and locale-independent number text.

#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace segeval::csv {

struct Row {
  std::vector<std::string> fields;
  std::size_t line = 0;  ///< 1-based line where the record starts
};

struct Document {
  std::vector<std::string> comments;  ///< comment lines without the leading '#'
  std::vector<std::string> header;
  std::vector<Row> rows;

  /// Column position by header name.
  std::optional<std::size_t> column(std::string_view name) const;
};

/// Throws MalformedCsv on unterminated quotes or ragged rows.
Document parse(std::string_view text);

std::string escape(std::string_view field);
std::string join(const std::vector<std::string>& fields);

/// Fixed-point text, e.g. fixed(0.66666, 4) == "0.6667". NaN prints empty.
std::string fixed(double v, int decimals);
/// Shortest text that parses back to exactly v.
std::string exact(double v);
/// C printf "%.<decimals>E", e.g. "7.18E-48".
std::string scientific(double v, int decimals);

/// Empty text reads as NaN. Throws MalformedCsv for anything non-numeric.
double parse_real(std::string_view text);

}  // namespace segeval::csv
