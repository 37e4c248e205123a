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

#include "segeval/csv.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <limits>

#include "segeval/error.hpp"

namespace segeval::csv {

std::optional<std::size_t> Document::column(std::string_view name) const {
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] == name) return i;
  return std::nullopt;
}

Document parse(std::string_view text) {
  Document doc;
  std::size_t i = 0, line = 1;
  bool have_header = false;
  while (i < text.size()) {
    if (text[i] == '#') {
      const std::size_t end = text.find('\n', i);
      std::string_view body = text.substr(i + 1, end == std::string_view::npos ? end : end - i - 1);
      if (!body.empty() && body.back() == '\r') body.remove_suffix(1);
      doc.comments.emplace_back(body);
      i = end == std::string_view::npos ? text.size() : end + 1;
      ++line;
      continue;
    }
    Row row;
    row.line = line;
    std::string field;
    bool quoted = false, was_quoted = false;
    for (;;) {
      if (i >= text.size()) {
        if (quoted) throw Error(ErrorCode::MalformedCsv, "unterminated quote at line " + std::to_string(row.line));
        row.fields.push_back(std::move(field));
        break;
      }
      const char c = text[i++];
      if (quoted) {
        if (c == '"') {
          if (i < text.size() && text[i] == '"') {
            field.push_back('"');
            ++i;
          } else {
            quoted = false;
          }
        } else {
          if (c == '\n') ++line;
          field.push_back(c);
        }
      } else if (c == '"' && field.empty() && !was_quoted) {
        quoted = was_quoted = true;
      } else if (c == ',') {
        row.fields.push_back(std::move(field));
        field.clear();
        was_quoted = false;
      } else if (c == '\n' || c == '\r') {
        if (c == '\r' && i < text.size() && text[i] == '\n') ++i;
        row.fields.push_back(std::move(field));
        ++line;
        break;
      } else {
        field.push_back(c);
      }
    }
    if (row.fields.size() == 1 && row.fields[0].empty()) continue;  // blank line
    if (!have_header) {
      doc.header = std::move(row.fields);
      have_header = true;
    } else {
      if (row.fields.size() != doc.header.size())
        throw Error(ErrorCode::MalformedCsv,
                    "line " + std::to_string(row.line) + " has " + std::to_string(row.fields.size()) +
                        " fields, header has " + std::to_string(doc.header.size()));
      doc.rows.push_back(std::move(row));
    }
  }
  if (!have_header) throw Error(ErrorCode::MalformedCsv, "missing header row");
  return doc;
}

std::string escape(std::string_view field) {
  if (field.find_first_of(",\"\r\n") == std::string_view::npos &&
      (field.empty() || field.front() != '#'))
    return std::string(field);
  std::string out = "\"";
  for (const char c : field) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

std::string join(const std::vector<std::string>& fields) {
  std::string out;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out.push_back(',');
    out += escape(fields[i]);
  }
  return out;
}

std::string fixed(double v, int decimals) {
  if (std::isnan(v)) return {};
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed, decimals);
  if (ec != std::errc()) return {};
  std::string out(buf, ptr);
  // Values that round to zero print unsigned.
  if (out[0] == '-' && out.find_first_not_of("-0.") == std::string::npos) out.erase(0, 1);
  return out;
}

std::string exact(double v) {
  if (std::isnan(v)) return {};
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc()) return {};
  return std::string(buf, ptr);
}

std::string scientific(double v, int decimals) {
  if (std::isnan(v)) return {};
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*E", decimals, v);
  return buf;
}

double parse_real(std::string_view text) {
  if (text.empty()) return std::numeric_limits<double>::quiet_NaN();
  if (text.front() == '+') text.remove_prefix(1);
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size())
    throw Error(ErrorCode::MalformedCsv, "not a number: '" + std::string(text) + "'");
  return v;
}

}  // namespace segeval::csv
