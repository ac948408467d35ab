// Copyright 2026 The dqlimb Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Small text I/O helpers shared by the CSV writers.

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <istream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "dqlimb/error.hpp"

namespace dqlimb::io {

/// Shortest representation that round-trips exactly.
inline std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

inline double parse_double(std::string_view s, const std::string& what) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\r' || s.back() == '\t')) s.remove_suffix(1);
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw ParseError(what + ": cannot parse '" + std::string(s) + "' as a number");
  }
  return v;
}

inline std::vector<std::string_view> split(std::string_view line, char sep = ',') {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t pos = line.find(sep, start);
    out.push_back(line.substr(start, pos == std::string_view::npos ? pos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

/// Reads a headered numeric CSV. Blank lines are skipped. Throws ParseError
/// naming `what` and the line on any malformed row.
inline std::vector<std::vector<double>> read_csv_table(std::istream& in,
                                                      std::string_view header,
                                                      const std::string& what) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError(what + ": empty file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != header) throw ParseError(what + ": unexpected header '" + line + "'");
  const std::size_t width = split(header).size();
  std::vector<std::vector<double>> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = split(line);
    const std::string where = what + " line " + std::to_string(line_no);
    if (fields.size() != width) {
      throw ParseError(where + ": expected " + std::to_string(width) + " fields");
    }
    std::vector<double> row(width);
    for (std::size_t i = 0; i < width; ++i) row[i] = parse_double(fields[i], where);
    rows.push_back(std::move(row));
  }
  return rows;
}

/// Writes to `path` through a temporary sibling and renames on success, so
/// readers never observe a partial file.
template <class Writer>
void write_atomically(const std::filesystem::path& path, Writer&& writer) {
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw InputError("cannot open '" + tmp.string() + "' for writing");
    try {
      writer(out);
    } catch (...) {
      out.close();
      std::error_code ec;
      std::filesystem::remove(tmp, ec);
      throw;
    }
    out.flush();
    if (!out) throw InputError("write to '" + tmp.string() + "' failed");
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace dqlimb::io
