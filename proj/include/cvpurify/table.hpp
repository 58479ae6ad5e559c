// Copyright 2026 The cvpurify Authors
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

#include <cstdint>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "cvpurify/config.hpp"

namespace cvpurify {

using Cell = std::variant<std::int64_t, double, std::string, bool>;

struct ResultTable {
  std::string name;  // file stem
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
  std::vector<std::pair<std::string, std::string>> meta;
  std::string plot_script;  // written as <name>.gp when non-empty

  void add_row(std::vector<Cell> row);
  void add_meta(std::string key, std::string value);
  void add_meta(std::string key, double value);
  std::size_t column(const std::string& name) const;
};

std::string format_cell(const Cell& c);
// RFC 4180 quoting with the chosen separator, LF line endings, header row.
std::string render_table(const ResultTable& t, OutputFormat format);
std::string render_meta(const ResultTable& t, const RunConfig& config);

// Writes <dir>/<name>.csv (or .tsv), <name>.meta and the optional plot script.
// Returns the written paths.  Throws std::runtime_error with the path on I/O
// failure.
std::vector<std::string> emit_table(const ResultTable& t, const RunConfig& config);

}  // namespace cvpurify
