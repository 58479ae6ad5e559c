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

#include "cvpurify/table.hpp"

#include <filesystem>
#include <fstream>
#include <stdexcept>

#ifndef CVPURIFY_VERSION
#define CVPURIFY_VERSION "unknown"
#endif

namespace cvpurify {
namespace {

std::string quote(const std::string& field, char sep) {
  if (field.find_first_of(std::string{sep, '"', '\n', '\r'}) == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw std::runtime_error("cannot open " + path.string() + " for writing");
  os << content;
  os.close();
  if (!os) throw std::runtime_error("failed writing " + path.string());
}

}  // namespace

void ResultTable::add_row(std::vector<Cell> row) {
  if (row.size() != columns.size()) {
    throw std::logic_error("row width does not match the columns of table " + name);
  }
  rows.push_back(std::move(row));
}

void ResultTable::add_meta(std::string key, std::string value) {
  meta.emplace_back(std::move(key), std::move(value));
}

void ResultTable::add_meta(std::string key, double value) {
  meta.emplace_back(std::move(key), format_real(value));
}

std::size_t ResultTable::column(const std::string& col) const {
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (columns[i] == col) return i;
  }
  throw std::out_of_range("table " + name + " has no column " + col);
}

std::string format_cell(const Cell& c) {
  return std::visit(
      [](const auto& x) -> std::string {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, std::int64_t>) {
          return std::to_string(x);
        } else if constexpr (std::is_same_v<T, double>) {
          return format_real(x);
        } else if constexpr (std::is_same_v<T, bool>) {
          return x ? "true" : "false";
        } else {
          return x;
        }
      },
      c);
}

std::string render_table(const ResultTable& t, OutputFormat format) {
  const char sep = format == OutputFormat::Csv ? ',' : '\t';
  std::string out;
  for (std::size_t i = 0; i < t.columns.size(); ++i) {
    if (i) out += sep;
    out += quote(t.columns[i], sep);
  }
  out += '\n';
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += sep;
      out += quote(format_cell(row[i]), sep);
    }
    out += '\n';
  }
  return out;
}

std::string render_meta(const ResultTable& t, const RunConfig& config) {
  std::string out;
  out += "table=" + t.name + "\n";
  out += "experiment=" + std::string(experiment_name(config.experiment)) + "\n";
  out += "code_version=" CVPURIFY_VERSION "\n";
  out += "seed=" + std::to_string(config.seed()) + "\n";
  for (const auto& line : config.echo()) out += "config." + line + "\n";
  for (const auto& [k, v] : t.meta) out += k + "=" + v + "\n";
  return out;
}

std::vector<std::string> emit_table(const ResultTable& t, const RunConfig& config) {
  namespace fs = std::filesystem;
  const fs::path dir(config.output_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create output directory " + dir.string() + ": " +
                                   ec.message());
  const char* ext = config.format == OutputFormat::Csv ? ".csv" : ".tsv";
  std::vector<std::string> paths;
  const fs::path data = dir / (t.name + ext);
  write_file(data, render_table(t, config.format));
  paths.push_back(data.string());
  const fs::path meta = dir / (t.name + ".meta");
  write_file(meta, render_meta(t, config));
  paths.push_back(meta.string());
  if (!t.plot_script.empty()) {
    const fs::path gp = dir / (t.name + ".gp");
    write_file(gp, t.plot_script);
    paths.push_back(gp.string());
  }
  return paths;
}

}  // namespace cvpurify
