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

// Run configuration: a flat key=value schema shared by the config file (INI,
// sections are cosmetic) and --set flags.  Flags override the file.

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace cvpurify {

class ConfigError : public std::invalid_argument {
 public:
  explicit ConfigError(const std::vector<std::string>& problems);
  const std::vector<std::string>& problems() const { return problems_; }

 private:
  std::vector<std::string> problems_;
};

enum class Experiment {
  Fig2,
  Fig3,
  Fig4,
  Concentrate,
  PurifyLossy,
  QndBudget,
  QndSimulate,
  EitKerr,
  EndToEnd,
};

std::string_view experiment_name(Experiment e);
std::optional<Experiment> experiment_from_name(std::string_view name);
const std::vector<Experiment>& all_experiments();

enum class OutputFormat { Csv, Tsv };

using ConfigValue = std::variant<std::int64_t, double, std::vector<double>, std::string, bool>;

struct RunConfig {
  Experiment experiment = Experiment::Fig2;
  std::map<std::string, ConfigValue> values;  // effective values, defaults filled
  std::string output_dir = ".";
  OutputFormat format = OutputFormat::Csv;

  double real(const std::string& key) const;
  std::int64_t integer(const std::string& key) const;
  const std::vector<double>& reals(const std::string& key) const;
  const std::string& text(const std::string& key) const;
  bool flag(const std::string& key) const;
  bool has(const std::string& key) const { return values.count(key) != 0; }
  std::uint64_t seed() const;

  // Sorted "key=value" lines.
  std::vector<std::string> echo() const;
};

struct ConfigInput {
  std::optional<std::string> experiment;  // positional argument
  std::optional<std::string> file_text;   // INI document
  std::string file_name = "<config>";
  std::vector<std::string> overrides;  // "key=value"
  std::optional<std::uint64_t> seed;
  std::string output_dir = ".";
  std::string format = "csv";
};

// Throws ConfigError listing every violation found.
RunConfig parse_config(const ConfigInput& input);

// Keys accepted by an experiment, with one-line descriptions and defaults.
struct KeyDoc {
  std::string key;
  std::string type;
  std::string default_value;
  std::string help;
};
std::vector<KeyDoc> schema(Experiment e);

std::string format_value(const ConfigValue& v);
std::string format_real(double v);

}  // namespace cvpurify
