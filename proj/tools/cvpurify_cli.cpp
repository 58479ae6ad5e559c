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

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cvpurify/config.hpp"
#include "cvpurify/experiments.hpp"
#include "cvpurify/table.hpp"

namespace {

constexpr int kConfigError = 2;
constexpr int kRuntimeError = 3;

std::string experiment_list() {
  std::string s;
  for (auto e : cvpurify::all_experiments()) {
    if (!s.empty()) s += ", ";
    s += cvpurify::experiment_name(e);
  }
  return s;
}

void print_keys(cvpurify::Experiment e) {
  std::cout << "keys for " << cvpurify::experiment_name(e) << ":\n";
  for (const auto& k : cvpurify::schema(e)) {
    std::cout << "  " << k.key << " (" << k.type << ")";
    if (!k.default_value.empty()) std::cout << " = " << k.default_value;
    std::cout << "  " << k.help << "\n";
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Continuous-variable entanglement purification simulator"};
  app.set_version_flag("--version", std::string(CVPURIFY_VERSION));

  std::string experiment;
  std::string config_path;
  std::vector<std::string> sets;
  std::string out_dir = ".";
  std::uint64_t seed = 0;
  std::string format = "csv";
  bool list_keys = false;
  bool quiet = false;

  app.add_option("experiment", experiment, "one of: " + experiment_list())->required();
  app.add_option("--config", config_path, "INI file with key=value settings");
  app.add_option("--set", sets, "override one key, key=value (repeatable)");
  app.add_option("--out", out_dir, "output directory");
  auto* seed_opt = app.add_option("--seed", seed, "master seed");
  app.add_option("--format", format, "csv or tsv");
  app.add_flag("--list-keys", list_keys, "print the accepted keys and exit");
  app.add_flag("-q,--quiet", quiet, "do not list written files");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kConfigError;
  }

  cvpurify::ConfigInput input;
  input.experiment = experiment;
  input.overrides = sets;
  input.output_dir = out_dir;
  input.format = format;
  if (seed_opt->count() > 0) input.seed = seed;
  if (!config_path.empty()) {
    std::ifstream is(config_path, std::ios::binary);
    if (!is) {
      std::cerr << "error: cannot read config file " << config_path << "\n";
      return kConfigError;
    }
    std::ostringstream ss;
    ss << is.rdbuf();
    input.file_text = ss.str();
    input.file_name = config_path;
  }

  cvpurify::RunConfig config;
  try {
    if (list_keys) {
      auto e = cvpurify::experiment_from_name(experiment);
      if (!e) {
        std::cerr << "error: unknown experiment '" << experiment << "'\n";
        return kConfigError;
      }
      print_keys(*e);
      return 0;
    }
    config = cvpurify::parse_config(input);
  } catch (const cvpurify::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kConfigError;
  }

  try {
    for (const auto& table : cvpurify::run_experiment(config)) {
      for (const auto& path : cvpurify::emit_table(table, config)) {
        if (!quiet) std::cout << path << "\n";
      }
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kRuntimeError;
  }
  return 0;
}
