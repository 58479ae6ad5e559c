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

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "cvpurify/config.hpp"
#include "cvpurify/experiments.hpp"
#include "cvpurify/table.hpp"

namespace cvpurify {
namespace {

RunConfig parse(const std::string& experiment, std::vector<std::string> sets = {},
                std::optional<std::string> file = std::nullopt) {
  ConfigInput in;
  in.experiment = experiment;
  in.overrides = std::move(sets);
  in.file_text = std::move(file);
  return parse_config(in);
}

std::vector<std::string> problems_of(const ConfigInput& in) {
  try {
    (void)parse_config(in);
  } catch (const ConfigError& e) {
    return e.problems();
  }
  return {};
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

TEST(Config, DefaultsFilled) {
  const RunConfig c = parse("fig2", {"r=1.0"});
  EXPECT_EQ(c.experiment, Experiment::Fig2);
  EXPECT_EQ(c.reals("r_values"), std::vector<double>{1.0});
  EXPECT_EQ(c.integer("m"), 2);
  EXPECT_EQ(c.real("tail"), 1e-10);
  EXPECT_EQ(c.seed(), 1u);
  EXPECT_EQ(parse("fig3").integer("m"), 4);
  EXPECT_EQ(parse("fig4").reals("r_values"), (std::vector<double>{0.5, 1.0, 1.5}));
}

TEST(Config, ExperimentFromKey) {
  ConfigInput in;
  in.file_text = "experiment=fig2\nr=1.0\n";
  EXPECT_EQ(parse_config(in).experiment, Experiment::Fig2);
  in.experiment = "fig4";
  EXPECT_FALSE(problems_of(in).empty());
}

TEST(Config, RangeErrorNamesKey) {
  ConfigInput in;
  in.experiment = "fig2";
  in.overrides = {"r=-0.5"};
  const auto p = problems_of(in);
  ASSERT_EQ(p.size(), 1u);
  EXPECT_NE(p[0].find("'r'"), std::string::npos);
}

TEST(Config, FlagsOverrideFile) {
  const RunConfig c = parse("concentrate", {"r=1.5"}, "[protocol]\nr=0.5\nm=2\n");
  EXPECT_EQ(c.real("r"), 1.5);
  EXPECT_EQ(c.integer("m"), 2);
}

TEST(Config, AggregatesAllViolations) {
  ConfigInput in;
  in.experiment = "purify-lossy";
  in.file_text = "bogus=1\ntrials=zero\n";
  in.overrides = {"gamma=5", "eta_A_tau=-1", "noequals"};
  in.format = "xml";
  const auto p = problems_of(in);
  EXPECT_EQ(p.size(), 6u);
}

TEST(Config, CrossKeyRules) {
  ConfigInput in;
  in.experiment = "end-to-end";
  in.overrides = {"m=3"};
  EXPECT_FALSE(problems_of(in).empty());
  in.overrides = {"m=3", "sampler=closed-form"};
  EXPECT_TRUE(problems_of(in).empty());
  in.experiment = "fig4";
  in.overrides = {"m_min=5", "m_max=3"};
  EXPECT_FALSE(problems_of(in).empty());
  in.overrides = {"r=1", "r_values=1,2"};
  EXPECT_FALSE(problems_of(in).empty());
}

TEST(Config, FuzzedInvalidKeysNeverReachAnExperiment) {
  std::mt19937_64 rng(2024);
  const auto& exps = all_experiments();
  const std::vector<std::string> junk_values{"", "abc", "-1", "1e400", "nan", "0x", "1,,2",
                                             "inf", "-0.5", "99999999999999999999"};
  const std::vector<std::string> keys{"r", "m", "cutoff", "trials", "tail", "gamma", "nu",
                                      "mu", "T", "seed", "qnd", "r_values", "n_atom", "j_max"};
  std::uniform_int_distribution<std::size_t> pick(0, 1 << 30);
  for (int i = 0; i < 500; ++i) {
    ConfigInput in;
    in.experiment = std::string(experiment_name(exps[pick(rng) % exps.size()]));
    // Always include one key that is invalid for every experiment.
    std::string bad(1 + pick(rng) % 8, 'a');
    for (auto& ch : bad) ch = static_cast<char>('a' + pick(rng) % 26);
    in.overrides.push_back("zz_" + bad + "=1");
    for (int k = 0; k < 3; ++k) {
      in.overrides.push_back(keys[pick(rng) % keys.size()] + "=" +
                             junk_values[pick(rng) % junk_values.size()]);
    }
    EXPECT_THROW((void)parse_config(in), ConfigError);
  }
}

TEST(Config, SchemaListsApplicableKeys) {
  bool has_gamma = false;
  for (const auto& k : schema(Experiment::QndBudget)) has_gamma |= k.key == "gamma";
  EXPECT_TRUE(has_gamma);
  for (const auto& k : schema(Experiment::Fig2)) EXPECT_NE(k.key, "gamma");
}

TEST(Table, QuotingAndFormats) {
  ResultTable t;
  t.name = "t";
  t.columns = {"a", "b,c"};
  t.add_row({std::string("x\"y"), 0.1});
  t.add_row({std::int64_t{3}, true});
  EXPECT_EQ(render_table(t, OutputFormat::Csv), "a,\"b,c\"\n\"x\"\"y\",0.10000000000000001\n3,true\n");
  EXPECT_EQ(render_table(t, OutputFormat::Tsv), "a\tb,c\n\"x\"\"y\"\t0.10000000000000001\n3\ttrue\n");
  EXPECT_THROW(t.add_row({1.0}), std::logic_error);
  EXPECT_EQ(format_cell(std::numeric_limits<double>::infinity()), "inf");
}

TEST(Experiments, Fig2RowsAreLibraryValues) {
  const auto tables = run_fig2(parse("fig2", {"r=1.0"}));
  const auto& t = tables.at(0);
  const auto spec = ProtocolSpec::make(2, 1.0);
  EXPECT_EQ(std::get<double>(t.rows[0][2]), 0.0);
  EXPECT_EQ(std::get<double>(t.rows[0][3]), outcome_probability(spec, 0));
  EXPECT_NEAR(std::get<double>(t.rows[0][3]), std::pow(1 - std::pow(std::tanh(1.0), 2), 2), 1e-15);
  for (const auto& row : t.rows) {
    const int j = static_cast<int>(std::get<std::int64_t>(row[1]));
    EXPECT_EQ(std::get<double>(row[3]), outcome_probability(spec, j));
  }
}

TEST(Experiments, Fig3PeaksAndDegenerateCase) {
  const auto tables = run_fig3(parse("fig3"));
  const auto& peaks = tables.at(1);
  ASSERT_EQ(peaks.rows.size(), 3u);
  const std::int64_t expected_j[] = {1, 4, 13};
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_EQ(std::get<std::int64_t>(peaks.rows[i][1]), expected_j[i]);
    EXPECT_TRUE(std::get<bool>(peaks.rows[i][4]));
  }
  const auto zero = run_fig3(parse("fig3", {"r=0"}));
  ASSERT_EQ(zero[0].rows.size(), 1u);
  EXPECT_EQ(std::get<double>(zero[0].rows[0][3]), 1.0);
  EXPECT_EQ(std::get<std::int64_t>(zero[1].rows[0][1]), -1);
}

TEST(Experiments, Fig4Trend) {
  const auto t = run_fig4(parse("fig4")).at(0);
  ASSERT_EQ(t.rows.size(), 60u);
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    const double u = std::get<double>(t.rows[i][2]);
    EXPECT_LE(u, 1.0);
    if (std::get<std::int64_t>(t.rows[i][1]) == 1) {
      EXPECT_EQ(u, 0.0);
    } else {
      EXPECT_GT(u, std::get<double>(t.rows[i - 1][2]));
    }
  }
}

TEST(Experiments, EndToEndPureStateAlwaysSucceeds) {
  const auto tables = run_end_to_end(parse(
      "end-to-end", {"eta_A_tau=0", "eta_B_tau=0", "m=2", "cutoff=4", "trials=200"}));
  const auto& summary = tables.at(2);
  EXPECT_EQ(std::get<double>(summary.rows[0][2]), 1.0);
  // Every success leaves log2 of the number of two-part compositions of j
  // with parts <= cutoff (4 here).
  const auto& trials = tables.at(0);
  for (const auto& row : trials.rows) {
    const auto j = std::get<std::int64_t>(row[1]);
    const double terms = static_cast<double>(std::min<std::int64_t>(j, 8 - j) + 1);
    EXPECT_NEAR(std::get<double>(row[8]), std::log2(terms), 1e-9);
  }
}

TEST(Experiments, EndToEndLossyMatchesClosedForm) {
  for (const char* sampler : {"sampler=fock", "sampler=closed-form"}) {
    const auto tables = run_end_to_end(
        parse("end-to-end", {"m=1", "cutoff=8", "trials=20000", "r=0.5", sampler}));
    for (const auto& row : tables.at(1).rows) {
      if (std::get<std::int64_t>(row[0]) > 4) break;
      EXPECT_LT(std::abs(std::get<double>(row[5])), 4.0) << sampler;
    }
  }
}

TEST(Experiments, OrderingDoesNotChangeStatistics) {
  const auto a = run_end_to_end(parse("end-to-end", {"m=1", "cutoff=6", "trials=20000"}));
  const auto b = run_end_to_end(
      parse("end-to-end", {"m=1", "cutoff=6", "trials=20000", "ordering=posterior"}));
  const double pa = std::get<double>(a.at(2).rows[0][2]);
  const double pb = std::get<double>(b.at(2).rows[0][2]);
  EXPECT_NEAR(pa, pb, 4 * std::sqrt(2 * pa * (1 - pa) / 20000));
}

TEST(Experiments, NoisyReadoutLowersSuccessOnPairedSeeds) {
  const std::vector<std::string> base{"m=1", "cutoff=6", "trials=2000", "eta_A_tau=0",
                                      "eta_B_tau=0"};
  auto ideal = base;
  ideal.push_back("qnd=ideal");
  auto noisy = base;
  noisy.push_back("qnd=noisy");
  const auto a = run_end_to_end(parse("end-to-end", ideal));
  const auto b = run_end_to_end(parse("end-to-end", noisy));
  EXPECT_LT(std::get<double>(b.at(2).rows[0][2]), std::get<double>(a.at(2).rows[0][2]));
  // Same true outcomes on both runs.
  for (std::size_t i = 0; i < a[0].rows.size(); ++i) {
    EXPECT_EQ(std::get<std::int64_t>(a[0].rows[i][1]), std::get<std::int64_t>(b[0].rows[i][1]));
  }
}

TEST(Experiments, Determinism) {
  for (auto e : all_experiments()) {
    std::vector<std::string> sets;
    if (e == Experiment::PurifyLossy || e == Experiment::QndSimulate) sets = {"trials=500"};
    if (e == Experiment::Concentrate || e == Experiment::EndToEnd) sets = {"trials=50"};
    const RunConfig c = parse(std::string(experiment_name(e)), sets);
    const auto first = run_experiment(c);
    const auto second = run_experiment(c);
    ASSERT_EQ(first.size(), second.size());
    for (std::size_t i = 0; i < first.size(); ++i) {
      EXPECT_EQ(render_table(first[i], OutputFormat::Csv), render_table(second[i], OutputFormat::Csv));
      EXPECT_EQ(render_meta(first[i], c), render_meta(second[i], c));
    }
  }
}

#ifdef CVPURIFY_CLI_PATH
int run_cli(const std::string& args) {
  const std::string cmd = std::string(CVPURIFY_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

TEST(Cli, ExitCodesAndFiles) {
  const auto dir = std::filesystem::temp_directory_path() / "cvpurify_cli_test";
  std::filesystem::remove_all(dir);
  EXPECT_EQ(run_cli("fig2 --out " + dir.string() + " --set plot_script=true"), 0);
  EXPECT_TRUE(std::filesystem::exists(dir / "fig2.csv"));
  EXPECT_TRUE(std::filesystem::exists(dir / "fig2.meta"));
  EXPECT_TRUE(std::filesystem::exists(dir / "fig2.gp"));
  const std::string first = slurp(dir / "fig2.csv");
  EXPECT_EQ(run_cli("fig2 --out " + dir.string() + " --set plot_script=true"), 0);
  EXPECT_EQ(slurp(dir / "fig2.csv"), first);
  EXPECT_EQ(run_cli("fig2 --format tsv --out " + dir.string()), 0);
  EXPECT_TRUE(std::filesystem::exists(dir / "fig2.tsv"));
  EXPECT_EQ(run_cli("fig2 --set r=-0.5 --out " + dir.string()), 2);
  EXPECT_EQ(run_cli("nosuch"), 2);
  EXPECT_EQ(run_cli("fig2 --config /nonexistent.ini"), 2);
  EXPECT_EQ(run_cli("concentrate --set m=12 --set cutoff=8 --out " + dir.string()), 3);
  std::filesystem::remove_all(dir);
}
#endif

}  // namespace
}  // namespace cvpurify
