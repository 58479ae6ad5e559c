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

// Named experiments behind the command-line tool.  Each is a pure function of
// the validated configuration (including its seed).

#include <vector>

#include "cvpurify/config.hpp"
#include "cvpurify/purify.hpp"
#include "cvpurify/qnd.hpp"
#include "cvpurify/table.hpp"

namespace cvpurify {

QndParams qnd_params_from(const RunConfig& config);
LossModel loss_from(const RunConfig& config);

std::vector<ResultTable> run_fig2(const RunConfig& config);
// fig3 table plus the fig3_peaks table.
std::vector<ResultTable> run_fig3(const RunConfig& config);
std::vector<ResultTable> run_fig4(const RunConfig& config);
std::vector<ResultTable> run_concentrate(const RunConfig& config);
std::vector<ResultTable> run_purify_lossy(const RunConfig& config);
std::vector<ResultTable> run_qnd_budget(const RunConfig& config);
std::vector<ResultTable> run_qnd_simulate(const RunConfig& config);
std::vector<ResultTable> run_eit_kerr(const RunConfig& config);
// Per-trial table, per-j table and a one-row summary.
std::vector<ResultTable> run_end_to_end(const RunConfig& config);

std::vector<ResultTable> run_experiment(const RunConfig& config);

struct Interval {
  double low = 0.0;
  double high = 1.0;
};
// 95% Wilson score interval.
Interval wilson_interval(std::int64_t successes, std::int64_t trials);

}  // namespace cvpurify
