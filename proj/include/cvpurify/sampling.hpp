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

// Seeded random sampling shared by the Monte-Carlo routines.
//
// Seed policy: a run has one master seed.  Trial t of stream s uses an
// mt19937_64 seeded with derive_seed(master, s, t), a SplitMix64 hash of the
// triple, so trials can run in any order or in parallel and still draw the
// same numbers.

#include <cstdint>
#include <random>
#include <span>

#include "cvpurify/fock.hpp"

namespace cvpurify {

using Engine = std::mt19937_64;

std::uint64_t splitmix64(std::uint64_t x);
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream, std::uint64_t index);

/// Uniform double in [0, 1) from the top 53 bits of one draw.
double uniform01(Engine& rng);

/// Index drawn from non-negative weights by inverse CDF (one uniform draw).
std::size_t sample_discrete(std::span<const double> weights, Engine& rng);

/// Number of successes in n Bernoulli(p) trials, one uniform draw each.
int sample_binomial(int n, double p, Engine& rng);

/// Total photon number of `modes` drawn from the exact projector weights.
int sample_total_number(const StateVector& state, std::span<const ModeIndex> modes, Engine& rng);

}  // namespace cvpurify
