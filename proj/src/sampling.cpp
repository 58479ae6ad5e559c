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

#include "cvpurify/sampling.hpp"

#include <numeric>

#include "cvpurify/errors.hpp"

namespace cvpurify {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream, std::uint64_t index) {
  return splitmix64(splitmix64(splitmix64(master) ^ stream) ^ index);
}

double uniform01(Engine& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

std::size_t sample_discrete(std::span<const double> weights, Engine& rng) {
  if (weights.empty()) throw DomainError("sample_discrete needs at least one weight");
  const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
  if (!(total > 0.0)) throw DomainError("sample_discrete needs a positive total weight");
  const double u = uniform01(rng) * total;
  double acc = 0.0;
  std::size_t last_positive = 0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (weights[i] <= 0.0) continue;
    acc += weights[i];
    last_positive = i;
    if (u < acc) return i;
  }
  return last_positive;
}

int sample_binomial(int n, double p, Engine& rng) {
  int k = 0;
  for (int i = 0; i < n; ++i) {
    if (uniform01(rng) < p) ++k;
  }
  return k;
}

int sample_total_number(const StateVector& state, std::span<const ModeIndex> modes, Engine& rng) {
  const auto dist = total_number_distribution(state, modes);
  return static_cast<int>(sample_discrete(dist, rng));
}

}  // namespace cvpurify
