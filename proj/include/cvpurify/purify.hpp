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

// Total-photon-number entanglement concentration and purification.
//
// A protocol register holds m pairs as 2m modes ordered A_1..A_m, B_1..B_m.
// Measuring the total photon number j on the A side of m two-mode squeezed
// pairs leaves the B side perfectly correlated, in a maximally entangled
// state of Schmidt rank f_j^(m) = C(j+m-1, m-1).

#include <cstdint>
#include <optional>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "cvpurify/fock.hpp"
#include "cvpurify/sampling.hpp"
#include "cvpurify/state_gen.hpp"

namespace cvpurify {

using BigInt = boost::multiprecision::cpp_int;

enum class Side { A, B };

struct ProtocolSpec {
  int m = 1;
  double r = 0.0;
  double lambda = 0.0;
  std::optional<LossModel> loss;

  /// Validates m >= 1, r >= 0 and sets lambda = tanh(r).
  static ProtocolSpec make(int m, double r, std::optional<LossModel> loss = std::nullopt);

  /// (eta'_A + eta'_B) tau, zero in the pure case.
  double total_loss() const;
};

/// Degeneracy C(j+m-1, m-1), exact.
BigInt degeneracy_f(int j, int m);
/// log2 f_j^(m), accurate to a few ulp without forming the integer.
double log2_degeneracy(int j, int m);

/// (1-lambda^2)^m lambda^(2j) f_j^(m), times exp(-(eta'_A+eta'_B) tau j)
/// when the spec carries a loss model.
double outcome_probability(const ProtocolSpec& spec, int j);

/// log2 f_j^(m) ebits.
double outcome_entanglement(int j, int m);

/// cosh^2 r log2 cosh^2 r - sinh^2 r log2 sinh^2 r.
double initial_entanglement(double r);

/// outcome_entanglement / initial_entanglement.  Throws DomainError at r = 0.
double increase_ratio(int j, const ProtocolSpec& spec);

/// Two-pair thresholds on j for an entanglement gain.  `exact` solves
/// log2(j+1) > E(r), i.e. j > 2^E - 1; `closed_form` is the expression
/// cosh(r)^cosh(r) / sinh(r)^sinh(r) - 1, kept for comparison.
struct IncreaseThreshold {
  double closed_form = 0.0;
  double exact = 0.0;
};
IncreaseThreshold increase_threshold(double r);

/// Smallest J with sum_{j>J} p_j < max_tail (pure-state distribution).
int tail_j_max(const ProtocolSpec& spec, double max_tail = 1e-10);

struct TransferEfficiency {
  double value = 0.0;
  int j_max = 0;
  double tail = 0.0;  // probability mass beyond j_max
};

/// sum_j p_j log2 f_j / (m E(r)), truncated where the tail drops below
/// 1e-10 unless j_max >= 0 is given.  Throws DomainError at r = 0.
TransferEfficiency transfer_efficiency(const ProtocolSpec& spec, int j_max = -1);

struct Moments {
  double mean = 0.0;
  double variance = 0.0;
};

/// Closed forms m lambda^2/(1-lambda^2) and m lambda^2/(1-lambda^2)^2.
Moments distribution_moments(const ProtocolSpec& spec);
/// Moments of the truncated distribution by direct summation.
Moments numeric_moments(const ProtocolSpec& spec, int j_max = -1);

std::vector<ModeIndex> side_modes(int m, Side side);

/// m two-mode squeezed pairs on 2m modes (A_1..A_m, B_1..B_m), each
/// truncated at `cutoff` and renormalized.  Loss in the spec is ignored.
StateVector protocol_state(const ProtocolSpec& spec, int cutoff);

/// f^(-1/2) sum_{i_1+..+i_m=j} |i_1..i_m>_A |i_1..i_m>_B.  Requires j <= cutoff.
StateVector maximally_entangled_ket(int m, int j, int cutoff);

struct OutcomeRecord {
  int j_A = 0;
  int j_B = 0;
  bool success = false;
  double probability = 0.0;
  double entanglement_bits = 0.0;
  /// |<j|post>|^2 against the ideal maximally entangled outcome.
  double fidelity = 0.0;
  std::optional<StateVector> post_state;
};

/// Projects the A side of a protocol register onto total number j.  The B
/// side mirrors j; entanglement is measured across the A|B cut.
OutcomeRecord concentrate_outcome(const StateVector& joint, int m, int j);

/// Repeated concentration runs on one prepared register.
class ConcentrationSampler {
 public:
  /// Throws CapacityError when the 2m-mode register exceeds the cap; the
  /// closed-form functions above cover larger m.
  ConcentrationSampler(const ProtocolSpec& spec, int cutoff);

  const StateVector& joint() const { return joint_; }
  const std::vector<double>& distribution() const { return distribution_; }
  int sample_j(Engine& rng) const;
  OutcomeRecord run(Engine& rng) const;

 private:
  int m_;
  StateVector joint_;
  std::vector<double> distribution_;
};

/// One seeded concentration run: j is sampled from the projector weights of
/// the truncated register and the post-measurement state returned.
OutcomeRecord concentrate_exact(const ProtocolSpec& spec, int cutoff, std::uint64_t seed);

/// Projects `mode` onto the phase state sum_n e^{-i n phi}|n> and removes
/// it from the register.  On a two-pair outcome |j> measured at A_2 this
/// leaves sum_n e^{i(j-n)phi}|n>_{A1}|n, j-n>_{B1 B2}/sqrt(j+1); B_2 is
/// fixed by B_1 and carries no further entanglement.  Throws DomainError
/// when the collapse has zero probability.
StateVector phase_collapse(const StateVector& state, ModeIndex mode, double phi);

enum class BranchKind { NoJump, Jump };

struct TrajectoryBranch {
  BranchKind kind = BranchKind::NoJump;
  Side side = Side::A;  // for jumps
  int pair_index = 0;   // for jumps, 0-based
  double probability = 0.0;
  StateVector state;
};

struct TrajectoryExpansion {
  std::vector<TrajectoryBranch> branches;
  /// 1 - sum of branch probabilities; O((eta' tau)^2) and may be negative.
  double deficit = 0.0;
};

/// First-order quantum-trajectory expansion of the lossy m-pair state: one
/// no-jump branch with probability ((1-l^2)/(1-l^2 e^{-(a+b)}))^m and 2m
/// single-jump branches with probability sinh^2(r) eta'_alpha tau.
/// Throws DomainError when eta'_alpha tau > 0.3 on either side.
TrajectoryExpansion trajectory_branches(const ProtocolSpec& spec, int cutoff);

struct PurificationResult {
  OutcomeRecord record;
  /// Largest norm of a matched-projector image of a single-jump branch.
  double jump_leakage = 0.0;
  std::optional<DensityMatrix> conditional;
};

/// Two-sided total-number measurement with outcome (j_A, j_B) applied to a
/// trajectory expansion.  Success iff j_A == j_B; probability is the joint
/// probability of the outcome pair.
PurificationResult purify_mixed(const TrajectoryExpansion& expansion, int m, int j_A, int j_B);

/// Same for a density matrix on a protocol register (e.g. from
/// lindblad_evolve).  The conditional state is returned on success.
PurificationResult purify_mixed(const DensityMatrix& rho, int m, int j_A, int j_B);

/// Exact joint distribution of (j_A, j_B) after independent photon loss:
/// sum_J p_J Bin(j_A; J, e^{-eta'_A tau}) Bin(j_B; J, e^{-eta'_B tau}).
/// Indexed [j_A][j_B] for j up to the returned j_max.
struct JointOutcomeTable {
  int j_max = 0;
  std::vector<std::vector<double>> probability;
};
JointOutcomeTable joint_outcome_distribution(const ProtocolSpec& spec, double max_tail = 1e-12);

/// Monte-Carlo draw of one lossy purification round: J photons per side
/// from the pure distribution, each lost independently.
struct LossyDraw {
  int initial_j = 0;
  int j_A = 0;
  int j_B = 0;
  bool success() const { return j_A == j_B; }
  /// Kept state is the ideal |j> only when no photon was lost.
  bool ideal() const { return j_A == initial_j && j_B == initial_j; }
};

class LossyOutcomeSampler {
 public:
  explicit LossyOutcomeSampler(const ProtocolSpec& spec, double max_tail = 1e-12);

  LossyDraw sample(Engine& rng) const;
  const std::vector<double>& pure_distribution() const { return pure_; }

 private:
  std::vector<double> pure_;
  double keep_A_;
  double keep_B_;
};

struct WorkingCondition {
  bool ok = false;
  double lhs = 0.0;
  double threshold = 0.1;
};

/// m^2 nbar^2 (eta_A tau + eta0/kc)(eta_B tau + eta0/kc) < 0.1.
WorkingCondition small_noise_ok(int m, double nbar, double eta_A_tau, double eta_B_tau,
                                double eta0_over_kappac);

/// m nbar eta0/kc < 0.1; the B-side transmission loss may exceed one.
WorkingCondition asymmetric_ok(int m, double nbar, double eta0_over_kappac);

}  // namespace cvpurify
