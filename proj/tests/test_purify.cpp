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

#include <cmath>
#include <map>
#include <vector>

#include <gtest/gtest.h>

#include "cvpurify/errors.hpp"
#include "cvpurify/purify.hpp"
#include "cvpurify/state_gen.hpp"

namespace cvpurify {
namespace {

TEST(Degeneracy, ExactCounts) {
  EXPECT_EQ(degeneracy_f(0, 7), 1);
  for (int j = 0; j < 10; ++j) EXPECT_EQ(degeneracy_f(j, 2), j + 1);
  EXPECT_EQ(degeneracy_f(2, 3), 6);
  EXPECT_EQ(degeneracy_f(5, 4), 56);
  // C(1099, 99) has 144 digits; the exact value survives.
  const BigInt big = degeneracy_f(1000, 100);
  EXPECT_EQ(big.str().size(), 144u);
  EXPECT_NEAR(log2_degeneracy(1000, 100), std::log2(static_cast<double>(big)), 1e-9);
  EXPECT_THROW((void)degeneracy_f(-1, 2), DomainError);
  EXPECT_THROW((void)degeneracy_f(1, 0), DomainError);
}

TEST(ClosedForms, OutcomeProbability) {
  const auto vac = ProtocolSpec::make(3, 0.0);
  EXPECT_EQ(outcome_probability(vac, 0), 1.0);
  EXPECT_EQ(outcome_probability(vac, 2), 0.0);
  auto s = ProtocolSpec::make(2, std::atanh(0.5));
  EXPECT_NEAR(s.lambda, 0.5, 1e-12);
  EXPECT_NEAR(outcome_probability(s, 1), 0.28125, 1e-14);
  const auto m4 = ProtocolSpec::make(4, 1.0);
  double sum = 0.0;
  for (int j = 0; j <= 200; ++j) sum += outcome_probability(m4, j);
  EXPECT_GE(sum, 1.0 - 1e-6);
  const auto lossy = ProtocolSpec::make(2, 1.0, LossModel::from_products(0.05, 0.05));
  const auto pure = ProtocolSpec::make(2, 1.0);
  EXPECT_EQ(outcome_probability(lossy, 0), outcome_probability(pure, 0));
  for (int j = 1; j < 30; ++j) EXPECT_LT(outcome_probability(lossy, j), outcome_probability(pure, j));
}

TEST(ClosedForms, Entanglement) {
  EXPECT_EQ(outcome_entanglement(0, 3), 0.0);
  EXPECT_NEAR(outcome_entanglement(3, 2), 2.0, 1e-15);
  EXPECT_NEAR(outcome_entanglement(5, 4), std::log2(56.0), 1e-14);
  EXPECT_EQ(initial_entanglement(0.0), 0.0);
  EXPECT_NEAR(initial_entanglement(0.5), 0.95138951389, 1e-10);
  EXPECT_NEAR(initial_entanglement(1.0), 2.33690930055, 1e-10);
  EXPECT_NEAR(initial_entanglement(1.5), 3.77197248706, 1e-10);
  const auto s = ProtocolSpec::make(2, 1.0);
  EXPECT_EQ(increase_ratio(0, s), 0.0);
  for (int j = 1; j < 20; ++j) EXPECT_GT(increase_ratio(j, s), increase_ratio(j - 1, s));
  EXPECT_THROW((void)increase_ratio(1, ProtocolSpec::make(2, 0.0)), DomainError);
}

TEST(ClosedForms, IncreaseThresholdPrintedAndExact) {
  const auto t = increase_threshold(1.0);
  EXPECT_NEAR(t.closed_form, 0.615, 1e-3);
  EXPECT_NEAR(t.exact, 4.052, 1e-3);
  // The exact threshold is where the ratio crosses one.
  const auto s = ProtocolSpec::make(2, 1.0);
  EXPECT_LT(increase_ratio(4, s), 1.0);
  EXPECT_GT(increase_ratio(5, s), 1.0);
}

TEST(ClosedForms, TransferEfficiency) {
  EXPECT_EQ(transfer_efficiency(ProtocolSpec::make(1, 1.0)).value, 0.0);
  const double golden[3][4] = {
      {0.0, 0.24554630555000152, 0.37955226950695512, 0.46825136785637169},
      {0.0, 0.33989666740889107, 0.50202247391437156, 0.59807330982117137},
      {0.0, 0.3918020953708346, 0.55945845053659527, 0.65262646335701886}};
  const double rs[3] = {0.5, 1.0, 1.5};
  for (int i = 0; i < 3; ++i) {
    for (int m = 1; m <= 4; ++m) {
      EXPECT_NEAR(transfer_efficiency(ProtocolSpec::make(m, rs[i])).value, golden[i][m - 1], 1e-9);
    }
    for (int m : {2, 4, 8, 16}) {
      EXPECT_LE(transfer_efficiency(ProtocolSpec::make(m, rs[i])).value, 1.0 + 1e-9);
    }
  }
  const auto u = [](int m) { return transfer_efficiency(ProtocolSpec::make(m, 1.0)).value; };
  EXPECT_GT(u(16), u(4));
  EXPECT_GT(u(4), u(2));
  const auto te = transfer_efficiency(ProtocolSpec::make(4, 1.0));
  EXPECT_LT(te.tail, 1e-10);
}

TEST(ClosedForms, Moments) {
  const auto zero = distribution_moments(ProtocolSpec::make(4, 0.0));
  EXPECT_EQ(zero.mean, 0.0);
  EXPECT_EQ(zero.variance, 0.0);
  const auto s = ProtocolSpec::make(4, 1.0);
  EXPECT_NEAR(distribution_moments(s).mean, 4.0 * std::sinh(1.0) * std::sinh(1.0), 1e-12);
  const auto num = numeric_moments(s);
  EXPECT_NEAR(num.mean, distribution_moments(s).mean, 1e-8);
  EXPECT_NEAR(num.variance, distribution_moments(s).variance, 1e-8);
  const auto spread = [](int m) {
    const auto mo = distribution_moments(ProtocolSpec::make(m, 1.0));
    return std::sqrt(mo.variance) / mo.mean;
  };
  EXPECT_NEAR(spread(16) / spread(4), 0.5, 1e-12);
}

TEST(Concentration, PostStateIsMaximallyEntangled) {
  const auto spec = ProtocolSpec::make(2, 1.0);
  const StateVector joint = protocol_state(spec, 6);
  const OutcomeRecord rec = concentrate_outcome(joint, 2, 2);
  ASSERT_TRUE(rec.success);
  EXPECT_GT(rec.fidelity, 1.0 - 1e-10);
  EXPECT_NEAR(rec.entanglement_bits, std::log2(3.0), 1e-12);
  const auto schmidt = schmidt_spectrum(*rec.post_state, side_modes(2, Side::A));
  int nonzero = 0;
  for (double v : schmidt) {
    if (v > 1e-12) {
      ++nonzero;
      EXPECT_NEAR(v, 1.0 / 3.0, 1e-9);
    }
  }
  EXPECT_EQ(nonzero, 3);
  EXPECT_NEAR(rec.probability, outcome_probability(spec, 2) /
                                   std::pow(1.0 - truncation_tail(spec.lambda, 6), 2) , 1e-12);
}

TEST(Concentration, VacuumAlwaysGivesZero) {
  const auto rec = concentrate_exact(ProtocolSpec::make(2, 0.0), 2, 11);
  EXPECT_EQ(rec.j_A, 0);
  EXPECT_NEAR(rec.probability, 1.0, 1e-15);
}

TEST(Concentration, SamplingMatchesClosedForm) {
  const auto spec = ProtocolSpec::make(2, std::atanh(0.5));
  const ConcentrationSampler sampler(spec, 14);
  const int trials = 100000;
  std::map<int, int> counts;
  for (int t = 0; t < trials; ++t) {
    Engine rng(derive_seed(3, 0, static_cast<std::uint64_t>(t)));
    ++counts[sampler.sample_j(rng)];
  }
  for (int j = 0; j < 6; ++j) {
    const double p = outcome_probability(spec, j);
    const double sd = std::sqrt(p * (1 - p) / trials);
    EXPECT_NEAR(static_cast<double>(counts[j]) / trials, p, 4 * sd) << "j=" << j;
  }
}

TEST(PhaseCollapse, TransfersToOnePair) {
  const StateVector two = maximally_entangled_ket(2, 2, 3);
  // Modes A1 A2 B1 B2; measure A2.
  const StateVector one = phase_collapse(two, ModeIndex(1), 0.0);
  EXPECT_EQ(one.reg().mode_count(), 3u);
  EXPECT_NEAR(entanglement_entropy(one, mode_range(0, 1)), std::log2(3.0), 1e-12);
  for (int n = 0; n <= 2; ++n) {
    const std::vector<int> occ{n, n, 2 - n};
    EXPECT_NEAR(std::abs(one.amplitude(occ) - Complex(1.0 / std::sqrt(3.0), 0.0)), 0.0, 1e-14);
  }
  const StateVector phased = phase_collapse(two, ModeIndex(1), 0.7);
  const std::vector<int> occ0{0, 0, 2};
  const std::vector<int> occ2{2, 2, 0};
  EXPECT_NEAR(std::arg(phased.amplitude(occ0) / phased.amplitude(occ2)), 1.4, 1e-12);
  const StateVector zero = maximally_entangled_ket(2, 0, 3);
  EXPECT_NEAR(entanglement_entropy(phase_collapse(zero, ModeIndex(1), 1.0), mode_range(0, 1)), 0.0,
              1e-12);
  FockRegister single(1, 2);
  EXPECT_THROW((void)phase_collapse(vacuum(single), ModeIndex(0), 0.0), DomainError);
}

TEST(Trajectories, LosslessIsSingleBranch) {
  const auto ex = trajectory_branches(ProtocolSpec::make(2, 0.5), 4);
  ASSERT_EQ(ex.branches.size(), 1u);
  EXPECT_EQ(ex.branches[0].probability, 1.0);
  EXPECT_EQ(ex.deficit, 0.0);
}

TEST(Trajectories, FirstOrderProbabilities) {
  const auto spec = ProtocolSpec::make(2, 1.0, LossModel::from_products(0.05, 0.05));
  const auto ex = trajectory_branches(spec, 5);
  ASSERT_EQ(ex.branches.size(), 5u);
  EXPECT_NEAR(ex.branches[0].probability, 0.78116992213129480, 1e-12);
  for (std::size_t i = 1; i < 5; ++i) {
    EXPECT_EQ(ex.branches[i].kind, BranchKind::Jump);
    EXPECT_NEAR(ex.branches[i].probability, 0.069054892277090786, 1e-12);
  }
  // The first-order weights overshoot one by a second-order amount here.
  EXPECT_NEAR(ex.deficit, -0.057389491239657948, 1e-12);
  EXPECT_THROW((void)trajectory_branches(
                   ProtocolSpec::make(1, 1.0, LossModel::from_products(0.31, 0.0)), 4),
               DomainError);
}

TEST(Purification, JumpBranchesAreRejected) {
  const auto spec = ProtocolSpec::make(2, 1.0, LossModel::from_products(0.05, 0.05));
  const auto ex = trajectory_branches(spec, 5);
  for (int j = 0; j <= 5; ++j) {
    const auto res = purify_mixed(ex, 2, j, j);
    EXPECT_LE(res.jump_leakage, 1e-12);
    EXPECT_GT(res.record.fidelity, 1.0 - 1e-10);
  }
  EXPECT_FALSE(purify_mixed(ex, 2, 1, 2).record.success);
}

TEST(Purification, DensityMatrixInput) {
  const auto spec = ProtocolSpec::make(1, 0.8, LossModel::from_products(0.05, 0.05));
  const auto rho0 = DensityMatrix::from_pure(protocol_state(spec, 20));
  const auto rho = lindblad_evolve(rho0, *spec.loss, 40).rho;
  const auto res = purify_mixed(rho, 1, 2, 2);
  ASSERT_TRUE(res.record.success);
  ASSERT_TRUE(res.conditional.has_value());
  EXPECT_NEAR(res.conditional->trace(), 1.0, 1e-10);
  // Matched outcomes of a lossy pair: the no-loss weight e^{-(a+b) j} p_j
  // plus pairs of losses feeding in from j+1, j+2, ...
  const JointOutcomeTable table = joint_outcome_distribution(spec, 1e-14);
  EXPECT_NEAR(res.record.probability, table.probability[2][2], 1e-6);
  EXPECT_GT(res.record.probability, outcome_probability(spec, 2));
}

TEST(LossyOutcomes, TableAndSampler) {
  const auto spec = ProtocolSpec::make(2, 0.5, LossModel::from_products(0.05, 0.05));
  const JointOutcomeTable t = joint_outcome_distribution(spec, 1e-12);
  double total = 0.0;
  for (const auto& row : t.probability) {
    for (double p : row) total += p;
  }
  EXPECT_NEAR(total, 1.0, 1e-11);
  // The no-loss term alone is the lossy closed form.
  for (int j = 0; j < 5; ++j) EXPECT_GE(t.probability[j][j], outcome_probability(spec, j));
  const LossyOutcomeSampler sampler(spec, 1e-12);
  Engine rng(derive_seed(1, 0, 0));
  const LossyDraw d = sampler.sample(rng);
  EXPECT_LE(d.j_A, d.initial_j);
  EXPECT_LE(d.j_B, d.initial_j);
}

TEST(WorkingConditions, Thresholds) {
  EXPECT_TRUE(small_noise_ok(2, 1.38, 0.0, 0.0, 0.0).ok);
  const auto a = small_noise_ok(2, 1.38, 0.05, 0.05, 0.0);
  EXPECT_NEAR(a.lhs, 4 * 1.9044 * 0.0025, 1e-12);
  EXPECT_TRUE(a.ok);
  const auto b = small_noise_ok(10, 1.38, 0.3, 0.3, 0.0);
  EXPECT_NEAR(b.lhs, 17.1396, 1e-9);
  EXPECT_FALSE(b.ok);
  EXPECT_EQ(asymmetric_ok(4, 1.38, 0.0).lhs, 0.0);
  EXPECT_NEAR(asymmetric_ok(4, 1.38, 0.01).lhs, 0.0552, 1e-12);
  EXPECT_TRUE(asymmetric_ok(4, 1.38, 0.01).ok);
  EXPECT_FALSE(asymmetric_ok(4, 1.38, 0.05).ok);
}

}  // namespace
}  // namespace cvpurify
