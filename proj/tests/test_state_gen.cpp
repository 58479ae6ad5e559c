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
#include <vector>

#include <gtest/gtest.h>

#include "cvpurify/errors.hpp"
#include "cvpurify/sampling.hpp"
#include "cvpurify/state_gen.hpp"

namespace cvpurify {
namespace {

TEST(Nopa, ClosedFormAndThreshold) {
  const NopaOutput off = nopa_output({0.0, 1.0, 0.0});
  EXPECT_EQ(off.N, 0.0);
  EXPECT_EQ(off.M, 0.0);
  // eps / kappa_c = 1/4: N = 16/9, M = 20/9 by exact rational arithmetic.
  const NopaOutput q = nopa_output({0.25, 1.0, 0.0});
  EXPECT_NEAR(q.N, 16.0 / 9.0, 1e-14);
  EXPECT_NEAR(q.M, 20.0 / 9.0, 1e-14);
  for (double eps : {0.05, 0.2, 0.4, 0.49}) {
    const NopaOutput o = nopa_output({eps, 1.0, 0.0});
    EXPECT_NEAR(o.M * o.M - o.N * (o.N + 1.0), 0.0, 1e-10 * std::max(1.0, o.M * o.M));
  }
  EXPECT_THROW((void)nopa_output({0.5, 1.0, 0.0}), DomainError);
  EXPECT_THROW((void)nopa_output({0.1, 0.0, 0.0}), DomainError);
  EXPECT_TRUE(nopa_output({0.1, 1.0, 0.2}).loss_not_small);
  EXPECT_FALSE(nopa_output({0.1, 1.0, 0.01}).loss_not_small);
}

TEST(Squeezing, FromPhotonNumber) {
  const Squeezing z = squeeze_from_N(0.0);
  EXPECT_EQ(z.r, 0.0);
  EXPECT_EQ(z.lambda, 0.0);
  const Squeezing one = squeeze_from_N(std::sinh(1.0) * std::sinh(1.0));
  EXPECT_NEAR(one.r, 1.0, 1e-14);
  EXPECT_NEAR(one.lambda, 0.76159415595576489, 1e-14);
  for (double N : {0.1, 1.0, 10.0}) {
    const double l2 = squeeze_from_N(N).lambda * squeeze_from_N(N).lambda;
    EXPECT_NEAR(l2 / (1.0 - l2), N, 1e-12 * std::max(1.0, N));
  }
  EXPECT_THROW((void)squeeze_from_N(-1.0), DomainError);
}

TEST(LossModel, ProductsAndZeroTransmissionTime) {
  const LossModel l(0.2, 0.1, 0.5, 0.01);
  EXPECT_DOUBLE_EQ(l.eta_prime_tau_A(), 0.11);
  EXPECT_DOUBLE_EQ(l.eta_prime_tau_B(), 0.06);
  EXPECT_NEAR(*l.eta_prime_A(), 0.22, 1e-15);
  const LossModel instant(0.0, 0.0, 0.0, 0.02);
  EXPECT_FALSE(instant.eta_prime_A().has_value());
  EXPECT_DOUBLE_EQ(instant.eta_prime_tau_B(), 0.02);
  EXPECT_TRUE(LossModel::from_products(0.0, 0.0).lossless());
  EXPECT_THROW(LossModel(-0.1, 0.0, 1.0), DomainError);
}

TEST(TwoModeSqueezed, MomentsAndEntropy) {
  const SqueezedState vac = two_mode_squeezed(0.0, 3);
  EXPECT_NEAR(std::abs(vac.state.amplitudes()[0]), 1.0, 1e-15);
  const SqueezedState s = two_mode_squeezed(1.0, 60);
  EXPECT_NEAR(expect_number(s.state, ModeIndex(0)), std::sinh(1.0) * std::sinh(1.0), 1e-6);
  EXPECT_NEAR(entanglement_entropy(s.state, mode_range(0, 1)), 2.3369093005546, 1e-6);
  EXPECT_NEAR(s.tail_weight, truncation_tail(std::tanh(1.0), 60), 1e-18);
  EXPECT_THROW((void)two_mode_squeezed(1.0, 5), DomainError);
  EXPECT_NO_THROW((void)two_mode_squeezed(1.0, 5, true));
  const double lam = std::tanh(1.0);
  const int c = default_cutoff(lam, 1e-8);
  EXPECT_LT(truncation_tail(lam, c), 1e-8);
  EXPECT_GE(truncation_tail(lam, c - 1), 1e-8);
}

TEST(Correlations, TransientAndSteadyState) {
  const NopaOutput out{1.0, std::sqrt(2.0), false};
  const CorrelationSet t0 = fill_transient(out, 1.0, 0.0);
  EXPECT_EQ(t0.cross, 0.0);
  EXPECT_EQ(t0.occ_A, 0.0);
  EXPECT_NEAR(fill_transient(out, 1.0, 20.0).occ_A, 1.0, 1e-8);
  const CorrelationSet lossy = lossy_steady_correlations(1.0, LossModel::from_products(0.1, 0.1));
  EXPECT_NEAR(lossy.cross, 1.2796333483291078, 1e-12);  // sqrt(2) e^{-0.1}
  EXPECT_NEAR(lossy.occ_A, std::exp(-0.1), 1e-15);
  EXPECT_NEAR(lossy.anti_B - lossy.occ_B, 1.0, 1e-12);
  double prev = 2.0;
  for (double a : {0.0, 0.05, 0.2, 1.0}) {
    const double occ = lossy_steady_correlations(1.0, LossModel::from_products(a, 0.0)).occ_A;
    EXPECT_LE(occ, prev);
    prev = occ;
  }
}

TEST(Correlations, OfDensityMatrix) {
  FockRegister reg(2, 2);
  const CorrelationSet v = correlations_of(DensityMatrix::from_pure(vacuum(reg)));
  EXPECT_EQ(v.cross, 0.0);
  EXPECT_EQ(v.anti_A, 1.0);
  const std::vector<int> oneone{1, 1};
  const CorrelationSet c = correlations_of(DensityMatrix::from_pure(number_ket(reg, oneone)));
  EXPECT_DOUBLE_EQ(c.occ_A, 1.0);
  EXPECT_DOUBLE_EQ(c.occ_B, 1.0);
  EXPECT_EQ(c.cross, 0.0);
  const auto tmss = DensityMatrix::from_pure(two_mode_squeezed(0.5, 30).state);
  EXPECT_NEAR(correlations_of(tmss).cross, std::sinh(0.5) * std::cosh(0.5), 1e-8);
}

TEST(Lindblad, OnePhotonDecay) {
  FockRegister reg(1, 3);
  const std::vector<int> one{1};
  const auto rho0 = DensityMatrix::from_pure(number_ket(reg, one));
  const std::vector<double> rate{0.3};
  const LindbladResult res = lindblad_evolve(rho0, rate, 40);
  EXPECT_NEAR(res.rho.matrix()(1, 1).real(), std::exp(-0.3), 1e-10);
  EXPECT_NEAR(res.rho.matrix()(0, 0).real(), 1.0 - std::exp(-0.3), 1e-10);
  const std::vector<double> zero{0.0};
  EXPECT_LT((lindblad_evolve(rho0, zero, 4).rho.matrix() - rho0.matrix()).norm(), 1e-15);
  EXPECT_THROW((void)lindblad_evolve(rho0, rate, 0), DomainError);
  EXPECT_THROW((void)lindblad_evolve(rho0, rate, 1, 1e-30), ConvergenceError);
}

TEST(Lindblad, ReproducesLossySteadyCorrelations) {
  const double r = 1.0;
  const auto rho0 = DensityMatrix::from_pure(two_mode_squeezed(r, 12, true).state);
  const LossModel loss = LossModel::from_products(0.05, 0.05);
  const LindbladResult res = lindblad_evolve(rho0, loss, 40);
  EXPECT_NEAR(res.rho.trace(), 1.0, 1e-9);
  EXPECT_GT(res.rho.min_eigenvalue(), -1e-8);
  // Cutoff 12 truncates the reference state, so compare against its own
  // moments damped by the channel.
  const CorrelationSet before = correlations_of(rho0);
  const CorrelationSet after = correlations_of(res.rho);
  EXPECT_NEAR(after.cross, before.cross * std::exp(-0.05), 1e-9);
  EXPECT_NEAR(after.occ_A, before.occ_A * std::exp(-0.05), 1e-9);
}

TEST(LossTrajectory, AveragesToChannel) {
  FockRegister reg(1, 4);
  const std::vector<int> three{3};
  const StateVector ket = number_ket(reg, three);
  const std::vector<double> keep{0.6};
  int lost_total = 0;
  const int trials = 20000;
  for (int t = 0; t < trials; ++t) {
    Engine rng(derive_seed(7, 0, static_cast<std::uint64_t>(t)));
    const LossTrajectory tr = sample_loss_trajectory(ket, keep, rng);
    EXPECT_NEAR(tr.state.norm(), 1.0, 1e-12);
    lost_total += tr.lost[0];
  }
  const double mean = static_cast<double>(lost_total) / trials;
  const double sd = std::sqrt(3 * 0.4 * 0.6 / trials);
  EXPECT_NEAR(mean, 3 * 0.4, 4 * sd);
}

}  // namespace
}  // namespace cvpurify
