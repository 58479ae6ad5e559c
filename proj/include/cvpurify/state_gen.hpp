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

// Entangled-resource generation: NOPA output statistics, two-mode squeezed
// states on a truncated Fock space, lossy Gaussian correlations, and the
// photon-loss master equation that realizes them.

#include <optional>
#include <span>

#include "cvpurify/fock.hpp"
#include "cvpurify/sampling.hpp"

namespace cvpurify {

struct NopaSpec {
  double pump_rate_eps = 0.0;            // |eps|, rate
  double output_coupling_kappa_c = 1.0;  // kappa_c, rate
  double internal_loss_eta0 = 0.0;       // eta_0, rate
};

struct NopaOutput {
  double N = 0.0;
  double M = 0.0;
  /// Set when eta_0 >= 0.1 kappa_c, i.e. the weak-internal-loss premise fails.
  bool loss_not_small = false;
};

/// Photon-number and cross-correlation parameters of the NOPA output.
/// With eta_0 > 0 the lossy N' is returned (kappa_c -> kappa_c + eta_0).
/// Throws DomainError unless |eps| < 0.999 kappa_c / 2.
NopaOutput nopa_output(const NopaSpec& spec);

struct Squeezing {
  double r = 0.0;
  double lambda = 0.0;
};

/// r = asinh(sqrt(N)), lambda = tanh(r) = sqrt(N/(N+1)).
Squeezing squeeze_from_N(double N);

/// Losses accumulated between the source and the storage cavities.  All
/// downstream formulas consume the dimensionless products eta'_alpha * tau.
class LossModel {
 public:
  LossModel() = default;
  /// eta_A, eta_B: transmission loss rates; tau: transmission time;
  /// eta0_over_kappac: NOPA internal loss relative to the output coupling.
  LossModel(double eta_A, double eta_B, double tau, double eta0_over_kappac = 0.0);

  /// Loss given directly as eta'_A tau and eta'_B tau.
  static LossModel from_products(double eta_prime_A_tau, double eta_prime_B_tau);

  double eta_A() const { return eta_A_; }
  double eta_B() const { return eta_B_; }
  double tau() const { return tau_; }
  double eta0_over_kappac() const { return eta0_over_kappac_; }

  /// eta'_alpha tau = eta_alpha tau + eta_0 / kappa_c.
  double eta_prime_tau_A() const { return eta_A_ * tau_ + eta0_over_kappac_; }
  double eta_prime_tau_B() const { return eta_B_ * tau_ + eta0_over_kappac_; }

  /// eta'_alpha = eta_alpha + eta_0 / (kappa_c tau); empty for tau = 0 with
  /// nonzero internal loss, where only the product is defined.
  std::optional<double> eta_prime_A() const;
  std::optional<double> eta_prime_B() const;

  bool lossless() const { return eta_prime_tau_A() == 0.0 && eta_prime_tau_B() == 0.0; }

 private:
  double eta_A_ = 0.0;
  double eta_B_ = 0.0;
  double tau_ = 0.0;
  double eta0_over_kappac_ = 0.0;
};

/// Second moments of a two-mode Gaussian state with zero mean.
struct CorrelationSet {
  double cross = 0.0;   // <a_A a_B>
  double occ_A = 0.0;   // <a_A^dag a_A>
  double occ_B = 0.0;
  double anti_A = 1.0;  // <a_A a_A^dag>
  double anti_B = 1.0;
};

struct SqueezedState {
  StateVector state;
  /// Probability weight discarded by the truncation before renormalizing.
  double tail_weight = 0.0;
};

/// lambda^(2(cutoff+1)): weight of the geometric distribution above the cutoff.
double truncation_tail(double lambda, int cutoff);

/// Smallest cutoff whose tail weight is below max_tail.
int default_cutoff(double lambda, double max_tail = 1e-8);

/// sqrt(1-lambda^2) sum_n lambda^n |n,n> on two modes, renormalized after
/// truncation.  Throws DomainError for tail weight > 1e-3 unless allowed.
SqueezedState two_mode_squeezed(double r, int cutoff, bool allow_large_tail = false);

/// Storage-cavity moments after filling for time t from vacuum.
CorrelationSet fill_transient(const NopaOutput& target, double kappa, double t);

/// Steady-state moments with transmission and NOPA losses.
CorrelationSet lossy_steady_correlations(double N, const LossModel& loss);

struct LindbladResult {
  DensityMatrix rho;
  /// Richardson estimate of the trace-norm error (entrywise L1 bound).
  double error_estimate = 0.0;
  int steps = 0;
};

/// Integrates d rho/ds = sum_k g_k (a_k rho a_k^dag - {n_k, rho}/2) over
/// s in [0, 1], where g_k = decay_products[k] is the loss rate of mode k
/// times the evolution time.  RK4 with `steps` and 2*steps; the finer
/// solution is returned.  Throws ConvergenceError if the step-halving error
/// estimate exceeds `tolerance`.
LindbladResult lindblad_evolve(const DensityMatrix& rho0, std::span<const double> decay_products,
                               int steps, double tolerance = 1e-8);

/// Same, with rate eta'_A tau on the first half of the modes and eta'_B tau
/// on the second half (registers are laid out A_1..A_m, B_1..B_m).
LindbladResult lindblad_evolve(const DensityMatrix& rho0, const LossModel& loss, int steps,
                               double tolerance = 1e-8);

struct LossTrajectory {
  StateVector state;
  std::vector<int> lost;  // photons removed from each mode
};

/// One quantum-jump unraveling of the pure-loss channel: mode k keeps each
/// photon with probability keep[k].  The number of lost photons per mode is
/// drawn from its exact Kraus weights, so the ensemble average equals
/// lindblad_evolve with decay products -ln keep[k].
LossTrajectory sample_loss_trajectory(const StateVector& state, std::span<const double> keep,
                                      Engine& rng);

/// Moments of modes (a, b) of a density matrix.  anti_* uses the bosonic
/// commutator of the untruncated mode.
CorrelationSet correlations_of(const DensityMatrix& rho, ModeIndex a = ModeIndex(0),
                               ModeIndex b = ModeIndex(1));

}  // namespace cvpurify
