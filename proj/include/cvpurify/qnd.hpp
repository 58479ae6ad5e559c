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

// Cascaded ring-cavity QND readout of the total photon number n1 + n2.
//
// The ring cavities are adiabatically eliminated; what remains is an
// integrated homodyne statistic x_T = gain * (n1 + n2) + bias + noise with
// noise standard deviation 1/sqrt(2T) (vacuum quadrature variance 1/2).

#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "cvpurify/fock.hpp"
#include "cvpurify/sampling.hpp"

namespace cvpurify {

struct QndParams {
  double gamma = 0.0;    // ring-cavity damping, rad/s
  double chi = 0.0;      // cross-phase coefficient, rad/s
  double g_mag = 0.0;    // drive amplitude |g|
  double kappa = 0.0;    // good-cavity damping, rad/s
  double T = 0.0;        // measuring time, s
  double delta_t = 0.0;  // phase-variance growth rate, 1/s
  double beta1 = 0.0;
  double beta2 = 0.0;
  double mu = 1.0;
  double nu = 1.0;
  double chi_i = 0.0;
  double gamma1 = 0.0;
  double gamma2 = 0.0;
  double chi1 = 0.0;
  double chi2 = 0.0;
  double n1 = 0.0;  // <n_1>
  double n2 = 0.0;  // <n_2>

  // gamma/2pi = 100 MHz, chi/2pi = 0.2 MHz, |g| = 50, kappa/2pi = 4 MHz,
  // <n> = 1.4, T = 8 ns, chi_i = 0.1 chi, ideal coupling and detection.
  static QndParams reference();

  // Throws DomainError listing every out-of-range field.
  void validate() const;
  double max_n() const { return n1 > n2 ? n1 : n2; }
};

// gamma > 20 chi max<n>.
bool adiabatic_ok(const QndParams& p);

double signal_gain(const QndParams& p);
double noise_sigma(const QndParams& p);
double distinguishability(const QndParams& p);

struct TimeWindow {
  double T_min = 0.0;
  double T_max = std::numeric_limits<double>::infinity();
  bool nonempty() const { return T_min < T_max; }
  bool contains(double T) const { return T_min < T && T < T_max; }
};
TimeWindow time_window(const QndParams& p);

// Sum of the systematic offsets of x_T (phase drift, cavity imbalance,
// leak imbalance).  Independent of the true photon number.
double homodyne_bias(const QndParams& p);

// Probability that nearest-level rounding misreads j in the absence of bias.
double misidentification_probability(const QndParams& p, int j_true);

struct HomodyneRecord {
  double x_T = 0.0;
  int inferred_j = 0;
  int true_j = 0;
};

// Independent streams for the projection draw and the homodyne noise, so that
// the sequence of true outcomes does not depend on the readout model.
// Streams `stream` and `stream + 1` of the master seed are used.
struct QndRng {
  Engine projection;
  Engine homodyne;
  explicit QndRng(std::uint64_t seed, std::uint64_t trial = 0, std::uint64_t stream = 0);
};

double standard_normal(Engine& rng);
int infer_j(double x_T, double gain);

HomodyneRecord homodyne_sample(const QndParams& p, int j_true, Engine& rng);

struct QndMeasurement {
  HomodyneRecord record;
  Projection projection;  // collapse onto the true outcome
};

QndMeasurement measure_total_number(const StateVector& state, std::span<const ModeIndex> modes,
                                    const QndParams& p, QndRng& rng);

struct BudgetRow {
  std::string id;
  double lhs = 0.0;
  double rhs = 0.0;
  bool pass = false;
  double margin = 0.0;  // rhs / lhs; infinite when lhs is zero
};

struct BudgetReport {
  std::vector<BudgetRow> rows;
  bool overall = false;
  const BudgetRow& row(const std::string& id) const;
};

// Rows, in order: T_window, phase_delta, phase_rate, imbalance, leak_strong,
// leak_weak, coupling, detector, two_photon.  Each is the strict inequality
// lhs < rhs.
BudgetReport budget_report(const QndParams& p);
// "id,lhs,rhs,pass,margin" header followed by one line per row.
std::string render_budget(const BudgetReport& report);

struct LeakCheck {
  bool ok = false;
  double lhs = 0.0;  // max over cavities
  double rhs = 0.0;
};
LeakCheck leak_information_ok(const QndParams& p);

// Multiplies each number component by exp(i chi_s' t sum_k n_k^2) over `modes`.
StateVector self_phase_modulate(const StateVector& state, double chi_s_t,
                                std::span<const ModeIndex> modes);

struct EitKerr {
  double chi = 0.0;
  double chi_i = 0.0;
  bool adiabatic_ok = false;
};
EitKerr eit_kerr(double g13, double g24, double omega_c, double delta_42, double gamma_42,
                 double n_atom);

}  // namespace cvpurify
