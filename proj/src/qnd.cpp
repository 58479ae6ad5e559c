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

#include "cvpurify/qnd.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <sstream>

#include "cvpurify/errors.hpp"

namespace cvpurify {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kTwoPi = 2.0 * std::numbers::pi;

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double safe_inverse(double x) { return x > 0.0 ? 1.0 / x : kInf; }

BudgetRow make_row(const char* id, double lhs, double rhs) {
  BudgetRow row;
  row.id = id;
  row.lhs = lhs;
  row.rhs = rhs;
  row.pass = lhs < rhs;
  row.margin = lhs > 0.0 ? rhs / lhs : kInf;
  return row;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

QndParams QndParams::reference() {
  QndParams p;
  p.gamma = kTwoPi * 100e6;
  p.chi = kTwoPi * 0.2e6;
  p.g_mag = 50.0;
  p.kappa = kTwoPi * 4e6;
  p.T = 8e-9;
  p.chi_i = 0.1 * p.chi;
  p.gamma1 = p.gamma2 = p.gamma;
  p.chi1 = p.chi2 = p.chi;
  p.n1 = p.n2 = 1.4;
  return p;
}

void QndParams::validate() const {
  std::vector<std::string> bad;
  auto need = [&](bool ok, const char* what) {
    if (!ok) bad.emplace_back(what);
  };
  need(gamma > 0.0, "gamma > 0");
  need(chi > 0.0, "chi > 0");
  need(g_mag > 0.0, "g_mag > 0");
  need(kappa >= 0.0, "kappa >= 0");
  need(T > 0.0, "T > 0");
  need(delta_t >= 0.0, "delta_t >= 0");
  need(beta1 >= 0.0, "beta1 >= 0");
  need(beta2 >= 0.0, "beta2 >= 0");
  need(mu >= 0.0 && mu <= 1.0, "mu in [0, 1]");
  need(nu > 0.0 && nu <= 1.0, "nu in (0, 1]");
  need(chi_i >= 0.0, "chi_i >= 0");
  need(gamma1 > 0.0, "gamma1 > 0");
  need(gamma2 > 0.0, "gamma2 > 0");
  need(chi1 > 0.0, "chi1 > 0");
  need(chi2 > 0.0, "chi2 > 0");
  need(n1 >= 0.0, "n1 >= 0");
  need(n2 >= 0.0, "n2 >= 0");
  if (bad.empty()) return;
  std::string msg = "invalid QND parameters:";
  for (const auto& b : bad) msg += " " + b + ";";
  throw DomainError(msg);
}

bool adiabatic_ok(const QndParams& p) { return p.gamma > 20.0 * p.chi * p.max_n(); }

double signal_gain(const QndParams& p) {
  return std::sqrt(p.nu) * 4.0 * std::numbers::sqrt2 * p.g_mag * p.chi / std::sqrt(p.gamma);
}

double noise_sigma(const QndParams& p) { return 1.0 / std::sqrt(2.0 * p.T); }

double distinguishability(const QndParams& p) {
  if (!(p.T > 0.0)) throw DomainError("measuring time T must be positive");
  return std::sqrt(p.gamma) / (8.0 * std::sqrt(p.nu) * p.g_mag * p.chi * std::sqrt(p.T));
}

TimeWindow time_window(const QndParams& p) {
  TimeWindow w;
  w.T_min = p.nu > 0.0 ? p.gamma / (64.0 * p.nu * p.g_mag * p.g_mag * p.chi * p.chi) : kInf;
  const double rate = p.kappa * p.max_n();
  w.T_max = rate > 0.0 ? 1.0 / rate : kInf;
  return w;
}

double homodyne_bias(const QndParams& p) {
  const double sqrt_nu = std::sqrt(p.nu);
  const double delta = std::sqrt(p.delta_t * p.T);
  const double phase = -std::numbers::sqrt2 * p.g_mag * delta * std::sqrt(p.gamma);
  const double imbalance = 4.0 * std::numbers::sqrt2 * p.g_mag * std::sqrt(p.gamma1) *
                           (p.chi2 / p.gamma2 - p.chi1 / p.gamma1) * p.n2;
  const double leak = signal_gain(p) / sqrt_nu *
                      (p.beta2 * p.beta2 - p.beta1 * p.beta1) / (p.gamma * p.gamma) * p.n2;
  return sqrt_nu * (phase + imbalance + leak);
}

double misidentification_probability(const QndParams& p, int j_true) {
  if (j_true < 0) throw DomainError("photon number must be non-negative");
  const double one_side = normal_cdf(-0.5 / distinguishability(p));
  return j_true == 0 ? one_side : 2.0 * one_side;
}

QndRng::QndRng(std::uint64_t seed, std::uint64_t trial, std::uint64_t stream)
    : projection(derive_seed(seed, stream, trial)),
      homodyne(derive_seed(seed, stream + 1, trial)) {}

double standard_normal(Engine& rng) {
  // Box-Muller on our own uniforms: std::normal_distribution is not
  // specified bit-for-bit across standard libraries.
  const double u1 = 1.0 - uniform01(rng);
  const double u2 = uniform01(rng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(kTwoPi * u2);
}

int infer_j(double x_T, double gain) {
  const double level = std::round(x_T / gain);
  return level <= 0.0 ? 0 : static_cast<int>(level);
}

HomodyneRecord homodyne_sample(const QndParams& p, int j_true, Engine& rng) {
  if (j_true < 0) throw DomainError("photon number must be non-negative");
  const double gain = signal_gain(p);
  HomodyneRecord rec;
  rec.true_j = j_true;
  rec.x_T = gain * j_true + homodyne_bias(p) + noise_sigma(p) * standard_normal(rng);
  rec.inferred_j = infer_j(rec.x_T, gain);
  return rec;
}

QndMeasurement measure_total_number(const StateVector& state, std::span<const ModeIndex> modes,
                                    const QndParams& p, QndRng& rng) {
  const int j = sample_total_number(state, modes, rng.projection);
  HomodyneRecord rec = homodyne_sample(p, j, rng.homodyne);
  return QndMeasurement{rec, total_number_projector_apply(state, modes, j)};
}

const BudgetRow& BudgetReport::row(const std::string& id) const {
  for (const auto& r : rows) {
    if (r.id == id) return r;
  }
  throw DomainError("unknown budget row: " + id);
}

BudgetReport budget_report(const QndParams& p) {
  const TimeWindow w = time_window(p);
  const double g2 = p.g_mag * p.g_mag;
  BudgetReport rep;
  rep.rows.push_back(make_row("T_window", std::max(w.T_min / p.T, p.T / w.T_max), 1.0));
  rep.rows.push_back(make_row("phase_delta", std::sqrt(p.delta_t * p.T), 4.0 * p.chi / p.gamma));
  rep.rows.push_back(make_row("phase_rate", p.delta_t,
                              1024.0 * g2 * std::pow(p.chi, 4) / std::pow(p.gamma, 3)));
  rep.rows.push_back(make_row("imbalance",
                              std::abs(p.chi2 * p.gamma1 / (p.chi1 * p.gamma2) - 1.0),
                              safe_inverse(p.n2)));
  rep.rows.push_back(make_row("leak_strong",
                              std::max(p.beta1 * p.n1 * p.n1, p.beta2 * p.n2 * p.n2), p.gamma));
  rep.rows.push_back(make_row("leak_weak", std::abs(p.beta2 * p.beta2 - p.beta1 * p.beta1),
                              p.gamma * p.gamma * safe_inverse(p.n2)));
  rep.rows.push_back(make_row("coupling", 1.0 - p.mu, safe_inverse(p.n1 * p.n1)));
  rep.rows.push_back(make_row("detector", p.gamma / (64.0 * g2 * p.chi * p.chi * p.T), p.nu));
  rep.rows.push_back(make_row("two_photon", p.chi_i * p.max_n(), p.chi));
  rep.overall = std::all_of(rep.rows.begin(), rep.rows.end(), [](const auto& r) { return r.pass; });
  return rep;
}

std::string render_budget(const BudgetReport& report) {
  std::ostringstream os;
  os << "id,lhs,rhs,pass,margin\n";
  for (const auto& r : report.rows) {
    os << r.id << ',' << fmt(r.lhs) << ',' << fmt(r.rhs) << ',' << (r.pass ? "true" : "false")
       << ',' << fmt(r.margin) << '\n';
  }
  return os.str();
}

LeakCheck leak_information_ok(const QndParams& p) {
  const double k = 4.0 * std::numbers::sqrt2 * p.g_mag * p.chi / p.gamma;
  LeakCheck c;
  c.lhs = std::max(k * p.n1 * std::sqrt(p.beta1), k * p.n2 * std::sqrt(p.beta2));
  c.rhs = noise_sigma(p);
  c.ok = c.lhs < c.rhs;
  return c;
}

StateVector self_phase_modulate(const StateVector& state, double chi_s_t,
                                std::span<const ModeIndex> modes) {
  const auto& reg = state.reg();
  for (auto m : modes) reg.check_mode(m);
  Eigen::VectorXcd out = state.amplitudes();
  for (std::size_t i = 0; i < reg.dimension(); ++i) {
    double sq = 0.0;
    for (auto m : modes) {
      const double n = reg.occupation(i, m);
      sq += n * n;
    }
    out[static_cast<Eigen::Index>(i)] *= std::polar(1.0, chi_s_t * sq);
  }
  return StateVector(reg, std::move(out));
}

EitKerr eit_kerr(double g13, double g24, double omega_c, double delta_42, double gamma_42,
                 double n_atom) {
  if (!(delta_42 > 0.0) || !(omega_c > 0.0)) {
    throw DomainError("EIT estimate needs delta_42 > 0 and omega_c > 0");
  }
  if (n_atom < 0.0 || gamma_42 < 0.0) {
    throw DomainError("EIT estimate needs n_atom >= 0 and gamma_42 >= 0");
  }
  const double oc2 = omega_c * omega_c;
  EitKerr k;
  k.chi = 3.0 * g13 * g13 * g24 * g24 / (oc2 * delta_42) * n_atom;
  k.chi_i = k.chi * gamma_42 / delta_42;
  k.adiabatic_ok = g13 * g13 * n_atom / oc2 < 1.0;
  return k;
}

}  // namespace cvpurify
