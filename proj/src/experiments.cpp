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

#include "cvpurify/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <string>

#include "cvpurify/errors.hpp"
#include "cvpurify/state_gen.hpp"

namespace cvpurify {
namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

std::string separator_line(const RunConfig& c) {
  return c.format == OutputFormat::Csv ? "set datafile separator \",\"\n"
                                       : "set datafile separator \"\\t\"\n";
}

std::string data_file(const RunConfig& c, const std::string& stem) {
  return stem + (c.format == OutputFormat::Csv ? ".csv" : ".tsv");
}

// One curve per r value; column numbers are 1-based.
std::string curve_script(const RunConfig& c, const std::string& stem, const std::string& xlabel,
                         const std::string& ylabel, int xcol, int ycol) {
  std::string s = separator_line(c);
  s += "set key autotitle columnhead\n";
  s += "set xlabel \"" + xlabel + "\"\nset ylabel \"" + ylabel + "\"\n";
  s += "plot ";
  const auto& rs = c.reals("r_values");
  for (std::size_t i = 0; i < rs.size(); ++i) {
    if (i) s += ", \\\n     ";
    const std::string r = format_real(rs[i]);
    s += "\"" + data_file(c, stem) + "\" using ($1==" + r + " ? $" + std::to_string(xcol) +
         " : 1/0):" + std::to_string(ycol) + " with linespoints title \"r=" + r + "\"";
  }
  return s + "\n";
}

ResultTable outcome_curve(const RunConfig& c, const std::string& name, int m) {
  ResultTable t;
  t.name = name;
  t.columns = {"r", "j", "gamma_ratio", "p_j"};
  const double tail = c.real("tail");
  t.add_meta("m", std::to_string(m));
  t.add_meta("tail", tail);
  for (double r : c.reals("r_values")) {
    const auto spec = ProtocolSpec::make(m, r);
    const int jmax = tail_j_max(spec, tail);
    t.add_meta("j_max.r=" + format_real(r), std::to_string(jmax));
    for (int j = 0; j <= jmax; ++j) {
      const double gamma = r > 0.0 ? increase_ratio(j, spec) : kNan;
      t.add_row({r, std::int64_t{j}, gamma, outcome_probability(spec, j)});
    }
  }
  return t;
}

double wilson_z() { return 1.959963984540054; }

struct SideReading {
  HomodyneRecord record;
  Projection projection;
};

SideReading read_side(const StateVector& state, std::span<const ModeIndex> modes,
                      const QndParams& q, QndRng& rng, bool ideal) {
  QndMeasurement meas = measure_total_number(state, modes, q, rng);
  if (ideal) {
    meas.record.inferred_j = meas.record.true_j;
    meas.record.x_T = signal_gain(q) * meas.record.true_j;
  }
  return SideReading{meas.record, std::move(meas.projection)};
}

}  // namespace

Interval wilson_interval(std::int64_t successes, std::int64_t trials) {
  if (trials <= 0) return {};
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(successes) / n;
  const double z = wilson_z();
  const double z2 = z * z;
  const double centre = (p + z2 / (2.0 * n)) / (1.0 + z2 / n);
  const double half = z / (1.0 + z2 / n) * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n));
  return {std::max(0.0, centre - half), std::min(1.0, centre + half)};
}

QndParams qnd_params_from(const RunConfig& c) {
  QndParams q;
  q.gamma = c.real("gamma");
  q.chi = c.real("chi");
  q.g_mag = c.real("g_mag");
  q.kappa = c.real("kappa");
  q.T = c.real("T");
  q.delta_t = c.real("delta_t");
  q.beta1 = c.real("beta1");
  q.beta2 = c.real("beta2");
  q.mu = c.real("mu");
  q.nu = c.real("nu");
  q.chi_i = c.real("chi_i");
  q.gamma1 = c.has("gamma1") ? c.real("gamma1") : q.gamma;
  q.gamma2 = c.has("gamma2") ? c.real("gamma2") : q.gamma;
  q.chi1 = c.has("chi1") ? c.real("chi1") : q.chi;
  q.chi2 = c.has("chi2") ? c.real("chi2") : q.chi;
  q.n1 = c.real("n1");
  q.n2 = c.real("n2");
  q.validate();
  return q;
}

LossModel loss_from(const RunConfig& c) {
  return LossModel(c.real("eta_A_tau"), c.real("eta_B_tau"), 1.0, c.real("eta0_over_kappac"));
}

std::vector<ResultTable> run_fig2(const RunConfig& c) {
  ResultTable t = outcome_curve(c, "fig2", static_cast<int>(c.integer("m")));
  if (c.flag("plot_script")) {
    t.plot_script = curve_script(c, "fig2", "entanglement increase ratio",
                                 "success probability", 3, 4);
  }
  return {t};
}

std::vector<ResultTable> run_fig3(const RunConfig& c) {
  const int m = static_cast<int>(c.integer("m"));
  ResultTable curve = outcome_curve(c, "fig3", m);
  if (c.flag("plot_script")) {
    curve.plot_script = curve_script(c, "fig3", "entanglement increase ratio",
                                     "success probability", 3, 4);
  }
  ResultTable peaks;
  peaks.name = "fig3_peaks";
  peaks.columns = {"r", "j_peak", "gamma_peak", "p_peak", "gamma_in_2_3"};
  const std::size_t col_r = curve.column("r");
  for (double r : c.reals("r_values")) {
    std::int64_t best_j = -1;
    double best_gamma = kNan;
    double best_p = -1.0;
    for (const auto& row : curve.rows) {
      if (std::get<double>(row[col_r]) != r) continue;
      const double gamma = std::get<double>(row[2]);
      const double p = std::get<double>(row[3]);
      if (gamma > 1.0 && p > best_p) {
        best_p = p;
        best_gamma = gamma;
        best_j = std::get<std::int64_t>(row[1]);
      }
    }
    if (best_j < 0) best_p = kNan;
    peaks.add_row({r, best_j, best_gamma, best_p, best_gamma > 2.0 && best_gamma < 3.0});
  }
  return {curve, peaks};
}

std::vector<ResultTable> run_fig4(const RunConfig& c) {
  ResultTable t;
  t.name = "fig4";
  t.columns = {"r", "m", "upsilon", "j_max", "tail"};
  for (double r : c.reals("r_values")) {
    for (auto m = c.integer("m_min"); m <= c.integer("m_max"); ++m) {
      const auto spec = ProtocolSpec::make(static_cast<int>(m), r);
      const auto eff = transfer_efficiency(spec, tail_j_max(spec, c.real("tail")));
      t.add_row({r, m, eff.value, std::int64_t{eff.j_max}, eff.tail});
    }
  }
  if (c.flag("plot_script")) {
    t.plot_script = curve_script(c, "fig4", "number of pairs m",
                                 "entanglement transfer efficiency", 2, 3);
  }
  return {t};
}

std::vector<ResultTable> run_concentrate(const RunConfig& c) {
  const int m = static_cast<int>(c.integer("m"));
  const int cutoff = static_cast<int>(c.integer("cutoff"));
  const auto spec = ProtocolSpec::make(m, c.real("r"));
  const ConcentrationSampler sampler(spec, cutoff);
  const auto modes_A = side_modes(m, Side::A);
  ResultTable t;
  t.name = "concentrate";
  t.columns = {"trial", "j", "probability", "entanglement_bits", "schmidt_entropy_bits",
               "fidelity"};
  t.add_meta("pair_truncation_tail", truncation_tail(spec.lambda, cutoff));
  std::map<int, double> entropy_by_j;
  const auto trials = c.integer("trials");
  for (std::int64_t trial = 0; trial < trials; ++trial) {
    Engine rng(derive_seed(c.seed(), 0, static_cast<std::uint64_t>(trial)));
    const OutcomeRecord rec = sampler.run(rng);
    auto it = entropy_by_j.find(rec.j_A);
    if (it == entropy_by_j.end()) {
      it = entropy_by_j.emplace(rec.j_A, entanglement_entropy(*rec.post_state, modes_A)).first;
    }
    t.add_row({trial, std::int64_t{rec.j_A}, rec.probability, rec.entanglement_bits, it->second,
               rec.fidelity});
  }
  return {t};
}

std::vector<ResultTable> run_purify_lossy(const RunConfig& c) {
  const int m = static_cast<int>(c.integer("m"));
  const LossModel loss = loss_from(c);
  const auto spec = ProtocolSpec::make(m, c.real("r"), loss);
  const LossyOutcomeSampler sampler(spec, c.real("tail"));
  const int jmax = static_cast<int>(sampler.pure_distribution().size()) - 1;
  const auto trials = c.integer("trials");
  std::vector<std::int64_t> successes(static_cast<std::size_t>(jmax) + 1, 0);
  std::int64_t total = 0;
  for (std::int64_t trial = 0; trial < trials; ++trial) {
    Engine rng(derive_seed(c.seed(), 0, static_cast<std::uint64_t>(trial)));
    const LossyDraw d = sampler.sample(rng);
    if (d.success()) {
      ++successes[static_cast<std::size_t>(d.j_A)];
      ++total;
    }
  }
  ResultTable t;
  t.name = "purify-lossy";
  t.columns = {"j", "successes", "frequency", "predicted", "std_error", "z_score"};
  const double n = static_cast<double>(trials);
  double predicted_total = 0.0;
  for (int j = 0; j <= jmax; ++j) {
    const double pred = outcome_probability(spec, j);
    predicted_total += pred;
    const auto k = successes[static_cast<std::size_t>(j)];
    const double freq = static_cast<double>(k) / n;
    const double se = std::sqrt(pred * (1.0 - pred) / n);
    t.add_row({std::int64_t{j}, k, freq, pred, se, se > 0.0 ? (freq - pred) / se : 0.0});
  }
  const auto nbar = std::sinh(spec.r) * std::sinh(spec.r);
  const auto noise = small_noise_ok(m, nbar, c.real("eta_A_tau"), c.real("eta_B_tau"),
                                    c.real("eta0_over_kappac"));
  t.add_meta("j_max", std::to_string(jmax));
  t.add_meta("success_rate", static_cast<double>(total) / n);
  t.add_meta("predicted_success_rate", predicted_total);
  t.add_meta("small_noise_lhs", noise.lhs);
  t.add_meta("small_noise_ok", noise.ok ? "true" : "false");
  return {t};
}

std::vector<ResultTable> run_qnd_budget(const RunConfig& c) {
  const QndParams q = qnd_params_from(c);
  const BudgetReport rep = budget_report(q);
  ResultTable t;
  t.name = "qnd-budget";
  t.columns = {"id", "lhs", "rhs", "pass", "margin"};
  for (const auto& row : rep.rows) t.add_row({row.id, row.lhs, row.rhs, row.pass, row.margin});
  const TimeWindow w = time_window(q);
  const LeakCheck leak = leak_information_ok(q);
  t.add_meta("overall", rep.overall ? "true" : "false");
  t.add_meta("signal_gain", signal_gain(q));
  t.add_meta("noise_sigma", noise_sigma(q));
  t.add_meta("delta_n", distinguishability(q));
  t.add_meta("T_min", w.T_min);
  t.add_meta("T_max", w.T_max);
  t.add_meta("bias", homodyne_bias(q));
  t.add_meta("adiabatic_ok", adiabatic_ok(q) ? "true" : "false");
  t.add_meta("leak_information_lhs", leak.lhs);
  t.add_meta("leak_information_rhs", leak.rhs);
  t.add_meta("leak_information_ok", leak.ok ? "true" : "false");
  return {t};
}

std::vector<ResultTable> run_qnd_simulate(const RunConfig& c) {
  const QndParams q = qnd_params_from(c);
  const double gain = signal_gain(q);
  const double bias = homodyne_bias(q);
  const auto trials = c.integer("trials");
  ResultTable t;
  t.name = "qnd-simulate";
  t.columns = {"j", "trials", "mean_x", "std_x", "expected_mean", "expected_sigma",
               "misid_rate", "predicted_misid_unbiased"};
  for (std::int64_t j = 0; j <= c.integer("j_max"); ++j) {
    double sum = 0.0, sum2 = 0.0;
    std::int64_t wrong = 0;
    for (std::int64_t trial = 0; trial < trials; ++trial) {
      Engine rng(derive_seed(c.seed(), static_cast<std::uint64_t>(j),
                             static_cast<std::uint64_t>(trial)));
      const auto rec = homodyne_sample(q, static_cast<int>(j), rng);
      sum += rec.x_T;
      sum2 += rec.x_T * rec.x_T;
      if (rec.inferred_j != rec.true_j) ++wrong;
    }
    const double n = static_cast<double>(trials);
    const double mean = sum / n;
    const double var = trials > 1 ? std::max(0.0, (sum2 - n * mean * mean) / (n - 1.0)) : 0.0;
    t.add_row({j, trials, mean, std::sqrt(var), gain * static_cast<double>(j) + bias,
               noise_sigma(q), static_cast<double>(wrong) / n,
               misidentification_probability(q, static_cast<int>(j))});
  }
  t.add_meta("signal_gain", gain);
  t.add_meta("delta_n", distinguishability(q));
  t.add_meta("bias", bias);
  return {t};
}

std::vector<ResultTable> run_eit_kerr(const RunConfig& c) {
  const double g13 = c.real("g13");
  const double oc = c.real("omega_c");
  const double n_atom = c.real("n_atom");
  const EitKerr k =
      eit_kerr(g13, c.real("g24"), oc, c.real("delta_42"), c.real("gamma_42"), n_atom);
  ResultTable t;
  t.name = "eit-kerr";
  t.columns = {"chi", "chi_i", "chi_over_2pi_hz", "chi_i_over_chi", "probe_ratio",
               "adiabatic_ok"};
  t.add_row({k.chi, k.chi_i, k.chi / (2.0 * std::numbers::pi),
             k.chi > 0.0 ? k.chi_i / k.chi : kNan, g13 * g13 * n_atom / (oc * oc),
             k.adiabatic_ok});
  return {t};
}

std::vector<ResultTable> run_end_to_end(const RunConfig& c) {
  const int m = static_cast<int>(c.integer("m"));
  const LossModel loss = loss_from(c);
  const auto spec = ProtocolSpec::make(m, c.real("r"), loss);
  const QndParams q = qnd_params_from(c);
  const bool ideal = c.text("qnd") == "ideal";
  const bool fock = c.text("sampler") == "fock";
  const bool posterior = c.text("ordering") == "posterior";
  const auto trials = c.integer("trials");
  const auto modes_A = side_modes(m, Side::A);
  const auto modes_B = side_modes(m, Side::B);
  const double keep_A = std::exp(-loss.eta_prime_tau_A());
  const double keep_B = std::exp(-loss.eta_prime_tau_B());

  std::optional<StateVector> joint;
  std::optional<LossyOutcomeSampler> sampler;
  int jmax = 0;
  if (fock) {
    const int cutoff = static_cast<int>(c.integer("cutoff"));
    joint = protocol_state(spec, cutoff);
    jmax = m * cutoff;
  } else {
    sampler.emplace(spec, 1e-10);
    jmax = static_cast<int>(sampler->pure_distribution().size()) - 1;
  }
  std::vector<double> keep_all(2 * static_cast<std::size_t>(m), keep_A);
  std::fill(keep_all.begin() + m, keep_all.end(), keep_B);
  std::vector<double> keep_only_A(keep_all.size(), 1.0);
  std::fill(keep_only_A.begin(), keep_only_A.begin() + m, keep_A);
  std::vector<double> keep_only_B(keep_all.size(), 1.0);
  std::fill(keep_only_B.begin() + m, keep_only_B.end(), keep_B);

  ResultTable trials_table;
  trials_table.name = "end-to-end";
  trials_table.columns = {"trial", "true_j_A", "true_j_B", "j_A", "j_B", "mismatch_A",
                          "mismatch_B", "success", "entanglement_bits"};
  std::vector<std::int64_t> by_j(static_cast<std::size_t>(jmax) + 1, 0);
  std::int64_t successes = 0, misread = 0;
  double entanglement_sum = 0.0;

  for (std::int64_t trial = 0; trial < trials; ++trial) {
    const auto ut = static_cast<std::uint64_t>(trial);
    Engine loss_rng(derive_seed(c.seed(), 4, ut));
    QndRng rng_A(c.seed(), ut, 0);
    QndRng rng_B(c.seed(), ut, 2);
    HomodyneRecord rec_A, rec_B;
    double bits = 0.0;
    if (fock) {
      std::optional<StateVector> post;
      if (posterior) {
        auto lossy_A = sample_loss_trajectory(*joint, keep_only_A, loss_rng);
        auto side_A = read_side(lossy_A.state, modes_A, q, rng_A, ideal);
        auto lossy_B = sample_loss_trajectory(side_A.projection.state, keep_only_B, loss_rng);
        auto side_B = read_side(lossy_B.state, modes_B, q, rng_B, ideal);
        rec_A = side_A.record;
        rec_B = side_B.record;
        post = std::move(side_B.projection.state);
      } else {
        auto lossy = sample_loss_trajectory(*joint, keep_all, loss_rng);
        auto side_A = read_side(lossy.state, modes_A, q, rng_A, ideal);
        auto side_B = read_side(side_A.projection.state, modes_B, q, rng_B, ideal);
        rec_A = side_A.record;
        rec_B = side_B.record;
        post = std::move(side_B.projection.state);
      }
      if (rec_A.inferred_j == rec_B.inferred_j) bits = entanglement_entropy(*post, modes_A);
    } else {
      const LossyDraw d = sampler->sample(loss_rng);
      const double gain = signal_gain(q);
      for (auto [rec, j, rng] : {std::tuple{&rec_A, d.j_A, &rng_A}, {&rec_B, d.j_B, &rng_B}}) {
        *rec = ideal ? HomodyneRecord{gain * j, j, j} : homodyne_sample(q, j, rng->homodyne);
      }
      if (rec_A.inferred_j == rec_B.inferred_j && d.success()) {
        bits = log2_degeneracy(d.j_A, m);
      }
    }
    const bool success = rec_A.inferred_j == rec_B.inferred_j;
    const bool mis_A = rec_A.inferred_j != rec_A.true_j;
    const bool mis_B = rec_B.inferred_j != rec_B.true_j;
    if (mis_A || mis_B) ++misread;
    if (success) {
      ++successes;
      entanglement_sum += bits;
      if (rec_A.inferred_j <= jmax) ++by_j[static_cast<std::size_t>(rec_A.inferred_j)];
    }
    trials_table.add_row({trial, std::int64_t{rec_A.true_j}, std::int64_t{rec_B.true_j},
                          std::int64_t{rec_A.inferred_j}, std::int64_t{rec_B.inferred_j}, mis_A,
                          mis_B, success, bits});
  }

  const double n = static_cast<double>(trials);
  ResultTable per_j;
  per_j.name = "end-to-end_by_j";
  per_j.columns = {"j", "successes", "frequency", "predicted", "std_error", "z_score"};
  double predicted_total = 0.0;
  for (int j = 0; j <= jmax; ++j) {
    const double pred = outcome_probability(spec, j);
    predicted_total += pred;
    const auto k = by_j[static_cast<std::size_t>(j)];
    const double freq = static_cast<double>(k) / n;
    const double se = std::sqrt(pred * (1.0 - pred) / n);
    per_j.add_row({std::int64_t{j}, k, freq, pred, se, se > 0.0 ? (freq - pred) / se : 0.0});
  }

  ResultTable summary;
  summary.name = "end-to-end_summary";
  summary.columns = {"trials",  "successes",        "success_rate",
                     "ci_low",  "ci_high",          "predicted_success_rate",
                     "misread_trials", "mean_entanglement_bits"};
  const Interval ci = wilson_interval(successes, trials);
  summary.add_row({trials, successes, static_cast<double>(successes) / n, ci.low, ci.high,
                   predicted_total, misread,
                   successes > 0 ? entanglement_sum / static_cast<double>(successes) : 0.0});
  summary.add_meta("delta_n", distinguishability(q));
  summary.add_meta("j_max", std::to_string(jmax));
  if (fock) {
    summary.add_meta("pair_truncation_tail",
                     truncation_tail(spec.lambda, static_cast<int>(c.integer("cutoff"))));
  }
  return {trials_table, per_j, summary};
}

std::vector<ResultTable> run_experiment(const RunConfig& c) {
  switch (c.experiment) {
    case Experiment::Fig2: return run_fig2(c);
    case Experiment::Fig3: return run_fig3(c);
    case Experiment::Fig4: return run_fig4(c);
    case Experiment::Concentrate: return run_concentrate(c);
    case Experiment::PurifyLossy: return run_purify_lossy(c);
    case Experiment::QndBudget: return run_qnd_budget(c);
    case Experiment::QndSimulate: return run_qnd_simulate(c);
    case Experiment::EitKerr: return run_eit_kerr(c);
    case Experiment::EndToEnd: return run_end_to_end(c);
  }
  throw DomainError("unhandled experiment");
}

}  // namespace cvpurify
