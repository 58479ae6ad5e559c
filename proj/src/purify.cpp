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

#include "cvpurify/purify.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "cvpurify/errors.hpp"

namespace cvpurify {
namespace {

constexpr int kMaxSummationTerms = 10'000'000;

// ln f_j^(m) = sum_{k=1}^{m-1} ln(1 + j/k)
double ln_degeneracy(int j, int m) {
  double s = 0.0;
  for (int k = 1; k < m; ++k) s += std::log1p(static_cast<double>(j) / k);
  return s;
}

double pure_probability(int m, double lambda, int j) {
  if (lambda == 0.0) return j == 0 ? 1.0 : 0.0;
  const double l2 = lambda * lambda;
  return std::exp(m * std::log1p(-l2) + 2.0 * j * std::log(lambda) + ln_degeneracy(j, m));
}

void check_j(int j) {
  if (j < 0) throw DomainError("photon number j must be non-negative");
}

void check_m(int m) {
  if (m < 1) throw DomainError("number of pairs m must be >= 1");
}

// Binomial pmf over k = 0..n with success probability q.
std::vector<double> binomial_pmf(int n, double q) {
  std::vector<double> pmf(static_cast<std::size_t>(n) + 1, 0.0);
  if (q <= 0.0) {
    pmf[0] = 1.0;
    return pmf;
  }
  if (q >= 1.0) {
    pmf[static_cast<std::size_t>(n)] = 1.0;
    return pmf;
  }
  const double lq = std::log(q);
  const double lp = std::log1p(-q);
  for (int k = 0; k <= n; ++k) {
    const double ln_choose = std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
    pmf[static_cast<std::size_t>(k)] = std::exp(ln_choose + k * lq + (n - k) * lp);
  }
  return pmf;
}

void enumerate_compositions(int parts, int remaining, int cutoff, std::vector<int>& current,
                            std::vector<std::vector<int>>& out) {
  if (static_cast<int>(current.size()) == parts - 1) {
    if (remaining <= cutoff) {
      current.push_back(remaining);
      out.push_back(current);
      current.pop_back();
    }
    return;
  }
  for (int i = 0; i <= std::min(remaining, cutoff); ++i) {
    current.push_back(i);
    enumerate_compositions(parts, remaining - i, cutoff, current, out);
    current.pop_back();
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// Closed forms

ProtocolSpec ProtocolSpec::make(int m, double r, std::optional<LossModel> loss) {
  check_m(m);
  if (!(r >= 0.0) || !std::isfinite(r)) throw DomainError("squeezing parameter r must be >= 0");
  ProtocolSpec s;
  s.m = m;
  s.r = r;
  s.lambda = std::tanh(r);
  s.loss = loss;
  return s;
}

double ProtocolSpec::total_loss() const {
  return loss ? loss->eta_prime_tau_A() + loss->eta_prime_tau_B() : 0.0;
}

BigInt degeneracy_f(int j, int m) {
  check_j(j);
  check_m(m);
  // C(j+m-1, m-1) via the exact running product; each partial product is
  // itself a binomial coefficient, so the division is exact.
  BigInt f = 1;
  for (int k = 1; k < m; ++k) {
    f *= j + k;
    f /= k;
  }
  return f;
}

double log2_degeneracy(int j, int m) {
  check_j(j);
  check_m(m);
  return ln_degeneracy(j, m) / std::numbers::ln2;
}

double outcome_probability(const ProtocolSpec& spec, int j) {
  check_j(j);
  const double p = pure_probability(spec.m, spec.lambda, j);
  return spec.loss ? p * std::exp(-spec.total_loss() * j) : p;
}

double outcome_entanglement(int j, int m) { return log2_degeneracy(j, m); }

double initial_entanglement(double r) {
  if (!(r >= 0.0)) throw DomainError("squeezing parameter r must be >= 0");
  const double c = std::cosh(r) * std::cosh(r);
  const double s = std::sinh(r) * std::sinh(r);
  const double sterm = s > 0.0 ? s * std::log2(s) : 0.0;
  return c * std::log2(c) - sterm;
}

double increase_ratio(int j, const ProtocolSpec& spec) {
  if (spec.r <= 0.0) throw DomainError("increase ratio is undefined at r = 0");
  return outcome_entanglement(j, spec.m) / initial_entanglement(spec.r);
}

IncreaseThreshold increase_threshold(double r) {
  if (!(r > 0.0)) throw DomainError("increase threshold needs r > 0");
  IncreaseThreshold t;
  const double ch = std::cosh(r);
  const double sh = std::sinh(r);
  t.closed_form = std::pow(ch, ch) / std::pow(sh, sh) - 1.0;
  t.exact = std::exp2(initial_entanglement(r)) - 1.0;
  return t;
}

int tail_j_max(const ProtocolSpec& spec, double max_tail) {
  if (!(max_tail > 0.0)) throw DomainError("max_tail must be positive");
  double cumulative = 0.0;
  for (int j = 0; j < kMaxSummationTerms; ++j) {
    cumulative += pure_probability(spec.m, spec.lambda, j);
    if (1.0 - cumulative < max_tail) return j;
  }
  throw ConvergenceError("outcome distribution tail did not fall below " +
                         std::to_string(max_tail));
}

TransferEfficiency transfer_efficiency(const ProtocolSpec& spec, int j_max) {
  if (spec.r <= 0.0) throw DomainError("transfer efficiency is undefined at r = 0");
  TransferEfficiency out;
  out.j_max = j_max >= 0 ? j_max : tail_j_max(spec, 1e-10);
  double sum = 0.0;
  double mass = 0.0;
  for (int j = 0; j <= out.j_max; ++j) {
    const double p = pure_probability(spec.m, spec.lambda, j);
    mass += p;
    sum += p * log2_degeneracy(j, spec.m);
  }
  out.tail = std::max(0.0, 1.0 - mass);
  out.value = sum / (spec.m * initial_entanglement(spec.r));
  return out;
}

Moments distribution_moments(const ProtocolSpec& spec) {
  const double l2 = spec.lambda * spec.lambda;
  if (!(l2 < 1.0)) throw DomainError("moments require lambda < 1");
  Moments mo;
  mo.mean = spec.m * l2 / (1.0 - l2);
  mo.variance = spec.m * l2 / ((1.0 - l2) * (1.0 - l2));
  return mo;
}

Moments numeric_moments(const ProtocolSpec& spec, int j_max) {
  const int jm = j_max >= 0 ? j_max : tail_j_max(spec, 1e-14);
  double s1 = 0.0, s2 = 0.0;
  for (int j = 0; j <= jm; ++j) {
    const double p = pure_probability(spec.m, spec.lambda, j);
    s1 += j * p;
    s2 += static_cast<double>(j) * j * p;
  }
  return Moments{s1, s2 - s1 * s1};
}

// ---------------------------------------------------------------------------
// Exact Fock-space simulation

std::vector<ModeIndex> side_modes(int m, Side side) {
  check_m(m);
  return mode_range(side == Side::A ? 0 : static_cast<std::size_t>(m), static_cast<std::size_t>(m));
}

StateVector protocol_state(const ProtocolSpec& spec, int cutoff) {
  // Sectors with total number <= cutoff are complete whatever the tail.
  const StateVector pair = two_mode_squeezed(spec.r, cutoff, true).state;
  StateVector joint = pair;
  for (int i = 1; i < spec.m; ++i) joint = tensor(joint, pair);
  // A_1 B_1 A_2 B_2 ... -> A_1 .. A_m B_1 .. B_m
  std::vector<std::size_t> order(2 * static_cast<std::size_t>(spec.m));
  for (int k = 0; k < spec.m; ++k) {
    order[static_cast<std::size_t>(k)] = 2 * static_cast<std::size_t>(k);
    order[static_cast<std::size_t>(spec.m + k)] = 2 * static_cast<std::size_t>(k) + 1;
  }
  return permute_modes(joint, order);
}

StateVector maximally_entangled_ket(int m, int j, int cutoff) {
  check_m(m);
  check_j(j);
  if (j > cutoff) throw DomainError("maximally entangled ket needs j <= cutoff");
  FockRegister reg(2 * static_cast<std::size_t>(m), cutoff);
  std::vector<std::vector<int>> comps;
  std::vector<int> current;
  enumerate_compositions(m, j, cutoff, current, comps);
  Eigen::VectorXcd amps = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(reg.dimension()));
  const double a = 1.0 / std::sqrt(static_cast<double>(comps.size()));
  std::vector<int> occ(2 * static_cast<std::size_t>(m));
  for (const auto& c : comps) {
    std::copy(c.begin(), c.end(), occ.begin());
    std::copy(c.begin(), c.end(), occ.begin() + m);
    amps[static_cast<Eigen::Index>(reg.index_of(occ))] = a;
  }
  return StateVector(std::move(reg), std::move(amps));
}

OutcomeRecord concentrate_outcome(const StateVector& joint, int m, int j) {
  if (joint.reg().mode_count() != 2 * static_cast<std::size_t>(m)) {
    throw DomainError("protocol register must hold 2m modes");
  }
  const auto modes_A = side_modes(m, Side::A);
  Projection proj = total_number_projector_apply(joint, modes_A, j);
  OutcomeRecord rec;
  rec.j_A = rec.j_B = j;
  rec.probability = proj.probability;
  rec.success = !proj.empty;
  if (rec.success) {
    rec.entanglement_bits = log2_degeneracy(j, m);
    if (j <= joint.reg().cutoff()) {
      rec.fidelity = overlap(proj.state, maximally_entangled_ket(m, j, joint.reg().cutoff()));
    }
    rec.post_state = std::move(proj.state);
  }
  return rec;
}

ConcentrationSampler::ConcentrationSampler(const ProtocolSpec& spec, int cutoff)
    : m_(spec.m),
      joint_(protocol_state(spec, cutoff)),
      distribution_(total_number_distribution(joint_, side_modes(spec.m, Side::A))) {}

int ConcentrationSampler::sample_j(Engine& rng) const {
  return static_cast<int>(sample_discrete(distribution_, rng));
}

OutcomeRecord ConcentrationSampler::run(Engine& rng) const {
  return concentrate_outcome(joint_, m_, sample_j(rng));
}

OutcomeRecord concentrate_exact(const ProtocolSpec& spec, int cutoff, std::uint64_t seed) {
  Engine rng(derive_seed(seed, 0, 0));
  return ConcentrationSampler(spec, cutoff).run(rng);
}

StateVector phase_collapse(const StateVector& state, ModeIndex mode, double phi) {
  const auto& reg = state.reg();
  if (reg.mode_count() < 2) throw DomainError("phase collapse needs at least two modes");
  const std::size_t stride = reg.stride(mode);
  const std::size_t local = reg.local_dimension();
  FockRegister out_reg(reg.mode_count() - 1, reg.cutoff());
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(out_reg.dimension()));
  const auto& a = state.amplitudes();
  for (std::size_t i = 0; i < reg.dimension(); ++i) {
    const Complex v = a[static_cast<Eigen::Index>(i)];
    if (v == Complex(0.0, 0.0)) continue;
    const std::size_t n = (i / stride) % local;
    const std::size_t reduced = (i / (stride * local)) * stride + i % stride;
    out[static_cast<Eigen::Index>(reduced)] += std::polar(1.0, static_cast<double>(n) * phi) * v;
  }
  if (out.squaredNorm() == 0.0) throw DomainError("phase collapse has zero probability");
  return StateVector(std::move(out_reg), std::move(out)).normalized();
}

// ---------------------------------------------------------------------------
// Lossy states

TrajectoryExpansion trajectory_branches(const ProtocolSpec& spec, int cutoff) {
  const double a = spec.loss ? spec.loss->eta_prime_tau_A() : 0.0;
  const double b = spec.loss ? spec.loss->eta_prime_tau_B() : 0.0;
  if (a > 0.3 || b > 0.3) {
    throw DomainError("first-order trajectory expansion needs eta' tau <= 0.3 on both sides; "
                      "use lindblad_evolve for stronger loss");
  }
  const StateVector joint = protocol_state(spec, cutoff);
  const auto& reg = joint.reg();
  const auto totals_A = mode_totals(reg, side_modes(spec.m, Side::A));
  const auto totals_B = mode_totals(reg, side_modes(spec.m, Side::B));

  TrajectoryExpansion out;
  Eigen::VectorXcd nojump = joint.amplitudes();
  for (std::size_t i = 0; i < reg.dimension(); ++i) {
    nojump[static_cast<Eigen::Index>(i)] *= std::exp(-0.5 * (a * totals_A[i] + b * totals_B[i]));
  }
  const double l2 = spec.lambda * spec.lambda;
  const double p0 = std::pow((1.0 - l2) / (1.0 - l2 * std::exp(-(a + b))), spec.m);
  out.branches.push_back(TrajectoryBranch{BranchKind::NoJump, Side::A, 0, p0,
                                          StateVector(reg, std::move(nojump)).normalized()});

  const double nbar = std::sinh(spec.r) * std::sinh(spec.r);
  for (Side side : {Side::A, Side::B}) {
    const double rate = side == Side::A ? a : b;
    if (rate == 0.0 || nbar == 0.0) continue;
    for (int i = 0; i < spec.m; ++i) {
      const ModeIndex mode(static_cast<std::size_t>(side == Side::A ? i : spec.m + i));
      out.branches.push_back(TrajectoryBranch{BranchKind::Jump, side, i, nbar * rate,
                                              annihilate(joint, mode).normalized()});
    }
  }
  double total = 0.0;
  for (const auto& br : out.branches) total += br.probability;
  out.deficit = 1.0 - total;
  return out;
}

namespace {

Eigen::VectorXcd project_two_sided(const StateVector& state, int m, int j_A, int j_B) {
  const auto& reg = state.reg();
  const auto totals_A = mode_totals(reg, side_modes(m, Side::A));
  const auto totals_B = mode_totals(reg, side_modes(m, Side::B));
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(state.amplitudes().size());
  for (std::size_t i = 0; i < reg.dimension(); ++i) {
    if (totals_A[i] == j_A && totals_B[i] == j_B) {
      out[static_cast<Eigen::Index>(i)] = state.amplitudes()[static_cast<Eigen::Index>(i)];
    }
  }
  return out;
}

}  // namespace

PurificationResult purify_mixed(const TrajectoryExpansion& expansion, int m, int j_A, int j_B) {
  check_j(j_A);
  check_j(j_B);
  if (expansion.branches.empty()) throw DomainError("empty trajectory expansion");
  const auto& reg = expansion.branches.front().state.reg();
  if (reg.mode_count() != 2 * static_cast<std::size_t>(m)) {
    throw DomainError("protocol register must hold 2m modes");
  }
  const bool have_ideal = j_A == j_B && j_A <= reg.cutoff();
  const std::optional<StateVector> ideal =
      have_ideal ? std::optional<StateVector>(maximally_entangled_ket(m, j_A, reg.cutoff()))
                 : std::nullopt;

  PurificationResult res;
  double weighted_fidelity = 0.0;
  std::optional<StateVector> nojump_post;
  for (const auto& br : expansion.branches) {
    Eigen::VectorXcd proj = project_two_sided(br.state, m, j_A, j_B);
    const double norm2 = proj.squaredNorm();
    if (br.kind == BranchKind::Jump) {
      res.jump_leakage = std::max(res.jump_leakage, std::sqrt(norm2));
    }
    const double w = br.probability * norm2;
    res.record.probability += w;
    if (norm2 == 0.0) continue;
    StateVector post = StateVector(reg, std::move(proj)).normalized();
    if (ideal) weighted_fidelity += w * overlap(post, *ideal);
    if (br.kind == BranchKind::NoJump) nojump_post = std::move(post);
  }
  res.record.j_A = j_A;
  res.record.j_B = j_B;
  res.record.success = j_A == j_B && res.record.probability > 0.0;
  if (res.record.success) {
    res.record.entanglement_bits = log2_degeneracy(j_A, m);
    res.record.fidelity = ideal ? weighted_fidelity / res.record.probability : 0.0;
    res.record.post_state = std::move(nojump_post);
  }
  return res;
}

PurificationResult purify_mixed(const DensityMatrix& rho, int m, int j_A, int j_B) {
  check_j(j_A);
  check_j(j_B);
  const auto& reg = rho.reg();
  if (reg.mode_count() != 2 * static_cast<std::size_t>(m)) {
    throw DomainError("protocol register must hold 2m modes");
  }
  const auto totals_A = mode_totals(reg, side_modes(m, Side::A));
  const auto totals_B = mode_totals(reg, side_modes(m, Side::B));
  std::vector<Eigen::Index> kept;
  for (std::size_t i = 0; i < reg.dimension(); ++i) {
    if (totals_A[i] == j_A && totals_B[i] == j_B) kept.push_back(static_cast<Eigen::Index>(i));
  }
  PurificationResult res;
  res.record.j_A = j_A;
  res.record.j_B = j_B;
  const auto& mat = rho.matrix();
  for (auto i : kept) res.record.probability += mat(i, i).real();
  res.record.success = j_A == j_B && res.record.probability > 0.0;
  if (!res.record.success) return res;

  Eigen::MatrixXcd cond = Eigen::MatrixXcd::Zero(mat.rows(), mat.cols());
  for (auto i : kept) {
    for (auto k : kept) cond(i, k) = mat(i, k) / res.record.probability;
  }
  res.record.entanglement_bits = log2_degeneracy(j_A, m);
  if (j_A <= reg.cutoff()) {
    const auto ideal = maximally_entangled_ket(m, j_A, reg.cutoff()).amplitudes();
    res.record.fidelity = ideal.dot(cond * ideal).real();
  }
  res.conditional = DensityMatrix(reg, std::move(cond));
  return res;
}

JointOutcomeTable joint_outcome_distribution(const ProtocolSpec& spec, double max_tail) {
  const ProtocolSpec pure = ProtocolSpec::make(spec.m, spec.r);
  JointOutcomeTable t;
  t.j_max = tail_j_max(pure, max_tail);
  const double keep_A = spec.loss ? std::exp(-spec.loss->eta_prime_tau_A()) : 1.0;
  const double keep_B = spec.loss ? std::exp(-spec.loss->eta_prime_tau_B()) : 1.0;
  const auto n = static_cast<std::size_t>(t.j_max) + 1;
  t.probability.assign(n, std::vector<double>(n, 0.0));
  for (int J = 0; J <= t.j_max; ++J) {
    const double pJ = pure_probability(spec.m, spec.lambda, J);
    const auto bA = binomial_pmf(J, keep_A);
    const auto bB = binomial_pmf(J, keep_B);
    for (int ja = 0; ja <= J; ++ja) {
      for (int jb = 0; jb <= J; ++jb) {
        t.probability[static_cast<std::size_t>(ja)][static_cast<std::size_t>(jb)] +=
            pJ * bA[static_cast<std::size_t>(ja)] * bB[static_cast<std::size_t>(jb)];
      }
    }
  }
  return t;
}

LossyOutcomeSampler::LossyOutcomeSampler(const ProtocolSpec& spec, double max_tail)
    : keep_A_(spec.loss ? std::exp(-spec.loss->eta_prime_tau_A()) : 1.0),
      keep_B_(spec.loss ? std::exp(-spec.loss->eta_prime_tau_B()) : 1.0) {
  const ProtocolSpec pure = ProtocolSpec::make(spec.m, spec.r);
  const int jm = tail_j_max(pure, max_tail);
  pure_.resize(static_cast<std::size_t>(jm) + 1);
  for (int j = 0; j <= jm; ++j) {
    pure_[static_cast<std::size_t>(j)] = pure_probability(spec.m, spec.lambda, j);
  }
}

LossyDraw LossyOutcomeSampler::sample(Engine& rng) const {
  LossyDraw d;
  d.initial_j = static_cast<int>(sample_discrete(pure_, rng));
  d.j_A = sample_binomial(d.initial_j, keep_A_, rng);
  d.j_B = sample_binomial(d.initial_j, keep_B_, rng);
  return d;
}

WorkingCondition small_noise_ok(int m, double nbar, double eta_A_tau, double eta_B_tau,
                                double eta0_over_kappac) {
  WorkingCondition w;
  w.lhs = static_cast<double>(m) * m * nbar * nbar * (eta_A_tau + eta0_over_kappac) *
          (eta_B_tau + eta0_over_kappac);
  w.ok = w.lhs < w.threshold;
  return w;
}

WorkingCondition asymmetric_ok(int m, double nbar, double eta0_over_kappac) {
  WorkingCondition w;
  w.lhs = m * nbar * eta0_over_kappac;
  w.ok = w.lhs < w.threshold;
  return w;
}

}  // namespace cvpurify
