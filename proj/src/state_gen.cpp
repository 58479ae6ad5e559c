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

#include "cvpurify/state_gen.hpp"

#include <cmath>
#include <cstdio>
#include <cstdint>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "cvpurify/errors.hpp"

namespace cvpurify {

NopaOutput nopa_output(const NopaSpec& spec) {
  const double eps = std::abs(spec.pump_rate_eps);
  const double kc = spec.output_coupling_kappa_c;
  const double eta0 = spec.internal_loss_eta0;
  if (!(kc > 0.0)) throw DomainError("output coupling kappa_c must be positive");
  if (eta0 < 0.0) throw DomainError("internal loss eta_0 must be non-negative");
  if (!(eps < 0.999 * kc / 2.0)) {
    throw DomainError("NOPA pump |eps| = " + std::to_string(eps) +
                      " is not below threshold 0.999*kappa_c/2 = " + std::to_string(0.999 * kc / 2));
  }
  const double k = kc + eta0;
  const double quarter = k * k / 4.0;
  const double denom = (quarter - eps * eps) * (quarter - eps * eps);
  NopaOutput out;
  out.N = eps * eps * k * k / denom;
  out.M = eps * k * (quarter + eps * eps) / denom;
  out.loss_not_small = eta0 >= 0.1 * kc;
  return out;
}

Squeezing squeeze_from_N(double N) {
  if (!(N >= 0.0)) throw DomainError("photon-number parameter N must be non-negative");
  Squeezing s;
  s.r = std::asinh(std::sqrt(N));
  s.lambda = std::sqrt(N / (N + 1.0));
  return s;
}

// ---------------------------------------------------------------------------

LossModel::LossModel(double eta_A, double eta_B, double tau, double eta0_over_kappac)
    : eta_A_(eta_A), eta_B_(eta_B), tau_(tau), eta0_over_kappac_(eta0_over_kappac) {
  if (eta_A < 0.0 || eta_B < 0.0 || tau < 0.0 || eta0_over_kappac < 0.0) {
    throw DomainError("loss rates, transmission time and eta0/kappa_c must be non-negative");
  }
}

LossModel LossModel::from_products(double eta_prime_A_tau, double eta_prime_B_tau) {
  return LossModel(eta_prime_A_tau, eta_prime_B_tau, 1.0, 0.0);
}

std::optional<double> LossModel::eta_prime_A() const {
  if (tau_ > 0.0) return eta_A_ + eta0_over_kappac_ / tau_;
  if (eta0_over_kappac_ == 0.0) return eta_A_;
  return std::nullopt;
}

std::optional<double> LossModel::eta_prime_B() const {
  if (tau_ > 0.0) return eta_B_ + eta0_over_kappac_ / tau_;
  if (eta0_over_kappac_ == 0.0) return eta_B_;
  return std::nullopt;
}

// ---------------------------------------------------------------------------

double truncation_tail(double lambda, int cutoff) {
  return std::pow(lambda * lambda, cutoff + 1);
}

int default_cutoff(double lambda, double max_tail) {
  if (!(lambda >= 0.0 && lambda < 1.0)) throw DomainError("lambda must lie in [0, 1)");
  if (!(max_tail > 0.0 && max_tail < 1.0)) throw DomainError("max_tail must lie in (0, 1)");
  if (lambda == 0.0) return 1;
  // Smallest c with (c+1) * log(lambda^2) < log(max_tail).
  const int c = static_cast<int>(std::ceil(std::log(max_tail) / std::log(lambda * lambda))) - 1;
  int cutoff = std::max(c, 1);
  while (truncation_tail(lambda, cutoff) >= max_tail) ++cutoff;
  return cutoff;
}

SqueezedState two_mode_squeezed(double r, int cutoff, bool allow_large_tail) {
  if (!(r >= 0.0)) throw DomainError("squeezing parameter r must be non-negative");
  const double lambda = std::tanh(r);
  const double tail = truncation_tail(lambda, cutoff);
  if (tail > 1e-3 && !allow_large_tail) {
    throw DomainError("cutoff " + std::to_string(cutoff) + " discards weight " +
                      std::to_string(tail) + " > 1e-3 at r = " + std::to_string(r));
  }
  FockRegister reg(2, cutoff);
  Eigen::VectorXcd amps = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(reg.dimension()));
  double coeff = std::sqrt(1.0 - lambda * lambda);
  for (int n = 0; n <= cutoff; ++n) {
    const int occ[2] = {n, n};
    amps[static_cast<Eigen::Index>(reg.index_of(occ))] = coeff;
    coeff *= lambda;
  }
  return SqueezedState{StateVector(reg, std::move(amps)).normalized(), tail};
}

CorrelationSet fill_transient(const NopaOutput& target, double kappa, double t) {
  if (!(kappa > 0.0)) throw DomainError("cavity damping kappa must be positive");
  if (!(t >= 0.0)) throw DomainError("fill time must be non-negative");
  const double filled = -std::expm1(-kappa * t);
  CorrelationSet c;
  c.cross = target.M * filled;
  c.occ_A = c.occ_B = target.N * filled;
  c.anti_A = c.occ_A + 1.0;
  c.anti_B = c.occ_B + 1.0;
  return c;
}

CorrelationSet lossy_steady_correlations(double N, const LossModel& loss) {
  if (!(N >= 0.0)) throw DomainError("photon-number parameter N must be non-negative");
  const double a = loss.eta_prime_tau_A();
  const double b = loss.eta_prime_tau_B();
  CorrelationSet c;
  c.cross = std::sqrt(N * (N + 1.0)) * std::exp(-(a + b) / 2.0);
  c.occ_A = N * std::exp(-a);
  c.occ_B = N * std::exp(-b);
  c.anti_A = c.occ_A + 1.0;
  c.anti_B = c.occ_B + 1.0;
  return c;
}

// ---------------------------------------------------------------------------
// Photon-loss master equation.
//
// The loss generator maps rho_{ij} only onto elements with the same per-mode
// charge q_k = n_k(i) - n_k(j).  Elements whose charge vector does not occur
// in rho0 stay zero, so only the active sectors are integrated, as a sparse
// linear system y' = A y on their entries.

namespace {

struct SectorGenerator {
  std::vector<std::pair<Eigen::Index, Eigen::Index>> elements;
  std::vector<double> diagonal;
  std::vector<std::size_t> jump_begin;  // CSR offsets, size elements+1
  std::vector<std::uint32_t> jump_target;
  std::vector<double> jump_coeff;

  void apply(const Eigen::VectorXcd& y, Eigen::VectorXcd& out) const {
    const std::size_t n = elements.size();
    for (std::size_t e = 0; e < n; ++e) {
      Complex acc = diagonal[e] * y[static_cast<Eigen::Index>(e)];
      for (std::size_t p = jump_begin[e]; p < jump_begin[e + 1]; ++p) {
        acc += jump_coeff[p] * y[static_cast<Eigen::Index>(jump_target[p])];
      }
      out[static_cast<Eigen::Index>(e)] = acc;
    }
  }
};

SectorGenerator build_generator(const DensityMatrix& rho0, std::span<const double> rates) {
  const auto& reg = rho0.reg();
  const std::size_t d = reg.dimension();
  const std::size_t modes = reg.mode_count();
  const int c = reg.cutoff();

  std::vector<int> occ(d * modes);
  for (std::size_t i = 0; i < d; ++i) {
    const auto o = reg.occupations(i);
    std::copy(o.begin(), o.end(), occ.begin() + static_cast<std::ptrdiff_t>(i * modes));
  }
  auto charge_key = [&](std::size_t i, std::size_t j) {
    std::uint64_t key = 0;
    for (std::size_t k = 0; k < modes; ++k) {
      key = key * static_cast<std::uint64_t>(2 * c + 1) +
            static_cast<std::uint64_t>(occ[i * modes + k] - occ[j * modes + k] + c);
    }
    return key;
  };

  const auto& m = rho0.matrix();
  std::unordered_set<std::uint64_t> active;
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      if (m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) != Complex(0.0, 0.0)) {
        active.insert(charge_key(i, j));
      }
    }
  }

  SectorGenerator g;
  std::unordered_map<std::uint64_t, std::uint32_t> compact;
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      if (active.count(charge_key(i, j)) == 0) continue;
      compact.emplace(static_cast<std::uint64_t>(i) * d + j,
                      static_cast<std::uint32_t>(g.elements.size()));
      g.elements.emplace_back(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    }
  }

  std::vector<std::size_t> strides(modes);
  for (std::size_t k = 0; k < modes; ++k) strides[k] = reg.stride(ModeIndex(k));

  g.diagonal.resize(g.elements.size());
  g.jump_begin.reserve(g.elements.size() + 1);
  g.jump_begin.push_back(0);
  for (std::size_t e = 0; e < g.elements.size(); ++e) {
    const auto i = static_cast<std::size_t>(g.elements[e].first);
    const auto j = static_cast<std::size_t>(g.elements[e].second);
    double diag = 0.0;
    for (std::size_t k = 0; k < modes; ++k) {
      const int ni = occ[i * modes + k];
      const int nj = occ[j * modes + k];
      diag -= 0.5 * rates[k] * (ni + nj);
      if (rates[k] != 0.0 && ni < c && nj < c) {
        const std::uint64_t key =
            static_cast<std::uint64_t>(i + strides[k]) * d + (j + strides[k]);
        g.jump_target.push_back(compact.at(key));
        g.jump_coeff.push_back(rates[k] * std::sqrt(static_cast<double>(ni + 1) * (nj + 1)));
      }
    }
    g.diagonal[e] = diag;
    g.jump_begin.push_back(g.jump_target.size());
  }
  return g;
}

Eigen::VectorXcd integrate_rk4(const SectorGenerator& g, Eigen::VectorXcd y, int steps) {
  const double h = 1.0 / steps;
  const auto n = y.size();
  Eigen::VectorXcd k1(n), k2(n), k3(n), k4(n), tmp(n);
  for (int s = 0; s < steps; ++s) {
    g.apply(y, k1);
    tmp = y + (0.5 * h) * k1;
    g.apply(tmp, k2);
    tmp = y + (0.5 * h) * k2;
    g.apply(tmp, k3);
    tmp = y + h * k3;
    g.apply(tmp, k4);
    y += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  return y;
}

}  // namespace

LindbladResult lindblad_evolve(const DensityMatrix& rho0, std::span<const double> decay_products,
                               int steps, double tolerance) {
  if (steps <= 0) throw DomainError("lindblad_evolve needs a positive number of steps");
  const auto& reg = rho0.reg();
  if (decay_products.size() != reg.mode_count()) {
    throw DomainError("one decay product per mode is required");
  }
  for (double g : decay_products) {
    if (!(g >= 0.0)) throw DomainError("decay products must be non-negative");
  }

  const SectorGenerator gen = build_generator(rho0, decay_products);
  Eigen::VectorXcd y0(static_cast<Eigen::Index>(gen.elements.size()));
  for (std::size_t e = 0; e < gen.elements.size(); ++e) {
    y0[static_cast<Eigen::Index>(e)] = rho0.matrix()(gen.elements[e].first, gen.elements[e].second);
  }
  const Eigen::VectorXcd coarse = integrate_rk4(gen, y0, steps);
  const Eigen::VectorXcd fine = integrate_rk4(gen, y0, 2 * steps);
  // Entrywise L1 norm bounds the trace norm; RK4 Richardson factor 2^4 - 1.
  const double error = (fine - coarse).cwiseAbs().sum() / 15.0;
  if (error > tolerance) {
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "Lindblad step-halving error estimate %.3e exceeds %.3e at %d steps; "
                  "increase steps",
                  error, tolerance, steps);
    throw ConvergenceError(buf);
  }

  Eigen::MatrixXcd out = rho0.matrix();
  for (std::size_t e = 0; e < gen.elements.size(); ++e) {
    out(gen.elements[e].first, gen.elements[e].second) = fine[static_cast<Eigen::Index>(e)];
  }
  // Remove round-off asymmetry so the result satisfies the Hermitian check.
  out = 0.5 * (out + out.adjoint()).eval();
  return LindbladResult{DensityMatrix(reg, std::move(out)), error, 2 * steps};
}

LindbladResult lindblad_evolve(const DensityMatrix& rho0, const LossModel& loss, int steps,
                               double tolerance) {
  const std::size_t modes = rho0.reg().mode_count();
  if (modes % 2 != 0) throw DomainError("A/B loss model needs an even number of modes");
  std::vector<double> rates(modes);
  for (std::size_t k = 0; k < modes; ++k) {
    rates[k] = k < modes / 2 ? loss.eta_prime_tau_A() : loss.eta_prime_tau_B();
  }
  return lindblad_evolve(rho0, rates, steps, tolerance);
}

CorrelationSet correlations_of(const DensityMatrix& rho, ModeIndex a, ModeIndex b) {
  const auto& reg = rho.reg();
  if (a == b) throw DomainError("correlations_of needs two distinct modes");
  const std::size_t sa = reg.stride(a);
  const std::size_t sb = reg.stride(b);
  const auto& m = rho.matrix();
  Complex cross = 0.0;
  for (std::size_t i = 0; i < reg.dimension(); ++i) {
    const int na = reg.occupation(i, a);
    const int nb = reg.occupation(i, b);
    if (na >= reg.cutoff() || nb >= reg.cutoff()) continue;
    // <i| a_A a_B |i + e_A + e_B> = sqrt((na+1)(nb+1))
    const std::size_t p = i + sa + sb;
    cross += std::sqrt(static_cast<double>(na + 1) * (nb + 1)) *
             m(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(i));
  }
  CorrelationSet c;
  c.cross = cross.real();
  c.occ_A = expect_number(rho, a);
  c.occ_B = expect_number(rho, b);
  c.anti_A = c.occ_A + 1.0;
  c.anti_B = c.occ_B + 1.0;
  return c;
}

LossTrajectory sample_loss_trajectory(const StateVector& state, std::span<const double> keep,
                                      Engine& rng) {
  const auto& reg = state.reg();
  if (keep.size() != reg.mode_count()) {
    throw DomainError("need one keep probability per mode");
  }
  const int c = reg.cutoff();
  const std::size_t local = reg.local_dimension();
  // binom[n][l] = C(n, l)
  std::vector<std::vector<double>> binom(local, std::vector<double>(local, 0.0));
  for (std::size_t n = 0; n < local; ++n) {
    binom[n][0] = 1.0;
    for (std::size_t l = 1; l <= n; ++l) binom[n][l] = binom[n - 1][l - 1] + (l < n ? binom[n - 1][l] : 0.0);
  }

  LossTrajectory out{state, std::vector<int>(reg.mode_count(), 0)};
  Eigen::VectorXcd psi = state.amplitudes();
  for (std::size_t k = 0; k < reg.mode_count(); ++k) {
    const double q = keep[k];
    if (!(q >= 0.0 && q <= 1.0)) throw DomainError("keep probabilities must lie in [0, 1]");
    if (q == 1.0) continue;
    const std::size_t stride = reg.stride(ModeIndex(k));
    // weight[n][l]: Kraus factor squared for losing l of n photons.
    std::vector<std::vector<double>> weight(local, std::vector<double>(local, 0.0));
    for (std::size_t n = 0; n < local; ++n) {
      for (std::size_t l = 0; l <= n; ++l) {
        weight[n][l] = binom[n][l] * std::pow(1.0 - q, static_cast<double>(l)) *
                       std::pow(q, static_cast<double>(n - l));
      }
    }
    std::vector<double> p(static_cast<std::size_t>(c) + 1, 0.0);
    for (Eigen::Index i = 0; i < psi.size(); ++i) {
      const double a2 = std::norm(psi[i]);
      if (a2 == 0.0) continue;
      const std::size_t n = (static_cast<std::size_t>(i) / stride) % local;
      for (std::size_t l = 0; l <= n; ++l) p[l] += a2 * weight[n][l];
    }
    const std::size_t l = sample_discrete(p, rng);
    Eigen::VectorXcd next = Eigen::VectorXcd::Zero(psi.size());
    for (Eigen::Index i = 0; i < psi.size(); ++i) {
      if (psi[i] == Complex(0.0, 0.0)) continue;
      const std::size_t n = (static_cast<std::size_t>(i) / stride) % local;
      if (n < l) continue;
      next[i - static_cast<Eigen::Index>(l * stride)] = std::sqrt(weight[n][l]) * psi[i];
    }
    psi = next / next.norm();
    out.lost[k] = static_cast<int>(l);
  }
  out.state = StateVector(reg, std::move(psi));
  return out;
}

}  // namespace cvpurify
