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

#include "cvpurify/fock.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>
#include <unordered_map>

#include "cvpurify/errors.hpp"

namespace cvpurify {
namespace {

constexpr double kHermitianTol = 1e-12;
constexpr double kTraceTol = 1e-10;
constexpr double kNormTol = 1e-12;

// Advances an odometer over occupation tuples (last mode fastest).
// Returns false after the final tuple.
bool advance(std::vector<int>& occ, int cutoff) {
  for (std::size_t k = occ.size(); k-- > 0;) {
    if (occ[k] < cutoff) {
      ++occ[k];
      return true;
    }
    occ[k] = 0;
  }
  return false;
}

std::vector<char> selection_mask(const FockRegister& reg, std::span<const ModeIndex> modes) {
  std::vector<char> mask(reg.mode_count(), 0);
  for (ModeIndex m : modes) {
    reg.check_mode(m);
    if (mask[m.value]) throw DomainError("mode listed twice: " + std::to_string(m.value));
    mask[m.value] = 1;
  }
  return mask;
}

// Maps every basis index to (index within the kept modes, index within the
// remaining modes).
struct SplitIndex {
  std::vector<std::size_t> kept;
  std::vector<std::size_t> rest;
  std::size_t kept_dim = 1;
  std::size_t rest_dim = 1;
};

SplitIndex split_index(const FockRegister& reg, const std::vector<char>& mask) {
  SplitIndex s;
  const std::size_t local = reg.local_dimension();
  std::vector<std::size_t> kept_stride(reg.mode_count()), rest_stride(reg.mode_count());
  for (std::size_t k = reg.mode_count(); k-- > 0;) {
    if (mask[k]) {
      kept_stride[k] = s.kept_dim;
      s.kept_dim *= local;
    } else {
      rest_stride[k] = s.rest_dim;
      s.rest_dim *= local;
    }
  }
  s.kept.resize(reg.dimension());
  s.rest.resize(reg.dimension());
  std::vector<int> occ(reg.mode_count(), 0);
  std::size_t i = 0;
  do {
    std::size_t ki = 0, ri = 0;
    for (std::size_t k = 0; k < occ.size(); ++k) {
      if (mask[k]) ki += occ[k] * kept_stride[k];
      else ri += occ[k] * rest_stride[k];
    }
    s.kept[i] = ki;
    s.rest[i] = ri;
    ++i;
  } while (advance(occ, reg.cutoff()));
  return s;
}

void check_hermitian(const Eigen::MatrixXcd& m) {
  if (m.rows() != m.cols()) throw DomainError("matrix is not square");
  const double dev = (m - m.adjoint()).cwiseAbs().maxCoeff();
  if (dev > kHermitianTol) {
    throw DomainError("matrix is not Hermitian (max deviation " + std::to_string(dev) + ")");
  }
}

struct DisjointSet {
  std::vector<std::size_t> parent;
  explicit DisjointSet(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  std::size_t find(std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void unite(std::size_t a, std::size_t b) { parent[find(a)] = find(b); }
};

double entropy_bits(const Eigen::VectorXd& eigenvalues) {
  double s = 0.0;
  for (double p : eigenvalues) {
    if (p > 0.0) s -= p * std::log2(p);
  }
  return std::max(s, 0.0);
}

}  // namespace

// ---------------------------------------------------------------------------
// FockRegister

FockRegister::FockRegister(std::size_t mode_count, int cutoff)
    : modes_(mode_count), cutoff_(cutoff), dim_(1), strides_(mode_count) {
  if (mode_count == 0) throw DomainError("register needs at least one mode");
  if (cutoff < 1) throw DomainError("cutoff must be >= 1");
  const std::size_t local = local_dimension();
  for (std::size_t k = mode_count; k-- > 0;) {
    strides_[k] = dim_;
    if (dim_ > kMaxStateDimension / local) {
      throw CapacityError("register of " + std::to_string(mode_count) + " modes at cutoff " +
                          std::to_string(cutoff) + " exceeds the state dimension cap of " +
                          std::to_string(kMaxStateDimension));
    }
    dim_ *= local;
  }
}

std::size_t FockRegister::stride(ModeIndex mode) const {
  check_mode(mode);
  return strides_[mode.value];
}

int FockRegister::occupation(std::size_t index, ModeIndex mode) const {
  return static_cast<int>((index / stride(mode)) % local_dimension());
}

std::vector<int> FockRegister::occupations(std::size_t index) const {
  std::vector<int> occ(modes_);
  for (std::size_t k = 0; k < modes_; ++k) {
    occ[k] = static_cast<int>((index / strides_[k]) % local_dimension());
  }
  return occ;
}

std::size_t FockRegister::index_of(std::span<const int> occupations) const {
  if (occupations.size() != modes_) {
    throw DomainError("expected " + std::to_string(modes_) + " occupations, got " +
                      std::to_string(occupations.size()));
  }
  std::size_t index = 0;
  for (std::size_t k = 0; k < modes_; ++k) {
    const int n = occupations[k];
    if (n < 0 || n > cutoff_) {
      throw std::out_of_range("occupation " + std::to_string(n) + " of mode " +
                              std::to_string(k) + " outside [0, " + std::to_string(cutoff_) +
                              "]");
    }
    index += static_cast<std::size_t>(n) * strides_[k];
  }
  return index;
}

void FockRegister::check_mode(ModeIndex mode) const {
  if (mode.value >= modes_) {
    throw std::out_of_range("mode " + std::to_string(mode.value) + " not in register of " +
                            std::to_string(modes_) + " modes");
  }
}

// ---------------------------------------------------------------------------
// StateVector

StateVector::StateVector(FockRegister reg, Eigen::VectorXcd amplitudes)
    : reg_(std::move(reg)), amplitudes_(std::move(amplitudes)) {
  if (static_cast<std::size_t>(amplitudes_.size()) != reg_.dimension()) {
    throw DomainError("amplitude count " + std::to_string(amplitudes_.size()) +
                      " does not match register dimension " + std::to_string(reg_.dimension()));
  }
}

StateVector StateVector::zero(const FockRegister& reg) {
  return StateVector(reg, Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(reg.dimension())));
}

Complex StateVector::amplitude(std::span<const int> occupations) const {
  return amplitudes_[static_cast<Eigen::Index>(reg_.index_of(occupations))];
}

StateVector StateVector::normalized() const {
  const double n = norm();
  if (n == 0.0) throw DomainError("cannot normalize the zero vector");
  return StateVector(reg_, amplitudes_ / n);
}

// ---------------------------------------------------------------------------
// DensityMatrix

DensityMatrix::DensityMatrix(FockRegister reg, Eigen::MatrixXcd matrix)
    : reg_(std::move(reg)), matrix_(std::move(matrix)) {
  if (reg_.dimension() > kMaxDensityDimension) {
    throw CapacityError("density matrix dimension " + std::to_string(reg_.dimension()) +
                        " exceeds the dense cap of " + std::to_string(kMaxDensityDimension));
  }
  if (static_cast<std::size_t>(matrix_.rows()) != reg_.dimension()) {
    throw DomainError("density matrix size does not match register dimension");
  }
  check_hermitian(matrix_);
  const double tr = trace();
  if (std::abs(tr - 1.0) > kTraceTol) {
    throw DomainError("density matrix trace " + std::to_string(tr) + " differs from 1");
  }
}

DensityMatrix DensityMatrix::from_pure(const StateVector& state) {
  if (std::abs(state.norm() - 1.0) > kNormTol) {
    throw DomainError("from_pure requires a normalized state");
  }
  if (state.dimension() > kMaxDensityDimension) {
    throw CapacityError("density matrix dimension " + std::to_string(state.dimension()) +
                        " exceeds the dense cap of " + std::to_string(kMaxDensityDimension));
  }
  const auto& a = state.amplitudes();
  return DensityMatrix(state.reg(), a * a.adjoint());
}

double DensityMatrix::min_eigenvalue() const {
  return hermitian_eigenvalues(matrix_).minCoeff();
}

// ---------------------------------------------------------------------------
// Constructors and mode operations

StateVector vacuum(const FockRegister& reg) {
  Eigen::VectorXcd a = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(reg.dimension()));
  a[0] = 1.0;
  return StateVector(reg, std::move(a));
}

StateVector number_ket(const FockRegister& reg, std::span<const int> occupations) {
  Eigen::VectorXcd a = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(reg.dimension()));
  a[static_cast<Eigen::Index>(reg.index_of(occupations))] = 1.0;
  return StateVector(reg, std::move(a));
}

StateVector annihilate(const StateVector& state, ModeIndex mode) {
  const auto& reg = state.reg();
  const std::size_t stride = reg.stride(mode);
  const std::size_t local = reg.local_dimension();
  const auto& in = state.amplitudes();
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(in.size());
  for (std::size_t i = 0; i < reg.dimension(); ++i) {
    const std::size_t n = (i / stride) % local;
    if (n == 0) continue;
    out[static_cast<Eigen::Index>(i - stride)] =
        std::sqrt(static_cast<double>(n)) * in[static_cast<Eigen::Index>(i)];
  }
  return StateVector(reg, std::move(out));
}

StateVector tensor(const StateVector& a, const StateVector& b) {
  if (a.reg().cutoff() != b.reg().cutoff()) {
    throw DomainError("tensor product requires equal cutoffs");
  }
  FockRegister reg(a.reg().mode_count() + b.reg().mode_count(), a.reg().cutoff());
  const auto& va = a.amplitudes();
  const auto& vb = b.amplitudes();
  Eigen::VectorXcd out(static_cast<Eigen::Index>(reg.dimension()));
  for (Eigen::Index i = 0; i < va.size(); ++i) {
    out.segment(i * vb.size(), vb.size()) = va[i] * vb;
  }
  return StateVector(std::move(reg), std::move(out));
}

DensityMatrix tensor(const DensityMatrix& a, const DensityMatrix& b) {
  if (a.reg().cutoff() != b.reg().cutoff()) {
    throw DomainError("tensor product requires equal cutoffs");
  }
  FockRegister reg(a.reg().mode_count() + b.reg().mode_count(), a.reg().cutoff());
  if (reg.dimension() > kMaxDensityDimension) {
    throw CapacityError("tensor product exceeds the dense density-matrix cap");
  }
  const auto& ma = a.matrix();
  const auto& mb = b.matrix();
  const Eigen::Index db = mb.rows();
  Eigen::MatrixXcd out(ma.rows() * db, ma.cols() * db);
  for (Eigen::Index i = 0; i < ma.rows(); ++i) {
    for (Eigen::Index j = 0; j < ma.cols(); ++j) {
      out.block(i * db, j * db, db, db) = ma(i, j) * mb;
    }
  }
  return DensityMatrix(std::move(reg), std::move(out));
}

StateVector permute_modes(const StateVector& state, std::span<const std::size_t> order) {
  const auto& reg = state.reg();
  const std::size_t modes = reg.mode_count();
  if (order.size() != modes) throw DomainError("permutation size does not match mode count");
  std::vector<char> seen(modes, 0);
  for (std::size_t k : order) {
    if (k >= modes || seen[k]) throw DomainError("invalid mode permutation");
    seen[k] = 1;
  }
  // New mode k is old mode order[k]; its stride in the old layout:
  std::vector<std::size_t> old_stride(modes);
  for (std::size_t k = 0; k < modes; ++k) old_stride[k] = reg.stride(ModeIndex(order[k]));

  const auto& in = state.amplitudes();
  Eigen::VectorXcd out(in.size());
  std::vector<int> occ(modes, 0);
  std::size_t i = 0;
  do {
    std::size_t src = 0;
    for (std::size_t k = 0; k < modes; ++k) src += occ[k] * old_stride[k];
    out[static_cast<Eigen::Index>(i)] = in[static_cast<Eigen::Index>(src)];
    ++i;
  } while (advance(occ, reg.cutoff()));
  return StateVector(reg, std::move(out));
}

Complex inner(const StateVector& bra, const StateVector& ket) {
  if (!(bra.reg() == ket.reg())) throw DomainError("inner product of mismatched registers");
  return bra.amplitudes().dot(ket.amplitudes());
}

double overlap(const StateVector& a, const StateVector& b) { return std::norm(inner(a, b)); }

double expect_number(const StateVector& state, ModeIndex mode) {
  const auto& reg = state.reg();
  const std::size_t stride = reg.stride(mode);
  const std::size_t local = reg.local_dimension();
  const auto& a = state.amplitudes();
  double sum = 0.0;
  for (std::size_t i = 0; i < reg.dimension(); ++i) {
    sum += static_cast<double>((i / stride) % local) * std::norm(a[static_cast<Eigen::Index>(i)]);
  }
  return sum;
}

double expect_number(const DensityMatrix& rho, ModeIndex mode) {
  const auto& reg = rho.reg();
  const std::size_t stride = reg.stride(mode);
  const std::size_t local = reg.local_dimension();
  double sum = 0.0;
  for (std::size_t i = 0; i < reg.dimension(); ++i) {
    const auto ii = static_cast<Eigen::Index>(i);
    sum += static_cast<double>((i / stride) % local) * rho.matrix()(ii, ii).real();
  }
  return sum;
}

// ---------------------------------------------------------------------------
// Total-number projectors

std::vector<int> mode_totals(const FockRegister& reg, std::span<const ModeIndex> modes) {
  const auto mask = selection_mask(reg, modes);
  std::vector<int> totals(reg.dimension());
  std::vector<int> occ(reg.mode_count(), 0);
  int current = 0;
  std::size_t i = 0;
  while (true) {
    totals[i++] = current;
    // Inline odometer step so the running total stays incremental.
    std::size_t k = occ.size();
    bool more = false;
    while (k-- > 0) {
      if (occ[k] < reg.cutoff()) {
        ++occ[k];
        if (mask[k]) ++current;
        more = true;
        break;
      }
      if (mask[k]) current -= occ[k];
      occ[k] = 0;
    }
    if (!more) break;
  }
  return totals;
}

std::vector<double> total_number_distribution(const StateVector& state,
                                              std::span<const ModeIndex> modes) {
  const auto totals = mode_totals(state.reg(), modes);
  std::vector<double> dist(modes.size() * static_cast<std::size_t>(state.reg().cutoff()) + 1, 0.0);
  const auto& a = state.amplitudes();
  for (std::size_t i = 0; i < totals.size(); ++i) {
    dist[static_cast<std::size_t>(totals[i])] += std::norm(a[static_cast<Eigen::Index>(i)]);
  }
  return dist;
}

Projection total_number_projector_apply(const StateVector& state,
                                        std::span<const ModeIndex> modes, int j) {
  if (j < 0) throw DomainError("total photon number must be non-negative");
  const auto totals = mode_totals(state.reg(), modes);
  const auto& a = state.amplitudes();
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(a.size());
  for (std::size_t i = 0; i < totals.size(); ++i) {
    if (totals[i] == j) out[static_cast<Eigen::Index>(i)] = a[static_cast<Eigen::Index>(i)];
  }
  const double p = out.squaredNorm();
  if (p == 0.0) return Projection{0.0, StateVector(state.reg(), std::move(out)), true};
  out /= std::sqrt(p);
  return Projection{p, StateVector(state.reg(), std::move(out)), false};
}

// ---------------------------------------------------------------------------
// Reduced states and entropy

DensityMatrix partial_trace(const DensityMatrix& rho, std::span<const ModeIndex> keep) {
  if (keep.empty()) throw DomainError("partial_trace needs a non-empty set of kept modes");
  const auto& reg = rho.reg();
  const auto mask = selection_mask(reg, keep);
  const auto split = split_index(reg, mask);
  // Group basis indices by their traced-out part.
  std::vector<std::vector<std::size_t>> groups(split.rest_dim);
  for (std::size_t i = 0; i < reg.dimension(); ++i) groups[split.rest[i]].push_back(i);

  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(split.kept_dim),
                                                static_cast<Eigen::Index>(split.kept_dim));
  const auto& m = rho.matrix();
  for (const auto& g : groups) {
    for (std::size_t i : g) {
      for (std::size_t j : g) {
        out(static_cast<Eigen::Index>(split.kept[i]), static_cast<Eigen::Index>(split.kept[j])) +=
            m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
      }
    }
  }
  return DensityMatrix(FockRegister(keep.size(), reg.cutoff()), std::move(out));
}

namespace {

// rho_keep = Tr_rest |psi><psi|, built from the nonzero amplitudes only.
Eigen::MatrixXcd reduced_matrix(const StateVector& state, const std::vector<char>& mask) {
  const auto& reg = state.reg();
  const auto split = split_index(reg, mask);
  if (split.kept_dim > kMaxDensityDimension) {
    throw CapacityError("reduced density matrix dimension " + std::to_string(split.kept_dim) +
                        " exceeds the dense cap");
  }
  const auto& a = state.amplitudes();
  std::unordered_map<std::size_t, std::vector<std::pair<std::size_t, Complex>>> groups;
  for (std::size_t i = 0; i < reg.dimension(); ++i) {
    const Complex v = a[static_cast<Eigen::Index>(i)];
    if (v != Complex(0.0, 0.0)) groups[split.rest[i]].emplace_back(split.kept[i], v);
  }
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(split.kept_dim),
                                                static_cast<Eigen::Index>(split.kept_dim));
  for (const auto& [rest, entries] : groups) {
    for (const auto& [ki, vi] : entries) {
      for (const auto& [kj, vj] : entries) {
        out(static_cast<Eigen::Index>(ki), static_cast<Eigen::Index>(kj)) += vi * std::conj(vj);
      }
    }
  }
  return out;
}

}  // namespace

DensityMatrix reduced_density(const StateVector& state, std::span<const ModeIndex> keep) {
  if (keep.empty()) throw DomainError("reduced_density needs a non-empty set of kept modes");
  const auto mask = selection_mask(state.reg(), keep);
  return DensityMatrix(FockRegister(keep.size(), state.reg().cutoff()),
                       reduced_matrix(state.normalized(), mask));
}

Eigen::VectorXd hermitian_eigenvalues(const Eigen::MatrixXcd& matrix) {
  check_hermitian(matrix);
  const auto n = static_cast<std::size_t>(matrix.rows());
  DisjointSet sets(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (matrix(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) !=
          Complex(0.0, 0.0)) {
        sets.unite(i, j);
      }
    }
  }
  std::unordered_map<std::size_t, std::vector<Eigen::Index>> blocks;
  for (std::size_t i = 0; i < n; ++i) blocks[sets.find(i)].push_back(static_cast<Eigen::Index>(i));

  Eigen::VectorXd values(static_cast<Eigen::Index>(n));
  Eigen::Index filled = 0;
  for (const auto& [root, idx] : blocks) {
    const auto b = static_cast<Eigen::Index>(idx.size());
    if (b == 1) {
      values[filled++] = matrix(idx[0], idx[0]).real();
      continue;
    }
    Eigen::MatrixXcd sub(b, b);
    for (Eigen::Index r = 0; r < b; ++r) {
      for (Eigen::Index c = 0; c < b; ++c) sub(r, c) = matrix(idx[r], idx[c]);
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(sub, Eigen::EigenvaluesOnly);
    values.segment(filled, b) = solver.eigenvalues();
    filled += b;
  }
  std::sort(values.begin(), values.end());
  return values;
}

double von_neumann_entropy(const Eigen::MatrixXcd& matrix) {
  return entropy_bits(hermitian_eigenvalues(matrix));
}

double von_neumann_entropy(const DensityMatrix& rho) { return von_neumann_entropy(rho.matrix()); }

std::vector<double> schmidt_spectrum(const StateVector& state, std::span<const ModeIndex> keep) {
  if (keep.empty()) throw DomainError("schmidt_spectrum needs a non-empty set of kept modes");
  auto mask = selection_mask(state.reg(), keep);
  // Diagonalize the smaller side; both share the same nonzero spectrum.
  std::size_t kept_dim = 1, rest_dim = 1;
  for (char m : mask) (m ? kept_dim : rest_dim) *= state.reg().local_dimension();
  if (kept_dim > rest_dim && rest_dim > 0 && keep.size() < state.reg().mode_count()) {
    for (auto& m : mask) m = static_cast<char>(!m);
  }
  const auto values = hermitian_eigenvalues(reduced_matrix(state.normalized(), mask));
  std::vector<double> out(values.begin(), values.end());
  for (double& v : out) v = std::max(v, 0.0);
  std::sort(out.rbegin(), out.rend());
  return out;
}

double entanglement_entropy(const StateVector& state, std::span<const ModeIndex> keep) {
  const auto spectrum = schmidt_spectrum(state, keep);
  return entropy_bits(Eigen::Map<const Eigen::VectorXd>(spectrum.data(),
                                                        static_cast<Eigen::Index>(spectrum.size())));
}

std::vector<ModeIndex> mode_range(std::size_t first, std::size_t count) {
  std::vector<ModeIndex> out;
  out.reserve(count);
  for (std::size_t k = 0; k < count; ++k) out.emplace_back(first + k);
  return out;
}

}  // namespace cvpurify
