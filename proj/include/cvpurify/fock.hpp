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

// Truncated Fock-space linear algebra.
//
// Basis states of a register with M modes and per-mode cutoff c are the
// occupation tuples (n_0, ..., n_{M-1}) with 0 <= n_k <= c, enumerated
// lexicographically with mode 0 slowest:
//
//   index = sum_k n_k * (c+1)^(M-1-k)
//
// Serialized amplitudes follow this order.

#include <complex>
#include <compare>
#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace cvpurify {

using Complex = std::complex<double>;

/// Largest number of amplitudes a StateVector may hold.
inline constexpr std::size_t kMaxStateDimension = std::size_t{1} << 24;
/// Largest register dimension for which a dense DensityMatrix is built.
inline constexpr std::size_t kMaxDensityDimension = 20000;

/// Position of a mode inside a register.
struct ModeIndex {
  std::size_t value = 0;

  constexpr ModeIndex() = default;
  constexpr explicit ModeIndex(std::size_t v) : value(v) {}
  friend constexpr auto operator<=>(ModeIndex, ModeIndex) = default;
};

/// Shape of a truncated multi-mode Fock space.
class FockRegister {
 public:
  /// Throws DomainError for mode_count == 0 or cutoff < 1 and CapacityError
  /// when (cutoff+1)^mode_count exceeds kMaxStateDimension.
  FockRegister(std::size_t mode_count, int cutoff);

  std::size_t mode_count() const { return modes_; }
  int cutoff() const { return cutoff_; }
  std::size_t local_dimension() const { return static_cast<std::size_t>(cutoff_) + 1; }
  std::size_t dimension() const { return dim_; }

  std::size_t stride(ModeIndex mode) const;
  int occupation(std::size_t index, ModeIndex mode) const;
  std::vector<int> occupations(std::size_t index) const;
  /// Throws std::out_of_range if any occupation exceeds the cutoff.
  std::size_t index_of(std::span<const int> occupations) const;

  void check_mode(ModeIndex mode) const;

  bool operator==(const FockRegister&) const = default;

 private:
  std::size_t modes_;
  int cutoff_;
  std::size_t dim_;
  std::vector<std::size_t> strides_;
};

/// Pure state (or unnormalized vector) on a register.
class StateVector {
 public:
  StateVector(FockRegister reg, Eigen::VectorXcd amplitudes);

  static StateVector zero(const FockRegister& reg);

  const FockRegister& reg() const { return reg_; }
  const Eigen::VectorXcd& amplitudes() const { return amplitudes_; }
  std::size_t dimension() const { return reg_.dimension(); }

  Complex amplitude(std::span<const int> occupations) const;
  double squared_norm() const { return amplitudes_.squaredNorm(); }
  double norm() const { return amplitudes_.norm(); }
  bool is_zero() const { return squared_norm() == 0.0; }

  /// Throws DomainError on the zero vector.
  StateVector normalized() const;

 private:
  FockRegister reg_;
  Eigen::VectorXcd amplitudes_;
};

/// Density operator on a register.  Construction enforces Hermiticity
/// (1e-12), unit trace (1e-10) and the dense-size cap; positivity is
/// checked on demand through min_eigenvalue().
class DensityMatrix {
 public:
  DensityMatrix(FockRegister reg, Eigen::MatrixXcd matrix);

  /// Throws DomainError if the state is not normalized to 1e-12.
  static DensityMatrix from_pure(const StateVector& state);

  const FockRegister& reg() const { return reg_; }
  const Eigen::MatrixXcd& matrix() const { return matrix_; }
  std::size_t dimension() const { return reg_.dimension(); }
  double trace() const { return matrix_.trace().real(); }

  double min_eigenvalue() const;

 private:
  FockRegister reg_;
  Eigen::MatrixXcd matrix_;
};

/// Outcome of a total-number projection.  A zero-probability branch carries
/// the zero vector and empty == true.
struct Projection {
  double probability = 0.0;
  StateVector state;
  bool empty = true;
};

StateVector vacuum(const FockRegister& reg);
StateVector number_ket(const FockRegister& reg, std::span<const int> occupations);

/// a_mode |psi>.  The result is not renormalized.
StateVector annihilate(const StateVector& state, ModeIndex mode);

/// |a> (x) |b>; modes of `a` come first.  Both registers must share a cutoff.
StateVector tensor(const StateVector& a, const StateVector& b);
DensityMatrix tensor(const DensityMatrix& a, const DensityMatrix& b);

/// Reorders modes: mode k of the result is mode order[k] of the input.
StateVector permute_modes(const StateVector& state, std::span<const std::size_t> order);

Complex inner(const StateVector& bra, const StateVector& ket);
/// |<a|b>|^2 for normalized inputs.
double overlap(const StateVector& a, const StateVector& b);

double expect_number(const StateVector& state, ModeIndex mode);
double expect_number(const DensityMatrix& rho, ModeIndex mode);

/// Sum of occupations over `modes` for every basis index.
std::vector<int> mode_totals(const FockRegister& reg, std::span<const ModeIndex> modes);

/// Probabilities of each total photon number j = 0 .. |modes|*cutoff.
std::vector<double> total_number_distribution(const StateVector& state,
                                              std::span<const ModeIndex> modes);

Projection total_number_projector_apply(const StateVector& state,
                                        std::span<const ModeIndex> modes, int j);

DensityMatrix partial_trace(const DensityMatrix& rho, std::span<const ModeIndex> keep);
DensityMatrix reduced_density(const StateVector& state, std::span<const ModeIndex> keep);

/// Eigenvalues of a Hermitian matrix, ascending.  The matrix is split into
/// the connected components of its nonzero pattern first, so block-diagonal
/// inputs of large dimension stay cheap.
Eigen::VectorXd hermitian_eigenvalues(const Eigen::MatrixXcd& matrix);

/// -sum p log2 p over eigenvalues.  Throws DomainError if the matrix is
/// not Hermitian to 1e-12.
double von_neumann_entropy(const Eigen::MatrixXcd& matrix);
double von_neumann_entropy(const DensityMatrix& rho);

/// Squared Schmidt coefficients across the (keep | rest) cut, descending.
std::vector<double> schmidt_spectrum(const StateVector& state, std::span<const ModeIndex> keep);
/// Entropy of entanglement in bits across the (keep | rest) cut.
double entanglement_entropy(const StateVector& state, std::span<const ModeIndex> keep);

/// Modes [first, first+count) as a list.
std::vector<ModeIndex> mode_range(std::size_t first, std::size_t count);

}  // namespace cvpurify
