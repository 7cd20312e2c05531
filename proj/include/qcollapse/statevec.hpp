// Copyright 2026 The qcollapse Authors
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

#include <memory>
#include <span>
#include <vector>

#include <Eigen/Sparse>

#include "qcollapse/types.hpp"

namespace qcollapse {

/// Amplitudes over a finite labeled basis plus the simulation clock.
struct StateVector {
  Amplitudes amplitudes;
  double time = 0.0;

  Index dimension() const { return amplitudes.size(); }
  bool operator==(const StateVector&) const = default;
};

/// One nonzero matrix element of a Hamiltonian (hbar = 1).
struct OperatorEntry {
  Index row = 0;
  Index col = 0;
  Complex value;

  bool operator==(const OperatorEntry&) const = default;
};

inline constexpr double kHermitianTolerance = 1e-12;

/// Sparse Hermitian operator. Entries are stored sorted by (row, col) with
/// duplicates summed; construction throws NonHermitian when the matrix is
/// not self-adjoint to kHermitianTolerance.
class Operator {
 public:
  Operator() = default;
  Operator(Index dimension, std::vector<OperatorEntry> entries);

  static Operator zero(Index dimension) { return Operator(dimension, {}); }

  Index dimension() const { return dimension_; }
  const std::vector<OperatorEntry>& entries() const { return entries_; }
  const Eigen::SparseMatrix<Complex, Eigen::RowMajor>& matrix() const { return matrix_; }
  DenseOperator dense() const { return DenseOperator(matrix_); }

  /// Largest |eigenvalue|. Exact for dimension <= 1024, otherwise the
  /// max-row-sum bound.
  double norm() const { return norm_; }

  /// Copy keeping only entries whose row and column both satisfy `keep`.
  template <typename Pred>
  Operator filtered(Pred keep) const {
    std::vector<OperatorEntry> kept;
    for (const auto& e : entries_) {
      if (keep(e.row) && keep(e.col)) kept.push_back(e);
    }
    return Operator(dimension_, std::move(kept));
  }

  bool operator==(const Operator& other) const {
    return dimension_ == other.dimension_ && entries_ == other.entries_;
  }

 private:
  Index dimension_ = 0;
  std::vector<OperatorEntry> entries_;
  Eigen::SparseMatrix<Complex, Eigen::RowMajor> matrix_;
  double norm_ = 0.0;
};

/// Largest allowed dt * ||H|| for a single evolution step.
inline constexpr double kStabilityGuard = 0.5;

/// Above this dimension evolution switches from the exact eigenbasis
/// propagator to substepped classic RK4.
inline constexpr Index kExactPropagatorMaxDim = 64;

/// Time evolution under a fixed Hamiltonian. The exact path caches the
/// eigendecomposition; the RK4 path substeps so that each substep satisfies
/// h * ||H|| <= 0.02, which keeps the squared-norm drift below 1e-10 per step.
class Propagator {
 public:
  explicit Propagator(Operator h);

  const Operator& hamiltonian() const { return h_; }
  bool exact() const { return exact_; }

  /// Advances by dt without the stability guard (internal sub-intervals).
  Amplitudes advance(const Amplitudes& psi, double dt) const;

  /// Guarded step: throws StepTooLarge when dt * ||H|| > kStabilityGuard.
  StateVector step(const StateVector& state, double dt) const;

 private:
  Operator h_;
  bool exact_ = true;
  Eigen::VectorXd eigenvalues_;
  DenseOperator eigenvectors_;
};

/// Advances `state` by dt under i dpsi/dt = H psi.
StateVector evolve(const StateVector& state, const Operator& h, double dt);

/// Sum of |amplitude|^2 over an index set.
template <typename Derived>
double sm_value(const Eigen::MatrixBase<Derived>& amplitudes, std::span<const Index> indices) {
  double total = 0.0;
  for (Index i : indices) {
    if (i < 0 || i >= amplitudes.size()) {
      throw Error(ErrorCode::IndexOutOfRange, "basis index " + std::to_string(i));
    }
    total += std::norm(amplitudes(i));
  }
  return total;
}

inline double sm_value(const StateVector& state, std::span<const Index> indices) {
  return sm_value(state.amplitudes, indices);
}

/// Projection onto the subspace spanned by `indices`.
StateVector restrict(const StateVector& state, std::span<const Index> indices);

/// Total squared norm.
template <typename Derived>
double squared_norm(const Eigen::MatrixBase<Derived>& amplitudes) {
  return amplitudes.squaredNorm();
}

}  // namespace qcollapse
