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

#include "qcollapse/statevec.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include <Eigen/Eigenvalues>

namespace qcollapse {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::NonHermitian: return "NonHermitian";
    case ErrorCode::StepTooLarge: return "StepTooLarge";
    case ErrorCode::NoRealizedComponent: return "NoRealizedComponent";
    case ErrorCode::NotALaunchComponent: return "NotALaunchComponent";
    case ErrorCode::ZeroImage: return "ZeroImage";
    case ErrorCode::EmptyTrace: return "EmptyTrace";
    case ErrorCode::TooLarge: return "TooLarge";
    case ErrorCode::SyntaxError: return "SyntaxError";
    case ErrorCode::OverlappingComponents: return "OverlappingComponents";
    case ErrorCode::UnknownLabel: return "UnknownLabel";
    case ErrorCode::NonHermitianCoupling: return "NonHermitianCoupling";
  }
  return "Unknown";
}

namespace {

constexpr double kRk4SubstepNorm = 0.02;
constexpr Index kExactNormMaxDim = 1024;

double operator_norm(const Eigen::SparseMatrix<Complex, Eigen::RowMajor>& m) {
  if (m.rows() == 0 || m.nonZeros() == 0) return 0.0;
  if (m.rows() <= kExactNormMaxDim) {
    Eigen::SelfAdjointEigenSolver<DenseOperator> solver(DenseOperator(m), Eigen::EigenvaluesOnly);
    return solver.eigenvalues().cwiseAbs().maxCoeff();
  }
  double bound = 0.0;
  for (Index r = 0; r < m.outerSize(); ++r) {
    double row = 0.0;
    for (Eigen::SparseMatrix<Complex, Eigen::RowMajor>::InnerIterator it(m, r); it; ++it) row += std::abs(it.value());
    bound = std::max(bound, row);
  }
  return bound;
}

}  // namespace

Operator::Operator(Index dimension, std::vector<OperatorEntry> entries) : dimension_(dimension) {
  if (dimension < 1) throw Error(ErrorCode::InvalidArgument, "operator dimension must be >= 1");
  std::map<std::pair<Index, Index>, Complex> merged;
  for (const auto& e : entries) {
    if (e.row < 0 || e.row >= dimension || e.col < 0 || e.col >= dimension) {
      throw Error(ErrorCode::IndexOutOfRange,
                  "entry (" + std::to_string(e.row) + ", " + std::to_string(e.col) + ")");
    }
    if (!std::isfinite(e.value.real()) || !std::isfinite(e.value.imag())) {
      throw Error(ErrorCode::InvalidArgument, "non-finite operator entry");
    }
    merged[{e.row, e.col}] += e.value;
  }
  for (const auto& [key, value] : merged) {
    auto mirror = merged.find({key.second, key.first});
    Complex partner = mirror == merged.end() ? Complex{} : mirror->second;
    if (std::abs(value - std::conj(partner)) > kHermitianTolerance) {
      throw Error(ErrorCode::NonHermitian, "H[" + std::to_string(key.first) + "][" +
                                               std::to_string(key.second) + "] != conj(H[" +
                                               std::to_string(key.second) + "][" +
                                               std::to_string(key.first) + "])");
    }
  }
  std::vector<Eigen::Triplet<Complex>> triplets;
  entries_.clear();
  for (const auto& [key, value] : merged) {
    if (value == Complex{}) continue;
    entries_.push_back({key.first, key.second, value});
    triplets.emplace_back(key.first, key.second, value);
  }
  matrix_.resize(dimension, dimension);
  matrix_.setFromTriplets(triplets.begin(), triplets.end());
  matrix_.makeCompressed();
  norm_ = operator_norm(matrix_);
}

Propagator::Propagator(Operator h) : h_(std::move(h)), exact_(h_.dimension() <= kExactPropagatorMaxDim) {
  if (exact_) {
    Eigen::SelfAdjointEigenSolver<DenseOperator> solver(h_.dense());
    eigenvalues_ = solver.eigenvalues();
    eigenvectors_ = solver.eigenvectors();
  }
}

Amplitudes Propagator::advance(const Amplitudes& psi, double dt) const {
  if (dt == 0.0 || h_.entries().empty()) return psi;
  if (exact_) {
    Amplitudes coeffs = eigenvectors_.adjoint() * psi;
    for (Index k = 0; k < coeffs.size(); ++k) {
      coeffs(k) *= std::polar(1.0, -eigenvalues_(k) * dt);
    }
    return eigenvectors_ * coeffs;
  }
  const auto& m = h_.matrix();
  const Complex minus_i{0.0, -1.0};
  const int substeps = std::max(1, static_cast<int>(std::ceil(std::abs(dt) * h_.norm() / kRk4SubstepNorm)));
  const double h = dt / substeps;
  Amplitudes y = psi;
  Amplitudes k1(psi.size()), k2(psi.size()), k3(psi.size()), k4(psi.size());
  for (int s = 0; s < substeps; ++s) {
    k1.noalias() = minus_i * (m * y);
    k2.noalias() = minus_i * (m * (y + 0.5 * h * k1));
    k3.noalias() = minus_i * (m * (y + 0.5 * h * k2));
    k4.noalias() = minus_i * (m * (y + h * k3));
    y += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  return y;
}

StateVector Propagator::step(const StateVector& state, double dt) const {
  if (!(dt > 0.0)) throw Error(ErrorCode::InvalidArgument, "dt must be positive");
  if (state.dimension() != h_.dimension()) {
    throw Error(ErrorCode::InvalidArgument, "state and operator dimensions differ");
  }
  if (dt * h_.norm() > kStabilityGuard * (1.0 + 1e-12)) {
    throw Error(ErrorCode::StepTooLarge,
                "dt*||H|| = " + std::to_string(dt * h_.norm()) + " exceeds " + std::to_string(kStabilityGuard));
  }
  return {advance(state.amplitudes, dt), state.time + dt};
}

StateVector evolve(const StateVector& state, const Operator& h, double dt) {
  return Propagator(h).step(state, dt);
}

StateVector restrict(const StateVector& state, std::span<const Index> indices) {
  if (indices.empty()) throw Error(ErrorCode::InvalidArgument, "restrict needs a nonempty index set");
  StateVector out{Amplitudes::Zero(state.dimension()), state.time};
  for (Index i : indices) {
    if (i < 0 || i >= state.dimension()) {
      throw Error(ErrorCode::IndexOutOfRange, "basis index " + std::to_string(i));
    }
    out.amplitudes(i) = state.amplitudes(i);
  }
  return out;
}

}  // namespace qcollapse
