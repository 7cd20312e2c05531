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

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Core>

namespace qcollapse {

using Index = Eigen::Index;

template <typename Scalar>
using AmplitudesT = Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, 1>;

template <typename Scalar>
using DenseOperatorT = Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, Eigen::Dynamic>;

using Complex = std::complex<double>;
using Amplitudes = AmplitudesT<double>;
using DenseOperator = DenseOperatorT<double>;

enum class ErrorCode {
  InvalidArgument,
  IndexOutOfRange,
  NonHermitian,
  StepTooLarge,
  NoRealizedComponent,
  NotALaunchComponent,
  ZeroImage,
  EmptyTrace,
  TooLarge,
  SyntaxError,
  OverlappingComponents,
  UnknownLabel,
  NonHermitianCoupling,
};

const char* to_string(ErrorCode code);

/// Every failure raised by the library carries one of the codes above.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Parse failures keep the 1-based source position.
class SyntaxError : public Error {
 public:
  SyntaxError(ErrorCode code, int line, int column, const std::string& what)
      : Error(code, "line " + std::to_string(line) + ", col " + std::to_string(column) + ": " + what),
        line_(line),
        column_(column) {}

  int line() const noexcept { return line_; }
  int column() const noexcept { return column_; }

 private:
  int line_;
  int column_;
};

}  // namespace qcollapse
