// Copyright 2026 The molpump Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Dense>
#include <complex>
#include <stdexcept>
#include <string>

namespace molpump {

using complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

// Unit system: energies in eV, times in fs, charge in units of e.
// Currents are e/fs.
inline constexpr double kHbar = 0.6582119569;  // eV fs

inline constexpr double kPi = 3.14159265358979323846;

/// Thrown when a configuration or model parameter set is inconsistent.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Thrown when an operator is used outside its domain (wrong space, wrong
/// shape, non-Hermitian input where a Hermitian one is required, ...).
class OperatorError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Thrown by the propagator when a conservation check fails mid-run.
class NumericalInstabilityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Reduced density matrix of the molecular system at a given time.
struct DensityMatrix {
  Matrix matrix;
  double time = 0.0;

  double trace_error() const { return std::abs(matrix.trace() - complex(1.0, 0.0)); }
  double hermiticity_error() const {
    return (matrix - matrix.adjoint()).cwiseAbs().maxCoeff();
  }
};

}  // namespace molpump
