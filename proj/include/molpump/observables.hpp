// Copyright 2026 The molpump Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <optional>
#include <vector>

#include "molpump/common.hpp"
#include "molpump/fock.hpp"
#include "molpump/redfield.hpp"

namespace molpump {

/// Time series of a propagation run. Populations are stored one vector per
/// register orbital, in register order. Q_L/Q_R are trapezoidal integrals of
/// the recorded currents.
struct TransientRecord {
  std::vector<double> times;
  std::vector<double> current_left;
  std::vector<double> current_right;
  std::vector<std::vector<double>> populations;  // [orbital][sample]
  std::vector<double> boson_occupation;          // empty when no boson mode
  std::vector<double> trace_error;
  std::vector<double> min_eigenvalue;            // positivity diagnostic
  double Q_left = 0.0;
  double Q_right = 0.0;
  bool decay_floor_met = false;

  std::size_t size() const { return times.size(); }
};

/// Transient current from lead J into the molecule,
///   I_J(t) = 2 e Re tr{ N [ {F_J rho - rho Ft_J^+}, V_J ] },
/// normalized so that I_L + I_R = e d/dt tr(N rho) holds identically for the
/// equation of motion (charge bookkeeping). Positive = electron transfer
/// into the molecule.
inline double lead_current(const DensityMatrix& rho, const ManyBodyOperator& number_op,
                           const DissipatorSet& diss, const ManyBodyOperator& v,
                           LeadSide side) {
  const Eigen::Index dim = rho.matrix.rows();
  const DissipatorPair& d = diss.lead(side);
  if (number_op.dim() != dim || d.F.dim() != dim || v.dim() != dim)
    throw OperatorError("observables: lead_current operand dimension mismatch");
  const Matrix g = d.F.matrix * rho.matrix - rho.matrix * d.Ft.matrix.adjoint();
  const Matrix comm = g * v.matrix - v.matrix * g;
  return 2.0 * (number_op.matrix * comm).trace().real();
}

struct AccumulatedCharge {
  double Q_left = 0.0;
  double Q_right = 0.0;
  bool decay_floor_met = false;
};

/// Trapezoidal integral of both current series over the recorded window.
/// Reports (does not enforce) whether the terminal currents decayed below
/// floor_fraction * max |I|.
inline AccumulatedCharge accumulate_charge(const TransientRecord& record,
                                           double floor_fraction = 1e-3) {
  if (record.size() < 2)
    throw ConfigError("observables: accumulate_charge needs at least 2 samples");
  AccumulatedCharge out;
  double max_i = 0.0;
  for (std::size_t i = 0; i + 1 < record.size(); ++i) {
    const double dt = record.times[i + 1] - record.times[i];
    out.Q_left += 0.5 * dt * (record.current_left[i] + record.current_left[i + 1]);
    out.Q_right += 0.5 * dt * (record.current_right[i] + record.current_right[i + 1]);
  }
  for (std::size_t i = 0; i < record.size(); ++i)
    max_i = std::max({max_i, std::abs(record.current_left[i]),
                      std::abs(record.current_right[i])});
  const double tail = std::max(std::abs(record.current_left.back()),
                               std::abs(record.current_right.back()));
  out.decay_floor_met = tail <= floor_fraction * max_i;
  return out;
}

/// Full D<->A population-transfer period of the superexchange two-level
/// reduction with coupling beta^2/gap: pi hbar gap / beta^2. The first
/// acceptor-population maximum of the exact three-level system sits at half
/// this value (up to O(beta^2/gap^2) corrections).
inline double mcconnell_period(double beta, double gap) {
  if (gap == 0.0)
    throw ConfigError("observables: McConnell formula invalid at resonance (gap = 0)");
  return kPi * kHbar * std::abs(gap) / (beta * beta);
}

/// Generalized vibronic McConnell angular frequency
///   nu = 2 beta^2 exp(-Delta / hbar Omega) / (hbar |eps_bridge - Delta|)
/// for degenerate donor/acceptor levels at zero.
inline double vibronic_mcconnell_frequency(double beta, double eps_bridge, double delta,
                                           double omega) {
  if (eps_bridge == delta)
    throw ConfigError("observables: vibronic McConnell formula invalid at resonance");
  return 2.0 * beta * beta * std::exp(-delta / omega) /
         (kHbar * std::abs(eps_bridge - delta));
}

/// Orbital occupations <d^+_{m,l} d_{m,l}> in register order, plus <c^+ c>
/// when a boson mode is present (appended last).
inline std::vector<double> populations(const DensityMatrix& rho, const FockSpace& space) {
  std::vector<double> out;
  const Eigen::Index nb = space.boson_count();
  for (int i = 0; i < space.n_orbitals(); ++i) {
    double p = 0.0;
    for (Eigen::Index g = 0; g < space.dim(); ++g)
      if ((g / nb) >> i & 1) p += rho.matrix(g, g).real();
    out.push_back(p);
  }
  if (space.boson_levels() > 0) {
    double p = 0.0;
    for (Eigen::Index g = 0; g < space.dim(); ++g) p += double(g % nb) * rho.matrix(g, g).real();
    out.push_back(p);
  }
  return out;
}

}  // namespace molpump
