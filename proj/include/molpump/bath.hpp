// Copyright 2026 The molpump Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <vector>

#include "molpump/common.hpp"
#include "molpump/model.hpp"

namespace molpump {

/// Fermi-Dirac occupation 1 / (1 + exp((e - mu) / kT)), overflow-safe for
/// |e - mu| >> kT. Finite temperature only.
inline double fermi(double energy, double mu, double kT) {
  if (kT <= 0.0) throw ConfigError("bath: kT must be > 0 (T = 0 unsupported)");
  const double x = (energy - mu) / kT;
  if (x >= 0.0) {
    const double t = std::exp(-x);
    return t / (1.0 + t);
  }
  return 1.0 / (1.0 + std::exp(x));
}

/// Discretized electrode band with equilibrium occupations; the sufficient
/// statistics for both correlation functions.
struct LeadCorrelation {
  std::vector<double> energies;       // eps_k
  std::vector<double> couplings;      // u_k
  std::vector<double> fermi_factors;  // f(eps_k)
  double mu = 0.0;
  double kT = 0.0;

  int n_modes() const { return static_cast<int>(energies.size()); }

  static LeadCorrelation from_lead(const LeadParams& lead, double kT) {
    LeadCorrelation c;
    c.mu = lead.mu;
    c.kT = kT;
    for (const LeadMode& m : lead_modes(lead)) {
      c.energies.push_back(m.energy);
      c.couplings.push_back(m.coupling);
      c.fermi_factors.push_back(fermi(m.energy, lead.mu, kT));
    }
    return c;
  }
};

enum class CorrelationKind {
  emission,    // C(tau)  = sum_k u_k^2 (1-f_k) exp(-i eps_k tau / hbar)
  absorption,  // C~(tau) = sum_k u_k^2  f_k    exp(+i eps_k tau / hbar)
};

/// Two-time electrode correlation function as an explicit mode sum. The
/// propagator never samples this on a tau grid; it integrates the mode sum
/// in closed form. This entry point serves diagnostics and tests.
inline complex correlation(const LeadCorrelation& lead, double tau, CorrelationKind kind) {
  complex acc(0.0, 0.0);
  for (int k = 0; k < lead.n_modes(); ++k) {
    const double w = lead.couplings[k] * lead.couplings[k];
    const double phase = lead.energies[k] * tau / kHbar;
    if (kind == CorrelationKind::emission)
      acc += w * (1.0 - lead.fermi_factors[k]) * complex(std::cos(phase), -std::sin(phase));
    else
      acc += w * lead.fermi_factors[k] * complex(std::cos(phase), std::sin(phase));
  }
  return acc;
}

}  // namespace molpump
