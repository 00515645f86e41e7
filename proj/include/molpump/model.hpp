// Copyright 2026 The molpump Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <map>
#include <optional>
#include <vector>

#include "molpump/common.hpp"
#include "molpump/fock.hpp"

namespace molpump {

enum class LeadSide { L, R };

inline const char* to_string(LeadSide s) { return s == LeadSide::L ? "L" : "R"; }

/// Tight-binding electrode: chemical potential mu, chain hopping gamma
/// (bandwidth |4 gamma|), molecule-lead hopping xi, n_modes band states.
struct LeadParams {
  double mu = 0.0;
  double gamma = -1.0;
  double xi = 0.0;
  int n_modes = 200;
};

struct LeadMode {
  double energy;
  double coupling;
};

/// Discretized band of a half-filled tight-binding chain:
///   eps_k = mu - 2|gamma| cos(k pi / (N+1)),
///   u_k   = xi sqrt(2/(N+1)) sin(k pi / (N+1)),  k = 1..N.
inline std::vector<LeadMode> lead_modes(const LeadParams& lead) {
  if (lead.n_modes < 1) throw ConfigError("model: lead n_modes must be >= 1");
  std::vector<LeadMode> modes(lead.n_modes);
  const double theta = kPi / (lead.n_modes + 1);
  const double amp = lead.xi * std::sqrt(2.0 / (lead.n_modes + 1));
  for (int k = 1; k <= lead.n_modes; ++k) {
    modes[k - 1].energy = lead.mu - 2.0 * std::abs(lead.gamma) * std::cos(k * theta);
    modes[k - 1].coupling = amp * std::sin(k * theta);
  }
  return modes;
}

/// Bridge vibrational mode with linear on-site coupling to the bridge LUMO.
/// The reorganization energy Delta = lambda^2 / (2 hbar Omega) is the
/// physical coupling-strength knob.
struct VibronicParams {
  double lambda = 0.0;   // eV
  double homega = 0.0;   // hbar * Omega, eV
  int levels = 0;        // truncated ladder size N_vib

  double reorganization() const { return lambda * lambda / (2.0 * homega); }

  static VibronicParams from_reorganization(double delta, double homega, int levels) {
    if (homega <= 0.0) throw ConfigError("model: vibronic omega must be > 0");
    if (delta < 0.0) throw ConfigError("model: reorganization energy must be >= 0");
    return {std::sqrt(2.0 * homega * delta), homega, levels};
  }
};

/// Declarative parameter set of the junction: molecular energies and hopping,
/// the two electrodes, the optional bridge mode, the initial occupation
/// pattern and the common temperature.
struct JunctionModel {
  std::map<OrbitalId, double> orbital_energies;
  double beta = 0.0;  // nearest-neighbour hopping, diagonal in the level index
  LeadParams lead_left;
  LeadParams lead_right;
  std::optional<VibronicParams> vibronic;
  std::map<OrbitalId, int> initial_occupations;
  double kT = 0.001;

  const LeadParams& lead(LeadSide s) const {
    return s == LeadSide::L ? lead_left : lead_right;
  }

  /// Register in the fixed documented order: (D,HOMO), (D,LUMO), (B,HOMO),
  /// (B,LUMO), (A,HOMO), (A,LUMO), restricted to the orbitals present.
  std::vector<OrbitalId> register_order() const {
    std::vector<OrbitalId> reg;
    for (Site s : {Site::D, Site::B, Site::A})
      for (Level l : {Level::HOMO, Level::LUMO})
        if (orbital_energies.count({s, l})) reg.push_back({s, l});
    return reg;
  }

  FockSpace make_space() const {
    return FockSpace(register_order(), vibronic ? vibronic->levels : 0);
  }
};

namespace detail {
inline void require_matching_register(const JunctionModel& model, const FockSpace& space) {
  if (model.orbital_energies.size() != static_cast<std::size_t>(space.n_orbitals()))
    throw ConfigError("model: space register does not match the model orbital set");
  for (const auto& [orb, e] : model.orbital_energies)
    if (!space.contains(orb))
      throw ConfigError("model: orbital " + to_string(orb) + " missing from space");
}
}  // namespace detail

/// Molecular Hamiltonian: on-site energies, inter-site hopping (equal level
/// index between neighbouring sites only), and, when present, the vibronic
/// term (lambda/sqrt(2)) (c + c^+) n_{B,LUMO} + hbar Omega (c^+ c + 1/2).
inline ManyBodyOperator build_molecular_hamiltonian(const JunctionModel& model,
                                                    const FockSpace& space) {
  detail::require_matching_register(model, space);
  if (model.vibronic && space.boson_levels() < 2)
    throw ConfigError("model: vibronic parameters given but space has no boson mode");

  Matrix h = Matrix::Zero(space.dim(), space.dim());
  for (const auto& [orb, e] : model.orbital_energies) {
    const Matrix d = annihilator(space, orb).matrix;
    h += e * (d.adjoint() * d);
  }
  for (Site s : {Site::B, Site::A}) {
    for (Level l : {Level::HOMO, Level::LUMO}) {
      const OrbitalId here{s, l};
      const OrbitalId prev{static_cast<Site>(static_cast<int>(s) - 1), l};
      if (!space.contains(here) || !space.contains(prev)) continue;
      const Matrix hop = model.beta * (annihilator(space, here).matrix.adjoint() *
                                       annihilator(space, prev).matrix);
      h += hop + hop.adjoint();
    }
  }
  if (model.vibronic) {
    const Matrix c = boson_annihilator(space).matrix;
    const Matrix db = annihilator(space, {Site::B, Level::LUMO}).matrix;
    const Matrix n_bridge = db.adjoint() * db;
    h += (model.vibronic->lambda / std::sqrt(2.0)) * (c + c.adjoint()) * n_bridge;
    h += model.vibronic->homega *
         (c.adjoint() * c + 0.5 * Matrix::Identity(space.dim(), space.dim()));
  }
  return {std::move(h), space.tag()};
}

/// Molecule-lead coupling operator: V_L = sum_l d^+_{D,l}, V_R = sum_l
/// d^+_{A,l}, over whichever levels of the terminal site are in the register.
inline ManyBodyOperator coupling_operator(const FockSpace& space, LeadSide side) {
  const Site terminal = side == LeadSide::L ? Site::D : Site::A;
  Matrix v = Matrix::Zero(space.dim(), space.dim());
  bool found = false;
  for (Level l : {Level::HOMO, Level::LUMO}) {
    if (space.contains({terminal, l})) {
      v += annihilator(space, {terminal, l}).matrix.adjoint();
      found = true;
    }
  }
  if (!found)
    throw ConfigError(std::string("model: terminal site for lead ") + to_string(side) +
                      " absent from register");
  return {std::move(v), space.tag()};
}

/// Factorized initial state: occupied orbitals filled, others empty, boson
/// factor in its ground state. A rank-1 projector.
inline DensityMatrix initial_density(const JunctionModel& model, const FockSpace& space) {
  detail::require_matching_register(model, space);
  Eigen::Index f = 0;
  for (const auto& orb : space.orbitals()) {
    auto it = model.initial_occupations.find(orb);
    if (it == model.initial_occupations.end())
      throw ConfigError("model: initial occupation missing for " + to_string(orb));
    if (it->second != 0 && it->second != 1)
      throw ConfigError("model: initial occupation of " + to_string(orb) +
                        " must be 0 or 1");
    if (it->second) f |= Eigen::Index(1) << space.orbital_index(orb);
  }
  Matrix rho = Matrix::Zero(space.dim(), space.dim());
  rho(f * space.boson_count(), f * space.boson_count()) = 1.0;
  return {std::move(rho), 0.0};
}

}  // namespace molpump
