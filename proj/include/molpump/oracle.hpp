// Copyright 2026 The molpump Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <vector>

#include "molpump/bath.hpp"
#include "molpump/common.hpp"
#include "molpump/engine.hpp"
#include "molpump/model.hpp"

namespace molpump {

/// Exact dynamics of the purely electronic junction (molecule plus both
/// discretized leads). The full Hamiltonian is quadratic, so the one-body
/// correlation matrix C_pq = <a^+_q a_p> solves the model exactly:
///   C(t) = e^{-i h t / hbar} C(0) e^{+i h t / hbar}.
/// Serves as the independent verification path for the Redfield propagator.
struct SingleParticleSystem {
  Matrix h;            // one-body Hamiltonian over (molecule + leads)
  Matrix correlation;  // C at `time`
  double time = 0.0;
  int n_mol = 0;

  struct LeadBlock {
    Eigen::Index offset = 0;
    int n_modes = 0;
    RealVector couplings;        // u_k
    std::vector<int> terminals;  // molecular indices coupled to this lead
  };
  LeadBlock left, right;

  // cached one-time eigendecomposition of h and rotated initial condition
  RealVector eigs;
  Matrix vecs;
  Matrix c0_eig;  // vecs^+ C(0) vecs

  const LeadBlock& lead(LeadSide s) const { return s == LeadSide::L ? left : right; }

  /// Phase vector exp(-i E t / hbar).
  Vector phases(double t) const {
    Vector ph(eigs.size());
    for (Eigen::Index a = 0; a < eigs.size(); ++a)
      ph[a] = std::polar(1.0, -eigs[a] * t / kHbar);
    return ph;
  }

  /// Column C(t)_{:,m} without materializing the full matrix.
  Vector correlation_column(double t, int m) const {
    const Vector ph = phases(t);
    Vector x = vecs.row(m).adjoint().cwiseProduct(ph.conjugate());
    Vector z = c0_eig * x;
    z.array() *= ph.array();
    return vecs * z;
  }

  /// Lead currents at time t (fast path; identical math to
  /// exact_lead_current on the evolved matrix).
  std::pair<double, double> lead_currents_at(double t) const {
    std::pair<double, double> out{0.0, 0.0};
    for (LeadSide s : {LeadSide::L, LeadSide::R}) {
      const LeadBlock& b = lead(s);
      double sum = 0.0;
      for (int m : b.terminals) {
        const Vector col = correlation_column(t, m);
        for (int k = 0; k < b.n_modes; ++k)
          sum += b.couplings[k] * col[b.offset + k].imag();
      }
      (s == LeadSide::L ? out.first : out.second) = 2.0 / kHbar * sum;
    }
    return out;
  }

  /// Molecular orbital occupations at time t.
  std::vector<double> molecular_occupations(double t) const {
    std::vector<double> out;
    for (int m = 0; m < n_mol; ++m)
      out.push_back(correlation_column(t, m)[m].real());
    return out;
  }
};

/// Builds the one-body system: molecular energies and beta hoppings, lead
/// mode energies on the diagonal, u_k couplings between each mode and the
/// matching terminal orbitals. C(0) = diag(molecular occupations) (+) the
/// two equilibrium Fermi diagonals.
inline SingleParticleSystem build_single_particle(const JunctionModel& model) {
  if (model.vibronic)
    throw ConfigError("oracle: vibronic models are not quadratic; oracle unsupported");
  SingleParticleSystem sys;
  const std::vector<OrbitalId> reg = model.register_order();
  sys.n_mol = static_cast<int>(reg.size());
  const int n_l = model.lead_left.n_modes;
  const int n_r = model.lead_right.n_modes;
  const Eigen::Index dim = sys.n_mol + n_l + n_r;
  sys.h = Matrix::Zero(dim, dim);
  RealVector occ(dim);

  for (int i = 0; i < sys.n_mol; ++i) {
    sys.h(i, i) = model.orbital_energies.at(reg[i]);
    auto it = model.initial_occupations.find(reg[i]);
    if (it == model.initial_occupations.end())
      throw ConfigError("oracle: initial occupation missing for " + to_string(reg[i]));
    occ[i] = it->second;
  }
  for (int i = 0; i < sys.n_mol; ++i) {
    for (int j = i + 1; j < sys.n_mol; ++j) {
      const bool adjacent =
          std::abs(static_cast<int>(reg[i].site) - static_cast<int>(reg[j].site)) == 1;
      if (adjacent && reg[i].level == reg[j].level) {
        sys.h(i, j) = model.beta;
        sys.h(j, i) = model.beta;
      }
    }
  }

  Eigen::Index offset = sys.n_mol;
  for (LeadSide s : {LeadSide::L, LeadSide::R}) {
    const LeadParams& lp = model.lead(s);
    SingleParticleSystem::LeadBlock& b = s == LeadSide::L ? sys.left : sys.right;
    b.offset = offset;
    b.n_modes = lp.n_modes;
    const std::vector<LeadMode> modes = lead_modes(lp);
    b.couplings.resize(lp.n_modes);
    const Site terminal = s == LeadSide::L ? Site::D : Site::A;
    for (int i = 0; i < sys.n_mol; ++i)
      if (reg[i].site == terminal) b.terminals.push_back(i);
    if (b.terminals.empty())
      throw ConfigError("oracle: terminal site missing from register");
    for (int k = 0; k < lp.n_modes; ++k) {
      const Eigen::Index g = offset + k;
      sys.h(g, g) = modes[k].energy;
      b.couplings[k] = modes[k].coupling;
      occ[g] = fermi(modes[k].energy, lp.mu, model.kT);
      for (int m : b.terminals) {
        sys.h(m, g) = modes[k].coupling;
        sys.h(g, m) = modes[k].coupling;
      }
    }
    offset += lp.n_modes;
  }

  sys.correlation = occ.cast<complex>().asDiagonal();
  Eigen::SelfAdjointEigenSolver<Matrix> solver(sys.h);
  sys.eigs = solver.eigenvalues();
  sys.vecs = solver.eigenvectors();
  sys.c0_eig = sys.vecs.adjoint() * occ.asDiagonal().toDenseMatrix().cast<complex>() *
               sys.vecs;
  return sys;
}

/// Materializes C(t) from the cached eigendecomposition.
inline SingleParticleSystem evolve_exact(const SingleParticleSystem& sys, double t) {
  SingleParticleSystem out = sys;
  const Vector ph = sys.phases(t);
  Matrix inner = sys.c0_eig;
  for (Eigen::Index a = 0; a < ph.size(); ++a)
    for (Eigen::Index b = 0; b < ph.size(); ++b)
      inner(a, b) *= ph[a] * std::conj(ph[b]);
  out.correlation = sys.vecs * inner * sys.vecs.adjoint();
  out.time = t;
  return out;
}

/// Current from lead J into the molecule, from the evolved correlation
/// matrix: I_J = -(d/dt) sum_{k in J} C_kk = (2/hbar) sum_{k in J}
/// sum_{m in terminals(J)} u_k Im C_{k,m}. Positive = into the molecule.
inline double exact_lead_current(const SingleParticleSystem& sys, LeadSide side) {
  const SingleParticleSystem::LeadBlock& b = sys.lead(side);
  double sum = 0.0;
  for (int m : b.terminals)
    for (int k = 0; k < b.n_modes; ++k)
      sum += b.couplings[k] * sys.correlation(b.offset + k, m).imag();
  return 2.0 / kHbar * sum;
}

/// Side-by-side Redfield and exact runs on the same model, window and
/// sampling grid.
struct OracleComparison {
  double window = 0.0;
  double q_left_redfield = 0.0, q_right_redfield = 0.0;
  double q_left_exact = 0.0, q_right_exact = 0.0;
  double rel_err_left = 0.0, rel_err_right = 0.0;
  std::vector<double> times;
  std::vector<double> i_left_redfield, i_right_redfield;
  std::vector<double> i_left_exact, i_right_exact;
};

/// Recurrence-free horizon of the discretized band: the correlation
/// function of an N-mode chain revives at roughly 0.6 N hbar / |gamma|.
inline double recurrence_horizon(const JunctionModel& model) {
  const double g = std::max(std::abs(model.lead_left.gamma),
                            std::abs(model.lead_right.gamma));
  const int n = std::min(model.lead_left.n_modes, model.lead_right.n_modes);
  return 0.6 * n * kHbar / (g > 0.0 ? g : 1.0);
}

inline OracleComparison oracle_compare(const JunctionModel& model, const FockSpace& space,
                                       PropagationSettings settings) {
  if (settings.t_final <= 0.0) settings.t_final = recurrence_horizon(model);
  OracleComparison cmp;
  cmp.window = settings.t_final;

  const TransientRecord red = propagate(model, space, settings);
  const SingleParticleSystem sys = build_single_particle(model);
  cmp.times = red.times;
  cmp.i_left_redfield = red.current_left;
  cmp.i_right_redfield = red.current_right;
  for (double t : red.times) {
    const auto [il, ir] = sys.lead_currents_at(t);
    cmp.i_left_exact.push_back(il);
    cmp.i_right_exact.push_back(ir);
  }
  auto trapezoid = [&](const std::vector<double>& y) {
    double q = 0.0;
    for (std::size_t i = 0; i + 1 < cmp.times.size(); ++i)
      q += 0.5 * (cmp.times[i + 1] - cmp.times[i]) * (y[i] + y[i + 1]);
    return q;
  };
  cmp.q_left_redfield = trapezoid(cmp.i_left_redfield);
  cmp.q_right_redfield = trapezoid(cmp.i_right_redfield);
  cmp.q_left_exact = trapezoid(cmp.i_left_exact);
  cmp.q_right_exact = trapezoid(cmp.i_right_exact);
  cmp.rel_err_left = std::abs(cmp.q_left_redfield - cmp.q_left_exact) /
                     std::max(std::abs(cmp.q_left_exact), 1e-300);
  cmp.rel_err_right = std::abs(cmp.q_right_redfield - cmp.q_right_exact) /
                      std::max(std::abs(cmp.q_right_exact), 1e-300);
  return cmp;
}

}  // namespace molpump
