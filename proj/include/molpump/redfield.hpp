// Copyright 2026 The molpump Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>

#include "molpump/bath.hpp"
#include "molpump/common.hpp"
#include "molpump/fock.hpp"

namespace molpump {

/// Eigendecomposition of a Hermitian many-body operator, eigenvalues
/// ascending. Enables closed-form evaluation of the time integrals inside
/// the dissipator operators.
struct SpectralDecomposition {
  RealVector eigenvalues;
  Matrix eigenvectors;  // columns are eigenstates
  std::uint64_t space_tag = 0;
};

inline SpectralDecomposition eigendecompose(const ManyBodyOperator& h) {
  const double herm = (h.matrix - h.matrix.adjoint()).cwiseAbs().maxCoeff();
  if (herm > 1e-10)
    throw OperatorError("redfield: eigendecompose requires a Hermitian operator");
  Eigen::SelfAdjointEigenSolver<Matrix> solver(h.matrix);
  if (solver.info() != Eigen::Success)
    throw OperatorError("redfield: eigendecomposition failed");
  return {solver.eigenvalues(), solver.eigenvectors(), h.space_tag};
}

/// eta(t; w) = integral_0^t exp(-i w tau / hbar) dtau
///           = hbar (1 - exp(-i w t / hbar)) / (i w),   eta(t; 0) = t.
inline complex eta_integral(double t, double omega) {
  if (std::abs(omega) < 1e-12) return {t, 0.0};
  const double phase = omega * t / kHbar;
  const complex num = 1.0 - complex(std::cos(phase), -std::sin(phase));
  return kHbar * num / complex(0.0, omega);
}

/// Time-dependent dissipator operators of one lead, in the computational
/// basis. Both vanish at t = 0.
struct DissipatorPair {
  ManyBodyOperator F;   // emission side, built from V^+
  ManyBodyOperator Ft;  // absorption side, built from V
  double time = 0.0;
};

struct DissipatorSet {
  DissipatorPair left;
  DissipatorPair right;
  double time = 0.0;

  const DissipatorPair& lead(LeadSide s) const {
    return s == LeadSide::L ? left : right;
  }
};

/// Closed-form dissipators
///   F(t)  = 1/hbar^2 int_0^t C(tau)  e^{-iH tau/hbar} V^+ e^{iH tau/hbar} dtau
///   Ft(t) = 1/hbar^2 int_0^t C~(tau) e^{-iH tau/hbar} V   e^{iH tau/hbar} dtau
/// evaluated per matrix element in the eigenbasis: for F, element (a,b) is
/// (V^+)_{ab}/hbar^2 sum_k u_k^2 (1-f_k) eta(t; eps_k + E_a - E_b); for Ft
/// the weight is f_k and the frequency is E_a - E_b - eps_k.
inline DissipatorPair dissipators(const SpectralDecomposition& spec,
                                  const ManyBodyOperator& v,
                                  const LeadCorrelation& lead, double t) {
  if (t < 0.0) throw OperatorError("redfield: dissipators require t >= 0");
  if (spec.space_tag != v.space_tag)
    throw OperatorError("redfield: V and spectral decomposition from different spaces");
  const Eigen::Index dim = spec.eigenvalues.size();
  const Matrix v_eig = spec.eigenvectors.adjoint() * v.matrix * spec.eigenvectors;
  Matrix sf = Matrix::Zero(dim, dim);
  Matrix sft = Matrix::Zero(dim, dim);
  const double hbar2 = kHbar * kHbar;
  for (int k = 0; k < lead.n_modes(); ++k) {
    const double w_f = lead.couplings[k] * lead.couplings[k] *
                       (1.0 - lead.fermi_factors[k]) / hbar2;
    const double w_ft = lead.couplings[k] * lead.couplings[k] *
                        lead.fermi_factors[k] / hbar2;
    for (Eigen::Index a = 0; a < dim; ++a) {
      for (Eigen::Index b = 0; b < dim; ++b) {
        const double de = spec.eigenvalues[a] - spec.eigenvalues[b];
        sf(a, b) += w_f * eta_integral(t, lead.energies[k] + de);
        sft(a, b) += w_ft * eta_integral(t, de - lead.energies[k]);
      }
    }
  }
  const Matrix f_eig = v_eig.adjoint().cwiseProduct(sf);
  const Matrix ft_eig = v_eig.cwiseProduct(sft);
  DissipatorPair out;
  out.F = {spec.eigenvectors * f_eig * spec.eigenvectors.adjoint(), v.space_tag};
  out.Ft = {spec.eigenvectors * ft_eig * spec.eigenvectors.adjoint(), v.space_tag};
  out.time = t;
  return out;
}

/// Right-hand side of the equation of motion,
///   d rho/dt = -i/hbar [H, rho] + sum_J [F_J rho - rho Ft_J^+, V_J] + h.c.
/// with the h.c. conjugating the whole dissipative sum. Hermitian by
/// construction; traceless (each dissipative term is a commutator).
///
/// Dense reference implementation; the propagator uses an equivalent
/// sector-blocked path (see engine.hpp) validated against this one.
inline Matrix rhs(const DensityMatrix& rho, const ManyBodyOperator& h,
                  const DissipatorSet& diss, const ManyBodyOperator& v_left,
                  const ManyBodyOperator& v_right) {
  const Eigen::Index dim = rho.matrix.rows();
  if (h.dim() != dim || diss.left.F.dim() != dim || diss.right.F.dim() != dim ||
      v_left.dim() != dim || v_right.dim() != dim)
    throw OperatorError("redfield: rhs operand dimension mismatch");
  Matrix out = complex(0.0, -1.0 / kHbar) * (h.matrix * rho.matrix - rho.matrix * h.matrix);
  Matrix acc = Matrix::Zero(dim, dim);
  const ManyBodyOperator* vs[2] = {&v_left, &v_right};
  const DissipatorPair* ds[2] = {&diss.left, &diss.right};
  for (int j = 0; j < 2; ++j) {
    const Matrix g = ds[j]->F.matrix * rho.matrix - rho.matrix * ds[j]->Ft.matrix.adjoint();
    acc += g * vs[j]->matrix - vs[j]->matrix * g;
  }
  out += acc + acc.adjoint();
  return out;
}

}  // namespace molpump
