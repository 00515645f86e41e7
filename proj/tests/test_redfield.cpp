// Copyright 2026 The molpump Authors
// SPDX-License-Identifier: Apache-2.0

#include <catch2/catch_amalgamated.hpp>
#include <cmath>
#include <random>

#include "molpump/config.hpp"
#include "molpump/redfield.hpp"

using namespace molpump;

namespace {

double max_abs(const Matrix& m) { return m.cwiseAbs().maxCoeff(); }

/// Adaptive Simpson quadrature of the defining tau-integral,
///   1/hbar^2 int_0^t C(tau) e^{-iH tau/hbar} W e^{iH tau/hbar} dtau,
/// independent of the closed-form evaluation path it checks.
class QuadratureOracle {
 public:
  QuadratureOracle(const SpectralDecomposition& spec, Matrix w, LeadCorrelation lead,
                   CorrelationKind kind)
      : spec_(spec), w_(std::move(w)), lead_(std::move(lead)), kind_(kind) {}

  Matrix integrate(double t, double tol) const {
    const Matrix fa = integrand(0.0);
    const Matrix fb = integrand(t);
    const Matrix fm = integrand(0.5 * t);
    const Matrix whole = (t / 6.0) * (fa + 4.0 * fm + fb);
    return adapt(0.0, t, fa, fm, fb, whole, tol, 24);
  }

 private:
  Matrix integrand(double tau) const {
    const complex c = correlation(lead_, tau, kind_) / (kHbar * kHbar);
    Vector ph(spec_.eigenvalues.size());
    for (Eigen::Index i = 0; i < ph.size(); ++i)
      ph[i] = std::polar(1.0, -spec_.eigenvalues[i] * tau / kHbar);
    const Matrix u = spec_.eigenvectors * ph.asDiagonal() * spec_.eigenvectors.adjoint();
    return c * (u * w_ * u.adjoint());
  }

  Matrix adapt(double a, double b, const Matrix& fa, const Matrix& fm, const Matrix& fb,
               const Matrix& whole, double tol, int depth) const {
    const double m = 0.5 * (a + b);
    const Matrix flm = integrand(0.5 * (a + m));
    const Matrix frm = integrand(0.5 * (m + b));
    const Matrix left = ((m - a) / 6.0) * (fa + 4.0 * flm + fm);
    const Matrix right = ((b - m) / 6.0) * (fm + 4.0 * frm + fb);
    const double err = (left + right - whole).norm();
    if (depth <= 0 || err < 15.0 * tol)
      return left + right + (left + right - whole) / 15.0;
    return adapt(a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           adapt(m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
  }

  const SpectralDecomposition& spec_;
  Matrix w_;
  LeadCorrelation lead_;
  CorrelationKind kind_;
};

}  // namespace

TEST_CASE("eigendecompose basics", "[redfield]") {
  const FockSpace space = build_space({{Site::D, Level::LUMO}, {Site::A, Level::LUMO}}, 0);

  Matrix diag = Matrix::Zero(4, 4);
  diag(1, 1) = -0.5;
  diag(2, 2) = 0.3;
  diag(3, 3) = 1.0;
  const SpectralDecomposition sd = eigendecompose({diag, space.tag()});
  CHECK(sd.eigenvalues[0] == -0.5);
  CHECK(sd.eigenvalues[3] == 1.0);

  Matrix two = Matrix::Zero(4, 4);
  two(1, 2) = -0.01;
  two(2, 1) = -0.01;
  const SpectralDecomposition sd2 = eigendecompose({two, space.tag()});
  CHECK(std::abs(sd2.eigenvalues.minCoeff() + 0.01) < 1e-15);
  CHECK(std::abs(sd2.eigenvalues.maxCoeff() - 0.01) < 1e-15);

  Matrix bad = Matrix::Zero(4, 4);
  bad(0, 1) = 1.0;
  CHECK_THROWS_AS(eigendecompose({bad, space.tag()}), OperatorError);
}

TEST_CASE("eigendecompose reconstructs the fig2 hamiltonian", "[redfield]") {
  const JunctionModel model = preset_config("fig2").to_model();
  const FockSpace space = model.make_space();
  const ManyBodyOperator h = build_molecular_hamiltonian(model, space);
  const SpectralDecomposition sd = eigendecompose(h);
  const Matrix& u = sd.eigenvectors;
  CHECK((u.adjoint() * u - Matrix::Identity(64, 64)).norm() < 1e-12);
  const Matrix rebuilt = u * sd.eigenvalues.cast<complex>().asDiagonal() * u.adjoint();
  CHECK((rebuilt - h.matrix).norm() / h.matrix.norm() < 1e-10);
  for (Eigen::Index i = 1; i < sd.eigenvalues.size(); ++i)
    CHECK(sd.eigenvalues[i] >= sd.eigenvalues[i - 1]);
}

TEST_CASE("eta integral limits", "[redfield]") {
  CHECK(eta_integral(3.7, 0.0) == complex(3.7, 0.0));
  CHECK(eta_integral(3.7, 1e-13) == complex(3.7, 0.0));
  // plain quadrature cross-check at one frequency
  const double w = 0.8, t = 5.0;
  complex acc(0.0, 0.0);
  const int n = 200000;
  for (int i = 0; i <= n; ++i) {
    const double tau = t * i / n;
    const double weight = (i == 0 || i == n) ? 0.5 : 1.0;
    acc += weight * std::polar(1.0, -w * tau / kHbar) * (t / n);
  }
  CHECK(std::abs(acc - eta_integral(t, w)) < 1e-9);
}

TEST_CASE("dissipators vanish at t = 0 and reject t < 0", "[redfield]") {
  const JunctionModel model = preset_config("fig2").to_model();
  const FockSpace space = model.make_space();
  const SpectralDecomposition sd = eigendecompose(build_molecular_hamiltonian(model, space));
  const ManyBodyOperator v = coupling_operator(space, LeadSide::L);
  const LeadCorrelation lead = LeadCorrelation::from_lead(model.lead_left, model.kT);
  const DissipatorPair d0 = dissipators(sd, v, lead, 0.0);
  CHECK(max_abs(d0.F.matrix) == 0.0);
  CHECK(max_abs(d0.Ft.matrix) == 0.0);
  CHECK_THROWS_AS(dissipators(sd, v, lead, -1.0), OperatorError);
}

TEST_CASE("single degenerate mode dissipator is analytic", "[redfield]") {
  // one lead mode, V = identity, degenerate spectrum: F(t) = w eta(t; eps) I
  const FockSpace space = build_space({{Site::D, Level::LUMO}}, 0);
  const ManyBodyOperator h{Matrix::Zero(2, 2), space.tag()};
  const ManyBodyOperator v{Matrix::Identity(2, 2), space.tag()};
  const SpectralDecomposition sd = eigendecompose(h);
  LeadCorrelation lead;
  lead.energies = {0.4};
  lead.couplings = {0.05};
  lead.fermi_factors = {0.25};
  lead.mu = 0.0;
  lead.kT = 0.001;
  const double t = 7.0;
  const DissipatorPair d = dissipators(sd, v, lead, t);
  const complex expected =
      0.05 * 0.05 * 0.75 / (kHbar * kHbar) * eta_integral(t, 0.4);
  CHECK(std::abs(d.F.matrix(0, 0) - expected) < 1e-15);
  CHECK(max_abs(d.F.matrix - expected * Matrix::Identity(2, 2)) < 1e-15);
}

TEST_CASE("closed form equals adaptive quadrature on random instances", "[redfield]") {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  const FockSpace space = build_space({{Site::D, Level::LUMO}, {Site::A, Level::LUMO}}, 0);
  for (int trial = 0; trial < 3; ++trial) {
    Matrix h = Matrix::Zero(4, 4);
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j <= i; ++j) {
        const complex z = i == j ? complex(uni(rng), 0.0)
                                 : complex(0.3 * uni(rng), 0.3 * uni(rng));
        h(i, j) = z;
        h(j, i) = std::conj(z);
      }
    const SpectralDecomposition sd = eigendecompose({h, space.tag()});
    const ManyBodyOperator v = coupling_operator(space, LeadSide::L);
    LeadCorrelation lead;
    for (int k = 0; k < 3; ++k) {
      lead.energies.push_back(0.7 * uni(rng));
      lead.couplings.push_back(0.1 * uni(rng));
      lead.fermi_factors.push_back(0.5 + 0.5 * uni(rng));
    }
    lead.mu = 0.0;
    lead.kT = 0.001;
    const double t = 4.0;
    const DissipatorPair d = dissipators(sd, v, lead, t);
    const QuadratureOracle qf(sd, v.matrix.adjoint(), lead, CorrelationKind::emission);
    const QuadratureOracle qft(sd, v.matrix, lead, CorrelationKind::absorption);
    CHECK((d.F.matrix - qf.integrate(t, 1e-11)).norm() < 1e-8);
    CHECK((d.Ft.matrix - qft.integrate(t, 1e-11)).norm() < 1e-8);
  }
}

TEST_CASE("dissipators reach a Markovian plateau", "[redfield]") {
  RunConfig cfg = preset_config("fig2");
  cfg.n_modes = 1600;  // recurrence-free beyond the probed times
  const JunctionModel model = cfg.to_model();
  const FockSpace space = model.make_space();
  const SpectralDecomposition sd = eigendecompose(build_molecular_hamiltonian(model, space));
  const ManyBodyOperator v = coupling_operator(space, LeadSide::L);
  const LeadCorrelation lead = LeadCorrelation::from_lead(model.lead_left, model.kT);
  const double t0 = 400.0;
  const double dt = kHbar / std::abs(model.lead_left.gamma);
  const DissipatorPair a = dissipators(sd, v, lead, t0);
  const DissipatorPair b = dissipators(sd, v, lead, t0 + dt);
  CHECK((b.F.matrix - a.F.matrix).norm() / a.F.matrix.norm() < 1e-3);
  CHECK((b.Ft.matrix - a.Ft.matrix).norm() / a.Ft.matrix.norm() < 1e-3);
}

TEST_CASE("rhs is traceless, hermitian and reduces to the drift at xi = 0", "[redfield]") {
  RunConfig cfg = preset_config("fig2");
  cfg.n_modes = 16;
  const JunctionModel model = cfg.to_model();
  const FockSpace space = model.make_space();
  const ManyBodyOperator h = build_molecular_hamiltonian(model, space);
  const SpectralDecomposition sd = eigendecompose(h);
  const ManyBodyOperator vl = coupling_operator(space, LeadSide::L);
  const ManyBodyOperator vr = coupling_operator(space, LeadSide::R);
  const LeadCorrelation lead = LeadCorrelation::from_lead(model.lead_left, model.kT);

  // a generic hermitian unit-trace state
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  Matrix m(64, 64);
  for (Eigen::Index i = 0; i < 64; ++i)
    for (Eigen::Index j = 0; j < 64; ++j) m(i, j) = complex(uni(rng), uni(rng));
  Matrix rho_m = m * m.adjoint();
  rho_m /= rho_m.trace();
  const DensityMatrix rho{rho_m, 12.0};

  DissipatorSet set;
  set.left = dissipators(sd, vl, lead, 12.0);
  set.right = dissipators(sd, vr, lead, 12.0);
  set.time = 12.0;

  const Matrix out = rhs(rho, h, set, vl, vr);
  CHECK(std::abs(out.trace()) < 1e-12);
  CHECK(max_abs(out - out.adjoint()) < 1e-12);

  // xi = 0: dissipators vanish, rhs is the pure commutator drift
  RunConfig closed = cfg;
  closed.xi_left = closed.xi_right = 0.0;
  const JunctionModel cm = closed.to_model();
  const LeadCorrelation zl = LeadCorrelation::from_lead(cm.lead_left, cm.kT);
  DissipatorSet zset;
  zset.left = dissipators(sd, vl, zl, 12.0);
  zset.right = dissipators(sd, vr, zl, 12.0);
  const Matrix drift = rhs(rho, h, zset, vl, vr);
  const Matrix expect =
      complex(0.0, -1.0 / kHbar) * (h.matrix * rho.matrix - rho.matrix * h.matrix);
  CHECK(max_abs(drift - expect) < 1e-14);
  CHECK(std::abs(drift.trace()) < 1e-13);
}

TEST_CASE("rhs rejects dimension mismatch", "[redfield]") {
  const JunctionModel model = preset_config("fig2").to_model();
  const FockSpace space = model.make_space();
  const ManyBodyOperator h = build_molecular_hamiltonian(model, space);
  const ManyBodyOperator vl = coupling_operator(space, LeadSide::L);
  const ManyBodyOperator vr = coupling_operator(space, LeadSide::R);
  DissipatorSet set;
  set.left = {{Matrix::Zero(64, 64), space.tag()}, {Matrix::Zero(64, 64), space.tag()}, 0.0};
  set.right = set.left;
  const DensityMatrix bad{Matrix::Identity(32, 32), 0.0};
  CHECK_THROWS_AS(rhs(bad, h, set, vl, vr), OperatorError);
}
