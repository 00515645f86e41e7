// Copyright 2026 The molpump Authors
// SPDX-License-Identifier: Apache-2.0

#include <catch2/catch_amalgamated.hpp>
#include <cmath>

#include "molpump/config.hpp"
#include "molpump/model.hpp"

using namespace molpump;

namespace {
double max_abs(const Matrix& m) { return m.cwiseAbs().maxCoeff(); }
}

TEST_CASE("hamiltonian is hermitian and conserves particle number", "[model]") {
  for (const char* preset : {"fig2", "fig4"}) {
    const JunctionModel model = preset_config(preset).to_model();
    const FockSpace space = model.make_space();
    const ManyBodyOperator h = build_molecular_hamiltonian(model, space);
    const ManyBodyOperator n = number_operator(space);
    CHECK(max_abs(h.matrix - h.matrix.adjoint()) == 0.0);
    CHECK((n.matrix * h.matrix - h.matrix * n.matrix).norm() < 1e-12);
  }
}

TEST_CASE("beta = 0 hamiltonian is diagonal with additive energies", "[model]") {
  RunConfig cfg = preset_config("fig2");
  cfg.beta = 0.0;
  const JunctionModel model = cfg.to_model();
  const FockSpace space = model.make_space();
  const Matrix h = build_molecular_hamiltonian(model, space).matrix;
  for (Eigen::Index i = 0; i < space.dim(); ++i)
    for (Eigen::Index j = 0; j < space.dim(); ++j)
      if (i != j) CHECK(h(i, j) == complex(0.0, 0.0));
  // energy of a basis state = sum of occupied orbital energies
  for (Eigen::Index f = 0; f < space.dim(); ++f) {
    double expect = 0.0;
    for (int i = 0; i < space.n_orbitals(); ++i)
      if ((f >> i) & 1) expect += model.orbital_energies.at(space.orbitals()[i]);
    CHECK(std::abs(h(f, f).real() - expect) < 1e-14);
  }
}

TEST_CASE("single-particle LUMO block matches the three-site matrix", "[model]") {
  RunConfig cfg = preset_config("fig2");
  const double eps22 = 0.07;
  cfg.eps[{Site::B, Level::LUMO}] = eps22;
  const JunctionModel model = cfg.to_model();
  const FockSpace space = model.make_space();
  const Matrix h = build_molecular_hamiltonian(model, space).matrix;

  // basis states with a single LUMO electron and all HOMOs empty
  const Eigen::Index d2 = Eigen::Index(1) << space.orbital_index({Site::D, Level::LUMO});
  const Eigen::Index b2 = Eigen::Index(1) << space.orbital_index({Site::B, Level::LUMO});
  const Eigen::Index a2 = Eigen::Index(1) << space.orbital_index({Site::A, Level::LUMO});
  const Eigen::Index states[3] = {d2, b2, a2};
  const double beta = -0.01;
  const double expect[3][3] = {
      {0.0, beta, 0.0}, {beta, eps22, beta}, {0.0, beta, 0.0}};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      CHECK(std::abs(h(states[i], states[j]) - complex(expect[i][j], 0.0)) < 1e-14);
}

TEST_CASE("vibronic terms require a boson mode in the space", "[model]") {
  const JunctionModel model = preset_config("fig4").to_model();
  const FockSpace bad(model.register_order(), 0);
  CHECK_THROWS_AS(build_molecular_hamiltonian(model, bad), ConfigError);
}

TEST_CASE("vibronic lambda-delta consistency", "[model]") {
  const VibronicParams v = VibronicParams::from_reorganization(0.05, 0.06, 15);
  CHECK(std::abs(v.reorganization() - 0.05) < 1e-14);
  CHECK(std::abs(v.lambda - std::sqrt(2.0 * 0.06 * 0.05)) < 1e-14);
}

TEST_CASE("lead modes analytic values", "[model]") {
  const LeadParams one{-0.2, -1.0, -0.03, 1};
  const auto m1 = lead_modes(one);
  REQUIRE(m1.size() == 1);
  CHECK(std::abs(m1[0].energy - (-0.2)) < 1e-15);
  CHECK(std::abs(m1[0].coupling - (-0.03)) < 1e-15);

  const LeadParams three{-0.2, -1.0, 1.0, 3};
  const auto m3 = lead_modes(three);
  const double r2 = std::sqrt(2.0);
  CHECK(std::abs(m3[0].energy - (-0.2 - r2)) < 1e-14);
  CHECK(std::abs(m3[1].energy - (-0.2)) < 1e-14);
  CHECK(std::abs(m3[2].energy - (-0.2 + r2)) < 1e-14);
}

TEST_CASE("lead mode coupling sum rule", "[model]") {
  // sum_k (2/(N+1)) sin^2(k pi/(N+1)) = 1 exactly, so sum u_k^2 = xi^2
  for (int n = 1; n <= 50; ++n) {
    const LeadParams lead{-0.2, -1.0, -0.03, n};
    double sum = 0.0;
    for (const auto& m : lead_modes(lead)) sum += m.coupling * m.coupling;
    CHECK(std::abs(sum - 0.03 * 0.03) < 1e-15);
  }
}

TEST_CASE("lead mode symmetry", "[model]") {
  const LeadParams lead{-0.2, -1.0, -0.03, 41};
  const auto modes = lead_modes(lead);
  const int n = lead.n_modes;
  for (int k = 0; k < n; ++k) {
    CHECK(std::abs((modes[k].energy - lead.mu) + (modes[n - 1 - k].energy - lead.mu)) <
          1e-14);
    CHECK(std::abs(modes[k].coupling - modes[n - 1 - k].coupling) < 1e-14);
  }
}

TEST_CASE("coupling operators", "[model]") {
  const JunctionModel fig2 = preset_config("fig2").to_model();
  const FockSpace space = fig2.make_space();
  const Matrix vl = coupling_operator(space, LeadSide::L).matrix;
  const Matrix expect = creator(space, {Site::D, Level::HOMO}).matrix +
                        creator(space, {Site::D, Level::LUMO}).matrix;
  CHECK(max_abs(vl - expect) == 0.0);

  // nilpotent of degree <= 3 (two anticommuting creations square to zero)
  CHECK(max_abs(vl) > 0.0);
  CHECK(max_abs(vl * vl) == 0.0);
  CHECK(max_abs(vl * vl * vl) == 0.0);

  const JunctionModel fig4 = preset_config("fig4").to_model();
  const FockSpace reduced = fig4.make_space();
  const Matrix vr = coupling_operator(reduced, LeadSide::R).matrix;
  CHECK(max_abs(vr - creator(reduced, {Site::A, Level::LUMO}).matrix) == 0.0);
  CHECK(max_abs(vr * vr) == 0.0);  // single orbital: degree 2
}

TEST_CASE("initial density is the preset projector", "[model]") {
  const JunctionModel fig2 = preset_config("fig2").to_model();
  const FockSpace space = fig2.make_space();
  const DensityMatrix rho = initial_density(fig2, space);
  CHECK(std::abs(rho.matrix.trace() - complex(1.0, 0.0)) < 1e-15);
  CHECK(max_abs(rho.matrix * rho.matrix - rho.matrix) < 1e-15);
  const Matrix n = number_operator(space).matrix;
  CHECK(std::abs((rho.matrix * n).trace().real() - 3.0) < 1e-13);
  // register-order bits (D.H, D.L, B.H, B.L, A.H, A.L) = (0,1,1,0,1,0)
  const Eigen::Index idx = 0b010110;
  CHECK(rho.matrix(idx, idx) == complex(1.0, 0.0));

  const JunctionModel fig4 = preset_config("fig4").to_model();
  const FockSpace reduced = fig4.make_space();
  const DensityMatrix rho4 = initial_density(fig4, reduced);
  const Matrix n4 = number_operator(reduced).matrix;
  CHECK(std::abs((rho4.matrix * n4).trace().real() - 1.0) < 1e-13);
  CHECK(std::abs(rho4.matrix.trace() - complex(1.0, 0.0)) < 1e-15);
  // boson factor in its ground state: f = 0b0010, global = f * n_vib
  CHECK(rho4.matrix(2 * 15, 2 * 15) == complex(1.0, 0.0));
}
