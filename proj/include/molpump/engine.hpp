// Copyright 2026 The molpump Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "molpump/bath.hpp"
#include "molpump/common.hpp"
#include "molpump/fock.hpp"
#include "molpump/model.hpp"
#include "molpump/observables.hpp"
#include "molpump/redfield.hpp"

namespace molpump {

struct PropagationSettings {
  double t_final = 0.0;       // fs; <= 0 selects the decay-floor auto window
  double dt = 0.0;            // fs; <= 0 selects the default 0.25 hbar/|gamma|
  int record_every = 2;       // steps between recorded samples
  double decay_floor = 1e-3;  // tail threshold as a fraction of max |I|
  double t_cap = 50000.0;     // hard cap for the auto window, fs
  double t_min = 1000.0;      // minimum auto window, fs
  double trace_tol = 1e-6;    // instability thresholds (hard errors)
  double herm_tol = 1e-8;
  double positivity_warn = 1e-3;
  int min_eig_stride = 16;    // records between positivity evaluations

  double resolve_dt(const JunctionModel& model) const {
    if (dt > 0.0) return dt;
    const double g = std::max(std::abs(model.lead_left.gamma),
                              std::abs(model.lead_right.gamma));
    return 0.25 * kHbar / (g > 0.0 ? g : 1.0);
  }
};

namespace detail {

/// Exact increment of the dissipator integrals over one substep of width
/// delta. Element (a,b) of the emission-side integral S accumulates
///   sum_k w_k int_t^{t+delta} exp(-i (eps_k + D_ab) tau / hbar) dtau
///     = exp(-i D_ab t / hbar) sum_p (-i D_ab / hbar)^p / p! K_p(t),
///   K_p(t) = sum_k w_k exp(-i eps_k t / hbar) M_p(delta; eps_k),
///   M_p(delta; eps) = int_0^delta tau^p exp(-i eps tau / hbar) dtau,
/// with the Taylor order chosen so the truncation is below 1e-18 absolute.
/// The absorption side is analogous with conjugated mode phases.
class DissipatorTracker {
 public:
  DissipatorTracker() = default;

  DissipatorTracker(const LeadCorrelation& lead, const std::vector<RealVector>& sector_e,
                    double delta)
      : lead_(lead), delta_(delta) {
    const int n = lead_.n_modes();
    const int n_sec = static_cast<int>(sector_e.size());
    double e_lo = sector_e[0].minCoeff(), e_hi = sector_e[0].maxCoeff();
    for (const auto& e : sector_e) {
      e_lo = std::min(e_lo, e.minCoeff());
      e_hi = std::max(e_hi, e.maxCoeff());
    }
    order_ = pick_order((e_hi - e_lo) * delta / kHbar);

    // pair-block frequency matrices and Horner argument (-i D / hbar)
    for (int N = 0; N + 1 < n_sec; ++N) {
      Matrix zf(sector_e[N].size(), sector_e[N + 1].size());
      for (Eigen::Index a = 0; a < sector_e[N].size(); ++a)
        for (Eigen::Index b = 0; b < sector_e[N + 1].size(); ++b)
          zf(a, b) = complex(0.0, -(sector_e[N][a] - sector_e[N + 1][b]) / kHbar);
      z_f_.push_back(zf);
      z_ft_.push_back((-zf.transpose()).eval());
      s_f_.push_back(Matrix::Zero(zf.rows(), zf.cols()));
      s_ft_.push_back(Matrix::Zero(zf.cols(), zf.rows()));
    }

    // w_k-weighted moment tables, (P+1) columns per mode
    Matrix mom = moments(delta);
    wm_f_.resize(n, order_ + 1);
    wm_ft_.resize(n, order_ + 1);
    const double hbar2 = kHbar * kHbar;
    for (int k = 0; k < n; ++k) {
      const double u2 = lead_.couplings[k] * lead_.couplings[k];
      const double wf = u2 * (1.0 - lead_.fermi_factors[k]) / hbar2;
      const double wft = u2 * lead_.fermi_factors[k] / hbar2;
      for (int p = 0; p <= order_; ++p) {
        wm_f_(k, p) = wf * mom(k, p);
        wm_ft_(k, p) = wft * std::conj(mom(k, p));
      }
    }

    mode_phase_ = Vector::Ones(n);
    mode_step_ = Vector(n);
    for (int k = 0; k < n; ++k)
      mode_step_[k] = std::polar(1.0, -lead_.energies[k] * delta / kHbar);
    inv_factorial_.resize(order_ + 1);
    double f = 1.0;
    for (int p = 0; p <= order_; ++p) {
      inv_factorial_[p] = 1.0 / f;
      f *= (p + 1);
    }
  }

  /// Advance the integrals from t to t + delta. sector_phase[N][a] must hold
  /// exp(-i E^N_a t / hbar) at the pre-advance time t.
  void advance(const std::vector<Vector>& sector_phase) {
    const Eigen::Index p1 = order_ + 1;
    Vector kf = wm_f_.transpose() * mode_phase_;
    Vector kft = wm_ft_.transpose() * mode_phase_.conjugate();
    for (Eigen::Index p = 0; p < p1; ++p) {
      kf[p] *= inv_factorial_[p];
      kft[p] *= inv_factorial_[p];
    }
    for (std::size_t i = 0; i < z_f_.size(); ++i) {
      horner_accumulate(s_f_[i], z_f_[i], kf, sector_phase[i], sector_phase[i + 1]);
      horner_accumulate(s_ft_[i], z_ft_[i], kft, sector_phase[i + 1], sector_phase[i]);
    }
    mode_phase_.array() *= mode_step_.array();
    ++steps_;
    time_ += delta_;
    if (steps_ % kPhaseResync == 0) resync_mode_phase();
  }

  const Matrix& s_emission(std::size_t pair) const { return s_f_[pair]; }
  const Matrix& s_absorption(std::size_t pair) const { return s_ft_[pair]; }
  double time() const { return time_; }
  int order() const { return order_; }

 private:
  static constexpr std::int64_t kPhaseResync = 1024;

  static int pick_order(double y) {
    double term = y;  // y^(p+1)/(p+1)! at p = 0
    int p = 0;
    while (term > 1e-18) {
      ++p;
      term *= y / (p + 1);
      if (p > 40)
        throw ConfigError("engine: dt too large for the dissipator increment series");
    }
    return std::max(p, 2);
  }

  /// M_p(delta; eps_k) = delta^{p+1} sum_q z^q / (q! (p+q+1)), z = -i eps delta/hbar.
  Matrix moments(double delta) const {
    const int n = lead_.n_modes();
    Matrix m(n, order_ + 1);
    for (int k = 0; k < n; ++k) {
      const complex z(0.0, -lead_.energies[k] * delta / kHbar);
      for (int p = 0; p <= order_; ++p) {
        complex term(1.0, 0.0);
        complex sum = term / double(p + 1);
        int q = 1;
        for (; q <= 300; ++q) {
          term *= z / double(q);
          const complex add = term / double(p + q + 1);
          sum += add;
          if (std::abs(add) < 1e-20 * std::max(1.0, std::abs(sum))) break;
        }
        if (q > 300)
          throw ConfigError("engine: moment series did not converge; reduce dt");
        m(k, p) = std::pow(delta, p + 1) * sum;
      }
    }
    return m;
  }

  void horner_accumulate(Matrix& s, const Matrix& z, const Vector& coeff,
                         const Vector& row_phase, const Vector& col_phase) {
    buffer_.resize(z.rows(), z.cols());
    buffer_.setConstant(coeff[order_]);
    for (int p = order_ - 1; p >= 0; --p)
      buffer_.array() = buffer_.array() * z.array() + coeff[p];
    s.noalias() += (row_phase * col_phase.adjoint()).cwiseProduct(buffer_);
  }

  void resync_mode_phase() {
    for (int k = 0; k < lead_.n_modes(); ++k)
      mode_phase_[k] = std::polar(1.0, -lead_.energies[k] * time_ / kHbar);
  }

  LeadCorrelation lead_;
  double delta_ = 0.0;
  double time_ = 0.0;
  std::int64_t steps_ = 0;
  int order_ = 0;
  std::vector<Matrix> z_f_, z_ft_;  // Horner arguments per pair block
  std::vector<Matrix> s_f_, s_ft_;  // accumulated integrals per pair block
  Eigen::MatrixXcd wm_f_, wm_ft_;   // weighted moments, (n_modes, P+1)
  Vector mode_phase_;
  Vector mode_step_;
  std::vector<complex> inv_factorial_;
  Matrix buffer_;
};

}  // namespace detail

/// Fixed-step RK4 propagator for the reduced density matrix. The equation of
/// motion conserves the electron-number block structure of rho, so the state
/// is stored as one block per number sector, each in the eigenbasis of the
/// corresponding Hamiltonian block; the dissipator integrals are advanced in
/// closed form on the dt/2 substep grid.
class RedfieldPropagator {
 public:
  RedfieldPropagator(const JunctionModel& model, const FockSpace& space, double dt)
      : space_(space), dt_(dt) {
    if (dt <= 0.0) throw ConfigError("engine: dt must be > 0");
    const ManyBodyOperator h = build_molecular_hamiltonian(model, space);
    const ManyBodyOperator v_l = coupling_operator(space, LeadSide::L);
    const ManyBodyOperator v_r = coupling_operator(space, LeadSide::R);
    const DensityMatrix rho0 = initial_density(model, space);

    // sector index lists
    n_sec_ = space.n_orbitals() + 1;
    sector_index_.resize(n_sec_);
    for (Eigen::Index g = 0; g < space.dim(); ++g)
      sector_index_[space.electron_count(g)].push_back(g);

    // per-sector eigenbases (H is block diagonal; verified below)
    for (int N = 0; N < n_sec_; ++N) {
      const Matrix block = gather(h.matrix, N, N);
      Eigen::SelfAdjointEigenSolver<Matrix> solver(block);
      sector_e_.push_back(solver.eigenvalues());
      sector_u_.push_back(solver.eigenvectors());
      Matrix de(block.rows(), block.rows());
      for (Eigen::Index a = 0; a < block.rows(); ++a)
        for (Eigen::Index b = 0; b < block.rows(); ++b)
          de(a, b) = complex(0.0, -(sector_e_[N][a] - sector_e_[N][b]) / kHbar);
      drift_.push_back(std::move(de));
    }
    double off = 0.0;
    for (int N = 0; N < n_sec_; ++N)
      for (int M = 0; M < n_sec_; ++M)
        if (M != N) off = std::max(off, gather(h.matrix, N, M).cwiseAbs().maxCoeff());
    if (off > 1e-12)
      throw OperatorError("engine: Hamiltonian does not conserve electron number");

    // coupling blocks (N+1 <- N), rotated into the sector eigenbases
    for (int N = 0; N + 1 < n_sec_; ++N) {
      vt_[0].push_back(sector_u_[N + 1].adjoint() * gather(v_l.matrix, N + 1, N) *
                       sector_u_[N]);
      vt_[1].push_back(sector_u_[N + 1].adjoint() * gather(v_r.matrix, N + 1, N) *
                       sector_u_[N]);
    }

    // initial state blocks
    for (int N = 0; N < n_sec_; ++N)
      rho_.push_back(sector_u_[N].adjoint() * gather(rho0.matrix, N, N) * sector_u_[N]);

    // observables: per-orbital occupation and boson number, per sector
    const Eigen::Index nb = space.boson_count();
    for (int i = 0; i < space.n_orbitals(); ++i) {
      RealVector diag(space.dim());
      for (Eigen::Index g = 0; g < space.dim(); ++g) diag[g] = double((g / nb) >> i & 1);
      pop_obs_.push_back(rotate_diag(diag));
    }
    if (space.boson_levels() > 0) {
      RealVector diag(space.dim());
      for (Eigen::Index g = 0; g < space.dim(); ++g) diag[g] = double(g % nb);
      boson_obs_ = rotate_diag(diag);
    }

    // identical leads share one tracker (the integrals do not involve V)
    const double delta = dt_ / 2.0;
    const LeadParams& ll = model.lead_left;
    const LeadParams& lr = model.lead_right;
    const bool shared = ll.mu == lr.mu && ll.gamma == lr.gamma && ll.xi == lr.xi &&
                        ll.n_modes == lr.n_modes;
    tracker_.emplace_back(LeadCorrelation::from_lead(ll, model.kT), sector_e_, delta);
    if (!shared)
      tracker_.emplace_back(LeadCorrelation::from_lead(lr, model.kT), sector_e_, delta);
    tracker_of_lead_[0] = 0;
    tracker_of_lead_[1] = shared ? 0 : 1;

    sector_phase_.resize(n_sec_);
    sector_phase_step_.resize(n_sec_);
    for (int N = 0; N < n_sec_; ++N) {
      sector_phase_[N] = Vector::Ones(sector_e_[N].size());
      sector_phase_step_[N] = Vector(sector_e_[N].size());
      for (Eigen::Index a = 0; a < sector_e_[N].size(); ++a)
        sector_phase_step_[N][a] = std::polar(1.0, -sector_e_[N][a] * delta / kHbar);
    }
    build_dissipator_blocks();
  }

  double time() const { return double(steps_) * dt_; }
  double dt() const { return dt_; }
  const FockSpace& space() const { return space_; }

  /// One RK4 step. Returns the lead currents at the step start time.
  std::pair<double, double> step() {
    const double half = 0.5 * dt_;
    std::vector<Matrix> k1 = rhs_blocks(rho_, &last_currents_);
    advance_substep();
    std::vector<Matrix> work = axpy(rho_, half, k1);
    std::vector<Matrix> k2 = rhs_blocks(work, nullptr);
    work = axpy(rho_, half, k2);
    std::vector<Matrix> k3 = rhs_blocks(work, nullptr);
    advance_substep();
    work = axpy(rho_, dt_, k3);
    std::vector<Matrix> k4 = rhs_blocks(work, nullptr);
    for (int N = 0; N < n_sec_; ++N)
      rho_[N] += (dt_ / 6.0) * (k1[N] + 2.0 * k2[N] + 2.0 * k3[N] + k4[N]);
    ++steps_;
    return last_currents_;
  }

  /// |e tr(N rhs) - (I_L + I_R)| at the current time: the charge-bookkeeping
  /// identity of the equation of motion, which the current formula satisfies
  /// by construction up to rounding.
  double charge_balance_residual() {
    std::pair<double, double> currents{0.0, 0.0};
    const std::vector<Matrix> k = rhs_blocks(rho_, &currents);
    double dq = 0.0;
    for (int N = 0; N < n_sec_; ++N) dq += double(N) * k[N].trace().real();
    return std::abs(dq - (currents.first + currents.second));
  }

  /// Lead currents at the current time without stepping.
  std::pair<double, double> currents() const {
    std::pair<double, double> out{0.0, 0.0};
    for (int lead = 0; lead < 2; ++lead) {
      double s = 0.0;
      for (int N = 0; N + 1 < n_sec_; ++N) {
        const Matrix g = f_blocks_[lead][N] * rho_[N + 1] -
                         rho_[N] * ft_blocks_[lead][N].adjoint();
        s += (g.cwiseProduct(vt_[lead][N].transpose())).sum().real();
      }
      (lead == 0 ? out.first : out.second) = -2.0 * s;
    }
    return out;
  }

  double trace() const {
    double tr = 0.0;
    for (const auto& r : rho_) tr += r.trace().real();
    return tr;
  }

  double hermiticity_error() const {
    double err = 0.0;
    for (const auto& r : rho_) err = std::max(err, (r - r.adjoint()).cwiseAbs().maxCoeff());
    return err;
  }

  double min_eigenvalue() const {
    double lo = 0.0;
    for (const auto& r : rho_) {
      Eigen::SelfAdjointEigenSolver<Matrix> solver(0.5 * (r + r.adjoint()),
                                                   Eigen::EigenvaluesOnly);
      lo = std::min(lo, solver.eigenvalues().minCoeff());
    }
    return lo;
  }

  std::vector<double> orbital_populations() const {
    std::vector<double> out;
    for (const auto& obs : pop_obs_) out.push_back(expectation(obs));
    return out;
  }

  double boson_occupation() const {
    return boson_obs_.empty() ? 0.0 : expectation(boson_obs_);
  }

  /// Dense reconstruction of the current state (diagnostics and tests).
  DensityMatrix density() const {
    Matrix out = Matrix::Zero(space_.dim(), space_.dim());
    for (int N = 0; N < n_sec_; ++N) {
      const Matrix dense = sector_u_[N] * rho_[N] * sector_u_[N].adjoint();
      scatter(out, dense, N, N);
    }
    return {std::move(out), time()};
  }

  /// Dense reconstruction of the tracked dissipators (tests).
  DissipatorSet dissipator_set() const {
    DissipatorSet set;
    set.time = time();
    for (int lead = 0; lead < 2; ++lead) {
      Matrix f = Matrix::Zero(space_.dim(), space_.dim());
      Matrix ft = Matrix::Zero(space_.dim(), space_.dim());
      for (int N = 0; N + 1 < n_sec_; ++N) {
        scatter(f, sector_u_[N] * f_blocks_[lead][N] * sector_u_[N + 1].adjoint(), N, N + 1);
        scatter(ft, sector_u_[N + 1] * ft_blocks_[lead][N] * sector_u_[N].adjoint(), N + 1, N);
      }
      DissipatorPair& pair = lead == 0 ? set.left : set.right;
      pair.F = {std::move(f), space_.tag()};
      pair.Ft = {std::move(ft), space_.tag()};
      pair.time = set.time;
    }
    return set;
  }

 private:
  Matrix gather(const Matrix& m, int row_sector, int col_sector) const {
    const auto& ri = sector_index_[row_sector];
    const auto& ci = sector_index_[col_sector];
    Matrix out(ri.size(), ci.size());
    for (std::size_t a = 0; a < ri.size(); ++a)
      for (std::size_t b = 0; b < ci.size(); ++b) out(a, b) = m(ri[a], ci[b]);
    return out;
  }

  void scatter(Matrix& m, const Matrix& block, int row_sector, int col_sector) const {
    const auto& ri = sector_index_[row_sector];
    const auto& ci = sector_index_[col_sector];
    for (std::size_t a = 0; a < ri.size(); ++a)
      for (std::size_t b = 0; b < ci.size(); ++b) m(ri[a], ci[b]) = block(a, b);
  }

  std::vector<Matrix> rotate_diag(const RealVector& diag) const {
    std::vector<Matrix> out;
    for (int N = 0; N < n_sec_; ++N) {
      const auto& ix = sector_index_[N];
      Matrix d = Matrix::Zero(ix.size(), ix.size());
      for (std::size_t a = 0; a < ix.size(); ++a) d(a, a) = diag[ix[a]];
      out.push_back(sector_u_[N].adjoint() * d * sector_u_[N]);
    }
    return out;
  }

  double expectation(const std::vector<Matrix>& obs) const {
    double s = 0.0;
    for (int N = 0; N < n_sec_; ++N)
      s += rho_[N].cwiseProduct(obs[N].transpose()).sum().real();
    return s;
  }

  /// F = (V~^+ ∘ S_emission) on (N, N+1); Ft = (V~ ∘ S_absorption) on (N+1, N).
  void build_dissipator_blocks() {
    for (int lead = 0; lead < 2; ++lead) {
      const detail::DissipatorTracker& trk = tracker_[tracker_of_lead_[lead]];
      f_blocks_[lead].clear();
      ft_blocks_[lead].clear();
      for (int N = 0; N + 1 < n_sec_; ++N) {
        f_blocks_[lead].push_back(
            vt_[lead][N].adjoint().cwiseProduct(trk.s_emission(N)));
        ft_blocks_[lead].push_back(vt_[lead][N].cwiseProduct(trk.s_absorption(N)));
      }
    }
  }

  void advance_substep() {
    for (auto& trk : tracker_) trk.advance(sector_phase_);
    for (int N = 0; N < n_sec_; ++N)
      sector_phase_[N].array() *= sector_phase_step_[N].array();
    ++substeps_;
    if (substeps_ % 1024 == 0) {
      const double t = tracker_[0].time();
      for (int N = 0; N < n_sec_; ++N)
        for (Eigen::Index a = 0; a < sector_e_[N].size(); ++a)
          sector_phase_[N][a] = std::polar(1.0, -sector_e_[N][a] * t / kHbar);
    }
    build_dissipator_blocks();
  }

  std::vector<Matrix> rhs_blocks(const std::vector<Matrix>& rho,
                                 std::pair<double, double>* currents_out) {
    std::vector<Matrix> out(n_sec_);
    for (int N = 0; N < n_sec_; ++N)
      out[N] = drift_[N].cwiseProduct(rho[N]);
    for (int lead = 0; lead < 2; ++lead) {
      double isum = 0.0;
      g_work_.resize(n_sec_ - 1);
      for (int N = 0; N + 1 < n_sec_; ++N) {
        g_work_[N].noalias() = f_blocks_[lead][N] * rho[N + 1];
        g_work_[N].noalias() -= rho[N] * ft_blocks_[lead][N].adjoint();
        if (currents_out)
          isum += (g_work_[N].cwiseProduct(vt_[lead][N].transpose())).sum().real();
      }
      for (int N = 0; N < n_sec_; ++N) {
        acc_work_.resize(rho[N].rows(), rho[N].cols());
        acc_work_.setZero();
        bool any = false;
        if (N + 1 < n_sec_) {
          acc_work_.noalias() += g_work_[N] * vt_[lead][N];
          any = true;
        }
        if (N > 0) {
          acc_work_.noalias() -= vt_[lead][N - 1] * g_work_[N - 1];
          any = true;
        }
        if (any) out[N] += acc_work_ + acc_work_.adjoint();
      }
      if (currents_out)
        (lead == 0 ? currents_out->first : currents_out->second) = -2.0 * isum;
    }
    return out;
  }

  static std::vector<Matrix> axpy(const std::vector<Matrix>& base, double a,
                                  const std::vector<Matrix>& dir) {
    std::vector<Matrix> out(base.size());
    for (std::size_t i = 0; i < base.size(); ++i) out[i] = base[i] + a * dir[i];
    return out;
  }

  FockSpace space_;
  double dt_;
  int n_sec_ = 0;
  std::int64_t steps_ = 0;
  std::int64_t substeps_ = 0;
  std::vector<std::vector<Eigen::Index>> sector_index_;
  std::vector<RealVector> sector_e_;
  std::vector<Matrix> sector_u_;
  std::vector<Matrix> drift_;
  std::vector<Matrix> vt_[2];
  std::vector<Matrix> rho_;
  std::vector<std::vector<Matrix>> pop_obs_;
  std::vector<Matrix> boson_obs_;
  std::vector<detail::DissipatorTracker> tracker_;
  int tracker_of_lead_[2] = {0, 0};
  std::vector<Vector> sector_phase_;
  std::vector<Vector> sector_phase_step_;
  std::vector<Matrix> f_blocks_[2];
  std::vector<Matrix> ft_blocks_[2];
  std::vector<Matrix> g_work_;
  Matrix acc_work_;
  std::pair<double, double> last_currents_{0.0, 0.0};
};

namespace detail {

inline void record_sample(const RedfieldPropagator& prop, TransientRecord& rec,
                          double* last_min_eig, int min_eig_stride) {
  const auto [il, ir] = prop.currents();
  rec.times.push_back(prop.time());
  rec.current_left.push_back(il);
  rec.current_right.push_back(ir);
  const std::vector<double> pops = prop.orbital_populations();
  if (rec.populations.empty()) rec.populations.resize(pops.size());
  for (std::size_t i = 0; i < pops.size(); ++i) rec.populations[i].push_back(pops[i]);
  if (prop.space().boson_levels() > 0)
    rec.boson_occupation.push_back(prop.boson_occupation());
  rec.trace_error.push_back(std::abs(prop.trace() - 1.0));
  if (min_eig_stride > 0 &&
      (rec.times.size() - 1) % static_cast<std::size_t>(min_eig_stride) == 0)
    *last_min_eig = prop.min_eigenvalue();
  rec.min_eigenvalue.push_back(*last_min_eig);
}

inline void check_stability(const RedfieldPropagator& prop, std::int64_t step,
                            const PropagationSettings& s) {
  const double tr_err = std::abs(prop.trace() - 1.0);
  if (tr_err > s.trace_tol)
    throw NumericalInstabilityError(
        "propagation unstable at step " + std::to_string(step) + " (t = " +
        std::to_string(prop.time()) + " fs): trace drift " + std::to_string(tr_err));
  const double h_err = prop.hermiticity_error();
  if (h_err > s.herm_tol)
    throw NumericalInstabilityError(
        "propagation unstable at step " + std::to_string(step) + " (t = " +
        std::to_string(prop.time()) + " fs): Hermiticity drift " + std::to_string(h_err));
}

}  // namespace detail

/// Fixed-window propagation: RK4 from 0 to t_final with dissipators advanced
/// on the substep grid; currents and populations recorded every record_every
/// steps. Throws NumericalInstabilityError naming the step when the trace or
/// Hermiticity drift exceeds its threshold.
inline TransientRecord propagate(const JunctionModel& model, const FockSpace& space,
                                 const PropagationSettings& settings) {
  const double dt = settings.resolve_dt(model);
  if (settings.t_final < dt)
    throw ConfigError("engine: t_final must be at least one step");
  RedfieldPropagator prop(model, space, dt);
  const std::int64_t n_steps = std::llround(settings.t_final / dt);
  TransientRecord rec;
  double last_min_eig = 0.0;
  for (std::int64_t n = 0; n < n_steps; ++n) {
    if (n % settings.record_every == 0)
      detail::record_sample(prop, rec, &last_min_eig, settings.min_eig_stride);
    prop.step();
    detail::check_stability(prop, n + 1, settings);
  }
  detail::record_sample(prop, rec, &last_min_eig, settings.min_eig_stride);
  const AccumulatedCharge q = accumulate_charge(rec, settings.decay_floor);
  rec.Q_left = q.Q_left;
  rec.Q_right = q.Q_right;
  rec.decay_floor_met = q.decay_floor_met;
  return rec;
}

/// Decay-floor-driven propagation: runs until max(|I_L|, |I_R|) over the
/// trailing chunk falls below decay_floor times the running peak (or the cap
/// is reached). Used when the configured t_final is not positive.
inline TransientRecord propagate_auto(const JunctionModel& model, const FockSpace& space,
                                      const PropagationSettings& settings) {
  const double dt = settings.resolve_dt(model);
  RedfieldPropagator prop(model, space, dt);
  TransientRecord rec;
  double last_min_eig = 0.0;
  double peak = 0.0;
  const std::int64_t chunk = 512;
  const std::int64_t cap_steps = std::llround(settings.t_cap / dt);
  const std::int64_t min_steps = std::llround(settings.t_min / dt);
  std::int64_t n = 0;
  bool floor_met = false;
  while (n < cap_steps && !floor_met) {
    double chunk_tail = 0.0;
    for (std::int64_t i = 0; i < chunk && n < cap_steps; ++i, ++n) {
      if (n % settings.record_every == 0)
        detail::record_sample(prop, rec, &last_min_eig, settings.min_eig_stride);
      const auto [il, ir] = prop.step();
      const double mag = std::max(std::abs(il), std::abs(ir));
      peak = std::max(peak, mag);
      chunk_tail = std::max(chunk_tail, mag);
      detail::check_stability(prop, n + 1, settings);
    }
    floor_met = n >= min_steps && chunk_tail <= settings.decay_floor * peak && peak > 0.0;
  }
  detail::record_sample(prop, rec, &last_min_eig, settings.min_eig_stride);
  const AccumulatedCharge q = accumulate_charge(rec, settings.decay_floor);
  rec.Q_left = q.Q_left;
  rec.Q_right = q.Q_right;
  rec.decay_floor_met = floor_met && q.decay_floor_met;
  return rec;
}

}  // namespace molpump
