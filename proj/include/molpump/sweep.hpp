// Copyright 2026 The molpump Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <string>
#include <thread>
#include <vector>

#include "molpump/config.hpp"
#include "molpump/engine.hpp"
#include "molpump/io.hpp"
#include "molpump/observables.hpp"

namespace molpump {

enum class SweepParameter {
  bridge_lumo_energy,    // eps.B.LUMO (eV)
  reorganization_energy  // Delta (eV), lambda recomputed per point
};

struct SweepPlan {
  RunConfig base;
  SweepParameter parameter = SweepParameter::bridge_lumo_energy;
  std::vector<double> grid;
  int jobs = 2;

  static std::vector<double> make_grid(double lo, double hi, double step) {
    std::vector<double> g;
    for (int i = 0;; ++i) {
      const double v = lo + i * step;
      if (v > hi + 0.5 * step) break;
      g.push_back(v);
    }
    return g;
  }

  /// Bridge-LUMO energy scan, default grid 0.02 .. 0.20 step 0.01.
  static SweepPlan bridge(RunConfig base, int jobs) {
    SweepPlan p;
    p.base = std::move(base);
    p.parameter = SweepParameter::bridge_lumo_energy;
    p.grid = make_grid(0.02, 0.20, 0.01);
    p.jobs = jobs;
    return p;
  }

  /// Reorganization-energy scan, default grid 0.00 .. 0.16 step 0.005.
  static SweepPlan delta(RunConfig base, int jobs) {
    SweepPlan p;
    p.base = std::move(base);
    p.parameter = SweepParameter::reorganization_energy;
    p.grid = make_grid(0.0, 0.16, 0.005);
    p.jobs = jobs;
    return p;
  }

  void validate() const {
    if (grid.empty()) throw ConfigError("sweep: empty grid");
    for (std::size_t i = 1; i < grid.size(); ++i)
      if (grid[i] <= grid[i - 1])
        throw ConfigError("sweep: grid values must be strictly increasing");
    if (parameter == SweepParameter::reorganization_energy && !base.omega)
      throw ConfigError("sweep: reorganization sweep requires a vibronic model (omega)");
    if (jobs < 1) throw ConfigError("sweep: jobs must be >= 1");
  }

  RunConfig config_at(double value) const {
    RunConfig c = base;
    if (parameter == SweepParameter::bridge_lumo_energy)
      c.eps[{Site::B, Level::LUMO}] = value;
    else
      c.delta = value;
    return c;
  }

  /// Auto-window cap: 50x the characteristic tunneling period of the point,
  /// clamped to a sane range (the decay floor is the actual stop rule).
  double window_cap(double value) const {
    double period = 0.0;
    const RunConfig c = config_at(value);
    const double eps_d = c.eps.count({Site::D, Level::LUMO})
                             ? c.eps.at({Site::D, Level::LUMO})
                             : 0.0;
    const double eps_b = c.eps.count({Site::B, Level::LUMO})
                             ? c.eps.at({Site::B, Level::LUMO})
                             : 0.0;
    if (parameter == SweepParameter::bridge_lumo_energy) {
      const double gap = std::abs(eps_b - eps_d);
      period = gap > 0.0 ? mcconnell_period(c.beta, gap) : 0.0;
    } else {
      const double detune = std::abs(eps_b - *c.delta);
      if (detune > 1e-9)
        period = 2.0 * kPi / vibronic_mcconnell_frequency(c.beta, eps_b, *c.delta, *c.omega);
    }
    // lower clamp covers near-resonant points where the formula period
    // collapses; the decay floor stops well-behaved runs much earlier
    return std::clamp(50.0 * period, 8000.0, 50000.0);
  }
};

struct SweepPoint {
  double value = 0.0;
  double q_left = 0.0;
  double q_right = 0.0;
  bool decay_floor_met = false;
  bool converged = false;
  bool failed = false;
  double max_trace_error = 0.0;
  double min_eigenvalue = 0.0;
  std::string message;
};

struct SweepResult {
  std::vector<SweepPoint> points;
  bool any_failed = false;
};

inline SweepPoint run_sweep_point(const SweepPlan& plan, double value) {
  SweepPoint pt;
  pt.value = value;
  try {
    const RunConfig cfg = plan.config_at(value);
    const JunctionModel model = cfg.to_model();
    const FockSpace space = model.make_space();
    PropagationSettings settings = cfg.settings();
    TransientRecord rec;
    if (settings.t_final > 0.0) {
      rec = propagate(model, space, settings);
    } else {
      settings.t_cap = plan.window_cap(value);
      rec = propagate_auto(model, space, settings);
    }
    pt.q_left = rec.Q_left;
    pt.q_right = rec.Q_right;
    pt.decay_floor_met = rec.decay_floor_met;
    pt.max_trace_error = *std::max_element(rec.trace_error.begin(), rec.trace_error.end());
    pt.min_eigenvalue = *std::min_element(rec.min_eigenvalue.begin(),
                                          rec.min_eigenvalue.end());
    pt.converged = pt.decay_floor_met && pt.max_trace_error < 1e-8 &&
                   pt.min_eigenvalue > -1e-3;
  } catch (const std::exception& e) {
    pt.failed = true;
    pt.message = e.what();
  }
  return pt;
}

/// Runs one propagation per grid point on a small worker pool. Points are
/// independent; results are ordered by parameter value regardless of the
/// execution schedule. Failed points are marked and do not stop the sweep.
inline SweepResult run_sweep(const SweepPlan& plan) {
  plan.validate();
  SweepResult result;
  result.points.resize(plan.grid.size());
  std::atomic<std::size_t> next{0};
  const int workers = std::min<std::size_t>(plan.jobs, plan.grid.size());
  auto work = [&]() {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= plan.grid.size()) return;
      result.points[i] = run_sweep_point(plan, plan.grid[i]);
    }
  };
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  for (const auto& pt : result.points) result.any_failed = result.any_failed || pt.failed;
  return result;
}

/// Reruns one grid point with dt/2, with doubled n_modes and (for vibronic
/// models) with n_vib + 5, all over the same fixed window, and reports the
/// relative change of the accumulated charges. Passes when every change is
/// below 1%.
struct AuditReport {
  double value = 0.0;
  double window = 0.0;
  double q_left_base = 0.0, q_right_base = 0.0;
  double delta_dt = 0.0;      // max rel change on dt halving
  double delta_modes = 0.0;   // max rel change on n_modes doubling
  double delta_vib = 0.0;     // max rel change on n_vib + 5 (0 if no mode)
  bool pass = false;

  double worst() const { return std::max({delta_dt, delta_modes, delta_vib}); }
};

inline AuditReport convergence_audit(const SweepPlan& plan, double value,
                                     double tolerance = 1e-2) {
  AuditReport report;
  report.value = value;
  RunConfig base_cfg = plan.config_at(value);

  auto run_fixed = [](const RunConfig& cfg, double t_final) {
    const JunctionModel model = cfg.to_model();
    const FockSpace space = model.make_space();
    PropagationSettings s = cfg.settings();
    s.t_final = t_final;
    return propagate(model, space, s);
  };

  // base run decides the window (decay floor), variants reuse it
  double window = base_cfg.t_final;
  if (window <= 0.0) {
    const JunctionModel model = base_cfg.to_model();
    const FockSpace space = model.make_space();
    PropagationSettings s = base_cfg.settings();
    s.t_cap = plan.window_cap(value);
    const TransientRecord rec = propagate_auto(model, space, s);
    window = rec.times.back();
    report.q_left_base = rec.Q_left;
    report.q_right_base = rec.Q_right;
  } else {
    const TransientRecord rec = run_fixed(base_cfg, window);
    report.q_left_base = rec.Q_left;
    report.q_right_base = rec.Q_right;
  }
  report.window = window;

  const double denom = std::max({std::abs(report.q_left_base),
                                 std::abs(report.q_right_base), 1e-12});
  auto rel_change = [&](const TransientRecord& rec) {
    return std::max(std::abs(rec.Q_left - report.q_left_base),
                    std::abs(rec.Q_right - report.q_right_base)) /
           denom;
  };

  RunConfig c = base_cfg;
  c.dt = c.settings().resolve_dt(base_cfg.to_model()) / 2.0;
  report.delta_dt = rel_change(run_fixed(c, window));

  c = base_cfg;
  c.n_modes *= 2;
  report.delta_modes = rel_change(run_fixed(c, window));

  if (base_cfg.omega) {
    c = base_cfg;
    c.n_vib += 5;
    report.delta_vib = rel_change(run_fixed(c, window));
  }
  report.pass = report.worst() < tolerance;
  return report;
}

/// Sweep CSV: param, Q_L, Q_R, decay_floor_met, converged.
inline std::string sweep_csv(const SweepResult& result, const std::string& param_name,
                             const std::string& resolved_config) {
  std::ostringstream os;
  os << detail::comment_block(resolved_config);
  os << param_name << ",Q_L,Q_R,decay_floor_met,converged\n";
  os.precision(12);
  for (const auto& pt : result.points) {
    os << pt.value << ',' << pt.q_left << ',' << pt.q_right << ','
       << (pt.decay_floor_met ? 1 : 0) << ',' << (pt.converged ? 1 : 0) << "\n";
    if (pt.failed) os << "# point " << pt.value << " failed: " << pt.message << "\n";
  }
  return os.str();
}

}  // namespace molpump
