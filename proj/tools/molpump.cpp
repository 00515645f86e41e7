// Copyright 2026 The molpump Authors
// SPDX-License-Identifier: Apache-2.0

// Command-line front end: single transient runs, the two parameter sweeps
// and the exact-dynamics cross-check, all driven by flat key/value config
// files and emitting CSV with a resolved-config comment header.

#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "molpump/config.hpp"
#include "molpump/engine.hpp"
#include "molpump/io.hpp"
#include "molpump/oracle.hpp"
#include "molpump/sweep.hpp"

namespace {

using namespace molpump;

std::string read_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open config file '" + path + "'");
  std::ostringstream os;
  os << is.rdbuf();
  return os.str();
}

RunConfig load_config(const std::string& path, const std::string& out_flag,
                      const std::string& default_out) {
  RunConfig cfg = parse_config(read_file(path));
  if (!out_flag.empty()) cfg.out = out_flag;
  if (cfg.out.empty()) cfg.out = default_out;
  return cfg;
}

int do_run(const std::string& config_path, const std::string& out_flag) {
  const RunConfig cfg = load_config(config_path, out_flag, "run.csv");
  require_writable(cfg.out);
  const JunctionModel model = cfg.to_model();
  const FockSpace space = model.make_space();
  PropagationSettings settings = cfg.settings();
  TransientRecord rec;
  if (settings.t_final > 0.0) {
    rec = propagate(model, space, settings);
  } else {
    rec = propagate_auto(model, space, settings);
  }
  atomic_write_text(cfg.out, timeseries_csv(rec, space, cfg.serialize()));

  double max_trace = 0.0, min_eig = 0.0;
  for (double e : rec.trace_error) max_trace = std::max(max_trace, e);
  for (double e : rec.min_eigenvalue) min_eig = std::min(min_eig, e);
  std::printf("run: %zu samples to t = %.6g fs -> %s\n", rec.size(), rec.times.back(),
              cfg.out.c_str());
  std::printf("run: Q_L = %.6g e, Q_R = %.6g e, decay_floor_met = %d\n", rec.Q_left,
              rec.Q_right, rec.decay_floor_met ? 1 : 0);
  std::printf("run: max trace drift = %.3g, min rho eigenvalue = %.3g\n", max_trace,
              min_eig);
  if (min_eig < -1e-3)
    std::printf("run: warning: transient positivity violation beyond 1e-3\n");
  const bool ok = max_trace < 1e-8 && (settings.t_final > 0.0 || rec.decay_floor_met);
  return ok ? 0 : 1;
}

int do_sweep(const std::string& config_path, const std::string& out_flag, int jobs,
             SweepParameter parameter) {
  const bool bridge = parameter == SweepParameter::bridge_lumo_energy;
  const RunConfig cfg = load_config(config_path, out_flag,
                                    bridge ? "sweep_bridge.csv" : "sweep_delta.csv");
  require_writable(cfg.out);
  const SweepPlan plan = bridge ? SweepPlan::bridge(cfg, jobs) : SweepPlan::delta(cfg, jobs);
  const SweepResult result = run_sweep(plan);
  atomic_write_text(cfg.out,
                    sweep_csv(result, bridge ? "eps_B_LUMO" : "delta", cfg.serialize()));
  int failed = 0;
  for (const auto& pt : result.points) {
    std::printf("%s = %.4f: Q_L = %+.5f, Q_R = %+.5f%s%s\n",
                bridge ? "eps_B_LUMO" : "delta", pt.value, pt.q_left, pt.q_right,
                pt.converged ? "" : " [unconverged]", pt.failed ? " [FAILED]" : "");
    if (pt.failed) {
      std::printf("  %s\n", pt.message.c_str());
      ++failed;
    }
  }
  std::printf("sweep: %zu points -> %s\n", result.points.size(), cfg.out.c_str());
  if (failed) std::printf("sweep: %d point(s) failed\n", failed);
  return result.any_failed ? 1 : 0;
}

int do_oracle_check(const std::string& config_path, const std::string& out_flag,
                    double tol) {
  const RunConfig cfg = load_config(config_path, out_flag, "oracle_check.csv");
  require_writable(cfg.out);
  const JunctionModel model = cfg.to_model();
  const FockSpace space = model.make_space();
  const OracleComparison cmp = oracle_compare(model, space, cfg.settings());

  std::ostringstream os;
  os << detail::comment_block(cfg.serialize());
  os << "# window = " << cmp.window << " fs\n";
  os << "# redfield: Q_L = " << cmp.q_left_redfield << ", Q_R = " << cmp.q_right_redfield
     << "\n";
  os << "# exact:    Q_L = " << cmp.q_left_exact << ", Q_R = " << cmp.q_right_exact << "\n";
  os << "# rel_err:  L = " << cmp.rel_err_left << ", R = " << cmp.rel_err_right
     << " (tolerance " << tol << ")\n";
  os << "t_fs,I_L_redfield,I_R_redfield,I_L_exact,I_R_exact\n";
  for (std::size_t i = 0; i < cmp.times.size(); ++i)
    os << cmp.times[i] << ',' << cmp.i_left_redfield[i] << ',' << cmp.i_right_redfield[i]
       << ',' << cmp.i_left_exact[i] << ',' << cmp.i_right_exact[i] << "\n";
  atomic_write_text(cfg.out, os.str());

  const bool pass = cmp.rel_err_left <= tol && cmp.rel_err_right <= tol;
  std::printf("oracle-check: window %.6g fs, Q_L %.6g vs %.6g, Q_R %.6g vs %.6g\n",
              cmp.window, cmp.q_left_redfield, cmp.q_left_exact, cmp.q_right_redfield,
              cmp.q_right_exact);
  std::printf("oracle-check: rel err L = %.3g, R = %.3g -> %s\n", cmp.rel_err_left,
              cmp.rel_err_right, pass ? "PASS" : "FAIL");
  return pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Transient electron-pumping simulator for DBA molecular junctions"};
  app.require_subcommand(1);

  std::string config_path, out_path;
  int jobs = static_cast<int>(std::thread::hardware_concurrency());
  if (jobs < 1) jobs = 1;
  double tol = 0.15;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "flat key/value config file")->required();
    sub->add_option("--out", out_path, "output CSV path (overrides config 'out')");
  };

  CLI::App* run = app.add_subcommand("run", "single transient propagation");
  add_common(run);
  CLI::App* sb = app.add_subcommand("sweep-bridge", "scan the bridge LUMO energy");
  add_common(sb);
  sb->add_option("--jobs", jobs, "parallel sweep workers");
  CLI::App* sd = app.add_subcommand("sweep-delta", "scan the bridge reorganization energy");
  add_common(sd);
  sd->add_option("--jobs", jobs, "parallel sweep workers");
  CLI::App* oc = app.add_subcommand("oracle-check",
                                    "compare Redfield against exact dynamics");
  add_common(oc);
  oc->add_option("--tol", tol, "relative tolerance on Q agreement");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return do_run(config_path, out_path);
    if (sb->parsed())
      return do_sweep(config_path, out_path, jobs, SweepParameter::bridge_lumo_energy);
    if (sd->parsed())
      return do_sweep(config_path, out_path, jobs, SweepParameter::reorganization_energy);
    if (oc->parsed()) return do_oracle_check(config_path, out_path, tol);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 2;
}
