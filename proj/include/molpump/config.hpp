// Copyright 2026 The molpump Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "molpump/engine.hpp"
#include "molpump/model.hpp"

namespace molpump {

/// Declarative run configuration. Flat key/value schema, one `key = value`
/// per line, `#` comments. Keys:
///   preset, eps.<site>.<level>, beta, mu.L, mu.R, xi.L, xi.R, gamma.L,
///   gamma.R, kT, omega, delta, n_modes, n_vib, t_final, dt, record_every,
///   out
/// with <site> in {D, B, A} and <level> in {HOMO, LUMO}. `preset = fig2` or
/// `fig4` loads the bundled parameter sets; explicit keys override preset
/// values. The orbital register is exactly the set of eps.* keys; the
/// initial state is the sudden donor excitation (D.HOMO hole, D.LUMO
/// electron, every other HOMO filled, every other LUMO empty).
struct RunConfig {
  std::string preset;
  std::map<OrbitalId, double> eps;
  double beta = 0.0;
  double mu_left = 0.0, mu_right = 0.0;
  double xi_left = 0.0, xi_right = 0.0;
  double gamma_left = 0.0, gamma_right = 0.0;
  double kT = 0.0;
  std::optional<double> omega;
  std::optional<double> delta;
  int n_modes = 6400;
  int n_vib = 0;
  double t_final = 0.0;  // <= 0: decay-floor auto window
  double dt = 0.0;       // <= 0: 0.25 hbar / |gamma|
  int record_every = 2;
  std::string out;

  JunctionModel to_model() const {
    JunctionModel m;
    m.orbital_energies = eps;
    m.beta = beta;
    m.lead_left = {mu_left, gamma_left, xi_left, n_modes};
    m.lead_right = {mu_right, gamma_right, xi_right, n_modes};
    m.kT = kT;
    if (omega || delta) {
      if (!(omega && delta))
        throw ConfigError("config: omega and delta must be given together");
      m.vibronic = VibronicParams::from_reorganization(*delta, *omega, n_vib);
    }
    for (const auto& [orb, e] : eps) {
      const bool donor = orb.site == Site::D;
      const bool homo = orb.level == Level::HOMO;
      m.initial_occupations[orb] = donor ? (homo ? 0 : 1) : (homo ? 1 : 0);
    }
    return m;
  }

  PropagationSettings settings() const {
    PropagationSettings s;
    s.t_final = t_final;
    s.dt = dt;
    s.record_every = record_every;
    return s;
  }

  std::string serialize() const {
    std::ostringstream os;
    os.precision(17);
    if (!preset.empty()) os << "preset = " << preset << "\n";
    for (const auto& [orb, e] : eps) os << "eps." << to_string(orb) << " = " << e << "\n";
    os << "beta = " << beta << "\n";
    os << "mu.L = " << mu_left << "\n";
    os << "mu.R = " << mu_right << "\n";
    os << "xi.L = " << xi_left << "\n";
    os << "xi.R = " << xi_right << "\n";
    os << "gamma.L = " << gamma_left << "\n";
    os << "gamma.R = " << gamma_right << "\n";
    os << "kT = " << kT << "\n";
    if (omega) os << "omega = " << *omega << "\n";
    if (delta) os << "delta = " << *delta << "\n";
    os << "n_modes = " << n_modes << "\n";
    os << "n_vib = " << n_vib << "\n";
    os << "t_final = " << t_final << "\n";
    os << "dt = " << dt << "\n";
    os << "record_every = " << record_every << "\n";
    if (!out.empty()) os << "out = " << out << "\n";
    return os.str();
  }
};

namespace detail {

inline std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

inline OrbitalId parse_orbital_key(const std::string& key, int line) {
  // key = eps.<site>.<level>
  const std::string rest = key.substr(4);
  const std::size_t dot = rest.find('.');
  if (dot == std::string::npos)
    throw ConfigError("config line " + std::to_string(line) +
                      ": malformed orbital key '" + key + "'");
  const std::string site = rest.substr(0, dot);
  const std::string level = rest.substr(dot + 1);
  OrbitalId orb{};
  if (site == "D") orb.site = Site::D;
  else if (site == "B") orb.site = Site::B;
  else if (site == "A") orb.site = Site::A;
  else
    throw ConfigError("config line " + std::to_string(line) + ": unknown site '" +
                      site + "' (expected D, B or A)");
  if (level == "HOMO") orb.level = Level::HOMO;
  else if (level == "LUMO") orb.level = Level::LUMO;
  else
    throw ConfigError("config line " + std::to_string(line) + ": unknown level '" +
                      level + "' (expected HOMO or LUMO)");
  return orb;
}

inline double parse_number(const std::string& value, const std::string& key, int line) {
  char* end = nullptr;
  const double v = std::strtod(value.c_str(), &end);
  if (end == value.c_str() || *end != '\0')
    throw ConfigError("config line " + std::to_string(line) + ": value '" + value +
                      "' for key '" + key + "' is not a number");
  return v;
}

inline int parse_int(const std::string& value, const std::string& key, int line) {
  const double v = parse_number(value, key, line);
  const int i = static_cast<int>(v);
  if (double(i) != v)
    throw ConfigError("config line " + std::to_string(line) + ": value '" + value +
                      "' for key '" + key + "' is not an integer");
  return i;
}

}  // namespace detail

/// Bundled parameter sets (model energies, couplings and run defaults).
inline RunConfig preset_config(const std::string& name) {
  RunConfig c;
  c.preset = name;
  c.beta = -0.01;
  c.mu_left = c.mu_right = -0.2;
  c.xi_left = c.xi_right = -0.03;
  c.gamma_left = c.gamma_right = -1.0;
  c.kT = 0.001;
  c.n_modes = 6400;
  c.record_every = 2;
  if (name == "fig2") {
    c.eps[{Site::D, Level::HOMO}] = -0.3;
    c.eps[{Site::B, Level::HOMO}] = -0.6;
    c.eps[{Site::A, Level::HOMO}] = -0.25;
    c.eps[{Site::D, Level::LUMO}] = 0.0;
    c.eps[{Site::B, Level::LUMO}] = 0.05;
    c.eps[{Site::A, Level::LUMO}] = 0.0;
    c.n_vib = 0;
  } else if (name == "fig4") {
    c.eps[{Site::D, Level::HOMO}] = -0.3;
    c.eps[{Site::D, Level::LUMO}] = 0.0;
    c.eps[{Site::B, Level::LUMO}] = 0.05;
    c.eps[{Site::A, Level::LUMO}] = 0.0;
    c.omega = 0.06;
    c.delta = 0.05;
    c.n_vib = 15;
  } else {
    throw ConfigError("config: unknown preset '" + name + "' (expected fig2 or fig4)");
  }
  return c;
}

/// Parses the flat key/value document. Unknown keys, non-numeric values and
/// (without a preset) missing required keys are errors.
inline RunConfig parse_config(std::string_view text) {
  struct Entry {
    std::string key, value;
    int line;
  };
  std::vector<Entry> entries;
  std::string preset_name;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t eol = text.find('\n', pos);
    std::string_view raw = text.substr(pos, eol == std::string_view::npos
                                                ? std::string_view::npos
                                                : eol - pos);
    pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
    ++line_no;
    const std::size_t hash = raw.find('#');
    if (hash != std::string_view::npos) raw = raw.substr(0, hash);
    const std::string line = detail::trim(raw);
    if (line.empty()) continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(line_no) +
                        ": expected 'key = value'");
    Entry e{detail::trim(line.substr(0, eq)), detail::trim(line.substr(eq + 1)), line_no};
    if (e.key.empty() || e.value.empty())
      throw ConfigError("config line " + std::to_string(line_no) +
                        ": expected 'key = value'");
    if (e.key == "preset") preset_name = e.value;
    entries.push_back(std::move(e));
  }

  RunConfig cfg;
  std::set<std::string> given;
  if (!preset_name.empty()) cfg = preset_config(preset_name);

  for (const Entry& e : entries) {
    given.insert(e.key);
    if (e.key == "preset") continue;
    else if (e.key.rfind("eps.", 0) == 0)
      cfg.eps[detail::parse_orbital_key(e.key, e.line)] =
          detail::parse_number(e.value, e.key, e.line);
    else if (e.key == "beta") cfg.beta = detail::parse_number(e.value, e.key, e.line);
    else if (e.key == "mu.L") cfg.mu_left = detail::parse_number(e.value, e.key, e.line);
    else if (e.key == "mu.R") cfg.mu_right = detail::parse_number(e.value, e.key, e.line);
    else if (e.key == "xi.L") cfg.xi_left = detail::parse_number(e.value, e.key, e.line);
    else if (e.key == "xi.R") cfg.xi_right = detail::parse_number(e.value, e.key, e.line);
    else if (e.key == "gamma.L") cfg.gamma_left = detail::parse_number(e.value, e.key, e.line);
    else if (e.key == "gamma.R") cfg.gamma_right = detail::parse_number(e.value, e.key, e.line);
    else if (e.key == "kT") cfg.kT = detail::parse_number(e.value, e.key, e.line);
    else if (e.key == "omega") cfg.omega = detail::parse_number(e.value, e.key, e.line);
    else if (e.key == "delta") cfg.delta = detail::parse_number(e.value, e.key, e.line);
    else if (e.key == "n_modes") cfg.n_modes = detail::parse_int(e.value, e.key, e.line);
    else if (e.key == "n_vib") cfg.n_vib = detail::parse_int(e.value, e.key, e.line);
    else if (e.key == "t_final") cfg.t_final = detail::parse_number(e.value, e.key, e.line);
    else if (e.key == "dt") cfg.dt = detail::parse_number(e.value, e.key, e.line);
    else if (e.key == "record_every")
      cfg.record_every = detail::parse_int(e.value, e.key, e.line);
    else if (e.key == "out") cfg.out = e.value;
    else
      throw ConfigError("config line " + std::to_string(e.line) + ": unknown key '" +
                        e.key + "'");
  }

  if (preset_name.empty()) {
    std::vector<std::string> missing;
    for (const char* k : {"beta", "mu.L", "mu.R", "xi.L", "xi.R", "gamma.L", "gamma.R",
                          "kT"})
      if (!given.count(k)) missing.push_back(k);
    bool has_d = false, has_a = false;
    for (const auto& [orb, e] : cfg.eps) {
      has_d = has_d || orb.site == Site::D;
      has_a = has_a || orb.site == Site::A;
    }
    if (!has_d) missing.push_back("eps.D.<level>");
    if (!has_a) missing.push_back("eps.A.<level>");
    if (!missing.empty()) {
      std::string msg = "config: no preset and missing required keys:";
      for (const auto& k : missing) msg += " " + k;
      throw ConfigError(msg);
    }
  }
  if ((cfg.omega && !cfg.delta) || (cfg.delta && !cfg.omega))
    throw ConfigError("config: omega and delta must be given together");
  if (cfg.omega && cfg.n_vib < 2)
    throw ConfigError("config: vibronic model requires n_vib >= 2");
  if (cfg.omega && !cfg.eps.count({Site::B, Level::LUMO}))
    throw ConfigError("config: vibronic model requires eps.B.LUMO");
  if (cfg.n_modes < 1) throw ConfigError("config: n_modes must be >= 1");
  if (cfg.record_every < 1) throw ConfigError("config: record_every must be >= 1");
  return cfg;
}

}  // namespace molpump
