// Copyright 2026 The molpump Authors
// SPDX-License-Identifier: Apache-2.0

#include <catch2/catch_amalgamated.hpp>

#include "molpump/config.hpp"

using namespace molpump;

TEST_CASE("preset fig2 alone resolves all values", "[config]") {
  const RunConfig c = parse_config("preset = fig2\n");
  CHECK(c.mu_left == -0.2);
  CHECK(c.mu_right == -0.2);
  CHECK(c.xi_left == -0.03);
  CHECK(c.xi_right == -0.03);
  CHECK(c.kT == 0.001);
  CHECK(c.gamma_left == -1.0);
  CHECK(c.beta == -0.01);
  CHECK(c.eps.at({Site::D, Level::HOMO}) == -0.3);
  CHECK(c.eps.at({Site::B, Level::HOMO}) == -0.6);
  CHECK(c.eps.at({Site::A, Level::HOMO}) == -0.25);
  CHECK(c.eps.at({Site::B, Level::LUMO}) == 0.05);
  CHECK(c.eps.at({Site::D, Level::LUMO}) == 0.0);
  CHECK(c.eps.at({Site::A, Level::LUMO}) == 0.0);
  CHECK(c.n_vib == 0);
  CHECK_FALSE(c.omega.has_value());

  const JunctionModel m = c.to_model();
  CHECK(m.initial_occupations.at({Site::D, Level::HOMO}) == 0);
  CHECK(m.initial_occupations.at({Site::D, Level::LUMO}) == 1);
  CHECK(m.initial_occupations.at({Site::B, Level::HOMO}) == 1);
  CHECK(m.initial_occupations.at({Site::B, Level::LUMO}) == 0);
  CHECK(m.make_space().dim() == 64);
}

TEST_CASE("preset fig4 has the reduced register and the bridge mode", "[config]") {
  const RunConfig c = parse_config("preset = fig4\n");
  CHECK(c.eps.size() == 4);
  CHECK(c.omega.value() == 0.06);
  CHECK(c.delta.value() == 0.05);
  CHECK(c.n_vib == 15);
  CHECK(c.to_model().make_space().dim() == 16 * 15);
}

TEST_CASE("user keys override preset values", "[config]") {
  const RunConfig c = parse_config("preset = fig2\nbeta = -0.02\n");
  CHECK(c.beta == -0.02);
  CHECK(c.kT == 0.001);
  // override wins regardless of ordering
  const RunConfig c2 = parse_config("beta = -0.02\npreset = fig2\n");
  CHECK(c2.beta == -0.02);
}

TEST_CASE("empty input lists missing keys", "[config]") {
  try {
    parse_config("");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    const std::string msg = e.what();
    for (const char* k : {"beta", "mu.L", "mu.R", "xi.L", "xi.R", "gamma.L",
                          "gamma.R", "kT", "eps.D", "eps.A"})
      CHECK(msg.find(k) != std::string::npos);
  }
}

TEST_CASE("unknown key is named", "[config]") {
  try {
    parse_config("preset = fig2\nbogus_key = 1\n");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("bogus_key") != std::string::npos);
  }
}

TEST_CASE("non-numeric value reports the line number", "[config]") {
  try {
    parse_config("preset = fig2\n\nbeta = fast\n");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("line 3") != std::string::npos);
    CHECK(msg.find("beta") != std::string::npos);
  }
}

TEST_CASE("comments and blank lines are ignored", "[config]") {
  const RunConfig c = parse_config(
      "# a comment\n"
      "preset = fig2   # trailing comment\n"
      "\n"
      "beta = -0.015\n");
  CHECK(c.beta == -0.015);
}

TEST_CASE("config round-trips through serialize", "[config]") {
  RunConfig c = parse_config("preset = fig4\nbeta = -0.02\nn_modes = 123\nout = x.csv\n");
  const RunConfig again = parse_config(c.serialize());
  CHECK(again.beta == c.beta);
  CHECK(again.n_modes == c.n_modes);
  CHECK(again.eps == c.eps);
  CHECK(again.omega == c.omega);
  CHECK(again.delta == c.delta);
  CHECK(again.n_vib == c.n_vib);
  CHECK(again.out == c.out);
  CHECK(again.serialize() == c.serialize());
}

TEST_CASE("vibronic validation", "[config]") {
  CHECK_THROWS_AS(parse_config("preset = fig2\nomega = 0.06\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("preset = fig4\nn_vib = 1\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("preset = fig2\nomega = 0.06\ndelta = -0.01\nn_vib = 10\n")
                      .to_model(),
                  ConfigError);
}

TEST_CASE("custom config without preset", "[config]") {
  const RunConfig c = parse_config(
      "eps.D.LUMO = 0\neps.A.LUMO = 0\neps.B.LUMO = 0.05\n"
      "beta = -0.01\nmu.L = -0.2\nmu.R = -0.2\nxi.L = -0.03\nxi.R = -0.03\n"
      "gamma.L = -1\ngamma.R = -1\nkT = 0.001\n");
  CHECK(c.to_model().make_space().dim() == 8);  // three orbitals
  CHECK(c.n_modes == 6400);                     // library default
}

TEST_CASE("malformed lines are rejected", "[config]") {
  CHECK_THROWS_AS(parse_config("preset fig2\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("eps.X.LUMO = 0\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("eps.D.MID = 0\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("n_modes = 2.5\npreset = fig2\n"), ConfigError);
}
