// Copyright 2026 The molpump Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "molpump/common.hpp"

namespace molpump {

enum class Site : int { D = 1, B = 2, A = 3 };
enum class Level : int { HOMO = 1, LUMO = 2 };

/// One spinless molecular orbital, addressed by (site, level).
struct OrbitalId {
  Site site;
  Level level;

  friend bool operator==(OrbitalId a, OrbitalId b) = default;
  friend auto operator<=>(OrbitalId a, OrbitalId b) = default;
};

inline std::string to_string(OrbitalId o) {
  static const char* site_names[] = {"D", "B", "A"};
  return std::string(site_names[static_cast<int>(o.site) - 1]) +
         (o.level == Level::HOMO ? ".HOMO" : ".LUMO");
}

/// Many-body Hilbert space of an ordered register of spinless fermionic
/// orbitals, optionally tensored with one truncated harmonic mode.
///
/// Basis layout (fixed): global index g = f * nb + b, where nb =
/// max(boson_levels, 1), b is the boson occupation number, and bit i of the
/// fermionic index f is the occupation of register orbital i. Annihilating
/// orbital i carries the Jordan-Wigner parity of the occupied orbitals that
/// precede it in the register.
class FockSpace {
 public:
  FockSpace(std::vector<OrbitalId> orbitals, int boson_levels)
      : register_(std::move(orbitals)), boson_levels_(boson_levels) {
    if (register_.empty()) throw ConfigError("fock: empty orbital register");
    if (boson_levels_ < 0) throw ConfigError("fock: negative boson_levels");
    for (std::size_t i = 0; i < register_.size(); ++i)
      for (std::size_t j = i + 1; j < register_.size(); ++j)
        if (register_[i] == register_[j])
          throw ConfigError("fock: duplicate orbital " + to_string(register_[i]) +
                            " in register");
    if (register_.size() > 16)
      throw ConfigError("fock: register too large for dense representation");
    dim_ = (Eigen::Index(1) << register_.size()) * boson_count();
    tag_ = next_tag();
  }

  const std::vector<OrbitalId>& orbitals() const { return register_; }
  int n_orbitals() const { return static_cast<int>(register_.size()); }
  int boson_levels() const { return boson_levels_; }
  Eigen::Index boson_count() const { return std::max(boson_levels_, 1); }
  Eigen::Index fermion_dim() const { return Eigen::Index(1) << register_.size(); }
  Eigen::Index dim() const { return dim_; }
  std::uint64_t tag() const { return tag_; }

  bool contains(OrbitalId orb) const {
    return std::find(register_.begin(), register_.end(), orb) != register_.end();
  }

  int orbital_index(OrbitalId orb) const {
    auto it = std::find(register_.begin(), register_.end(), orb);
    if (it == register_.end())
      throw OperatorError("fock: orbital " + to_string(orb) + " not in register");
    return static_cast<int>(it - register_.begin());
  }

  /// Electron count of a global basis state.
  int electron_count(Eigen::Index g) const {
    return std::popcount(static_cast<std::uint64_t>(g / boson_count()));
  }

 private:
  static std::uint64_t next_tag() {
    static std::uint64_t counter = 0;
    return ++counter;
  }

  std::vector<OrbitalId> register_;
  int boson_levels_;
  Eigen::Index dim_;
  std::uint64_t tag_;
};

/// Dense operator bound to the FockSpace it was built from. Mixing operators
/// from different spaces is a logic error and throws.
struct ManyBodyOperator {
  Matrix matrix;
  std::uint64_t space_tag = 0;

  Eigen::Index dim() const { return matrix.rows(); }

  ManyBodyOperator adjoint() const { return {matrix.adjoint(), space_tag}; }

  friend ManyBodyOperator operator*(const ManyBodyOperator& a, const ManyBodyOperator& b) {
    require_same(a, b);
    return {a.matrix * b.matrix, a.space_tag};
  }
  friend ManyBodyOperator operator+(const ManyBodyOperator& a, const ManyBodyOperator& b) {
    require_same(a, b);
    return {a.matrix + b.matrix, a.space_tag};
  }
  friend ManyBodyOperator operator-(const ManyBodyOperator& a, const ManyBodyOperator& b) {
    require_same(a, b);
    return {a.matrix - b.matrix, a.space_tag};
  }
  friend ManyBodyOperator operator*(complex c, const ManyBodyOperator& a) {
    return {c * a.matrix, a.space_tag};
  }

  static void require_same(const ManyBodyOperator& a, const ManyBodyOperator& b) {
    if (a.space_tag != b.space_tag)
      throw OperatorError("fock: combining operators from different spaces");
    if (a.matrix.rows() != b.matrix.rows())
      throw OperatorError("fock: operator dimension mismatch");
  }
};

inline FockSpace build_space(std::vector<OrbitalId> orbitals, int boson_levels) {
  return FockSpace(std::move(orbitals), boson_levels);
}

/// Annihilation operator d_orb with Jordan-Wigner sign structure.
inline ManyBodyOperator annihilator(const FockSpace& space, OrbitalId orb) {
  const int i = space.orbital_index(orb);
  const Eigen::Index df = space.fermion_dim();
  const Eigen::Index nb = space.boson_count();
  Matrix m = Matrix::Zero(space.dim(), space.dim());
  const std::uint64_t below = (std::uint64_t(1) << i) - 1;
  for (Eigen::Index f = 0; f < df; ++f) {
    if (!((f >> i) & 1)) continue;
    const double sign = (std::popcount(static_cast<std::uint64_t>(f) & below) % 2) ? -1.0 : 1.0;
    const Eigen::Index g = f ^ (Eigen::Index(1) << i);
    for (Eigen::Index b = 0; b < nb; ++b) m(g * nb + b, f * nb + b) = sign;
  }
  return {std::move(m), space.tag()};
}

inline ManyBodyOperator creator(const FockSpace& space, OrbitalId orb) {
  return annihilator(space, orb).adjoint();
}

/// Boson annihilation operator c (identity on the fermionic factor),
/// <n-1|c|n> = sqrt(n) on the truncated ladder.
inline ManyBodyOperator boson_annihilator(const FockSpace& space) {
  if (space.boson_levels() < 2)
    throw ConfigError("fock: boson_annihilator requires boson_levels >= 2");
  const Eigen::Index df = space.fermion_dim();
  const Eigen::Index nb = space.boson_count();
  Matrix m = Matrix::Zero(space.dim(), space.dim());
  for (Eigen::Index f = 0; f < df; ++f)
    for (Eigen::Index n = 1; n < nb; ++n)
      m(f * nb + n - 1, f * nb + n) = std::sqrt(double(n));
  return {std::move(m), space.tag()};
}

/// Diagonal electronic number operator (sum of d^+ d over the register).
inline ManyBodyOperator number_operator(const FockSpace& space) {
  Matrix m = Matrix::Zero(space.dim(), space.dim());
  for (Eigen::Index g = 0; g < space.dim(); ++g)
    m(g, g) = double(space.electron_count(g));
  return {std::move(m), space.tag()};
}

}  // namespace molpump
