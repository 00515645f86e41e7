// Copyright 2026 The molpump Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

#include "molpump/common.hpp"
#include "molpump/fock.hpp"
#include "molpump/observables.hpp"

namespace molpump {

inline constexpr const char* kArtifactVersion = "molpump 1.0.0";

/// Writes content to path atomically (temp file in the same directory, then
/// rename). The destination directory must be writable.
inline void atomic_write_text(const std::filesystem::path& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path dir = path.has_parent_path() ? path.parent_path() : fs::path(".");
  std::error_code ec;
  if (!dir.empty()) fs::create_directories(dir, ec);
  std::random_device rd;
  const fs::path tmp = dir / (path.filename().string() + ".tmp" + std::to_string(rd()));
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw std::runtime_error("io: cannot open '" + tmp.string() + "' for writing");
    os << content;
    if (!os.flush())
      throw std::runtime_error("io: short write to '" + tmp.string() + "'");
  }
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp);
    throw std::runtime_error("io: cannot rename temp file onto '" + path.string() +
                             "': " + ec.message());
  }
}

/// Fails early (before any computation) when the output path is unwritable.
inline void require_writable(const std::filesystem::path& path) {
  atomic_write_text(path, "# molpump placeholder; run in progress\n");
}

namespace detail {
inline std::string comment_block(const std::string& resolved_config) {
  std::ostringstream os;
  os << "# " << kArtifactVersion << "\n";
  os << "# resolved configuration:\n";
  std::istringstream is(resolved_config);
  std::string line;
  while (std::getline(is, line)) os << "#   " << line << "\n";
  return os.str();
}

inline std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}
}  // namespace detail

/// Time-series CSV: t_fs, I_L, I_R, populations in register order (plus the
/// boson occupation when present), trace_err, min_eig.
inline std::string timeseries_csv(const TransientRecord& rec, const FockSpace& space,
                                  const std::string& resolved_config) {
  std::ostringstream os;
  os << detail::comment_block(resolved_config);
  os << "# Q_L = " << detail::fmt(rec.Q_left) << ", Q_R = " << detail::fmt(rec.Q_right)
     << ", decay_floor_met = " << (rec.decay_floor_met ? 1 : 0) << "\n";
  os << "t_fs,I_L,I_R";
  for (const auto& orb : space.orbitals()) os << ",pop_" << to_string(orb);
  if (space.boson_levels() > 0) os << ",pop_boson";
  os << ",trace_err,min_eig\n";
  for (std::size_t i = 0; i < rec.size(); ++i) {
    os << detail::fmt(rec.times[i]) << ',' << detail::fmt(rec.current_left[i]) << ','
       << detail::fmt(rec.current_right[i]);
    for (const auto& p : rec.populations) os << ',' << detail::fmt(p[i]);
    if (!rec.boson_occupation.empty()) os << ',' << detail::fmt(rec.boson_occupation[i]);
    os << ',' << detail::fmt(rec.trace_error[i]) << ',' << detail::fmt(rec.min_eigenvalue[i])
       << "\n";
  }
  return os.str();
}

}  // namespace molpump
