// Copyright 2026 The m4wm Authors
// SPDX-License-Identifier: Apache-2.0

// Run configuration: JSON document, frequencies in "/2pi MHz".

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "m4wm/propagate.hpp"
#include "m4wm/spectra.hpp"

namespace m4wm {

struct RunConfig {
  // user units: "/2pi MHz", metres, m/s, mrad
  double omega0_mhz = 220.0;
  std::vector<std::pair<double, double>> omega_pm_mhz;
  double delta1_mhz = 900.0;
  double delta2_mhz = 5.5;
  double gamma_sp_mhz = 5.7;
  double gamma_d_mhz = 1.0;
  double omega_hf_mhz = 3035.0;
  double g_a_mhz = 0.28;
  double g_b_mhz = 0.28;
  double n_atoms = 1.0;
  double cell_length_m = 0.0125;
  double wavelength_m = 795e-9;
  double doppler_sigma_m_s = 257.8;
  double theta_pump_mrad = 6.0;
  double theta_seed_mrad = 0.0;

  ModelOptions model;
  double seed_alpha = 1.0;
  double eta = 1.0;

  // sweep grids; empty means "use the base value"
  std::vector<double> sweep_delta2_mhz;
  std::vector<double> sweep_theta_eff_mrad;
  std::vector<double> sweep_omega_mhz;
  std::vector<double> sweep_z_m;

  std::vector<int> noise_modes{-4, -2, 0, 2, 4};
  std::vector<ModeRef> entangle_modes = hexapartite_modes();

  int convergence_q = 20;
  int convergence_q_ref = 18;
  std::vector<int> convergence_modes{-4, -2, 0, 2, 4};
  double convergence_floor = 1e-6;

  double calibration_target = 5.0;

  std::string output_dir = "out";
  int workers = 1;
  std::uint64_t random_seed = 0;

  bool operator==(const RunConfig& o) const = default;

  PhysicalParams physics() const;
  Geometry geometry() const;

  // resolved grids
  std::vector<double> delta2_grid() const;   // rad/s
  std::vector<Geometry> geometry_grid() const;
  std::vector<double> omega_grid() const;    // rad/s
  std::vector<double> z_grid() const;        // m
};

// Throws Error("config") listing every problem found.
RunConfig parse_config(const nlohmann::json& j);
RunConfig load_config(const std::filesystem::path& path);
nlohmann::json emit_config(const RunConfig& c);
void validate(const RunConfig& c);

// Directory holding the shipped presets.
std::filesystem::path preset_dir();
std::filesystem::path preset_path(const std::string& name);

}  // namespace m4wm
