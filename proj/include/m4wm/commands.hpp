// Copyright 2026 The m4wm Authors
// SPDX-License-Identifier: Apache-2.0

// Sweep drivers behind the CLI subcommands.

#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "m4wm/config.hpp"
#include "m4wm/entangle.hpp"

namespace m4wm {

struct GainPoint {
  double delta2_mhz = 0.0;
  double theta_eff_mrad = 0.0;
  double z_m = 0.0;
  GainTable gains;
};

struct NoiseObservation {
  double delta2_mhz = 0.0;
  double theta_eff_mrad = 0.0;
  double omega_mhz = 0.0;
  double eta = 1.0;
  CovarianceMatrix cm_raw;  // before losses
  CovarianceMatrix cm;      // after losses
  std::vector<double> weights;  // carrier magnitudes of cm.modes
  double kappa_ratio = 0.0;     // fitted / nominal noise normalization
  double commutator_residual = 0.0;
  double bona_fide_raw = 0.0;
  double bona_fide = 0.0;
};

// Mode-resolved gains at every (theta, delta, z) grid point, in grid order.
std::vector<GainPoint> gain_scan(const RunConfig& c, int workers);
// Same grid as gain_scan but one R per (theta, delta) and the whole z grid.
std::vector<GainPoint> z_scan_points(const RunConfig& c, int workers);

// CMs over `modes` at every (theta, delta, omega) point.
std::vector<NoiseObservation> noise_points(const RunConfig& c, const std::vector<ModeRef>& modes, int workers);
// One parameter point, every omega.
std::vector<NoiseObservation> analyze_point(const Medium& m, const std::vector<double>& omegas,
                                            const std::vector<ModeRef>& modes, double eta, double alpha);

struct CommandResult {
  std::vector<std::filesystem::path> files;
  nlohmann::json summary;
};

CommandResult cmd_gain_scan(const RunConfig& c, const std::filesystem::path& out, int workers);
CommandResult cmd_z_scan(const RunConfig& c, const std::filesystem::path& out, int workers);
CommandResult cmd_noise_scan(const RunConfig& c, const std::filesystem::path& out, int workers);
CommandResult cmd_ppt_scan(const RunConfig& c, const std::filesystem::path& out, int workers);
CommandResult cmd_convergence(const RunConfig& c, const std::filesystem::path& out, int workers);
CommandResult cmd_calibrate_n(const RunConfig& c, const std::filesystem::path& out);

// CM snapshot for the plotting side.
nlohmann::json cm_to_json(const NoiseObservation& o);

}  // namespace m4wm
