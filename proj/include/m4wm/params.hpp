// Copyright 2026 The m4wm Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <utility>
#include <vector>

#include "m4wm/types.hpp"

namespace m4wm {

// All frequencies are angular (rad/s).
struct PhysicalParams {
  double omega0_rabi = mhz(220.0);
  // pair k (1-based offset) -> (Omega_{+k}, Omega_{-k})
  std::vector<std::pair<double, double>> omega_pm_rabi;
  double delta1 = mhz(900.0);
  double delta2 = mhz(5.5);
  double gamma_sp = mhz(5.7);
  double gamma_d = mhz(1.0);
  double omega_hf = mhz(3035.0);
  double g_a = mhz(0.28);
  double g_b = mhz(0.28);
  double n_atoms = 1.0;
  double cell_length = 0.0125;
  double wavelength = 795e-9;
  double doppler_sigma = 257.8;  // m/s, 1/e half width of f(v_z)

  double k0() const { return kTwoPi / wavelength; }
  int pump_pairs() const { return static_cast<int>(omega_pm_rabi.size()); }
  double pump_plus(int k) const;
  double pump_minus(int k) const;
  bool has_side_pumps() const;
  void validate() const;
};

struct Geometry {
  double theta_pump = 0.0;  // full angle between the pump pair
  double theta_seed = 0.0;  // seed vs pump bisector

  static Geometry from_effective(double theta_eff) { return {2.0 * theta_eff, 0.0}; }
  double theta_eff() const;
  double delta_kz(double k0) const;
  // z-projections used for the Doppler shifts
  double pump_projection(double k0) const;
  double mode_projection(double k0, int n) const;
};

double effective_angle(double theta_pump, double theta_seed);
double delta_kz(double theta_eff, double k0);

}  // namespace m4wm
