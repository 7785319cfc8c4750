// Copyright 2026 The m4wm Authors
// SPDX-License-Identifier: Apache-2.0

#include "m4wm/params.hpp"

#include <cmath>

#include <fmt/format.h>

namespace m4wm {

double PhysicalParams::pump_plus(int k) const {
  if (k < 1 || k > pump_pairs()) throw Error("config", fmt::format("pump pair {} not configured", k));
  return omega_pm_rabi[k - 1].first;
}

double PhysicalParams::pump_minus(int k) const {
  if (k < 1 || k > pump_pairs()) throw Error("config", fmt::format("pump pair {} not configured", k));
  return omega_pm_rabi[k - 1].second;
}

bool PhysicalParams::has_side_pumps() const {
  for (const auto& [p, m] : omega_pm_rabi)
    if (p != 0.0 || m != 0.0) return true;
  return false;
}

void PhysicalParams::validate() const {
  auto finite = [](const char* name, double v) {
    if (!std::isfinite(v)) throw Error("config", fmt::format("{} is not finite", name));
  };
  finite("omega0_rabi", omega0_rabi);
  for (const auto& [p, m] : omega_pm_rabi) {
    finite("omega_pm_rabi", p);
    finite("omega_pm_rabi", m);
  }
  finite("delta1", delta1);
  finite("delta2", delta2);
  finite("gamma_sp", gamma_sp);
  finite("gamma_d", gamma_d);
  finite("omega_hf", omega_hf);
  finite("g_a", g_a);
  finite("g_b", g_b);
  finite("n_atoms", n_atoms);
  finite("cell_length", cell_length);
  finite("wavelength", wavelength);
  finite("doppler_sigma", doppler_sigma);
  if (!(gamma_sp > 0.0)) throw Error("config", "gamma_sp must be > 0");
  if (gamma_d < 0.0) throw Error("config", "gamma_d must be >= 0");
  if (!(cell_length > 0.0)) throw Error("config", "cell_length must be > 0");
  if (!(wavelength > 0.0)) throw Error("config", "wavelength must be > 0");
  if (doppler_sigma < 0.0) throw Error("config", "doppler_sigma must be >= 0");
  if (n_atoms < 0.0) throw Error("config", "n_atoms must be >= 0");
}

double effective_angle(double theta_pump, double theta_seed) {
  return std::hypot(0.5 * theta_pump, theta_seed);
}

double delta_kz(double theta_eff, double k0) {
  // 1 - cos(x) = 2 sin^2(x/2), no cancellation at mrad angles
  const double s = std::sin(0.25 * theta_eff);
  return 2.0 * s * s * k0;
}

double Geometry::theta_eff() const { return effective_angle(theta_pump, theta_seed); }

double Geometry::delta_kz(double k0) const { return m4wm::delta_kz(theta_eff(), k0); }

double Geometry::pump_projection(double k0) const { return k0 * std::cos(0.5 * theta_pump); }

double Geometry::mode_projection(double k0, int n) const { return k0 * std::cos(0.5 * n * theta_pump); }

}  // namespace m4wm
