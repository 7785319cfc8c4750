// Copyright 2026 The m4wm Authors
// SPDX-License-Identifier: Apache-2.0

// Single-atom, single-velocity matrices of the double-Lambda model.
// Heisenberg picture: d<sigma_ij>/dt = sum_kl M[(ij),(kl)] <sigma_kl>.

#pragma once

#include <vector>

#include "m4wm/params.hpp"

namespace m4wm {

struct DopplerShift {
  double v_z = 0.0;
  double k_pump = 0.0;  // z-projection of the pump wavevector
  double k_mode = 0.0;  // z-projection of the probe/conjugate mode
};

// No geometry: every projection equals k0.
DopplerShift collinear_shift(const PhysicalParams& p, double v_z);

// Relaxation-only part (spontaneous decay, ground exchange, dephasing).
Mat16 relaxation_generator(const PhysicalParams& p);

// Rotating-frame Hamiltonian of the bare atom plus the central pump Omega_0.
Eigen::Matrix4cd atom_hamiltonian(const PhysicalParams& p, const DopplerShift& s);

// Heisenberg generator of H and the relaxation model.
Mat16 heisenberg_generator(const Eigen::Matrix4cd& h, bool with_relaxation, const PhysicalParams& p);

Mat16 build_drift(const PhysicalParams& p, const DopplerShift& s);
inline Mat16 build_drift(const PhysicalParams& p, double v_z) { return build_drift(p, collinear_shift(p, v_z)); }

// M^(+k) for sign=+1, M^(-k) for sign=-1.
Mat16 build_pump_coupling(const PhysicalParams& p, int pair_index, int sign);

struct SteadyState {
  Vec16 x;
  double condition = 0.0;  // 1-norm estimate of the reduced system
};

// Omega_0-only steady state with sum sigma_ii = 1.
SteadyState pump_only_steady_state(const PhysicalParams& p, const DopplerShift& s);
inline SteadyState pump_only_steady_state(const PhysicalParams& p, double v_z) {
  return pump_only_steady_state(p, collinear_shift(p, v_z));
}

// Spatial harmonics x^(j), j in [-q_ss, q_ss], of the state dressed by all pumps.
// Entry j + q_ss holds x^(j).
std::vector<Vec16> pump_dressed_harmonics(const PhysicalParams& p, const DopplerShift& s, int q_ss);

// Trace-eliminated affine form A y + b = 0 for y = (sigma_12, ..., sigma_44).
struct ReducedDrift {
  Eigen::Matrix<cd, 15, 15> a;
  Eigen::Matrix<cd, 15, 1> b;
};
ReducedDrift reduce_drift(const Mat16& m);

Mat16x4 build_field_coupling(const PhysicalParams& p, const Vec16& x);
Mat4x16 build_emission_map(const PhysicalParams& p);

// D with <F_A F_B> = 2 D_AB (Einstein relation on the state x).
Mat16 build_diffusion(const PhysicalParams& p, const Vec16& x);

// <[sigma_A, sigma_B]> on x.
Mat16 commutator_matrix(const Vec16& x);

// Subtract c * e_{11} 1_pop^T; removes the trace zero mode without
// changing the response to trace-free sources.
Mat16 deflate_trace(const Mat16& m, double c);

}  // namespace m4wm
