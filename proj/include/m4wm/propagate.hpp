// Copyright 2026 The m4wm Authors
// SPDX-License-Identifier: Apache-2.0

// Mean-field propagation of the Floquet mode ladder.

#pragma once

#include <string>
#include <vector>

#include "m4wm/doppler.hpp"
#include "m4wm/floquet.hpp"

namespace m4wm {

// Vacuum: bare carriers. Seed: the linear index of the seeded pair is
// compensated, i.e. the seed angle is taken as phase matched.
enum class PhaseReference { Vacuum, Seed };
PhaseReference parse_phase_reference(const std::string& s);
std::string to_string(PhaseReference r);

struct ModelOptions {
  int q_cut = 20;
  int doppler_nodes = 32;
  int q_steady = 24;
  GxHarmonics gx = GxHarmonics::Pump;
  PhaseReference phase_reference = PhaseReference::Seed;
  bool operator==(const ModelOptions&) const = default;
};

// Doppler-resolved block generators for one parameter point; read-only.
class Medium {
 public:
  Medium(const PhysicalParams& p, const Geometry& g, const ModelOptions& opt);

  const PhysicalParams& params() const { return params_; }
  const Geometry& geometry() const { return geom_; }
  const ModelOptions& options() const { return opt_; }
  const FloquetLayout& layout() const { return layout_; }
  const VelocityQuadrature& quadrature() const { return quad_; }
  const std::vector<BlockGenerator>& generators() const { return gens_; }
  double delta_kz() const { return geom_.delta_kz(params_.k0()); }
  int field_dim() const { return layout_.field_dim(); }

  // -(N/c) sum_v w_v T (i omega + M'_v)^-1 G_v, no propagation phases
  MatC atomic_response(double omega) const;
  // diagonal subtracted from every R(omega)
  const VecC& reference() const { return reference_; }
  // i omega/c - i N dkz - reference, the non-atomic part of R(omega)
  VecC free_diagonal(double omega) const;
  MatC build_R(double omega = 0.0) const;

 private:
  PhysicalParams params_;
  Geometry geom_;
  ModelOptions opt_;
  FloquetLayout layout_;
  VelocityQuadrature quad_;
  std::vector<BlockGenerator> gens_;
  VecC reference_;
  MatC response0_;
};

// Field-slot index of (slot, n).
inline int field_index(const FloquetLayout& l, Slot s, int n) { return 4 * l.position(n) + s; }

// e^{Rz}; throws Error("overflow") beyond a power gain of 1e12.
MatC propagator(const MatC& r, double z);

// Seed of amplitude alpha in a^(0) (and its conjugate slot).
VecC seed_field(const FloquetLayout& l, cd alpha);
VecC propagate_mean(const MatC& r, const VecC& input, double z);
MatC input_covariance(const FloquetLayout& l, cd alpha);
MatC gain_matrix(const MatC& j, const MatC& c0);

enum Channel : int { kProbe = 0, kConjugate = 1 };
const char* channel_name(Channel c);

struct GainTable {
  int q_cut = 0;
  std::vector<double> gain_a, gain_b;    // index n + Q
  std::vector<double> phase_a, phase_b;  // carrier phases of the mean field
  VecC amps;

  double gain(Channel c, int n) const { return (c == kProbe ? gain_a : gain_b)[n + q_cut]; }
  double phase(Channel c, int n) const { return (c == kProbe ? phase_a : phase_b)[n + q_cut]; }
  double max_gain(Channel c) const;
  // modes at or above frac * max of the channel
  std::vector<int> populated(Channel c, double frac = 0.05) const;
};

// Gains from C(z) with carrier phases from the mean field.
GainTable mode_gains(const FloquetLayout& l, const MatC& c_z, cd alpha, const VecC& mean);
GainTable compute_gains(const Medium& m, double z, cd alpha = 1.0);
std::vector<GainTable> z_scan(const MatC& r, const FloquetLayout& l, cd alpha, const std::vector<double>& z);

struct ConvergenceRow {
  double delta2 = 0.0;
  Channel channel = kProbe;
  int mode = 0;
  double gain = 0.0, gain_ref = 0.0, residual = 0.0;
};
std::vector<ConvergenceRow> convergence_check(const PhysicalParams& p, const Geometry& g, const ModelOptions& opt,
                                              int q, int q_ref, const std::vector<double>& delta2_grid,
                                              const std::vector<int>& modes, double floor = 1e-6);

struct Calibration {
  double n_atoms = 0.0;
  double gain = 0.0;
  int steps = 0;
  bool degenerate = false;
};
// Bisection in log N on the single-mode probe gain at z = L.
Calibration calibrate_n(const PhysicalParams& p, const Geometry& g, const ModelOptions& opt, double target);

}  // namespace m4wm
