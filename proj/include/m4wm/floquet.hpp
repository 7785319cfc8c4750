// Copyright 2026 The m4wm Authors
// SPDX-License-Identifier: Apache-2.0

// Spatial-harmonic (Floquet) block system for one velocity class.

#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "m4wm/banded.hpp"
#include "m4wm/liouville.hpp"

namespace m4wm {

// Which harmonics of the dressed state feed the field coupling.
enum class GxHarmonics { Zero, Pump, Full };
GxHarmonics parse_gx_harmonics(const std::string& s);
std::string to_string(GxHarmonics h);

struct FloquetLayout {
  int q_cut = 0;
  std::vector<int> pump_offsets;  // k with a configured (Omega_+k, Omega_-k) pair

  static FloquetLayout make(int q_cut, const PhysicalParams& p);
  int n_modes() const { return 2 * q_cut + 1; }
  int atomic_dim() const { return 16 * n_modes(); }
  int field_dim() const { return 4 * n_modes(); }
  int position(int n) const { return n + q_cut; }
  int mode(int position) const { return position - q_cut; }
  int max_offset() const;
  void validate() const;
};

struct BlockGenerator {
  FloquetLayout layout;
  double v_z = 0.0;
  std::vector<Mat16> diag;                 // M^(0) per block, mode-dependent Doppler shift
  std::vector<Mat16> plus, minus;          // M^(+k), M^(-k) for k = 1..max_offset
  std::map<int, Vec16> state;              // dressed harmonics x^(j) that are retained
  std::map<int, Mat16x4> g_x;              // G_x^(j) on the same harmonics
  Mat4x16 t_map = Mat4x16::Zero();
  double deflation = 0.0;                  // trace deflation constant

  // s*I + M, optionally trace-deflated per block; transposed on request
  BlockBandMatrix shifted(cd s, bool deflate, bool transposed = false) const;
  MatC dense_drift() const;
  MatC dense_gx() const;
  MatC dense_t() const;
  VecR n_offsets() const;  // diagonal of N over field slots
  // G_x applied to a field-space block vector (or matrix of columns)
  MatC apply_gx(const MatC& f) const;
  // T applied to an atomic-space matrix: rows 4*nb
  MatC apply_t(const MatC& x) const;
};

// Harmonics of the dressed state kept for G_x (and the diffusion blocks).
std::vector<int> retained_harmonics(const FloquetLayout& layout, GxHarmonics h);

struct AssembleOptions {
  GxHarmonics gx = GxHarmonics::Pump;
  int q_steady = 24;
};

BlockGenerator assemble(const PhysicalParams& p, const Geometry& g, const FloquetLayout& layout, double v_z,
                        const AssembleOptions& opt = {});

// Factorized (i omega + M') with trace deflation; read-only after construction.
class ShiftedSolver {
 public:
  ShiftedSolver(const BlockGenerator& gen, double omega, bool transposed = false, bool deflate = true);
  MatC solve(const MatC& rhs) const { return lu_.solve(rhs); }
  double min_pivot() const { return lu_.min_pivot(); }

 private:
  BlockBandLU lu_;
};

MatC shifted_solve(const BlockGenerator& gen, double omega, const MatC& rhs);

}  // namespace m4wm
