// Copyright 2026 The m4wm Authors
// SPDX-License-Identifier: Apache-2.0

// Sideband noise spectra and quadrature covariance matrices.

#pragma once

#include <string>
#include <vector>

#include "m4wm/propagate.hpp"

namespace m4wm {

struct NoiseGenerators {
  double omega = 0.0;
  MatC r_plus, r_minus;  // R(omega), R(-omega)
  // sum_v w_v R_F,v(+-omega) D'_v R_F,v(-+omega)^T
  MatC b_plus, b_minus;
};

// Consistent diffusion blocks of one velocity class: symmetric part from
// the Einstein relation, antisymmetric part fixed by the commutators.
struct DiffusionBlocks {
  int n_modes = 0;
  // (n, m) positions with a nonzero block, and the blocks
  std::vector<std::pair<int, int>> index;
  std::vector<MatC> block;
  MatC dense() const;
  // x * D for x with 16 * n_modes columns
  MatC left_multiply(const MatC& x) const;
};

DiffusionBlocks build_diffusion_blocks(const PhysicalParams& p, const BlockGenerator& gen);
// <[sigma_A, sigma_B]> over the Floquet blocks, C(x^(n+m)) at (n, m)
MatC dense_commutator(const BlockGenerator& gen);

NoiseGenerators build_noise_generators(const Medium& m, double omega);

struct SidebandPropagation {
  MatC j, j_prime;  // e^{Rz}, e^{R'z}
  MatC w;           // int_0^z e^{Rs} B e^{R'^T s} ds
};
// Van Loan block exponential on a short step, extended by doubling.
SidebandPropagation propagate_sideband(const MatC& r, const MatC& r_prime, const MatC& b, double z);
MatC noise_integral(const MatC& r, const MatC& r_prime, const MatC& b, double z);

// <[A_i, A_j]> of the input fields and the vacuum spectrum S(0, omega).
MatC commutator_reference(const FloquetLayout& l);
MatC input_spectrum(const FloquetLayout& l);

struct NoisePoint {
  double omega = 0.0;
  double z = 0.0;
  MatC s_plus, s_minus;       // S(z, omega), S(z, -omega)
  double kappa = 0.0;         // fitted noise normalization
  double kappa_nominal = 0.0; // 2c/N
  double commutator_residual = 0.0;
};

NoisePoint output_spectrum(const Medium& m, double omega, double z);

struct ModeRef {
  Channel channel = kProbe;
  int n = 0;
  bool operator==(const ModeRef&) const = default;
};
std::string mode_label(const ModeRef& r);
ModeRef parse_mode_label(const std::string& s);

// a^(n), b^(n) for each n, interleaved
std::vector<ModeRef> paired_modes(const std::vector<int>& ns);
// 1 = a(-2), 2 = a(0), 3 = a(2), 4 = b(-2), 5 = b(0), 6 = b(2)
std::vector<ModeRef> hexapartite_modes();

struct CovarianceMatrix {
  MatR v;                      // (P, Q) per mode, vacuum = identity
  std::vector<ModeRef> modes;
  double eta = 1.0;
  double imag_residue = 0.0;  // before the real part was taken
  int dim() const { return static_cast<int>(modes.size()); }
};

// Rows (P, Q) per selected mode over the field slots; phases in radians.
MatC quadrature_frame(const FloquetLayout& l, const std::vector<ModeRef>& modes, const std::vector<double>& phases);
// Carrier phases from a gain table; 0 below 1e-12 |alpha|.
std::vector<double> carrier_phases(const GainTable& g, const std::vector<ModeRef>& modes, cd alpha);

CovarianceMatrix covariance(const MatC& u, const MatC& s_plus, const MatC& s_minus, const std::vector<ModeRef>& modes);
CovarianceMatrix apply_losses(const CovarianceMatrix& v, double eta);

// min eig(V + i Omega)
double bona_fide_margin(const CovarianceMatrix& v);
MatR symplectic_form(int n_modes);

}  // namespace m4wm
