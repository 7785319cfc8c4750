// Copyright 2026 The m4wm Authors
// SPDX-License-Identifier: Apache-2.0

// Observables on quadrature covariance matrices.

#pragma once

#include <string>
#include <vector>

#include "m4wm/spectra.hpp"

namespace m4wm {

// Var(P_i - P_j); 2 for vacuum.
double noise_difference(const CovarianceMatrix& v, int mode_i, int mode_j);
// Var(sum_k P_{i_k} - P_{j_k}); number of modes for vacuum.
double total_noise_difference(const CovarianceMatrix& v, const std::vector<std::pair<int, int>>& pairs);

// Pairs (a(n), b(-n)) present in the mode list.
std::vector<std::pair<int, int>> phase_matched_pairs(const CovarianceMatrix& v);

struct IntensityNoise {
  // ratio to the shot noise of the same combination
  double a = 1.0, b = 1.0, plus = 1.0, minus = 1.0;
};
// Amplitude quadratures weighted by the carrier magnitudes |alpha_n|.
IntensityNoise intensity_spectra(const CovarianceMatrix& v, const std::vector<double>& weights);
double to_db(double ratio);

struct Bipartition {
  std::vector<int> subset;  // 0-based mode positions
  int d = 0;
  std::vector<int> complement() const;
  std::string label() const;       // 1-based, e.g. "16|2345"
  std::string class_label() const; // e.g. "2x4"
};
std::vector<Bipartition> enumerate_bipartitions(int d);
Bipartition parse_bipartition(const std::string& s, int d);

// Magnitudes of the eigenvalues of i Omega V, sorted, each once.
VecR symplectic_eigenvalues(const MatR& v);
// Partial transpose on bp.subset, then the smallest symplectic eigenvalue.
double ppt_min_eigenvalue(const CovarianceMatrix& v, const Bipartition& bp);

}  // namespace m4wm
