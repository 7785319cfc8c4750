// Copyright 2026 The m4wm Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <vector>

namespace m4wm {

// Nodes v_i and weights w_i (sum w_i = 1) for averages over
// f(v) = exp(-v^2/sigma^2) / (sqrt(pi) sigma).
struct VelocityQuadrature {
  std::vector<double> v;
  std::vector<double> w;

  // sigma == 0 or n == 1 collapses to the single node v = 0.
  static VelocityQuadrature gauss_hermite(int n, double sigma);
  int size() const { return static_cast<int>(v.size()); }
};

// Physicists' Gauss-Hermite rule (weight exp(-x^2)) by Golub-Welsch.
void hermite_rule(int n, std::vector<double>& x, std::vector<double>& w);

}  // namespace m4wm
