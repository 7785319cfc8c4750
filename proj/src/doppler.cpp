// Copyright 2026 The m4wm Authors
// SPDX-License-Identifier: Apache-2.0

#include "m4wm/doppler.hpp"

#include <cmath>
#include <numbers>

#include <Eigen/Eigenvalues>

#include "m4wm/types.hpp"

namespace m4wm {

void hermite_rule(int n, std::vector<double>& x, std::vector<double>& w) {
  if (n < 1) throw Error("config", "need at least one quadrature node");
  Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(n, n);
  for (int i = 1; i < n; ++i) jac(i, i - 1) = jac(i - 1, i) = std::sqrt(0.5 * i);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(jac);
  x.resize(n);
  w.resize(n);
  for (int i = 0; i < n; ++i) {
    x[i] = es.eigenvalues()(i);
    const double q = es.eigenvectors()(0, i);
    w[i] = std::sqrt(std::numbers::pi) * q * q;
  }
  // exact symmetry helps the reflection tests
  for (int i = 0; i < n / 2; ++i) {
    const double a = 0.5 * (x[n - 1 - i] - x[i]);
    const double b = 0.5 * (w[i] + w[n - 1 - i]);
    x[i] = -a;
    x[n - 1 - i] = a;
    w[i] = w[n - 1 - i] = b;
  }
  if (n % 2 == 1) x[n / 2] = 0.0;
}

VelocityQuadrature VelocityQuadrature::gauss_hermite(int n, double sigma) {
  VelocityQuadrature q;
  if (sigma == 0.0 || n == 1) {
    q.v = {0.0};
    q.w = {1.0};
    return q;
  }
  std::vector<double> x, w;
  hermite_rule(n, x, w);
  const double norm = 1.0 / std::sqrt(std::numbers::pi);
  for (int i = 0; i < n; ++i) {
    q.v.push_back(sigma * x[i]);
    q.w.push_back(w[i] * norm);
  }
  return q;
}

}  // namespace m4wm
