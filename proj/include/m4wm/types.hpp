// Copyright 2026 The m4wm Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace m4wm {

using cd = std::complex<double>;
using MatC = Eigen::MatrixXcd;
using VecC = Eigen::VectorXcd;
using MatR = Eigen::MatrixXd;
using VecR = Eigen::VectorXd;
using Mat16 = Eigen::Matrix<cd, 16, 16>;
using Vec16 = Eigen::Matrix<cd, 16, 1>;
using Mat16x4 = Eigen::Matrix<cd, 16, 4>;
using Mat4x16 = Eigen::Matrix<cd, 4, 16>;

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;
inline constexpr double kSpeedOfLight = 299792458.0;
inline constexpr cd kI{0.0, 1.0};

// "/2pi MHz" -> rad/s and back
inline constexpr double mhz(double f) { return kTwoPi * 1e6 * f; }
inline constexpr double to_mhz(double w) { return w / (kTwoPi * 1e6); }

// Liouville index of sigma_ij, 0-based levels.
inline constexpr int lidx(int i, int j) { return 4 * i + j; }

// Field slots inside one Floquet block.
enum Slot : int { kA = 0, kAdag = 1, kB = 2, kBdag = 3 };

class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& what)
      : std::runtime_error(what), kind_(std::move(kind)) {}
  const std::string& kind() const { return kind_; }

 private:
  std::string kind_;
};

}  // namespace m4wm
