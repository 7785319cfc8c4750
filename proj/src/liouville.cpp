// Copyright 2026 The m4wm Authors
// SPDX-License-Identifier: Apache-2.0

#include "m4wm/liouville.hpp"

#include <cmath>

#include <fmt/format.h>

#include "m4wm/banded.hpp"

namespace m4wm {

namespace {

using Mat4 = Eigen::Matrix4cd;

Mat4 unit(int i, int j) {
  Mat4 m = Mat4::Zero();
  m(i, j) = 1.0;
  return m;
}

std::vector<Mat4> lindblad_ops(const PhysicalParams& p) {
  std::vector<Mat4> ls;
  const double ge = std::sqrt(0.5 * p.gamma_sp);
  for (int e : {2, 3})
    for (int g : {0, 1}) ls.push_back(ge * unit(g, e));
  const double gg = std::sqrt(0.5 * p.gamma_d);
  ls.push_back(gg * unit(0, 1));
  ls.push_back(gg * unit(1, 0));
  // pure dephasing, split so the optical coherences pick up gamma_d on top of Gamma/2
  const double k1 = p.gamma_d / 8.0, k2 = 5.0 * p.gamma_d / 8.0;
  Mat4 d1 = Mat4::Zero(), d2 = Mat4::Zero();
  d1(0, 0) = 1.0;
  d1(1, 1) = -1.0;
  d2(0, 0) = 1.0;
  d2(1, 1) = 1.0;
  ls.push_back(std::sqrt(2.0 * k1) * d1);
  ls.push_back(std::sqrt(2.0 * k2) * d2);
  return ls;
}

// (Omega/2)(s31 + s42) + (Omega'/2)(s13 + s24)
Mat4 pump_term(double up, double down) {
  return 0.5 * up * (unit(2, 0) + unit(3, 1)) + 0.5 * down * (unit(0, 2) + unit(1, 3));
}

Mat16 commutator_generator(const Mat4& h) {
  Mat16 m;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      const Mat4 a = unit(i, j);
      const Mat4 out = kI * (h * a - a * h);
      for (int k = 0; k < 4; ++k)
        for (int l = 0; l < 4; ++l) m(lidx(i, j), lidx(k, l)) = out(k, l);
    }
  return m;
}

}  // namespace

DopplerShift collinear_shift(const PhysicalParams& p, double v_z) { return {v_z, p.k0(), p.k0()}; }

Mat16 relaxation_generator(const PhysicalParams& p) {
  Mat16 m = Mat16::Zero();
  for (const Mat4& l : lindblad_ops(p)) {
    const Mat4 ld = l.adjoint();
    const Mat4 ldl = ld * l;
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) {
        const Mat4 a = unit(i, j);
        const Mat4 out = ld * a * l - 0.5 * (ldl * a + a * ldl);
        for (int k = 0; k < 4; ++k)
          for (int q = 0; q < 4; ++q) m(lidx(i, j), lidx(k, q)) += out(k, q);
      }
  }
  return m;
}

Eigen::Matrix4cd atom_hamiltonian(const PhysicalParams& p, const DopplerShift& s) {
  const double big = p.delta1 - s.k_pump * s.v_z;
  const double small = p.delta2 - (s.k_pump - s.k_mode) * s.v_z;
  Mat4 h = Mat4::Zero();
  h(1, 1) = -small;
  h(2, 2) = -big;
  h(3, 3) = -(big + p.omega_hf + small);
  return h + pump_term(p.omega0_rabi, p.omega0_rabi);
}

Mat16 heisenberg_generator(const Eigen::Matrix4cd& h, bool with_relaxation, const PhysicalParams& p) {
  Mat16 m = commutator_generator(h);
  if (with_relaxation) m += relaxation_generator(p);
  return m;
}

Mat16 build_drift(const PhysicalParams& p, const DopplerShift& s) {
  p.validate();
  return heisenberg_generator(atom_hamiltonian(p, s), true, p);
}

Mat16 build_pump_coupling(const PhysicalParams& p, int pair_index, int sign) {
  if (sign != 1 && sign != -1) throw Error("config", "pump coupling sign must be +1 or -1");
  const double up = sign > 0 ? p.pump_plus(pair_index) : p.pump_minus(pair_index);
  const double down = sign > 0 ? p.pump_minus(pair_index) : p.pump_plus(pair_index);
  return commutator_generator(pump_term(up, down));
}

ReducedDrift reduce_drift(const Mat16& m) {
  // sigma_11 = 1 - sigma_22 - sigma_33 - sigma_44; the sigma_11 row is dependent
  ReducedDrift r;
  for (int row = 1; row < 16; ++row) {
    r.b(row - 1) = m(row, 0);
    for (int c = 1; c < 16; ++c) {
      const bool pop = c == lidx(1, 1) || c == lidx(2, 2) || c == lidx(3, 3);
      r.a(row - 1, c - 1) = m(row, c) - (pop ? m(row, 0) : cd(0.0));
    }
  }
  return r;
}

SteadyState pump_only_steady_state(const PhysicalParams& p, const DopplerShift& s) {
  const ReducedDrift r = reduce_drift(build_drift(p, s));
  Eigen::PartialPivLU<Eigen::Matrix<cd, 15, 15>> lu(r.a);
  const double norm = r.a.cwiseAbs().colwise().sum().maxCoeff();
  const double inv_norm = lu.inverse().cwiseAbs().colwise().sum().maxCoeff();
  const double cond = norm * inv_norm;
  if (!std::isfinite(cond) || cond > 1e15)
    throw Error("singular", fmt::format("restricted drift is singular (condition {:.3e})", cond));
  const Eigen::Matrix<cd, 15, 1> y = lu.solve(-r.b);
  SteadyState ss;
  ss.x(0) = 1.0 - y(lidx(1, 1) - 1) - y(lidx(2, 2) - 1) - y(lidx(3, 3) - 1);
  ss.x.tail<15>() = y;
  ss.condition = cond;
  return ss;
}

std::vector<Vec16> pump_dressed_harmonics(const PhysicalParams& p, const DopplerShift& s, int q_ss) {
  if (q_ss < 0) throw Error("config", "negative steady-state harmonic cut");
  const int nb = 2 * q_ss + 1;
  const int pairs = p.pump_pairs();
  const int bw = std::min(pairs, nb - 1);
  const Mat16 m0 = build_drift(p, s);
  BlockBandMatrix a(nb, 16, bw);
  for (int b = 0; b < nb; ++b) {
    a.at(b, b) = m0;
    for (int k = 1; k <= bw; ++k) {
      // coefficient of e^{+ik phi} in the drift moves harmonic j-k to j
      if (b - k >= 0) a.at(b, b - k) = build_pump_coupling(p, k, +1);
      if (b + k < nb) a.at(b, b + k) = build_pump_coupling(p, k, -1);
    }
  }
  MatC rhs = MatC::Zero(16 * nb, 1);
  for (int b = 0; b < nb; ++b) {
    // trace row replaces the dependent sigma_11 row in every harmonic
    for (int c = std::max(0, b - bw); c <= std::min(nb - 1, b + bw); ++c) a.at(b, c).row(0).setZero();
    for (int i = 0; i < 4; ++i) a.at(b, b)(0, lidx(i, i)) = 1.0;
    rhs(16 * b, 0) = b == q_ss ? 1.0 : 0.0;
  }
  const MatC x = BlockBandLU(std::move(a)).solve(rhs);
  std::vector<Vec16> out(nb);
  for (int b = 0; b < nb; ++b) out[b] = x.block<16, 1>(16 * b, 0);
  return out;
}

Mat16x4 build_field_coupling(const PhysicalParams& p, const Vec16& xv) {
  auto x = [&](int i, int j) { return xv(lidx(i, j)); };
  const cd ga = p.g_a, gb = p.g_b;
  Mat16x4 g = Mat16x4::Zero();
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      const int r = lidx(i, j);
      // i g [sigma_32, sigma_ij] and partners, evaluated on x
      g(r, kA) = kI * ga * ((i == 1 ? x(2, j) : 0.0) - (j == 2 ? x(i, 1) : 0.0));
      g(r, kAdag) = kI * std::conj(ga) * ((i == 2 ? x(1, j) : 0.0) - (j == 1 ? x(i, 2) : 0.0));
      g(r, kB) = kI * gb * ((i == 0 ? x(3, j) : 0.0) - (j == 3 ? x(i, 0) : 0.0));
      g(r, kBdag) = kI * std::conj(gb) * ((i == 3 ? x(0, j) : 0.0) - (j == 0 ? x(i, 3) : 0.0));
    }
  return g;
}

Mat4x16 build_emission_map(const PhysicalParams& p) {
  const cd ga = p.g_a, gb = p.g_b;
  Mat4x16 t = Mat4x16::Zero();
  t(kA, lidx(1, 2)) = -kI * std::conj(ga);
  t(kAdag, lidx(2, 1)) = kI * ga;
  t(kB, lidx(0, 3)) = -kI * std::conj(gb);
  t(kBdag, lidx(3, 0)) = kI * gb;
  return t;
}

Mat16 build_diffusion(const PhysicalParams& p, const Vec16& xv) {
  const Mat16 mr = relaxation_generator(p);
  const Vec16 mx = mr * xv;
  auto x = [&](int i, int j) { return xv(lidx(i, j)); };
  Mat16 d;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      for (int k = 0; k < 4; ++k)
        for (int l = 0; l < 4; ++l) {
          cd v = j == k ? mx(lidx(i, l)) : cd(0.0);
          for (int m = 0; m < 4; ++m) v -= mr(lidx(i, j), lidx(m, k)) * x(m, l);
          for (int n = 0; n < 4; ++n) v -= mr(lidx(k, l), lidx(j, n)) * x(i, n);
          d(lidx(i, j), lidx(k, l)) = 0.5 * v;
        }
  return d;
}

Mat16 commutator_matrix(const Vec16& xv) {
  Mat16 c;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      for (int k = 0; k < 4; ++k)
        for (int l = 0; l < 4; ++l)
          c(lidx(i, j), lidx(k, l)) = (j == k ? xv(lidx(i, l)) : cd(0.0)) - (l == i ? xv(lidx(k, j)) : cd(0.0));
  return c;
}

Mat16 deflate_trace(const Mat16& m, double c) {
  Mat16 out = m;
  for (int i = 0; i < 4; ++i) out(0, lidx(i, i)) -= c;
  return out;
}

}  // namespace m4wm
