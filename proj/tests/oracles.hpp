// Copyright 2026 The m4wm Authors
// SPDX-License-Identifier: Apache-2.0

// Independent reference computations shared by the unit and acceptance
// tests. Dense linear algebra only; nothing here goes through the banded
// solver, the Floquet assembly or the sideband propagation code.

#pragma once

#include <cmath>
#include <vector>

#include <unsupported/Eigen/MatrixFunctions>

#include "m4wm/liouville.hpp"
#include "m4wm/spectra.hpp"

namespace m4wm::oracle {

// Solve A y = rhs where A conserves the population trace of every 16-block:
// the sigma_11 row of each block is swapped for the trace row with zero rhs.
inline MatC trace_constrained_solve(MatC a, MatC rhs) {
  const int nb = static_cast<int>(a.rows()) / 16;
  for (int b = 0; b < nb; ++b) {
    a.row(16 * b).setZero();
    for (int i = 0; i < 4; ++i) a(16 * b, 16 * b + lidx(i, i)) = 1.0;
    rhs.row(16 * b).setZero();
  }
  return a.fullPivLu().solve(rhs);
}

// Pump-dressed harmonics x^(j), |j| <= q_ss, from a dense solve.
inline std::vector<Vec16> dressed_state(const PhysicalParams& p, const DopplerShift& s, int q_ss) {
  const int nb = 2 * q_ss + 1;
  MatC a = MatC::Zero(16 * nb, 16 * nb);
  const Mat16 m0 = build_drift(p, s);
  const Mat16 mp = build_pump_coupling(p, 1, +1), mm = build_pump_coupling(p, 1, -1);
  for (int b = 0; b < nb; ++b) {
    a.block(16 * b, 16 * b, 16, 16) = m0;
    if (b > 0) a.block(16 * b, 16 * (b - 1), 16, 16) = mp;
    if (b + 1 < nb) a.block(16 * b, 16 * (b + 1), 16, 16) = mm;
  }
  for (int b = 0; b < nb; ++b) {
    a.row(16 * b).setZero();
    for (int i = 0; i < 4; ++i) a(16 * b, 16 * b + lidx(i, i)) = 1.0;
  }
  VecC rhs = VecC::Zero(16 * nb);
  rhs(16 * q_ss) = 1.0;
  const VecC x = a.partialPivLu().solve(rhs);
  std::vector<Vec16> out(nb);
  for (int b = 0; b < nb; ++b) out[b] = x.segment<16>(16 * b);
  return out;
}

// Atomic part of the mean-field generator for one pump pair at v_z = 0,
// collinear projections, retained field-coupling harmonics |j| <= 1.
inline MatC floquet_response_v0(const PhysicalParams& p, int q, int q_ss) {
  const int nb = 2 * q + 1;
  const DopplerShift s{0.0, p.k0(), p.k0()};
  const std::vector<Vec16> xs = dressed_state(p, s, q_ss);
  MatC m = MatC::Zero(16 * nb, 16 * nb), g = MatC::Zero(16 * nb, 4 * nb), t = MatC::Zero(4 * nb, 16 * nb);
  const Mat16 m0 = build_drift(p, s);
  const Mat16 mp = build_pump_coupling(p, 1, +1), mm = build_pump_coupling(p, 1, -1);
  const Mat4x16 tm = build_emission_map(p);
  for (int b = 0; b < nb; ++b) {
    m.block(16 * b, 16 * b, 16, 16) = m0;
    if (b > 0) m.block(16 * b, 16 * (b - 1), 16, 16) = mp;
    if (b + 1 < nb) m.block(16 * b, 16 * (b + 1), 16, 16) = mm;
    t.block(4 * b, 16 * b, 4, 16) = tm;
    for (int j = -1; j <= 1; ++j) {
      const int c = b - j;
      if (c >= 0 && c < nb) g.block(16 * b, 4 * c, 16, 4) = build_field_coupling(p, xs[q_ss + j]);
    }
  }
  return (-p.n_atoms / kSpeedOfLight) * t * trace_constrained_solve(m, g);
}

// Removes the self-phase of the seeded mode from every block.
inline MatC seed_referenced(MatC r, int q) {
  const int c = 4 * q;
  VecC ref(4);
  for (int s = 0; s < 4; ++s) ref(s) = cd(0.0, r(c + s, c + s).imag());
  for (int b = 0; b < 2 * q + 1; ++b)
    for (int s = 0; s < 4; ++s) r(4 * b + s, 4 * b + s) -= ref(s);
  return r;
}

// Fourth-order z-stepping of dB/dz = e^{i N dk z} R_at e^{-i N dk z} B, then
// back to the harmonic amplitudes A^(n) = e^{-i n dk z} B^(n).
inline VecC rk4_harmonics(const MatC& r_at, double dk, const VecC& a0, double length, int steps) {
  const int dim = static_cast<int>(r_at.rows());
  VecR n(dim);
  for (int i = 0; i < dim; ++i) n(i) = i / 4 - (dim / 4 - 1) / 2;
  auto rhs = [&](double z, const VecC& b) {
    VecC out = VecC::Zero(dim);
    for (int i = 0; i < dim; ++i)
      for (int j = 0; j < dim; ++j)
        if (r_at(i, j) != cd(0.0)) out(i) += std::polar(1.0, (n(i) - n(j)) * dk * z) * r_at(i, j) * b(j);
    return out;
  };
  VecC b = a0;
  const double h = length / steps;
  for (int k = 0; k < steps; ++k) {
    const double z = k * h;
    const VecC k1 = rhs(z, b), k2 = rhs(z + h / 2, b + h / 2 * k1), k3 = rhs(z + h / 2, b + h / 2 * k2),
               k4 = rhs(z + h, b + h * k3);
    b += h / 6 * (k1 + 2 * k2 + 2 * k3 + k4);
  }
  for (int i = 0; i < dim; ++i) b(i) *= std::polar(1.0, -n(i) * dk * length);
  return b;
}

// Composite Simpson rule for int_0^z e^{R s} B e^{R'^T s} ds.
inline MatC simpson_integral(const MatC& r, const MatC& rp, const MatC& b, double z, int panels) {
  const double h = z / panels;
  const MatC step = (r * h).exp(), stepp = (rp.transpose() * h).exp();
  MatC el = MatC::Identity(r.rows(), r.cols()), er = el;
  MatC acc = MatC::Zero(r.rows(), r.cols());
  for (int k = 0; k <= panels; ++k) {
    const double w = (k == 0 || k == panels) ? 1.0 : (k % 2 ? 4.0 : 2.0);
    acc += w * el * b * er;
    el = el * step;
    er = er * stepp;
  }
  return acc * (h / 3.0);
}

// Two-mode squeezed vacuum in (P, Q) ordering per mode.
inline MatR tmsv(double r) {
  const double c = std::cosh(2 * r), s = std::sinh(2 * r);
  MatR v = MatR::Zero(4, 4);
  v.diagonal().setConstant(c);
  v(0, 2) = v(2, 0) = s;
  v(1, 3) = v(3, 1) = -s;
  return v;
}

// Standalone single-pump two-mode model: 4x4 field generator, Doppler sum
// over the given nodes, noise with the nominal normalization 2c/N.
struct TwoMode {
  PhysicalParams p;
  std::vector<double> v, w;
  Geometry geom{};

  Mat16 drift(double vz) const {
    return build_drift(p, DopplerShift{vz, geom.pump_projection(p.k0()), geom.mode_projection(p.k0(), 0)});
  }
  Vec16 state(double vz) const {
    MatC a = MatC(drift(vz));
    VecC rhs = VecC::Zero(16);
    a.row(0).setZero();
    for (int i = 0; i < 4; ++i) a(0, lidx(i, i)) = 1.0;
    rhs(0) = 1.0;
    return a.partialPivLu().solve(rhs);
  }
  MatC response(double omega) const {
    MatC acc = MatC::Zero(4, 4);
    const MatC t = build_emission_map(p);
    for (size_t i = 0; i < v.size(); ++i) {
      const MatC g = build_field_coupling(p, state(v[i]));
      MatC m = drift(v[i]);
      if (omega == 0.0) {
        acc += w[i] * t * trace_constrained_solve(m, g);
      } else {
        m.diagonal().array() += cd(0.0, omega);
        acc += w[i] * t * m.partialPivLu().solve(g);
      }
    }
    return (-p.n_atoms / kSpeedOfLight) * acc;
  }
  VecC reference() const {
    const MatC r0 = response(0.0);
    VecC ref(4);
    for (int s = 0; s < 4; ++s) ref(s) = cd(0.0, r0(s, s).imag());
    return ref;
  }
  MatC generator(double omega) const {
    MatC r = response(omega);
    const VecC ref = reference();
    for (int s = 0; s < 4; ++s) r(s, s) += cd(0.0, omega / kSpeedOfLight) - ref(s);
    return r;
  }
  // B(+-omega) = sum_v w Y(+-) D' Y(-+)^T
  MatC noise_source(double omega) const {
    MatC acc = MatC::Zero(4, 4);
    const MatC t = build_emission_map(p);
    for (size_t i = 0; i < v.size(); ++i) {
      const Vec16 x = state(v[i]);
      const Mat16 m = drift(v[i]);
      const Mat16 d = build_diffusion(p, x), c = commutator_matrix(x);
      const MatC dp = MatC(0.5 * (d + d.transpose()) - 0.25 * (m * c + c * m.transpose()));
      MatC mp = MatC(m), mm = MatC(m);
      mp.diagonal().array() += cd(0.0, omega);
      mm.diagonal().array() -= cd(0.0, omega);
      const MatC yp = t * mp.inverse(), ym = t * mm.inverse();
      acc += w[i] * yp * dp * ym.transpose();
    }
    const double s = p.n_atoms / kSpeedOfLight;
    return s * s * acc;
  }
  // full-length Van Loan: int_0^z e^{R s} B e^{R'^T s} ds
  static MatC integral(const MatC& r, const MatC& rp, const MatC& b, double z) {
    MatC big = MatC::Zero(8, 8);
    big.topLeftCorner(4, 4) = r;
    big.topRightCorner(4, 4) = b;
    big.bottomRightCorner(4, 4) = -rp.transpose();
    const MatC e = (big * z).exp();
    return e.topRightCorner(4, 4) * (rp.transpose() * z).exp();
  }
  // mean field of a unit seed in a0, and the a0 / b0 gains
  VecC mean() const {
    VecC seed = VecC::Zero(4);
    seed(kA) = 1.0;
    seed(kAdag) = 1.0;
    return (generator(0.0) * p.cell_length).exp() * seed;
  }
  double gain() const {
    const VecC m = mean();
    return std::abs(m(kA) * m(kAdag));
  }
  double gain_conjugate() const {
    const VecC m = mean();
    return std::abs(m(kB) * m(kBdag));
  }
  // (a0, b0) CM at analysis frequency omega
  MatR covariance(double omega) const {
    const double z = p.cell_length;
    const VecC m = mean();
    const double pa = std::arg(m(kA)), pb = std::arg(m(kB));
    const MatC rp = generator(omega), rm = generator(-omega);
    const double kappa = 2.0 * kSpeedOfLight / p.n_atoms;
    MatC s0 = MatC::Zero(4, 4);
    s0(kA, kAdag) = 1.0;
    s0(kB, kBdag) = 1.0;
    const MatC jp = (rp * z).exp(), jm = (rm * z).exp();
    const MatC sp = jp * s0 * jm.transpose() + kappa * integral(rp, rm, noise_source(omega), z);
    const MatC sm = jm * s0 * jp.transpose() + kappa * integral(rm, rp, noise_source(-omega), z);
    MatC u = MatC::Zero(4, 4);
    const cd ea = std::polar(1.0, -pa), eb = std::polar(1.0, -pb);
    u(0, kA) = ea;
    u(0, kAdag) = std::conj(ea);
    u(1, kA) = -kI * ea;
    u(1, kAdag) = kI * std::conj(ea);
    u(2, kB) = eb;
    u(2, kBdag) = std::conj(eb);
    u(3, kB) = -kI * eb;
    u(3, kBdag) = kI * std::conj(eb);
    const MatC vp = u * sp * u.transpose(), vm = u * sm * u.transpose();
    return (0.25 * (vp + vp.transpose() + vm + vm.transpose())).real();
  }
};

}  // namespace m4wm::oracle
