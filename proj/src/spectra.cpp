// Copyright 2026 The m4wm Authors
// SPDX-License-Identifier: Apache-2.0

#include "m4wm/spectra.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>

#include <fmt/format.h>
#include <unsupported/Eigen/MatrixFunctions>

namespace m4wm {

MatC DiffusionBlocks::dense() const {
  MatC d = MatC::Zero(16 * n_modes, 16 * n_modes);
  for (size_t i = 0; i < index.size(); ++i) d.block(16 * index[i].first, 16 * index[i].second, 16, 16) = block[i];
  return d;
}

MatC DiffusionBlocks::left_multiply(const MatC& x) const {
  MatC z = MatC::Zero(x.rows(), 16 * n_modes);
  for (size_t i = 0; i < index.size(); ++i) {
    const auto [n, m] = index[i];
    z.middleCols(16 * m, 16).noalias() += x.middleCols(16 * n, 16) * block[i];
  }
  return z;
}

namespace {

using BlockMap = std::map<std::pair<int, int>, MatC>;

// Blocks of the deflated drift M' in (row, col) form.
BlockMap drift_blocks(const BlockGenerator& gen) {
  BlockMap m;
  const int nb = gen.layout.n_modes();
  const int bw = std::min(gen.layout.max_offset(), nb - 1);
  for (int b = 0; b < nb; ++b) {
    m[{b, b}] = deflate_trace(gen.diag[b], gen.deflation);
    for (int k = 1; k <= bw; ++k) {
      if (b - k >= 0) m[{b, b - k}] = gen.plus[k - 1];
      if (b + k < nb) m[{b, b + k}] = gen.minus[k - 1];
    }
  }
  return m;
}

// Blocks at (n, m) with (n - Q) + (m - Q) a retained harmonic.
template <typename F>
BlockMap harmonic_blocks(const BlockGenerator& gen, F&& f) {
  BlockMap out;
  const int nb = gen.layout.n_modes(), q = gen.layout.q_cut;
  for (const auto& [j, x] : gen.state) {
    const MatC blk = f(x);
    for (int n = 0; n < nb; ++n) {
      const int m = j + 2 * q - n;
      if (m >= 0 && m < nb) out[{n, m}] = blk;
    }
  }
  return out;
}

void add_to(BlockMap& acc, std::pair<int, int> key, const MatC& v) {
  auto it = acc.find(key);
  if (it == acc.end())
    acc.emplace(key, v);
  else
    it->second += v;
}

// x * G for x with 16 * nb columns
MatC right_multiply_gx(const BlockGenerator& gen, const MatC& x) {
  const int nb = gen.layout.n_modes();
  MatC out = MatC::Zero(x.rows(), 4 * nb);
  for (int n = 0; n < nb; ++n)
    for (const auto& [j, gj] : gen.g_x) {
      const int m = n - j;
      if (m >= 0 && m < nb) out.middleCols(4 * m, 4).noalias() += x.middleCols(16 * n, 16) * gj;
    }
  return out;
}

MatC dense_t_transpose(const BlockGenerator& gen) { return gen.dense_t().transpose(); }

}  // namespace

DiffusionBlocks build_diffusion_blocks(const PhysicalParams& p, const BlockGenerator& gen) {
  const BlockMap sym = harmonic_blocks(gen, [&](const Vec16& x) {
    const Mat16 d = build_diffusion(p, x);
    return MatC(0.5 * (d + d.transpose()));
  });
  const BlockMap comm = harmonic_blocks(gen, [](const Vec16& x) { return MatC(commutator_matrix(x)); });
  const BlockMap drift = drift_blocks(gen);
  // antisymmetric part: -(M' C + C M'^T) / 4
  BlockMap acc = sym;
  for (const auto& [kc, c] : comm) {
    const auto [k, m] = kc;
    for (const auto& [nd, md] : drift) {
      if (nd.second == k) add_to(acc, {nd.first, m}, -0.25 * md * c);
      // (C M'^T)_{k', m'} gets C_{k m} (M'_{m' m})^T
      if (nd.second == m) add_to(acc, {k, nd.first}, -0.25 * c * md.transpose());
    }
  }
  DiffusionBlocks out;
  out.n_modes = gen.layout.n_modes();
  for (auto& [key, blk] : acc) {
    out.index.push_back(key);
    out.block.push_back(std::move(blk));
  }
  return out;
}

MatC dense_commutator(const BlockGenerator& gen) {
  const BlockMap comm = harmonic_blocks(gen, [](const Vec16& x) { return MatC(commutator_matrix(x)); });
  const int nb = gen.layout.n_modes();
  MatC c = MatC::Zero(16 * nb, 16 * nb);
  for (const auto& [key, blk] : comm) c.block(16 * key.first, 16 * key.second, 16, 16) = blk;
  return c;
}

NoiseGenerators build_noise_generators(const Medium& med, double omega) {
  const int fd = med.field_dim();
  NoiseGenerators ng;
  ng.omega = omega;
  ng.r_plus = MatC::Zero(fd, fd);
  ng.r_minus = MatC::Zero(fd, fd);
  ng.b_plus = MatC::Zero(fd, fd);
  ng.b_minus = MatC::Zero(fd, fd);
  const double scale = -med.params().n_atoms / kSpeedOfLight;
  const auto& quad = med.quadrature();
  for (int i = 0; i < quad.size(); ++i) {
    const BlockGenerator& gen = med.generators()[i];
    const MatC tt = dense_t_transpose(gen);
    MatC yp, ym;
    try {
      yp = (scale * ShiftedSolver(gen, omega, true).solve(tt)).transpose();
      ym = omega == 0.0 ? yp : MatC((scale * ShiftedSolver(gen, -omega, true).solve(tt)).transpose());
    } catch (const Error& e) {
      throw Error(e.kind(), fmt::format("{} (velocity node v_z = {:.3f} m/s)", e.what(), quad.v[i]));
    }
    const double w = quad.w[i];
    ng.r_plus.noalias() += w * right_multiply_gx(gen, yp);
    ng.r_minus.noalias() += w * right_multiply_gx(gen, ym);
    // velocity classes carry independent noise
    const DiffusionBlocks d = build_diffusion_blocks(med.params(), gen);
    ng.b_plus.noalias() += w * (d.left_multiply(yp) * ym.transpose());
    ng.b_minus.noalias() += w * (d.left_multiply(ym) * yp.transpose());
  }
  const VecC fp = med.free_diagonal(omega), fm = med.free_diagonal(-omega);
  ng.r_plus.diagonal() += fp;
  ng.r_minus.diagonal() += fm;
  return ng;
}

SidebandPropagation propagate_sideband(const MatC& r, const MatC& r_prime, const MatC& b, double z) {
  const int n = static_cast<int>(r.rows());
  SidebandPropagation out;
  if (z == 0.0) {
    out.j = MatC::Identity(n, n);
    out.j_prime = MatC::Identity(n, n);
    out.w = MatC::Zero(n, n);
    return out;
  }
  // Van Loan on a short step, then W(2h) = W(h) + E(h) W(h) E'(h)^T.
  // The direct form over the full length mixes e^{+Rz} and e^{-Rz} and
  // cancels catastrophically once a sideband is strongly absorbed.
  const double norm = std::max(r.cwiseAbs().colwise().sum().maxCoeff(), r_prime.cwiseAbs().colwise().sum().maxCoeff());
  int k = 0;
  while (norm * std::abs(z) / std::ldexp(1.0, k) > 0.5 && k < 60) ++k;
  const double h = z / std::ldexp(1.0, k);
  MatC big = MatC::Zero(2 * n, 2 * n);
  big.topLeftCorner(n, n) = -r;
  big.topRightCorner(n, n) = b;
  big.bottomRightCorner(n, n) = r_prime.transpose();
  const MatC e = (big * h).exp();
  // e = [[e^{-Rh}, e^{-Rh} W(h)], [0, e^{R'^T h}]]
  MatC ej = r * h;
  ej = ej.exp();
  MatC w = ej * e.topRightCorner(n, n);
  MatC ejp = e.bottomRightCorner(n, n).transpose();
  for (int i = 0; i < k; ++i) {
    w += ej * w * ejp.transpose();
    ej = ej * ej;
    ejp = ejp * ejp;
  }
  const double g = std::max(ej.cwiseAbs2().maxCoeff(), ejp.cwiseAbs2().maxCoeff());
  if (!std::isfinite(g) || g > 1e12)
    throw Error("overflow", fmt::format("sideband propagator gain {:.3e} exceeds 1e12", g));
  out.j = std::move(ej);
  out.j_prime = std::move(ejp);
  out.w = std::move(w);
  return out;
}

MatC noise_integral(const MatC& r, const MatC& r_prime, const MatC& b, double z) {
  return propagate_sideband(r, r_prime, b, z).w;
}

MatC commutator_reference(const FloquetLayout& l) {
  MatC k = MatC::Zero(l.field_dim(), l.field_dim());
  for (int n = -l.q_cut; n <= l.q_cut; ++n) {
    k(field_index(l, kA, n), field_index(l, kAdag, -n)) = 1.0;
    k(field_index(l, kAdag, -n), field_index(l, kA, n)) = -1.0;
    k(field_index(l, kB, n), field_index(l, kBdag, -n)) = 1.0;
    k(field_index(l, kBdag, -n), field_index(l, kB, n)) = -1.0;
  }
  return k;
}

MatC input_spectrum(const FloquetLayout& l) {
  MatC s = MatC::Zero(l.field_dim(), l.field_dim());
  for (int n = -l.q_cut; n <= l.q_cut; ++n) {
    s(field_index(l, kA, n), field_index(l, kAdag, -n)) = 1.0;
    s(field_index(l, kB, n), field_index(l, kBdag, -n)) = 1.0;
  }
  return s;
}

NoisePoint output_spectrum(const Medium& med, double omega, double z) {
  const NoiseGenerators ng = build_noise_generators(med, omega);
  const FloquetLayout& l = med.layout();
  const MatC s0 = input_spectrum(l), k = commutator_reference(l);
  NoisePoint out;
  out.omega = omega;
  out.z = z;
  out.kappa_nominal = med.params().n_atoms > 0.0 ? 2.0 * kSpeedOfLight / med.params().n_atoms : 0.0;
  if (z == 0.0) {
    out.s_plus = s0;
    out.s_minus = s0;
    out.kappa = out.kappa_nominal;
    return out;
  }
  const SidebandPropagation fw = propagate_sideband(ng.r_plus, ng.r_minus, ng.b_plus, z);
  const SidebandPropagation bw = propagate_sideband(ng.r_minus, ng.r_plus, ng.b_minus, z);
  const MatC x = fw.w - bw.w.transpose();
  const MatC free = fw.j * k * fw.j_prime.transpose();
  const MatC target = k - free;
  const double xx = x.squaredNorm();
  // the fit is only meaningful when the atomic noise moves the commutators
  if (xx > 1e-24 * std::max(1.0, target.squaredNorm()) && xx > 1e-30)
    out.kappa = (x.conjugate().cwiseProduct(target)).sum().real() / xx;
  else
    out.kappa = out.kappa_nominal;
  out.commutator_residual = (free + out.kappa * x - k).cwiseAbs().maxCoeff();
  out.s_plus = fw.j * s0 * fw.j_prime.transpose() + out.kappa * fw.w;
  out.s_minus = bw.j * s0 * bw.j_prime.transpose() + out.kappa * bw.w;
  return out;
}

std::string mode_label(const ModeRef& r) { return fmt::format("{}{}", r.channel == kProbe ? 'a' : 'b', r.n); }

ModeRef parse_mode_label(const std::string& s) {
  if (s.size() < 2 || (s[0] != 'a' && s[0] != 'b') || !(std::isdigit(static_cast<unsigned char>(s[1])) || s[1] == '-'))
    throw Error("config", fmt::format("bad mode label '{}'", s));
  ModeRef r;
  r.channel = s[0] == 'a' ? kProbe : kConjugate;
  try {
    size_t pos = 0;
    r.n = std::stoi(s.substr(1), &pos);
    if (pos != s.size() - 1) throw std::invalid_argument(s);
  } catch (const std::exception&) {
    throw Error("config", fmt::format("bad mode label '{}'", s));
  }
  return r;
}

std::vector<ModeRef> paired_modes(const std::vector<int>& ns) {
  std::vector<ModeRef> out;
  for (int n : ns) {
    out.push_back({kProbe, n});
    out.push_back({kConjugate, n});
  }
  return out;
}

std::vector<ModeRef> hexapartite_modes() {
  return {{kProbe, -2}, {kProbe, 0}, {kProbe, 2}, {kConjugate, -2}, {kConjugate, 0}, {kConjugate, 2}};
}

MatC quadrature_frame(const FloquetLayout& l, const std::vector<ModeRef>& modes, const std::vector<double>& phases) {
  if (phases.size() != modes.size()) throw Error("dimension", "one carrier phase per mode required");
  MatC u = MatC::Zero(2 * modes.size(), l.field_dim());
  for (size_t i = 0; i < modes.size(); ++i) {
    const ModeRef& r = modes[i];
    if (std::abs(r.n) > l.q_cut) throw Error("config", fmt::format("mode {} outside Q={}", mode_label(r), l.q_cut));
    const Slot s = r.channel == kProbe ? kA : kB;
    const Slot sd = r.channel == kProbe ? kAdag : kBdag;
    const cd e = std::polar(1.0, -phases[i]);
    const int ia = field_index(l, s, r.n), id = field_index(l, sd, -r.n);
    u(2 * i, ia) = e;
    u(2 * i, id) = std::conj(e);
    u(2 * i + 1, ia) = -kI * e;
    u(2 * i + 1, id) = kI * std::conj(e);
  }
  return u;
}

std::vector<double> carrier_phases(const GainTable& g, const std::vector<ModeRef>& modes, cd alpha) {
  std::vector<double> ph;
  const FloquetLayout l{g.q_cut, {}};
  for (const ModeRef& r : modes) {
    const cd a = g.amps(field_index(l, r.channel == kProbe ? kA : kB, r.n));
    ph.push_back(std::abs(a) < 1e-12 * std::abs(alpha) ? 0.0 : std::arg(a));
  }
  return ph;
}

CovarianceMatrix covariance(const MatC& u, const MatC& s_plus, const MatC& s_minus, const std::vector<ModeRef>& modes) {
  const MatC vp = u * s_plus * u.transpose();
  const MatC vm = u * s_minus * u.transpose();
  const MatC vs = 0.25 * (vp + vp.transpose() + vm + vm.transpose());
  const double scale = std::max(1.0, vs.real().cwiseAbs().maxCoeff());
  const double imag = vs.imag().cwiseAbs().maxCoeff();
  if (imag > 1e-9 * scale)
    throw Error("symmetry", fmt::format("covariance has imaginary residue {:.3e}; conjugation symmetry broken", imag));
  CovarianceMatrix cm;
  cm.v = vs.real();
  cm.modes = modes;
  cm.imag_residue = imag;
  return cm;
}

CovarianceMatrix apply_losses(const CovarianceMatrix& v, double eta) {
  if (!(eta >= 0.0 && eta <= 1.0)) throw Error("config", "eta must lie in [0, 1]");
  CovarianceMatrix out = v;
  const int d = static_cast<int>(v.v.rows());
  out.v = eta * (v.v - MatR::Identity(d, d)) + MatR::Identity(d, d);
  out.eta = v.eta * eta;
  return out;
}

MatR symplectic_form(int n_modes) {
  MatR o = MatR::Zero(2 * n_modes, 2 * n_modes);
  for (int i = 0; i < n_modes; ++i) {
    o(2 * i, 2 * i + 1) = 1.0;
    o(2 * i + 1, 2 * i) = -1.0;
  }
  return o;
}

double bona_fide_margin(const CovarianceMatrix& v) {
  const MatC h = v.v.cast<cd>() + kI * symplectic_form(v.dim()).cast<cd>();
  Eigen::SelfAdjointEigenSolver<MatC> es(h, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

}  // namespace m4wm
