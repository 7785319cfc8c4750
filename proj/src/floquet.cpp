// Copyright 2026 The m4wm Authors
// SPDX-License-Identifier: Apache-2.0

#include "m4wm/floquet.hpp"

#include <algorithm>

#include <fmt/format.h>

namespace m4wm {

GxHarmonics parse_gx_harmonics(const std::string& s) {
  if (s == "zero") return GxHarmonics::Zero;
  if (s == "pump") return GxHarmonics::Pump;
  if (s == "full") return GxHarmonics::Full;
  throw Error("config", fmt::format("unknown gx_harmonics '{}' (zero|pump|full)", s));
}

std::string to_string(GxHarmonics h) {
  switch (h) {
    case GxHarmonics::Zero: return "zero";
    case GxHarmonics::Pump: return "pump";
    case GxHarmonics::Full: return "full";
  }
  return "pump";
}

FloquetLayout FloquetLayout::make(int q_cut, const PhysicalParams& p) {
  FloquetLayout l;
  l.q_cut = q_cut;
  for (int k = 1; k <= p.pump_pairs(); ++k)
    if (p.pump_plus(k) != 0.0 || p.pump_minus(k) != 0.0) l.pump_offsets.push_back(k);
  return l;
}

int FloquetLayout::max_offset() const {
  return pump_offsets.empty() ? 0 : *std::max_element(pump_offsets.begin(), pump_offsets.end());
}

void FloquetLayout::validate() const {
  if (q_cut < 0) throw Error("config", "Q must be >= 0");
  for (int k : pump_offsets)
    if (k < 1) throw Error("config", "pump offsets must be >= 1");
  if (!pump_offsets.empty() && q_cut < max_offset())
    throw Error("config", fmt::format("Q={} cannot host pump offset {}", q_cut, max_offset()));
}

std::vector<int> retained_harmonics(const FloquetLayout& layout, GxHarmonics h) {
  std::vector<int> js{0};
  if (h == GxHarmonics::Zero) return js;
  const int top = h == GxHarmonics::Full ? 2 * layout.q_cut : layout.max_offset();
  for (int j = 1; j <= top; ++j) {
    js.push_back(j);
    js.push_back(-j);
  }
  std::sort(js.begin(), js.end());
  return js;
}

BlockGenerator assemble(const PhysicalParams& p, const Geometry& geom, const FloquetLayout& layout, double v_z,
                        const AssembleOptions& opt) {
  layout.validate();
  BlockGenerator gen;
  gen.layout = layout;
  gen.v_z = v_z;
  gen.deflation = p.gamma_sp;
  const double k0 = p.k0();
  const int nb = layout.n_modes();
  gen.diag.resize(nb);
  for (int b = 0; b < nb; ++b)
    gen.diag[b] = build_drift(p, DopplerShift{v_z, geom.pump_projection(k0), geom.mode_projection(k0, layout.mode(b))});
  for (int k = 1; k <= layout.max_offset(); ++k) {
    gen.plus.push_back(build_pump_coupling(p, k, +1));
    gen.minus.push_back(build_pump_coupling(p, k, -1));
  }
  const std::vector<int> keep = retained_harmonics(layout, opt.gx);
  const int q_ss = layout.max_offset() == 0 ? 0 : std::max(opt.q_steady, keep.back());
  // the pump-dressed state is shared by every mode block; use the pump projection only
  const std::vector<Vec16> xs =
      pump_dressed_harmonics(p, DopplerShift{v_z, geom.pump_projection(k0), geom.pump_projection(k0)}, q_ss);
  for (int j : keep) {
    const Vec16 x = std::abs(j) <= q_ss ? xs[j + q_ss] : Vec16::Zero().eval();
    gen.state[j] = x;
    gen.g_x[j] = build_field_coupling(p, x);
  }
  gen.t_map = build_emission_map(p);
  return gen;
}

BlockBandMatrix BlockGenerator::shifted(cd s, bool deflate, bool transposed) const {
  const int nb = layout.n_modes();
  const int bw = std::min(layout.max_offset(), nb - 1);
  BlockBandMatrix a(nb, 16, bw);
  for (int b = 0; b < nb; ++b) {
    a.at(b, b) = deflate ? deflate_trace(diag[b], deflation) : diag[b];
    a.at(b, b).diagonal().array() += s;
    for (int k = 1; k <= bw; ++k) {
      if (b - k >= 0) a.at(b, b - k) = plus[k - 1];
      if (b + k < nb) a.at(b, b + k) = minus[k - 1];
    }
  }
  return transposed ? a.transpose() : a;
}

MatC BlockGenerator::dense_drift() const { return shifted(0.0, false).dense(); }

MatC BlockGenerator::dense_gx() const {
  const int nb = layout.n_modes();
  MatC g = MatC::Zero(16 * nb, 4 * nb);
  for (int n = 0; n < nb; ++n)
    for (const auto& [j, gj] : g_x) {
      const int m = n - j;
      if (m >= 0 && m < nb) g.block(16 * n, 4 * m, 16, 4) = gj;
    }
  return g;
}

MatC BlockGenerator::dense_t() const {
  const int nb = layout.n_modes();
  MatC t = MatC::Zero(4 * nb, 16 * nb);
  for (int n = 0; n < nb; ++n) t.block(4 * n, 16 * n, 4, 16) = t_map;
  return t;
}

VecR BlockGenerator::n_offsets() const {
  VecR d(layout.field_dim());
  for (int b = 0; b < layout.n_modes(); ++b) d.segment<4>(4 * b).setConstant(layout.mode(b));
  return d;
}

MatC BlockGenerator::apply_gx(const MatC& f) const {
  const int nb = layout.n_modes();
  if (f.rows() != 4 * nb) throw Error("dimension", "apply_gx: row mismatch");
  MatC out = MatC::Zero(16 * nb, f.cols());
  for (int n = 0; n < nb; ++n)
    for (const auto& [j, gj] : g_x) {
      const int m = n - j;
      if (m >= 0 && m < nb) out.middleRows(16 * n, 16).noalias() += gj * f.middleRows(4 * m, 4);
    }
  return out;
}

MatC BlockGenerator::apply_t(const MatC& x) const {
  const int nb = layout.n_modes();
  if (x.rows() != 16 * nb) throw Error("dimension", "apply_t: row mismatch");
  MatC out(4 * nb, x.cols());
  for (int n = 0; n < nb; ++n) out.middleRows(4 * n, 4).noalias() = t_map * x.middleRows(16 * n, 16);
  return out;
}

ShiftedSolver::ShiftedSolver(const BlockGenerator& gen, double omega, bool transposed, bool deflate)
    : lu_(gen.shifted(cd(0.0, omega), deflate, transposed)) {}

MatC shifted_solve(const BlockGenerator& gen, double omega, const MatC& rhs) {
  return ShiftedSolver(gen, omega).solve(rhs);
}

}  // namespace m4wm
