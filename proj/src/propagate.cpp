// Copyright 2026 The m4wm Authors
// SPDX-License-Identifier: Apache-2.0

#include "m4wm/propagate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>
#include <unsupported/Eigen/MatrixFunctions>

namespace m4wm {

PhaseReference parse_phase_reference(const std::string& s) {
  if (s == "seed") return PhaseReference::Seed;
  if (s == "vacuum") return PhaseReference::Vacuum;
  throw Error("config", fmt::format("unknown phase_reference '{}' (seed|vacuum)", s));
}

std::string to_string(PhaseReference r) { return r == PhaseReference::Seed ? "seed" : "vacuum"; }

Medium::Medium(const PhysicalParams& p, const Geometry& g, const ModelOptions& opt)
    : params_(p), geom_(g), opt_(opt), layout_(FloquetLayout::make(opt.q_cut, p)) {
  params_.validate();
  layout_.validate();
  if (opt.doppler_nodes < 1) throw Error("config", "doppler_nodes must be >= 1");
  quad_ = VelocityQuadrature::gauss_hermite(opt.doppler_nodes, p.doppler_sigma);
  const AssembleOptions aopt{opt.gx, opt.q_steady};
  gens_.reserve(quad_.size());
  for (double v : quad_.v) gens_.push_back(assemble(p, g, layout_, v, aopt));
  response0_ = atomic_response(0.0);
  reference_ = VecC::Zero(layout_.field_dim());
  if (opt.phase_reference == PhaseReference::Seed) {
    const int c = 4 * layout_.position(0);
    for (int b = 0; b < layout_.n_modes(); ++b)
      for (int s = 0; s < 4; ++s) reference_(4 * b + s) = cd(0.0, response0_(c + s, c + s).imag());
  }
}

MatC Medium::atomic_response(double omega) const {
  if (omega == 0.0 && response0_.size() > 0) return response0_;
  const int fd = layout_.field_dim();
  MatC acc = MatC::Zero(fd, fd);
  const MatC eye = MatC::Identity(fd, fd);
  for (int i = 0; i < quad_.size(); ++i) {
    const BlockGenerator& gen = gens_[i];
    std::unique_ptr<ShiftedSolver> solver;
    try {
      solver = std::make_unique<ShiftedSolver>(gen, omega);
    } catch (const Error& e) {
      throw Error(e.kind(), fmt::format("{} (velocity node v_z = {:.3f} m/s)", e.what(), quad_.v[i]));
    }
    acc.noalias() += quad_.w[i] * gen.apply_t(solver->solve(gen.apply_gx(eye)));
  }
  return (-params_.n_atoms / kSpeedOfLight) * acc;
}

VecC Medium::free_diagonal(double omega) const {
  const VecR n = gens_.front().n_offsets();
  VecC d(n.size());
  const double dk = delta_kz();
  for (int i = 0; i < n.size(); ++i) d(i) = cd(0.0, omega / kSpeedOfLight - n(i) * dk) - reference_(i);
  return d;
}

MatC Medium::build_R(double omega) const {
  MatC r = atomic_response(omega);
  r.diagonal() += free_diagonal(omega);
  return r;
}

MatC propagator(const MatC& r, double z) {
  if (z == 0.0) return MatC::Identity(r.rows(), r.cols());
  const MatC rz = r * z;
  MatC j = rz.exp();
  const double g = j.cwiseAbs2().maxCoeff();
  if (!std::isfinite(g) || g > 1e12)
    throw Error("overflow", fmt::format("propagator gain {:.3e} exceeds 1e12; review N, L or detunings", g));
  return j;
}

VecC seed_field(const FloquetLayout& l, cd alpha) {
  VecC a = VecC::Zero(l.field_dim());
  a(field_index(l, kA, 0)) = alpha;
  a(field_index(l, kAdag, 0)) = std::conj(alpha);
  return a;
}

VecC propagate_mean(const MatC& r, const VecC& input, double z) { return propagator(r, z) * input; }

MatC input_covariance(const FloquetLayout& l, cd alpha) {
  const VecC a = seed_field(l, alpha);
  return a * a.transpose();
}

MatC gain_matrix(const MatC& j, const MatC& c0) { return j * c0 * j.transpose(); }

const char* channel_name(Channel c) { return c == kProbe ? "probe" : "conjugate"; }

double GainTable::max_gain(Channel c) const {
  const auto& g = c == kProbe ? gain_a : gain_b;
  return *std::max_element(g.begin(), g.end());
}

std::vector<int> GainTable::populated(Channel c, double frac) const {
  std::vector<int> out;
  const double thr = frac * max_gain(c);
  for (int n = -q_cut; n <= q_cut; ++n)
    if (gain(c, n) >= thr && gain(c, n) > 0.0) out.push_back(n);
  return out;
}

GainTable mode_gains(const FloquetLayout& l, const MatC& c_z, cd alpha, const VecC& mean) {
  GainTable t;
  t.q_cut = l.q_cut;
  t.amps = mean;
  const double a2 = std::norm(alpha);
  if (a2 == 0.0) throw Error("config", "seed amplitude must be nonzero");
  for (int n = -l.q_cut; n <= l.q_cut; ++n) {
    // slot (a^dag, -n) holds (a^(n))^dag
    t.gain_a.push_back(std::abs(c_z(field_index(l, kA, n), field_index(l, kAdag, -n))) / a2);
    t.gain_b.push_back(std::abs(c_z(field_index(l, kB, n), field_index(l, kBdag, -n))) / a2);
    t.phase_a.push_back(std::arg(mean(field_index(l, kA, n))));
    t.phase_b.push_back(std::arg(mean(field_index(l, kB, n))));
  }
  return t;
}

namespace {

GainTable gains_from_propagator(const FloquetLayout& l, const MatC& j, cd alpha) {
  const VecC mean = j * seed_field(l, alpha);
  return mode_gains(l, gain_matrix(j, input_covariance(l, alpha)), alpha, mean);
}

}  // namespace

GainTable compute_gains(const Medium& m, double z, cd alpha) {
  return gains_from_propagator(m.layout(), propagator(m.build_R(0.0), z), alpha);
}

std::vector<GainTable> z_scan(const MatC& r, const FloquetLayout& l, cd alpha, const std::vector<double>& z) {
  std::vector<GainTable> out;
  out.reserve(z.size());
  for (double zi : z) out.push_back(gains_from_propagator(l, propagator(r, zi), alpha));
  return out;
}

std::vector<ConvergenceRow> convergence_check(const PhysicalParams& p, const Geometry& g, const ModelOptions& opt,
                                              int q, int q_ref, const std::vector<double>& delta2_grid,
                                              const std::vector<int>& modes, double floor) {
  std::vector<ConvergenceRow> rows;
  for (double d2 : delta2_grid) {
    PhysicalParams pp = p;
    pp.delta2 = d2;
    ModelOptions o = opt;
    o.q_cut = q;
    const GainTable gq = compute_gains(Medium(pp, g, o), pp.cell_length);
    o.q_cut = q_ref;
    const GainTable gr = compute_gains(Medium(pp, g, o), pp.cell_length);
    for (Channel c : {kProbe, kConjugate})
      for (int n : modes) {
        if (std::abs(n) > std::min(q, q_ref)) continue;
        ConvergenceRow row;
        row.delta2 = d2;
        row.channel = c;
        row.mode = n;
        row.gain = gq.gain(c, n);
        row.gain_ref = gr.gain(c, n);
        row.residual = std::abs(row.gain - row.gain_ref) / std::max(row.gain_ref, floor);
        rows.push_back(row);
      }
  }
  return rows;
}

Calibration calibrate_n(const PhysicalParams& p, const Geometry& g, const ModelOptions& opt, double target) {
  if (!(target > 0.0)) throw Error("config", "calibration target must be > 0");
  auto gain_at = [&](double log_n) {
    PhysicalParams pp = p;
    pp.n_atoms = std::pow(10.0, log_n);
    try {
      return compute_gains(Medium(pp, g, opt), pp.cell_length).gain(kProbe, 0);
    } catch (const Error& e) {
      // past the overflow guard the gain is above any sane target
      if (e.kind() != "overflow") throw;
      return std::numeric_limits<double>::infinity();
    }
  };
  Calibration cal;
  if (p.g_a == 0.0 && p.g_b == 0.0) {
    cal.n_atoms = p.n_atoms;
    cal.gain = 1.0;
    cal.degenerate = true;
    return cal;
  }
  // bracket on a decade ladder, then bisect in log N
  double lo = 0.0, hi = 0.0;
  double g_lo = gain_at(lo);
  bool found = false;
  for (double e = 1.0; e <= 20.0; e += 1.0) {
    const double ge = gain_at(e);
    if ((ge - target) * (g_lo - target) <= 0.0) {
      hi = e;
      found = true;
      break;
    }
    lo = e;
    g_lo = ge;
  }
  if (!found) throw Error("calibration", fmt::format("no N in [1, 1e20] reaches probe gain {}", target));
  double mid = hi, gm = 0.0;
  for (int step = 1; step <= 60; ++step) {
    mid = 0.5 * (lo + hi);
    gm = gain_at(mid);
    cal.steps = step;
    if (std::abs(gm / target - 1.0) < 1e-3) break;
    if ((gm - target) * (g_lo - target) > 0.0) {
      lo = mid;
      g_lo = gm;
    } else {
      hi = mid;
    }
  }
  cal.n_atoms = std::pow(10.0, mid);
  cal.gain = gm;
  if (std::abs(gm / target - 1.0) > 0.01)
    throw Error("calibration", fmt::format("bisection stalled at gain {:.4f} (target {})", gm, target));
  return cal;
}

}  // namespace m4wm
