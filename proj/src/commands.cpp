// Copyright 2026 The m4wm Authors
// SPDX-License-Identifier: Apache-2.0

#include "m4wm/commands.hpp"

#include <cmath>
#include <fstream>

#include <fmt/format.h>

#include "m4wm/parallel.hpp"

namespace m4wm {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct GridPoint {
  Geometry geom;
  double delta2 = 0.0;  // rad/s
};

std::vector<GridPoint> parameter_grid(const RunConfig& c) {
  std::vector<GridPoint> pts;
  for (const Geometry& g : c.geometry_grid())
    for (double d : c.delta2_grid()) pts.push_back({g, d});
  return pts;
}

PhysicalParams at_delta(const RunConfig& c, double delta2) {
  PhysicalParams p = c.physics();
  p.delta2 = delta2;
  return p;
}

std::string num(double x) { return fmt::format("{:.10g}", x); }

std::ofstream open_out(const fs::path& p) {
  std::ofstream f(p);
  if (!f) throw Error("io", fmt::format("cannot write '{}'", p.string()));
  return f;
}

void write_gain_csv(const std::vector<GainPoint>& pts, const fs::path& path) {
  std::ofstream f = open_out(path);
  f << "delta2_over_2pi_MHz,theta_eff_mrad,z_cm,channel,mode_index,gain,phase_rad\n";
  for (const GainPoint& p : pts)
    for (Channel ch : {kProbe, kConjugate})
      for (int n = -p.gains.q_cut; n <= p.gains.q_cut; ++n)
        f << num(p.delta2_mhz) << ',' << num(p.theta_eff_mrad) << ',' << num(100.0 * p.z_m) << ','
          << channel_name(ch) << ',' << n << ',' << num(p.gains.gain(ch, n)) << ',' << num(p.gains.phase(ch, n))
          << '\n';
}

// probe row and conjugate row per point, one column per mode
void write_profile_csv(const std::vector<GainPoint>& pts, const fs::path& path) {
  std::ofstream f = open_out(path);
  const int q = pts.empty() ? 0 : pts.front().gains.q_cut;
  f << "delta2_over_2pi_MHz,theta_eff_mrad,z_cm,channel";
  for (int n = -q; n <= q; ++n) f << ",mode_" << n;
  f << '\n';
  for (const GainPoint& p : pts)
    for (Channel ch : {kProbe, kConjugate}) {
      f << num(p.delta2_mhz) << ',' << num(p.theta_eff_mrad) << ',' << num(100.0 * p.z_m) << ','
        << channel_name(ch);
      for (int n = -q; n <= q; ++n) f << ',' << num(p.gains.gain(ch, n));
      f << '\n';
    }
}

json mode_count_summary(const std::vector<GainPoint>& pts) {
  json rows = json::array();
  for (const GainPoint& p : pts)
    rows.push_back({{"delta2_over_2pi_MHz", p.delta2_mhz},
                    {"theta_eff_mrad", p.theta_eff_mrad},
                    {"z_cm", 100.0 * p.z_m},
                    {"probe_modes", p.gains.populated(kProbe)},
                    {"conjugate_modes", p.gains.populated(kConjugate)}});
  return rows;
}

}  // namespace

std::vector<GainPoint> gain_scan(const RunConfig& c, int workers) {
  validate(c);
  const std::vector<GridPoint> grid = parameter_grid(c);
  std::vector<GainPoint> out(grid.size());
  parallel_for(static_cast<int>(grid.size()), workers, [&](int i) {
    const GridPoint& g = grid[i];
    const Medium m(at_delta(c, g.delta2), g.geom, c.model);
    out[i] = {to_mhz(g.delta2), 1e3 * g.geom.theta_eff(), c.cell_length_m, compute_gains(m, c.cell_length_m, c.seed_alpha)};
  });
  return out;
}

std::vector<GainPoint> z_scan_points(const RunConfig& c, int workers) {
  validate(c);
  const std::vector<GridPoint> grid = parameter_grid(c);
  const std::vector<double> zs = c.z_grid();
  std::vector<GainPoint> out(grid.size() * zs.size());
  parallel_for(static_cast<int>(grid.size()), workers, [&](int i) {
    const GridPoint& g = grid[i];
    const Medium m(at_delta(c, g.delta2), g.geom, c.model);
    const std::vector<GainTable> tables = z_scan(m.build_R(0.0), m.layout(), c.seed_alpha, zs);
    for (size_t k = 0; k < zs.size(); ++k)
      out[i * zs.size() + k] = {to_mhz(g.delta2), 1e3 * g.geom.theta_eff(), zs[k], tables[k]};
  });
  return out;
}

std::vector<NoiseObservation> analyze_point(const Medium& m, const std::vector<double>& omegas,
                                            const std::vector<ModeRef>& modes, double eta, double alpha) {
  const double z = m.params().cell_length;
  const GainTable gains = compute_gains(m, z, alpha);
  const std::vector<double> phases = carrier_phases(gains, modes, alpha);
  const MatC u = quadrature_frame(m.layout(), modes, phases);
  std::vector<double> weights;
  for (const ModeRef& r : modes) weights.push_back(std::sqrt(gains.gain(r.channel, r.n)) * alpha);
  std::vector<NoiseObservation> out;
  for (double w : omegas) {
    const NoisePoint np = output_spectrum(m, w, z);
    NoiseObservation o;
    o.delta2_mhz = to_mhz(m.params().delta2);
    o.theta_eff_mrad = 1e3 * m.geometry().theta_eff();
    o.omega_mhz = to_mhz(w);
    o.eta = eta;
    o.cm_raw = covariance(u, np.s_plus, np.s_minus, modes);
    o.cm = apply_losses(o.cm_raw, eta);
    o.weights = weights;
    o.kappa_ratio = np.kappa_nominal > 0.0 ? np.kappa / np.kappa_nominal : 0.0;
    o.commutator_residual = np.commutator_residual;
    o.bona_fide_raw = bona_fide_margin(o.cm_raw);
    o.bona_fide = bona_fide_margin(o.cm);
    out.push_back(std::move(o));
  }
  return out;
}

std::vector<NoiseObservation> noise_points(const RunConfig& c, const std::vector<ModeRef>& modes, int workers) {
  validate(c);
  const std::vector<double> omegas = c.omega_grid();
  if (omegas.empty()) throw Error("config", "sweep.omega_mhz is required for noise and PPT scans");
  for (const ModeRef& r : modes)
    if (std::abs(r.n) > c.model.q_cut)
      throw Error("config", fmt::format("mode {} lies outside the truncation Q = {}", mode_label(r), c.model.q_cut));
  const std::vector<GridPoint> grid = parameter_grid(c);
  std::vector<std::vector<NoiseObservation>> per(grid.size());
  parallel_for(static_cast<int>(grid.size()), workers, [&](int i) {
    const Medium m(at_delta(c, grid[i].delta2), grid[i].geom, c.model);
    per[i] = analyze_point(m, omegas, modes, c.eta, c.seed_alpha);
  });
  std::vector<NoiseObservation> out;
  for (auto& v : per)
    for (auto& o : v) out.push_back(std::move(o));
  return out;
}

json cm_to_json(const NoiseObservation& o) {
  json labels = json::array();
  for (const ModeRef& r : o.cm.modes) labels.push_back(mode_label(r));
  json rows = json::array();
  for (int i = 0; i < o.cm.v.rows(); ++i) {
    json row = json::array();
    for (int j = 0; j < o.cm.v.cols(); ++j) row.push_back(o.cm.v(i, j));
    rows.push_back(row);
  }
  return json{{"delta2_over_2pi_MHz", o.delta2_mhz},
              {"theta_eff_mrad", o.theta_eff_mrad},
              {"omega_over_2pi_MHz", o.omega_mhz},
              {"eta", o.eta},
              {"modes", labels},
              {"ordering", "P,Q per mode"},
              {"v_s", rows}};
}

CommandResult cmd_gain_scan(const RunConfig& c, const fs::path& out, int workers) {
  const std::vector<GainPoint> pts = gain_scan(c, workers);
  fs::create_directories(out);
  CommandResult r;
  r.files = {out / "gain_scan.csv", out / "transverse_profile.csv"};
  write_gain_csv(pts, r.files[0]);
  write_profile_csv(pts, r.files[1]);
  r.summary = {{"points", pts.size()}, {"mode_counts", mode_count_summary(pts)}};
  return r;
}

CommandResult cmd_z_scan(const RunConfig& c, const fs::path& out, int workers) {
  const std::vector<GainPoint> pts = z_scan_points(c, workers);
  fs::create_directories(out);
  CommandResult r;
  r.files = {out / "z_scan.csv", out / "z_profile.csv"};
  write_gain_csv(pts, r.files[0]);
  write_profile_csv(pts, r.files[1]);
  r.summary = {{"points", pts.size()}};
  return r;
}

CommandResult cmd_noise_scan(const RunConfig& c, const fs::path& out, int workers) {
  const std::vector<ModeRef> modes = paired_modes(c.noise_modes);
  const std::vector<NoiseObservation> obs = noise_points(c, modes, workers);
  fs::create_directories(out);
  CommandResult r;
  r.files = {out / "noise_scan.csv", out / "nd_pairs.csv", out / "cm_snapshots.json"};
  std::ofstream f = open_out(r.files[0]);
  f << "delta2_over_2pi_MHz,theta_eff_mrad,omega_over_2pi_MHz,eta,nid_a_db,nid_b_db,nid_plus_db,nid_minus_db,"
       "total_nd,total_nd_sql,total_nd_db,kappa_ratio,commutator_residual,bona_fide_margin\n";
  std::ofstream g = open_out(r.files[1]);
  g << "delta2_over_2pi_MHz,theta_eff_mrad,omega_over_2pi_MHz,eta,mode_i,mode_j,nd,nd_db\n";
  json snaps = json::array();
  for (const NoiseObservation& o : obs) {
    const IntensityNoise in = intensity_spectra(o.cm, o.weights);
    const auto pairs = phase_matched_pairs(o.cm);
    const double tnd = total_noise_difference(o.cm, pairs);
    const double sql = 2.0 * static_cast<double>(pairs.size());
    f << num(o.delta2_mhz) << ',' << num(o.theta_eff_mrad) << ',' << num(o.omega_mhz) << ',' << num(o.eta) << ','
      << num(to_db(in.a)) << ',' << num(to_db(in.b)) << ',' << num(to_db(in.plus)) << ',' << num(to_db(in.minus))
      << ',' << num(tnd) << ',' << num(sql) << ',' << num(to_db(tnd / sql)) << ',' << num(o.kappa_ratio) << ','
      << num(o.commutator_residual) << ',' << num(o.bona_fide_raw) << '\n';
    for (int i = 0; i < o.cm.dim(); ++i)
      for (int j = 0; j < o.cm.dim(); ++j) {
        if (o.cm.modes[i].channel != kProbe || o.cm.modes[j].channel != kConjugate) continue;
        const double nd = noise_difference(o.cm, i, j);
        g << num(o.delta2_mhz) << ',' << num(o.theta_eff_mrad) << ',' << num(o.omega_mhz) << ',' << num(o.eta) << ','
          << mode_label(o.cm.modes[i]) << ',' << mode_label(o.cm.modes[j]) << ',' << num(nd) << ','
          << num(to_db(nd / 2.0)) << '\n';
      }
    snaps.push_back(cm_to_json(o));
  }
  std::ofstream s = open_out(r.files[2]);
  s << snaps.dump(1) << '\n';
  r.summary = {{"rows", obs.size()}};
  return r;
}

CommandResult cmd_ppt_scan(const RunConfig& c, const fs::path& out, int workers) {
  const std::vector<NoiseObservation> obs = noise_points(c, c.entangle_modes, workers);
  const std::vector<Bipartition> bps = enumerate_bipartitions(static_cast<int>(c.entangle_modes.size()));
  fs::create_directories(out);
  CommandResult r;
  r.files = {out / "ppt_scan.csv"};
  std::ofstream f = open_out(r.files[0]);
  f << "delta2_over_2pi_MHz,theta_eff_mrad,omega_over_2pi_MHz,eta,bipartition,class,min_symplectic_eig\n";
  int entangled = 0;
  for (const NoiseObservation& o : obs)
    for (const Bipartition& bp : bps) {
      const double nu = ppt_min_eigenvalue(o.cm, bp);
      entangled += nu < 1.0;
      f << num(o.delta2_mhz) << ',' << num(o.theta_eff_mrad) << ',' << num(o.omega_mhz) << ',' << num(o.eta) << ','
        << bp.label() << ',' << bp.class_label() << ',' << num(nu) << '\n';
    }
  json labels = json::array();
  for (const ModeRef& m : c.entangle_modes) labels.push_back(mode_label(m));
  r.summary = {{"points", obs.size()},
               {"bipartitions", bps.size()},
               {"entangled_rows", entangled},
               {"mode_labels", labels}};
  return r;
}

CommandResult cmd_convergence(const RunConfig& c, const fs::path& out, int workers) {
  validate(c);
  const std::vector<GridPoint> grid = parameter_grid(c);
  std::vector<std::vector<ConvergenceRow>> per(grid.size());
  parallel_for(static_cast<int>(grid.size()), workers, [&](int i) {
    per[i] = convergence_check(at_delta(c, grid[i].delta2), grid[i].geom, c.model, c.convergence_q,
                               c.convergence_q_ref, {grid[i].delta2}, c.convergence_modes, c.convergence_floor);
  });
  fs::create_directories(out);
  CommandResult r;
  r.files = {out / "convergence.csv"};
  std::ofstream f = open_out(r.files[0]);
  f << "delta2_over_2pi_MHz,theta_eff_mrad,channel,mode_index,gain_q,gain_q_ref,residual\n";
  double worst = 0.0;
  for (size_t i = 0; i < grid.size(); ++i)
    for (const ConvergenceRow& row : per[i]) {
      worst = std::max(worst, row.residual);
      f << num(to_mhz(row.delta2)) << ',' << num(1e3 * grid[i].geom.theta_eff()) << ',' << channel_name(row.channel)
        << ',' << row.mode << ',' << num(row.gain) << ',' << num(row.gain_ref) << ',' << num(row.residual) << '\n';
    }
  r.summary = {{"q", c.convergence_q}, {"q_ref", c.convergence_q_ref}, {"max_residual", worst}};
  return r;
}

CommandResult cmd_calibrate_n(const RunConfig& c, const fs::path& out) {
  validate(c);
  const Calibration cal = calibrate_n(c.physics(), c.geometry(), c.model, c.calibration_target);
  RunConfig updated = c;
  updated.n_atoms = cal.n_atoms;
  fs::create_directories(out);
  CommandResult r;
  r.files = {out / "calibration.json", out / "calibrated_config.json"};
  r.summary = {{"n_atoms", cal.n_atoms},
               {"probe_gain", cal.gain},
               {"target_gain", c.calibration_target},
               {"steps", cal.steps},
               {"degenerate", cal.degenerate}};
  open_out(r.files[0]) << r.summary.dump(2) << '\n';
  open_out(r.files[1]) << emit_config(updated).dump(2) << '\n';
  return r;
}

}  // namespace m4wm
