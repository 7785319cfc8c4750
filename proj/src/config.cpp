// Copyright 2026 The m4wm Authors
// SPDX-License-Identifier: Apache-2.0

#include "m4wm/config.hpp"

#include <cmath>
#include <fstream>
#include <set>

#include <fmt/format.h>

namespace m4wm {

using nlohmann::json;

PhysicalParams RunConfig::physics() const {
  PhysicalParams p;
  p.omega0_rabi = mhz(omega0_mhz);
  for (const auto& [a, b] : omega_pm_mhz) p.omega_pm_rabi.emplace_back(mhz(a), mhz(b));
  p.delta1 = mhz(delta1_mhz);
  p.delta2 = mhz(delta2_mhz);
  p.gamma_sp = mhz(gamma_sp_mhz);
  p.gamma_d = mhz(gamma_d_mhz);
  p.omega_hf = mhz(omega_hf_mhz);
  p.g_a = mhz(g_a_mhz);
  p.g_b = mhz(g_b_mhz);
  p.n_atoms = n_atoms;
  p.cell_length = cell_length_m;
  p.wavelength = wavelength_m;
  p.doppler_sigma = doppler_sigma_m_s;
  return p;
}

Geometry RunConfig::geometry() const { return {1e-3 * theta_pump_mrad, 1e-3 * theta_seed_mrad}; }

std::vector<double> RunConfig::delta2_grid() const {
  std::vector<double> out;
  if (sweep_delta2_mhz.empty()) return {mhz(delta2_mhz)};
  for (double d : sweep_delta2_mhz) out.push_back(mhz(d));
  return out;
}

std::vector<Geometry> RunConfig::geometry_grid() const {
  if (sweep_theta_eff_mrad.empty()) return {geometry()};
  std::vector<Geometry> out;
  for (double t : sweep_theta_eff_mrad) out.push_back(Geometry::from_effective(1e-3 * t));
  return out;
}

std::vector<double> RunConfig::omega_grid() const {
  std::vector<double> out;
  for (double w : sweep_omega_mhz) out.push_back(mhz(w));
  return out;
}

std::vector<double> RunConfig::z_grid() const {
  if (sweep_z_m.empty()) return {cell_length_m};
  return sweep_z_m;
}

namespace {

// Collects every problem instead of stopping at the first.
class Reader {
 public:
  explicit Reader(std::vector<std::string>& errors) : errors_(errors) {}

  void fail(const std::string& path, const std::string& msg) { errors_.push_back(fmt::format("{}: {}", path, msg)); }

  void check_keys(const json& obj, const std::string& path, const std::set<std::string>& allowed) {
    if (!obj.is_object()) {
      fail(path, "expected an object");
      return;
    }
    for (const auto& [k, v] : obj.items())
      if (!allowed.count(k)) fail(path + "." + k, "unknown key");
  }

  void number(const json& obj, const std::string& path, const char* key, double& out) {
    if (!obj.is_object() || !obj.contains(key)) return;
    const json& v = obj.at(key);
    if (!v.is_number()) {
      fail(path + "." + key, "expected a number");
      return;
    }
    out = v.get<double>();
    if (!std::isfinite(out)) fail(path + "." + key, "not finite");
  }

  void integer(const json& obj, const std::string& path, const char* key, int& out) {
    if (!obj.is_object() || !obj.contains(key)) return;
    const json& v = obj.at(key);
    if (!v.is_number_integer()) {
      fail(path + "." + key, "expected an integer");
      return;
    }
    out = v.get<int>();
  }

  void string(const json& obj, const std::string& path, const char* key, std::string& out) {
    if (!obj.is_object() || !obj.contains(key)) return;
    const json& v = obj.at(key);
    if (!v.is_string()) {
      fail(path + "." + key, "expected a string");
      return;
    }
    out = v.get<std::string>();
  }

  void int_list(const json& obj, const std::string& path, const char* key, std::vector<int>& out) {
    if (!obj.is_object() || !obj.contains(key)) return;
    const json& v = obj.at(key);
    if (!v.is_array()) {
      fail(path + "." + key, "expected an array of integers");
      return;
    }
    out.clear();
    for (const auto& e : v) {
      if (!e.is_number_integer()) {
        fail(path + "." + key, "expected an array of integers");
        return;
      }
      out.push_back(e.get<int>());
    }
  }

  // [x, ...] or {"start", "stop", "num"} or {"start", "stop", "step"}
  void grid(const json& obj, const std::string& path, const char* key, std::vector<double>& out) {
    if (!obj.is_object() || !obj.contains(key)) return;
    const json& v = obj.at(key);
    const std::string p = path + "." + key;
    out.clear();
    if (v.is_array()) {
      for (const auto& e : v) {
        if (!e.is_number()) {
          fail(p, "grid entries must be numbers");
          return;
        }
        out.push_back(e.get<double>());
      }
      if (out.empty()) fail(p, "grid is empty");
      return;
    }
    if (!v.is_object()) {
      fail(p, "expected an array or a {start, stop, num|step} object");
      return;
    }
    check_keys(v, p, {"start", "stop", "num", "step"});
    if (!v.contains("start") || !v.contains("stop") || !v["start"].is_number() || !v["stop"].is_number()) {
      fail(p, "range needs numeric start and stop");
      return;
    }
    const double a = v["start"].get<double>(), b = v["stop"].get<double>();
    if (v.contains("num") == v.contains("step")) {
      fail(p, "range needs exactly one of num or step");
      return;
    }
    if (v.contains("num")) {
      if (!v["num"].is_number_integer() || v["num"].get<int>() < 1) {
        fail(p + ".num", "must be a positive integer");
        return;
      }
      const int n = v["num"].get<int>();
      for (int i = 0; i < n; ++i) out.push_back(n == 1 ? a : a + (b - a) * i / (n - 1));
    } else {
      if (!v["step"].is_number() || !(v["step"].get<double>() > 0.0)) {
        fail(p + ".step", "must be a positive number");
        return;
      }
      const double h = v["step"].get<double>();
      const int n = static_cast<int>(std::floor((b - a) / h + 1e-9)) + 1;
      if (n < 1 || n > 1000000) {
        fail(p, "range is empty or too long");
        return;
      }
      for (int i = 0; i < n; ++i) out.push_back(a + h * i);
    }
  }

 private:
  std::vector<std::string>& errors_;
};

void collect_validation(const RunConfig& c, std::vector<std::string>& errs) {
  auto need = [&](bool ok, const std::string& msg) {
    if (!ok) errs.push_back(msg);
  };
  need(c.gamma_sp_mhz > 0.0, "physics.gamma_sp_mhz: must be > 0");
  need(c.gamma_d_mhz >= 0.0, "physics.gamma_d_mhz: must be >= 0");
  need(c.cell_length_m > 0.0, "physics.cell_length_m: must be > 0");
  need(c.wavelength_m > 0.0, "physics.wavelength_m: must be > 0");
  need(c.doppler_sigma_m_s >= 0.0, "physics.doppler_sigma_m_s: must be >= 0");
  need(c.n_atoms >= 0.0, "physics.n_atoms: must be >= 0");
  need(c.theta_pump_mrad >= 0.0 && c.theta_seed_mrad >= 0.0, "geometry: angles must be >= 0");
  need(c.model.q_cut >= 0, "model.q_cut: must be >= 0");
  need(c.model.doppler_nodes >= 1, "model.doppler_nodes: must be >= 1");
  need(c.model.q_steady >= 0, "model.q_steady: must be >= 0");
  int max_pair = 0;
  for (size_t k = 0; k < c.omega_pm_mhz.size(); ++k)
    if (c.omega_pm_mhz[k].first != 0.0 || c.omega_pm_mhz[k].second != 0.0) max_pair = static_cast<int>(k) + 1;
  need(c.model.q_cut >= max_pair, fmt::format("model.q_cut: must be >= largest pump offset {}", max_pair));
  need(c.eta >= 0.0 && c.eta <= 1.0, "eta: must lie in [0, 1]");
  need(c.seed_alpha > 0.0, "seed_alpha: must be > 0");
  need(c.workers >= 1, "workers: must be >= 1");
  for (double t : c.sweep_theta_eff_mrad) need(t >= 0.0, "sweep.theta_eff_mrad: angles must be >= 0");
  for (double z : c.sweep_z_m) need(z >= 0.0 && z <= c.cell_length_m * (1.0 + 1e-12), "sweep.z_m: z must lie in [0, L]");
  for (double w : c.sweep_omega_mhz) need(std::isfinite(w), "sweep.omega_mhz: not finite");
  need(c.entangle_modes.size() >= 2, "modes.entangle: need at least 2 modes");
  need(c.convergence_q >= max_pair && c.convergence_q_ref >= max_pair, "convergence: Q below the pump offsets");
  need(c.convergence_floor > 0.0, "convergence.floor: must be > 0");
  need(c.calibration_target > 0.0, "calibration.target_gain: must be > 0");
}

}  // namespace

void validate(const RunConfig& c) {
  std::vector<std::string> errs;
  collect_validation(c, errs);
  if (!errs.empty()) {
    std::string msg = "invalid configuration:";
    for (const auto& e : errs) msg += "\n  " + e;
    throw Error("config", msg);
  }
}

RunConfig parse_config(const json& j) {
  RunConfig c;
  std::vector<std::string> errs;
  Reader r(errs);
  r.check_keys(j, "$", {"physics", "geometry", "model", "seed_alpha", "eta", "sweep", "modes", "convergence",
                        "calibration", "output_dir", "workers", "random_seed"});
  if (!j.is_object()) throw Error("config", "invalid configuration:\n  $: expected an object");

  if (j.contains("physics")) {
    const json& p = j["physics"];
    r.check_keys(p, "physics", {"omega0_mhz", "omega_pm_mhz", "delta1_mhz", "delta2_mhz", "gamma_sp_mhz",
                                "gamma_d_mhz", "omega_hf_mhz", "g_a_mhz", "g_b_mhz", "n_atoms", "cell_length_m",
                                "wavelength_m", "doppler_sigma_m_s"});
    r.number(p, "physics", "omega0_mhz", c.omega0_mhz);
    if (p.is_object() && p.contains("omega_pm_mhz")) {
      const json& pm = p["omega_pm_mhz"];
      bool ok = pm.is_array();
      if (ok)
        for (const auto& e : pm) ok = ok && e.is_array() && e.size() == 2 && e[0].is_number() && e[1].is_number();
      if (!ok)
        r.fail("physics.omega_pm_mhz", "expected [[plus, minus], ...] per pump pair");
      else
        for (const auto& e : pm) c.omega_pm_mhz.emplace_back(e[0].get<double>(), e[1].get<double>());
    }
    r.number(p, "physics", "delta1_mhz", c.delta1_mhz);
    r.number(p, "physics", "delta2_mhz", c.delta2_mhz);
    r.number(p, "physics", "gamma_sp_mhz", c.gamma_sp_mhz);
    r.number(p, "physics", "gamma_d_mhz", c.gamma_d_mhz);
    r.number(p, "physics", "omega_hf_mhz", c.omega_hf_mhz);
    r.number(p, "physics", "g_a_mhz", c.g_a_mhz);
    r.number(p, "physics", "g_b_mhz", c.g_b_mhz);
    r.number(p, "physics", "n_atoms", c.n_atoms);
    r.number(p, "physics", "cell_length_m", c.cell_length_m);
    r.number(p, "physics", "wavelength_m", c.wavelength_m);
    r.number(p, "physics", "doppler_sigma_m_s", c.doppler_sigma_m_s);
  }
  if (j.contains("geometry")) {
    const json& g = j["geometry"];
    r.check_keys(g, "geometry", {"theta_pump_mrad", "theta_seed_mrad", "theta_eff_mrad"});
    if (g.is_object() && g.contains("theta_eff_mrad")) {
      if (g.contains("theta_pump_mrad") || g.contains("theta_seed_mrad"))
        r.fail("geometry", "give either theta_eff_mrad or theta_pump_mrad/theta_seed_mrad");
      double t = 0.0;
      r.number(g, "geometry", "theta_eff_mrad", t);
      c.theta_pump_mrad = 2.0 * t;
      c.theta_seed_mrad = 0.0;
    } else {
      r.number(g, "geometry", "theta_pump_mrad", c.theta_pump_mrad);
      r.number(g, "geometry", "theta_seed_mrad", c.theta_seed_mrad);
    }
  }
  if (j.contains("model")) {
    const json& m = j["model"];
    r.check_keys(m, "model", {"q_cut", "doppler_nodes", "q_steady", "gx_harmonics", "phase_reference"});
    r.integer(m, "model", "q_cut", c.model.q_cut);
    r.integer(m, "model", "doppler_nodes", c.model.doppler_nodes);
    r.integer(m, "model", "q_steady", c.model.q_steady);
    std::string s;
    r.string(m, "model", "gx_harmonics", s);
    if (!s.empty()) {
      try {
        c.model.gx = parse_gx_harmonics(s);
      } catch (const Error& e) {
        r.fail("model.gx_harmonics", e.what());
      }
    }
    s.clear();
    r.string(m, "model", "phase_reference", s);
    if (!s.empty()) {
      try {
        c.model.phase_reference = parse_phase_reference(s);
      } catch (const Error& e) {
        r.fail("model.phase_reference", e.what());
      }
    }
  }
  r.number(j, "$", "seed_alpha", c.seed_alpha);
  r.number(j, "$", "eta", c.eta);
  if (j.contains("sweep")) {
    const json& s = j["sweep"];
    r.check_keys(s, "sweep", {"delta2_mhz", "theta_eff_mrad", "omega_mhz", "z_m"});
    r.grid(s, "sweep", "delta2_mhz", c.sweep_delta2_mhz);
    r.grid(s, "sweep", "theta_eff_mrad", c.sweep_theta_eff_mrad);
    r.grid(s, "sweep", "omega_mhz", c.sweep_omega_mhz);
    r.grid(s, "sweep", "z_m", c.sweep_z_m);
  }
  if (j.contains("modes")) {
    const json& m = j["modes"];
    r.check_keys(m, "modes", {"noise", "entangle"});
    r.int_list(m, "modes", "noise", c.noise_modes);
    if (m.is_object() && m.contains("entangle")) {
      const json& e = m["entangle"];
      if (!e.is_array()) {
        r.fail("modes.entangle", "expected an array of labels like \"a-2\"");
      } else {
        c.entangle_modes.clear();
        for (const auto& x : e) {
          try {
            if (!x.is_string()) throw Error("config", "labels must be strings");
            c.entangle_modes.push_back(parse_mode_label(x.get<std::string>()));
          } catch (const Error& err) {
            r.fail("modes.entangle", err.what());
          }
        }
      }
    }
  }
  if (j.contains("convergence")) {
    const json& v = j["convergence"];
    r.check_keys(v, "convergence", {"q", "q_ref", "modes", "floor"});
    r.integer(v, "convergence", "q", c.convergence_q);
    r.integer(v, "convergence", "q_ref", c.convergence_q_ref);
    r.int_list(v, "convergence", "modes", c.convergence_modes);
    r.number(v, "convergence", "floor", c.convergence_floor);
  }
  if (j.contains("calibration")) {
    const json& v = j["calibration"];
    r.check_keys(v, "calibration", {"target_gain"});
    r.number(v, "calibration", "target_gain", c.calibration_target);
  }
  r.string(j, "$", "output_dir", c.output_dir);
  r.integer(j, "$", "workers", c.workers);
  if (j.contains("random_seed")) {
    if (!j["random_seed"].is_number_unsigned())
      r.fail("$.random_seed", "expected a non-negative integer");
    else
      c.random_seed = j["random_seed"].get<std::uint64_t>();
  }
  collect_validation(c, errs);
  if (!errs.empty()) {
    std::string msg = "invalid configuration:";
    for (const auto& e : errs) msg += "\n  " + e;
    throw Error("config", msg);
  }
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("io", fmt::format("cannot open config '{}'", path.string()));
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw Error("config", fmt::format("'{}' is not valid JSON: {}", path.string(), e.what()));
  }
  return parse_config(j);
}

json emit_config(const RunConfig& c) {
  json pm = json::array();
  for (const auto& [a, b] : c.omega_pm_mhz) pm.push_back({a, b});
  json ent = json::array();
  for (const ModeRef& m : c.entangle_modes) ent.push_back(mode_label(m));
  json sweep = json::object();
  if (!c.sweep_delta2_mhz.empty()) sweep["delta2_mhz"] = c.sweep_delta2_mhz;
  if (!c.sweep_theta_eff_mrad.empty()) sweep["theta_eff_mrad"] = c.sweep_theta_eff_mrad;
  if (!c.sweep_omega_mhz.empty()) sweep["omega_mhz"] = c.sweep_omega_mhz;
  if (!c.sweep_z_m.empty()) sweep["z_m"] = c.sweep_z_m;
  return json{
      {"physics",
       {{"omega0_mhz", c.omega0_mhz},
        {"omega_pm_mhz", pm},
        {"delta1_mhz", c.delta1_mhz},
        {"delta2_mhz", c.delta2_mhz},
        {"gamma_sp_mhz", c.gamma_sp_mhz},
        {"gamma_d_mhz", c.gamma_d_mhz},
        {"omega_hf_mhz", c.omega_hf_mhz},
        {"g_a_mhz", c.g_a_mhz},
        {"g_b_mhz", c.g_b_mhz},
        {"n_atoms", c.n_atoms},
        {"cell_length_m", c.cell_length_m},
        {"wavelength_m", c.wavelength_m},
        {"doppler_sigma_m_s", c.doppler_sigma_m_s}}},
      {"geometry", {{"theta_pump_mrad", c.theta_pump_mrad}, {"theta_seed_mrad", c.theta_seed_mrad}}},
      {"model",
       {{"q_cut", c.model.q_cut},
        {"doppler_nodes", c.model.doppler_nodes},
        {"q_steady", c.model.q_steady},
        {"gx_harmonics", to_string(c.model.gx)},
        {"phase_reference", to_string(c.model.phase_reference)}}},
      {"seed_alpha", c.seed_alpha},
      {"eta", c.eta},
      {"sweep", sweep},
      {"modes", {{"noise", c.noise_modes}, {"entangle", ent}}},
      {"convergence",
       {{"q", c.convergence_q},
        {"q_ref", c.convergence_q_ref},
        {"modes", c.convergence_modes},
        {"floor", c.convergence_floor}}},
      {"calibration", {{"target_gain", c.calibration_target}}},
      {"output_dir", c.output_dir},
      {"workers", c.workers},
      {"random_seed", c.random_seed}};
}

std::filesystem::path preset_dir() {
  if (const char* env = std::getenv("M4WM_PRESET_DIR")) return env;
#ifdef M4WM_PRESET_DIR
  return M4WM_PRESET_DIR;
#else
  return "presets";
#endif
}

std::filesystem::path preset_path(const std::string& name) {
  std::filesystem::path p = preset_dir() / name;
  if (p.extension() != ".json") p += ".json";
  if (!std::filesystem::exists(p)) throw Error("io", fmt::format("unknown preset '{}' (looked in {})", name, preset_dir().string()));
  return p;
}

}  // namespace m4wm
