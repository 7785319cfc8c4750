// Copyright 2026 The m4wm Authors
// SPDX-License-Identifier: Apache-2.0

// m4wm-cli: sweep driver for the multimode four-wave-mixing model.

#include <cstdlib>
#include <iostream>
#include <optional>

#include <CLI11.hpp>
#include <json.hpp>

#include "m4wm/commands.hpp"

namespace {

struct Common {
  std::string config;
  std::string preset;
  std::string out;
  int workers = 0;
  double target = 0.0;
};

void add_common(CLI::App* sub, Common& c) {
  auto* cfg = sub->add_option("--config", c.config, "run configuration (JSON)");
  auto* pre = sub->add_option("--preset", c.preset, "shipped preset name, e.g. fig2a");
  cfg->excludes(pre);
  sub->add_option("--out", c.out, "output directory (overrides output_dir)");
  sub->add_option("--workers", c.workers, "worker threads (overrides workers)")->check(CLI::PositiveNumber);
}

int fail(const std::string& kind, const std::string& msg, int code) {
  nlohmann::json err{{"status", "error"}, {"error", kind}, {"message", msg}};
  std::cerr << err.dump() << '\n';
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"multimode four-wave-mixing gain, noise and entanglement sweeps"};
  app.require_subcommand(1);
  Common common;
  const std::vector<std::pair<std::string, std::string>> cmds = {
      {"gain-scan", "mode-resolved gains over the (theta, delta) grid"},
      {"z-scan", "gains along the cell over the z grid"},
      {"noise-scan", "noise difference and intensity-difference spectra"},
      {"ppt-scan", "PPT symplectic eigenvalues for all bipartitions"},
      {"convergence", "Floquet truncation residuals, Q against Q_ref"},
      {"calibrate-n", "fit the atom number to a single-pump probe gain"},
  };
  for (const auto& [name, help] : cmds) add_common(app.add_subcommand(name, help), common);
  app.get_subcommand("calibrate-n")->add_option("--target", common.target, "probe gain target (overrides config)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return fail("usage", e.what(), 2);
  }

  try {
    using namespace m4wm;
    if (common.config.empty() && common.preset.empty()) return fail("usage", "one of --config or --preset is required", 2);
    RunConfig cfg = load_config(common.config.empty() ? preset_path(common.preset) : std::filesystem::path(common.config));
    if (!common.out.empty()) cfg.output_dir = common.out;
    if (common.workers > 0) cfg.workers = common.workers;
    if (common.target > 0.0) cfg.calibration_target = common.target;
    validate(cfg);
    const std::filesystem::path out = cfg.output_dir;
    const std::string name = app.get_subcommands().front()->get_name();
    CommandResult res;
    if (name == "gain-scan") res = cmd_gain_scan(cfg, out, cfg.workers);
    else if (name == "z-scan") res = cmd_z_scan(cfg, out, cfg.workers);
    else if (name == "noise-scan") res = cmd_noise_scan(cfg, out, cfg.workers);
    else if (name == "ppt-scan") res = cmd_ppt_scan(cfg, out, cfg.workers);
    else if (name == "convergence") res = cmd_convergence(cfg, out, cfg.workers);
    else res = cmd_calibrate_n(cfg, out);
    nlohmann::json files = nlohmann::json::array();
    for (const auto& f : res.files) files.push_back(f.string());
    std::cout << nlohmann::json{{"status", "ok"}, {"command", name}, {"files", files}, {"summary", res.summary}}.dump(2)
              << '\n';
    return 0;
  } catch (const m4wm::Error& e) {
    return fail(e.kind(), e.what(), e.kind() == "config" || e.kind() == "io" ? 2 : 1);
  } catch (const std::exception& e) {
    return fail("internal", e.what(), 1);
  }
}
