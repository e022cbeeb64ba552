// ptzsim: validate, run, certify and replay PTZ monitoring scenarios.
//
// Exit codes: 0 ok, 1 usage, 2 invalid config, 3 runtime failure,
// 4 a check ran and its verdict was negative.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "ptzgame/scenario.hpp"

namespace {

enum Exit { kOk = 0, kUsage = 1, kInvalidConfig = 2, kRuntime = 3, kVerdict = 4 };

int report_config_error(const ptz::ConfigError& e) {
  std::cerr << "invalid config:\n";
  for (const auto& v : e.violations()) std::cerr << "  " << v << "\n";
  return kInvalidConfig;
}

int cmd_validate(const std::string& path) {
  const auto cfg = ptz::load_config(path);
  const auto space = ptz::scenario_action_space(cfg);
  const auto D = ptz::compute_D(space);
  const auto kb = ptz::kappa_bounds(space);
  std::cout << "ok: " << cfg.sensors.size() << " sensors, " << cfg.cells() << " cells, joint actions "
            << space.joint_count() << ", D " << D.D << ", C " << kb.C << ", kappa bounds (" << ptz::format_real(kb.lower)
            << ", 0.5]\n";
  return kOk;
}

int cmd_run(const std::string& path, std::optional<std::uint64_t> seed, const std::string& out_dir, bool optimum) {
  const auto cfg = ptz::load_config(path);
  const auto scenario = ptz::build_scenario(cfg);
  const auto ex = ptz::run_experiment(scenario, seed, optimum);
  ptz::write_summary(std::cout, scenario, ex);
  if (!out_dir.empty()) {
    std::filesystem::create_directories(out_dir);
    const auto csv = std::filesystem::path(out_dir) / "run.csv";
    ptz::export_csv(scenario, ex, csv);
    std::ofstream summary(std::filesystem::path(out_dir) / "summary.txt");
    ptz::write_summary(summary, scenario, ex);
    std::cout << "wrote " << csv.string() << "\n";
  }
  return kOk;
}

int cmd_certify(const std::string& path) {
  const auto cfg = ptz::load_config(path);
  const auto scenario = ptz::build_scenario(cfg);
  const auto r = ptz::certify(scenario);
  ptz::write_certify_report(std::cout, r);
  return r.contained ? kOk : kVerdict;
}

int cmd_replay(const std::string& path) {
  const auto r = ptz::replay(path);
  std::cout << r.rows << " rows, " << r.mismatches << " W mismatches";
  if (r.first_mismatch) std::cout << " (first at row " << *r.first_mismatch << ")";
  std::cout << "\n";
  return r.ok() ? kOk : kVerdict;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"PTZ sensor network learning simulator"};
  app.require_subcommand(1);

  std::string config;
  auto* validate = app.add_subcommand("validate", "check a scenario config");
  validate->add_option("config", config, "scenario JSON")->required();

  std::optional<std::uint64_t> seed;
  std::string out_dir;
  bool optimum = false;
  auto* run = app.add_subcommand("run", "run the learner on a scenario");
  run->add_option("config", config, "scenario JSON")->required();
  run->add_option("--seed", seed, "override the config seed");
  run->add_option("--out", out_dir, "directory for run.csv, its metadata and summary.txt");
  run->add_flag("--optimum", optimum, "compute the exhaustive optimum of each scene version");

  auto* cert = app.add_subcommand("certify", "chain certification of a small scenario");
  cert->add_option("config", config, "scenario JSON")->required();

  std::string log;
  auto* rep = app.add_subcommand("replay", "recompute W from a run log");
  rep->add_option("log", log, "run.csv written by run --out")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*validate) return cmd_validate(config);
    if (*run) return cmd_run(config, seed, out_dir, optimum);
    if (*cert) return cmd_certify(config);
    if (*rep) return cmd_replay(log);
  } catch (const ptz::ConfigError& e) {
    return report_config_error(e);
  } catch (const ptz::AssumptionViolated& e) {
    std::cerr << "invalid config: " << e.what() << "\n";
    return kInvalidConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kRuntime;
  }
  return kUsage;
}
