#include "hyso3/scenario.hpp"

#include <CLI11.hpp>

#include <iostream>

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitSolver = 2;

int cmd_list() {
  for (const hyso3::BundledScenario& b : hyso3::bundled_scenarios()) {
    const hyso3::ScenarioConfig cfg = hyso3::load_scenario_text(b.text, b.name);
    std::cout << b.name << "\t" << cfg.description << "\n";
  }
  return kExitOk;
}

int cmd_validate(const std::string& target) {
  const hyso3::ScenarioConfig cfg = hyso3::resolve_scenario(target);
  const hyso3::ValidationReport rep = hyso3::validate(cfg);
  for (const std::string& s : rep.info) std::cout << "info: " << s << "\n";
  for (const std::string& s : rep.warnings) std::cout << "warning: " << s << "\n";
  for (const std::string& s : rep.errors) std::cerr << "error: " << s << "\n";
  std::cout << (rep.ok() ? "valid" : "invalid") << "\n";
  return rep.ok() ? kExitOk : kExitConfig;
}

int cmd_run(const std::string& target, const std::string& out_dir,
            const hyso3::RunOverrides& ov, bool plots) {
  hyso3::ScenarioConfig cfg = hyso3::resolve_scenario(target);
  hyso3::apply_overrides(cfg, ov);
  const hyso3::ScenarioOutcome out = hyso3::run_scenario(cfg, out_dir, plots, std::cout);
  for (const std::string& f : out.files) std::cout << "wrote " << f << "\n";
  return out.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hybrid attitude tracking on SO(3): scenario runner"};
  app.require_subcommand(1);

  auto* list = app.add_subcommand("list", "List bundled scenarios");

  std::string validate_target;
  auto* validate = app.add_subcommand("validate", "Check a scenario without simulating");
  validate->add_option("config", validate_target, "Config file or bundled scenario name")
      ->required();

  std::string run_target;
  std::string out_dir = "out";
  std::uint64_t seed = 0;
  double dt = 0.0;
  double t_max = 0.0;
  bool no_plots = false;
  bool no_noise = false;
  auto* run = app.add_subcommand("run", "Simulate a scenario and write CSV, report and plots");
  run->add_option("config", run_target, "Config file or bundled scenario name")->required();
  run->add_option("--out-dir", out_dir, "Output directory")->capture_default_str();
  auto* seed_opt = run->add_option("--seed", seed, "Base random seed");
  auto* dt_opt = run->add_option("--dt", dt, "Integration step [s]")->check(CLI::PositiveNumber);
  auto* tmax_opt =
      run->add_option("--t-max", t_max, "Simulated time [s]")->check(CLI::NonNegativeNumber);
  run->add_flag("--no-plots", no_plots, "Skip SVG output");
  run->add_flag("--no-noise", no_noise, "Disable measurement noise in every run");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*list) return cmd_list();
    if (*validate) return cmd_validate(validate_target);
    if (*run) {
      hyso3::RunOverrides ov;
      if (*seed_opt) ov.seed = seed;
      if (*dt_opt) ov.dt = dt;
      if (*tmax_opt) ov.t_max = t_max;
      ov.no_noise = no_noise;
      return cmd_run(run_target, out_dir, ov, !no_plots);
    }
  } catch (const hyso3::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitSolver;
  }
  return kExitOk;
}
