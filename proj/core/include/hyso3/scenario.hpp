#pragma once

#include "hyso3/closed_loop.hpp"
#include "hyso3/config.hpp"
#include "hyso3/monitors.hpp"

#include <cstdint>
#include <iosfwd>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

namespace hyso3 {

/// One simulation inside a scenario. Values are raw config inputs; derived
/// objects are built by make_setup().
struct RunConfig {
  std::string name = "main";
  ControllerKind controller = ControllerKind::Basic;
  ZetaVariant zeta_variant = ZetaVariant::Standard;

  Vec3 A_diag = Vec3(2, 4, 6);
  std::vector<double> theta_set{0.9 * std::numbers::pi};
  std::optional<double> gamma;
  std::optional<double> gamma_frac;
  std::optional<double> delta;
  std::optional<double> delta_frac;

  ControllerGains gains;
  Vec3 J_diag = Vec3(0.0159, 0.0150, 0.0297);

  double r0_angle = 0.0;
  Vec3 r0_axis = Vec3::UnitZ();
  Vec3 omega0 = Vec3::Zero();
  double theta0 = 0.0;
  Vec3 zeta0 = Vec3::Zero();
  bool rbar0_transpose = true;  // Rbar(0) = R(0)^T, else from rbar0_angle/axis
  double rbar0_angle = 0.0;
  Vec3 rbar0_axis = Vec3::UnitZ();
  double theta_bar0 = 0.0;

  std::string reference = "tracking_sine";
  double m_bound = 2.0;
  double omega_r_bound = 50.0;

  bool noise = false;
  double sigma_R2 = 0.0;
  double sigma_w2 = 0.0;
  std::uint64_t seed = 1;

  SolverConfig solver;
};

struct ScenarioConfig {
  std::string name;
  std::string description;
  std::vector<RunConfig> runs;
};

/// Reads a scenario from `key = value` text. Per-run values are given as
/// `<run>.<key>` and override the shared `<key>`. Throws ConfigError.
ScenarioConfig load_scenario_text(const std::string& text, const std::string& source);
ScenarioConfig load_scenario_file(const std::string& path);

/// A bundled scenario name, or a path to a config file.
ScenarioConfig resolve_scenario(const std::string& name_or_path);

struct BundledScenario {
  const char* name;
  const char* text;
};
const std::vector<BundledScenario>& bundled_scenarios();
std::vector<std::string> list_scenarios();

struct ValidationReport {
  std::vector<std::string> errors;
  std::vector<std::string> warnings;
  std::vector<std::string> info;
  bool ok() const { return errors.empty(); }
};

/// All invariant checks without simulating.
ValidationReport validate(const ScenarioConfig& cfg);

PotentialParams make_params(const RunConfig& rc);
ClosedLoopSetup make_setup(const RunConfig& rc);
InitialConditions make_initial_conditions(const RunConfig& rc);

struct RunResult {
  RunConfig config;
  std::optional<ClosedLoopSetup> setup;
  HybridArc arc;
  CertificationReport report;
  std::string error;  // non-empty when the solver failed
  int exit_code = 0;
};

/// Builds, solves and certifies one run. Never throws for solver failures;
/// they are reported through `error` and `exit_code`.
RunResult simulate(const RunConfig& rc);

/// Trajectory CSV with the certification summary as '#' footer lines.
std::string trajectory_csv(const RunResult& r);
std::vector<std::string> csv_columns(ControllerKind k);

struct RunOverrides {
  std::optional<std::uint64_t> seed;
  std::optional<double> dt;
  std::optional<double> t_max;
  bool no_noise = false;
};
void apply_overrides(ScenarioConfig& cfg, const RunOverrides& o);

struct ScenarioOutcome {
  int exit_code = 0;
  std::vector<RunResult> runs;
  std::vector<std::string> files;
};

/// Runs every member in parallel and writes CSV, report and (optionally) SVG
/// files into out_dir. Exit codes: 0 ok, 1 config, 2 solver, 3 certification.
ScenarioOutcome run_scenario(const ScenarioConfig& cfg, const std::string& out_dir, bool plots,
                             std::ostream& log);

/// First sampled t with |Re|_I < level; +inf if the arc never gets there.
double time_to_reach(const RunResult& r, double level);

}  // namespace hyso3
