#include "hyso3/scenario.hpp"

#include "hyso3/svg_plot.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <iomanip>
#include <limits>
#include <ostream>
#include <sstream>

namespace hyso3 {

namespace {

// Resolves `<run>.<key>` before `<key>`; reading either marks both as used.
class RunReader {
 public:
  RunReader(const KeyValueConfig& kv, std::string run, bool multi)
      : kv_(kv), run_(std::move(run)), multi_(multi) {}

  std::optional<std::string> key_for(const std::string& k) const {
    const std::string scoped = run_ + "." + k;
    if (multi_ && kv_.has(scoped)) {
      if (kv_.has(k)) kv_.raw(k);
      return scoped;
    }
    if (kv_.has(k)) return k;
    return std::nullopt;
  }

  double num(const std::string& k, double def) const {
    const auto key = key_for(k);
    return key ? kv_.get_double(*key) : def;
  }
  std::optional<double> opt_num(const std::string& k) const {
    const auto key = key_for(k);
    if (!key) return std::nullopt;
    return kv_.get_double(*key);
  }
  std::string str(const std::string& k, const std::string& def) const {
    const auto key = key_for(k);
    return key ? kv_.get_string(*key) : def;
  }
  bool flag(const std::string& k, bool def) const {
    const auto key = key_for(k);
    return key ? kv_.get_bool(*key) : def;
  }
  long long integer(const std::string& k, long long def) const {
    const auto key = key_for(k);
    return key ? kv_.get_int(*key) : def;
  }
  std::vector<double> list(const std::string& k, const std::vector<double>& def) const {
    const auto key = key_for(k);
    return key ? kv_.get_list(*key) : def;
  }
  Vec3 vec3(const std::string& k, const Vec3& def) const {
    const auto key = key_for(k);
    if (!key) return def;
    const std::vector<double> v = kv_.get_list(*key);
    if (v.size() != 3) throw ConfigError(*key, "expected exactly 3 elements");
    return Vec3(v[0], v[1], v[2]);
  }

 private:
  const KeyValueConfig& kv_;
  std::string run_;
  bool multi_;
};

RunConfig read_run(const KeyValueConfig& kv, const std::string& name, bool multi, int index) {
  const RunReader rd(kv, name, multi);
  RunConfig rc;
  rc.name = name;
  try {
    rc.controller = controller_kind_from_string(rd.str("controller", "basic"));
  } catch (const ContractViolation& e) {
    throw ConfigError(rd.key_for("controller").value_or("controller"), e.what());
  }
  const std::string zv = rd.str("zeta_variant", "standard");
  if (zv == "standard") {
    rc.zeta_variant = ZetaVariant::Standard;
  } else if (zv == "relaxed") {
    rc.zeta_variant = ZetaVariant::Relaxed;
  } else {
    throw ConfigError(*rd.key_for("zeta_variant"), "expected 'standard' or 'relaxed'");
  }

  rc.A_diag = rd.vec3("A_diag", rc.A_diag);
  rc.theta_set = rd.list("theta_set", rc.theta_set);
  rc.gamma = rd.opt_num("gamma");
  rc.gamma_frac = rd.opt_num("gamma_frac");
  rc.delta = rd.opt_num("delta");
  rc.delta_frac = rd.opt_num("delta_frac");
  if (rc.gamma.has_value() == rc.gamma_frac.has_value()) {
    throw ConfigError("gamma", "give exactly one of gamma or gamma_frac for run '" + name + "'");
  }
  if (rc.delta.has_value() == rc.delta_frac.has_value()) {
    throw ConfigError("delta", "give exactly one of delta or delta_frac for run '" + name + "'");
  }

  ControllerGains& g = rc.gains;
  g.kR = rd.num("kR", g.kR);
  g.k_omega = rd.num("k_omega", g.k_omega);
  g.k_theta = rd.num("k_theta", g.k_theta);
  g.k_zeta = rd.num("k_zeta", g.k_zeta);
  g.k_beta = rd.num("k_beta", g.k_beta);
  g.Gamma = rd.vec3("Gamma_diag", g.Gamma.diagonal()).asDiagonal();
  g.rho = rd.num("rho", g.rho);
  g.delta_prime = rd.num("delta_prime", g.delta_prime);
  rc.J_diag = rd.vec3("J_diag", rc.J_diag);

  rc.r0_angle = rd.num("r0_angle", rc.r0_angle);
  rc.r0_axis = rd.vec3("r0_axis", rc.r0_axis);
  rc.omega0 = rd.vec3("omega0", rc.omega0);
  rc.theta0 = rd.num("theta0", rc.theta0);
  rc.zeta0 = rd.vec3("zeta0", rc.zeta0);
  const std::string rb = rd.str("rbar0", "r0_transpose");
  if (rb == "r0_transpose") {
    rc.rbar0_transpose = true;
  } else if (rb == "angle_axis") {
    rc.rbar0_transpose = false;
  } else {
    throw ConfigError(*rd.key_for("rbar0"), "expected 'r0_transpose' or 'angle_axis'");
  }
  rc.rbar0_angle = rd.num("rbar0_angle", rc.rbar0_angle);
  rc.rbar0_axis = rd.vec3("rbar0_axis", rc.rbar0_axis);
  rc.theta_bar0 = rd.num("theta_bar0", rc.theta_bar0);

  rc.reference = rd.str("reference", rc.reference);
  rc.m_bound = rd.num("m_bound", rc.m_bound);
  rc.omega_r_bound = rd.num("omega_r_bound", rc.omega_r_bound);

  rc.noise = rd.flag("noise", rc.noise);
  rc.sigma_R2 = rd.num("sigma_R2", rc.sigma_R2);
  rc.sigma_w2 = rd.num("sigma_w2", rc.sigma_w2);
  // Members share the base seed but draw from distinct streams unless a
  // per-run seed is given.
  const long long base_seed = kv.has("seed") ? kv.get_int("seed") : 1;
  const auto scoped_seed = multi ? std::optional<std::string>(name + ".seed") : std::nullopt;
  if (scoped_seed && kv.has(*scoped_seed)) {
    rc.seed = static_cast<std::uint64_t>(kv.get_int(*scoped_seed));
  } else {
    rc.seed = static_cast<std::uint64_t>(base_seed) + static_cast<std::uint64_t>(index);
  }
  if (kv.has("seed") && (kv.get_int("seed") < 0)) {
    throw ConfigError("seed", "must be nonnegative");
  }

  SolverConfig& s = rc.solver;
  s.dt = rd.num("dt", s.dt);
  s.t_max = rd.num("t_max", s.t_max);
  s.j_max = static_cast<int>(rd.integer("j_max", s.j_max));
  const std::string pr = rd.str("priority", "jump");
  if (pr == "jump") {
    s.priority = Priority::Jump;
  } else if (pr == "flow") {
    s.priority = Priority::Flow;
  } else {
    throw ConfigError(*rd.key_for("priority"), "expected 'jump' or 'flow'");
  }
  s.refine_tol = rd.num("refine_tol", s.refine_tol);
  return rc;
}

std::string g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string vec_str(const Vec3& v) {
  std::ostringstream os;
  os << std::setprecision(6) << '[' << v[0] << ", " << v[1] << ", " << v[2] << ']';
  return os.str();
}

}  // namespace

ScenarioConfig load_scenario_text(const std::string& text, const std::string& source) {
  const KeyValueConfig kv = KeyValueConfig::parse(text, source);
  ScenarioConfig cfg;
  cfg.name = kv.has("name") ? kv.get_string("name") : "scenario";
  cfg.description = kv.has("description") ? kv.get_string("description") : "";
  std::vector<std::string> names;
  const bool multi = kv.has("runs");
  if (multi) {
    names = kv.get_name_list("runs");
    if (names.empty()) throw ConfigError("runs", "list is empty");
    for (std::size_t i = 0; i < names.size(); ++i) {
      if (names[i].find('.') != std::string::npos) {
        throw ConfigError("runs", "run names may not contain '.' ('" + names[i] + "')");
      }
      for (std::size_t k = 0; k < i; ++k) {
        if (names[k] == names[i]) throw ConfigError("runs", "duplicate run '" + names[i] + "'");
      }
    }
  } else {
    names.push_back("main");
  }
  for (std::size_t i = 0; i < names.size(); ++i) {
    cfg.runs.push_back(read_run(kv, names[i], multi, static_cast<int>(i)));
  }
  const std::vector<std::string> unused = kv.unused_keys();
  if (!unused.empty()) {
    throw ConfigError(unused.front(), "unknown key");
  }
  return cfg;
}

ScenarioConfig load_scenario_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("", "cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  return load_scenario_text(ss.str(), path);
}

ScenarioConfig resolve_scenario(const std::string& name_or_path) {
  if (std::filesystem::exists(name_or_path)) return load_scenario_file(name_or_path);
  for (const BundledScenario& b : bundled_scenarios()) {
    if (name_or_path == b.name) return load_scenario_text(b.text, std::string("bundled:") + b.name);
  }
  throw ConfigError("", "'" + name_or_path + "' is neither a config file nor a bundled scenario");
}

std::vector<std::string> list_scenarios() {
  std::vector<std::string> out;
  for (const BundledScenario& b : bundled_scenarios()) out.emplace_back(b.name);
  return out;
}

PotentialParams make_params(const RunConfig& rc) {
  const Mat3 a = rc.A_diag.asDiagonal();
  if (rc.gamma_frac && rc.delta_frac) {
    return construct_params(a, rc.theta_set, *rc.gamma_frac, *rc.delta_frac);
  }
  if (!rc.gamma && !rc.gamma_frac) {
    throw ConfigError("gamma", "gamma or gamma_frac is required for run '" + rc.name + "'");
  }
  if (!rc.delta && !rc.delta_frac) {
    throw ConfigError("delta", "delta or delta_frac is required for run '" + rc.name + "'");
  }
  // Mixed or absolute weights: the admissible bounds only depend on A and Theta.
  const PotentialParams probe = construct_params(a, rc.theta_set, 0.5, 0.5);
  const double gamma = rc.gamma ? *rc.gamma : *rc.gamma_frac * probe.gamma_bound();
  const double tm = probe.theta_min();
  const double delta =
      rc.delta ? *rc.delta : *rc.delta_frac * (probe.gamma_bound() - gamma) * tm * tm / 2.0;
  return construct_params_absolute(a, rc.theta_set, gamma, delta);
}

ClosedLoopSetup make_setup(const RunConfig& rc) {
  ClosedLoopSetup s;
  s.kind = rc.controller;
  s.zeta_variant = rc.zeta_variant;
  s.params = make_params(rc);
  s.gains = rc.gains;
  s.gains.validate(rc.controller, s.params);
  s.inertia = Inertia::diagonal(rc.J_diag);
  s.reference = ReferenceSignal::named(rc.reference, rc.m_bound, rc.omega_r_bound);
  if (rc.noise) {
    if (!(rc.sigma_R2 >= 0.0) || !(rc.sigma_w2 >= 0.0)) {
      throw ContractViolation("noise variances must be nonnegative");
    }
    s.noise = {std::sqrt(rc.sigma_R2), std::sqrt(rc.sigma_w2)};
  }
  s.seed = rc.seed;
  rc.solver.validate();
  return s;
}

InitialConditions make_initial_conditions(const RunConfig& rc) {
  InitialConditions ic;
  if (std::abs(rc.r0_axis.norm() - 1.0) > 1e-12) {
    throw ContractViolation("r0_axis must be a unit vector");
  }
  ic.R0 = angle_axis(rc.r0_angle, rc.r0_axis);
  ic.omega0 = rc.omega0;
  ic.theta0 = rc.theta0;
  ic.zeta0 = rc.zeta0;
  if (!rc.rbar0_transpose) {
    if (std::abs(rc.rbar0_axis.norm() - 1.0) > 1e-12) {
      throw ContractViolation("rbar0_axis must be a unit vector");
    }
    ic.Rbar0 = angle_axis(rc.rbar0_angle, rc.rbar0_axis);
  }
  ic.theta_bar0 = rc.theta_bar0;
  return ic;
}

ValidationReport validate(const ScenarioConfig& cfg) {
  ValidationReport rep;
  for (const RunConfig& rc : cfg.runs) {
    const std::string pre = rc.name + ": ";
    try {
      const ClosedLoopSetup s = make_setup(rc);
      make_initial_conditions(rc);
      const PotentialParams& p = s.params;
      const AssumptionConstants c = assumption_constants(p, 0);
      std::ostringstream os;
      os << std::setprecision(6) << pre << to_string(rc.controller) << ", case "
         << p.spectral().case_id << ", Delta* = " << p.spectral().delta_star
         << ", u = " << vec_str(p.u()) << ", gamma = " << p.gamma() << " (< "
         << p.gamma_bound() << "), delta = " << p.delta() << " (< " << p.delta_bound() << ")";
      rep.info.push_back(os.str());
      if (rc.controller == ControllerKind::Smooth) {
        std::ostringstream o2;
        o2 << std::setprecision(6) << pre << "rho bound (delta - delta')/c_psi^2 = "
           << rho_bound(p, s.gains, c) << ", k_zeta* = " << kzeta_star(s.gains, c);
        rep.info.push_back(o2.str());
      }
      for (const std::string& w : s.gains.warnings(rc.controller, p, c)) {
        rep.warnings.push_back(pre + w);
      }
      if (rc.noise && rc.sigma_R2 == 0.0 && rc.sigma_w2 == 0.0) {
        rep.warnings.push_back(pre + "noise is on but both variances are zero");
      }
    } catch (const std::exception& e) {
      rep.errors.push_back(pre + e.what());
    }
  }
  return rep;
}

RunResult simulate(const RunConfig& rc) {
  RunResult r;
  r.config = rc;
  InitialConditions ic;
  try {
    r.setup = make_setup(rc);
    ic = make_initial_conditions(rc);
  } catch (const std::exception& e) {
    r.error = e.what();
    r.exit_code = 1;
    return r;
  }
  try {
    ClosedLoop sys(*r.setup);
    const VecX x0 = StateLayout::pack(rc.controller, initial_loop_state(ic));
    r.arc = solve(sys, x0, rc.solver);
  } catch (const DomainExitError& e) {
    r.arc = e.arc;
    r.error = e.what();
    r.exit_code = 2;
    return r;
  } catch (const std::exception& e) {
    r.error = e.what();
    r.exit_code = 2;
    return r;
  }
  CertificationOptions opt;
  const bool noisy = rc.noise && (rc.sigma_R2 > 0.0 || rc.sigma_w2 > 0.0);
  opt.enforce_flow = !noisy;
  opt.jump_on_measurement = noisy;
  opt.fit_exponential = true;
  r.report = certify_arc(r.arc, *r.setup, rc.controller, opt);
  if (!r.report.pass()) r.exit_code = 3;
  return r;
}

std::vector<std::string> csv_columns(ControllerKind k) {
  std::vector<std::string> c = {"t",    "j",    "dist_Re", "theta", "we_x", "we_y", "we_z",
                                "tau_x", "tau_y", "tau_z", "U",    "lyap", "in_jump_set"};
  if (k == ControllerKind::Smooth) {
    c.insert(c.end(), {"zeta_x", "zeta_y", "zeta_z"});
  } else if (k == ControllerKind::VelocityFree) {
    c.insert(c.end(), {"dist_Rtilde", "theta_bar"});
  }
  return c;
}

std::string trajectory_csv(const RunResult& r) {
  if (!r.setup) throw std::logic_error("trajectory_csv: run has no setup");
  const ClosedLoopSetup& setup = *r.setup;
  const ControllerKind k = setup.kind;
  std::string out;
  out.reserve(r.arc.samples.size() * 260);
  const std::vector<std::string> cols = csv_columns(k);
  for (std::size_t i = 0; i < cols.size(); ++i) {
    out += (i ? "," : "") + cols[i];
  }
  out += '\n';
  const std::vector<MonitorRecord> mon = monitor_arc(r.arc, setup);
  for (std::size_t i = 0; i < r.arc.samples.size(); ++i) {
    const ArcSample& a = r.arc.samples[i];
    const LoopState s = StateLayout::unpack(k, a.x);
    const MonitorRecord& m = mon[i];
    std::vector<double> row = {a.time.t,
                               static_cast<double>(a.time.j),
                               m.dist_Re,
                               s.theta,
                               s.omega_e[0],
                               s.omega_e[1],
                               s.omega_e[2],
                               a.out[RecordLayout::kTau],
                               a.out[RecordLayout::kTau + 1],
                               a.out[RecordLayout::kTau + 2],
                               m.U,
                               m.lyap,
                               a.out[RecordLayout::kInJump]};
    if (k == ControllerKind::Smooth) {
      row.insert(row.end(), {s.zeta[0], s.zeta[1], s.zeta[2]});
    } else if (k == ControllerKind::VelocityFree) {
      row.insert(row.end(), {rot_distance(s.Rtilde), s.theta_bar});
    }
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) out += ',';
      out += g17(row[c]);
    }
    out += '\n';
  }
  out += "# run = " + r.config.name + "\n";
  out += "# controller = " + to_string(k) + "\n";
  out += "# seed = " + std::to_string(r.config.seed) + "\n";
  out += r.report.to_text("# ");
  if (!r.error.empty()) out += "# error = " + r.error + "\n";
  return out;
}

void apply_overrides(ScenarioConfig& cfg, const RunOverrides& o) {
  for (std::size_t i = 0; i < cfg.runs.size(); ++i) {
    RunConfig& rc = cfg.runs[i];
    if (o.seed) rc.seed = *o.seed + i;
    if (o.dt) rc.solver.dt = *o.dt;
    if (o.t_max) rc.solver.t_max = *o.t_max;
    if (o.no_noise) rc.noise = false;
  }
}

double time_to_reach(const RunResult& r, double level) {
  if (!r.setup) return std::numeric_limits<double>::infinity();
  for (const ArcSample& a : r.arc.samples) {
    const LoopState s = StateLayout::unpack(r.setup->kind, a.x);
    if (rot_distance(s.Re) < level) return a.time.t;
  }
  return std::numeric_limits<double>::infinity();
}

ScenarioOutcome run_scenario(const ScenarioConfig& cfg, const std::string& out_dir, bool plots,
                             std::ostream& log) {
  ScenarioOutcome out;
  const ValidationReport vr = validate(cfg);
  for (const std::string& w : vr.warnings) log << "warning: " << w << '\n';
  if (!vr.ok()) {
    for (const std::string& e : vr.errors) log << "config error: " << e << '\n';
    out.exit_code = 1;
    return out;
  }

  std::vector<std::future<RunResult>> futures;
  for (const RunConfig& rc : cfg.runs) {
    futures.push_back(std::async(std::launch::async, [rc] { return simulate(rc); }));
  }
  for (auto& f : futures) out.runs.push_back(f.get());

  std::filesystem::create_directories(out_dir);
  const std::filesystem::path dir(out_dir);
  std::ostringstream report;
  report << "scenario = " << cfg.name << '\n';
  for (const RunResult& r : out.runs) {
    if (r.exit_code == 1) {
      log << "config error: " << r.config.name << ": " << r.error << '\n';
      out.exit_code = std::max(out.exit_code, 1);
      continue;
    }
    const std::string csv_path = (dir / (cfg.name + "_" + r.config.name + ".csv")).string();
    std::ofstream f(csv_path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + csv_path);
    f << trajectory_csv(r);
    out.files.push_back(csv_path);

    report << "\n[" << r.config.name << "]\n" << r.report.to_text();
    report << "time_to_dist_0.1 = " << time_to_reach(r, 0.1) << '\n';
    if (!r.error.empty()) report << "error = " << r.error << '\n';

    log << r.config.name << " (" << to_string(r.config.controller) << "): ";
    if (!r.error.empty()) {
      log << "solver error: " << r.error << '\n';
    } else {
      log << r.report.jump_count << " jump(s), terminal |Re|_I = " << r.report.terminal_dist_Re
          << ", certification " << (r.report.pass() ? "PASS" : "FAIL") << '\n';
    }
    // Solver errors outrank certification failures.
    if (r.exit_code == 2) {
      out.exit_code = out.exit_code == 1 ? 1 : 2;
    } else if (r.exit_code == 3 && out.exit_code == 0) {
      out.exit_code = 3;
    }
  }
  const std::string rep_path = (dir / (cfg.name + "_report.txt")).string();
  std::ofstream(rep_path) << report.str();
  out.files.push_back(rep_path);

  if (plots) {
    std::vector<PlotSeries> dist, theta, wnorm, lyap;
    for (const RunResult& r : out.runs) {
      if (!r.setup || r.arc.samples.empty()) continue;
      const std::vector<MonitorRecord> mon = monitor_arc(r.arc, *r.setup);
      PlotSeries d{r.config.name, {}, {}}, th{r.config.name, {}, {}}, w{r.config.name, {}, {}},
          l{r.config.name, {}, {}};
      PlotSeries tx{"tau_x", {}, {}}, ty{"tau_y", {}, {}}, tz{"tau_z", {}, {}};
      for (std::size_t i = 0; i < mon.size(); ++i) {
        const ArcSample& a = r.arc.samples[i];
        const double t = a.time.t;
        d.x.push_back(t);
        d.y.push_back(mon[i].dist_Re);
        th.x.push_back(t);
        th.y.push_back(a.x[StateLayout::kTheta]);
        w.x.push_back(t);
        w.y.push_back(mon[i].omega_e_norm);
        l.x.push_back(t);
        l.y.push_back(mon[i].lyap);
        tx.x.push_back(t);
        tx.y.push_back(a.out[RecordLayout::kTau]);
        ty.x.push_back(t);
        ty.y.push_back(a.out[RecordLayout::kTau + 1]);
        tz.x.push_back(t);
        tz.y.push_back(a.out[RecordLayout::kTau + 2]);
      }
      dist.push_back(std::move(d));
      theta.push_back(std::move(th));
      wnorm.push_back(std::move(w));
      lyap.push_back(std::move(l));
      PlotSpec ts;
      ts.title = cfg.name + " / " + r.config.name + ": control torque";
      ts.y_label = "tau [N m]";
      const std::string tau_path = (dir / (cfg.name + "_" + r.config.name + "_tau.svg")).string();
      write_svg(tau_path, ts, {tx, ty, tz});
      out.files.push_back(tau_path);
    }
    auto emit = [&](const std::string& stem, const std::string& title, const std::string& ylab,
                    const std::vector<PlotSeries>& s, bool log_y) {
      PlotSpec spec;
      spec.title = cfg.name + ": " + title;
      spec.y_label = ylab;
      spec.log_y = log_y;
      const std::string path = (dir / (cfg.name + "_" + stem + ".svg")).string();
      write_svg(path, spec, s);
      out.files.push_back(path);
    };
    emit("dist_Re", "attitude error |Re|_I", "|Re|_I", dist, false);
    emit("theta", "hybrid variable theta", "theta [rad]", theta, false);
    emit("omega_e", "angular velocity error", "||omega_e|| [rad/s]", wnorm, false);
    emit("lyap", "Lyapunov function", "L", lyap, true);
  }
  return out;
}

}  // namespace hyso3
