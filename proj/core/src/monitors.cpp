#include "hyso3/monitors.hpp"

#include <cmath>
#include <iomanip>
#include <limits>
#include <sstream>

namespace hyso3 {

namespace {

double kinetic(const Vec3& w, const Inertia& j) { return 0.5 * w.dot(j.matrix() * w); }

}  // namespace

double lyapunov_basic(const BasicLoopState& s, const PotentialParams& p, const ControllerGains& g,
                      const Inertia& j) {
  return g.kR * potential(s.Re, s.theta, p) + kinetic(s.omega_e, j);
}

double lyapunov_smooth(const SmoothLoopState& s, const PotentialParams& p,
                       const ControllerGains& g, const Inertia& j) {
  return g.kR * W(s.Re, s.theta, s.zeta, p, g.rho) + kinetic(s.omega_e, j);
}

double lyapunov_vf(const VelocityFreeLoopState& s, const PotentialParams& p,
                   const ControllerGains& g, const Inertia& j) {
  return g.kR * potential(s.Re, s.theta, p) + g.k_beta * potential(s.Rtilde, s.theta_bar, p) +
         kinetic(s.omega_e, j);
}

double lyapunov_eps(const BasicLoopState& s, const PotentialParams& p, const ControllerGains& g,
                    const Inertia& j, double eps) {
  if (!(eps >= 0.0)) {
    throw ContractViolation("lyapunov_eps: eps must be nonnegative");
  }
  return lyapunov_basic(s, p, g, j) +
         eps * s.omega_e.dot(j.matrix() * grad_R_psi(s.Re, s.theta, p));
}

double epsilon1_star(const ControllerGains& g, const Inertia& j, const AssumptionConstants& c) {
  return std::sqrt(2.0 * g.kR * j.lambda_min() / c.alpha1) / j.lambda_max();
}

double lyapunov(const LoopState& s, const ClosedLoopSetup& setup) {
  const PotentialParams& p = setup.params;
  const ControllerGains& g = setup.gains;
  const Inertia& j = setup.inertia;
  switch (setup.kind) {
    case ControllerKind::Smooth:
      return lyapunov_smooth(s.smooth(), p, g, j);
    case ControllerKind::VelocityFree:
      return lyapunov_vf(s.velocity_free(), p, g, j);
    default:
      return lyapunov_basic(s.basic(), p, g, j);
  }
}

double required_jump_drop(const ClosedLoopSetup& setup) {
  const ControllerGains& g = setup.gains;
  switch (setup.kind) {
    case ControllerKind::Smooth:
      return g.kR * g.delta_prime;
    case ControllerKind::VelocityFree:
      return std::min(g.kR, g.k_beta) * setup.params.delta();
    default:
      return g.kR * setup.params.delta();
  }
}

std::vector<MonitorRecord> monitor_arc(const HybridArc& arc, const ClosedLoopSetup& setup) {
  std::vector<MonitorRecord> out;
  out.reserve(arc.samples.size());
  for (std::size_t k = 0; k < arc.samples.size(); ++k) {
    const ArcSample& a = arc.samples[k];
    const LoopState s = StateLayout::unpack(setup.kind, a.x);
    MonitorRecord r;
    r.time = a.time;
    r.U = potential(s.Re, s.theta, setup.params);
    r.lyap = lyapunov(s, setup);
    if (k > 0 && arc.samples[k - 1].time.j == a.time.j) {
      r.dlyap = r.lyap - out.back().lyap;
    }
    r.dist_Re = rot_distance(s.Re);
    r.omega_e_norm = s.omega_e.norm();
    if (a.out.size() >= RecordLayout::kDim) {
      r.tau_norm = a.out.segment<3>(RecordLayout::kTau).norm();
      r.in_jump_set = a.out[RecordLayout::kInJump] > 0.5;
    }
    r.in_flow_set = !r.in_jump_set || setup.kind == ControllerKind::NonHybrid;
    out.push_back(r);
  }
  return out;
}

ExponentialFit fit_exponential_tail(const HybridArc& arc, const ClosedLoopSetup& setup,
                                    double floor) {
  ExponentialFit f;
  const int last_j = arc.jump_count();
  double st = 0, sy = 0, stt = 0, sty = 0, syy = 0;
  int n = 0;
  bool first = true;
  for (const ArcSample& a : arc.samples) {
    if (a.time.j != last_j) continue;
    const LoopState s = StateLayout::unpack(setup.kind, a.x);
    const double v = potential(s.Re, s.theta, setup.params) + s.omega_e.squaredNorm();
    if (!(v > floor)) continue;
    const double t = a.time.t;
    const double y = std::log(v);
    if (first) {
      f.t_begin = t;
      first = false;
    }
    f.t_end = t;
    st += t;
    sy += y;
    stt += t * t;
    sty += t * y;
    syy += y * y;
    ++n;
  }
  f.n = n;
  if (n < 3) return f;
  const double dn = n;
  const double cov = sty - st * sy / dn;
  const double vt = stt - st * st / dn;
  const double vy = syy - sy * sy / dn;
  if (!(vt > 0.0)) return f;
  f.slope = cov / vt;
  f.intercept = (sy - f.slope * st) / dn;
  f.r2 = vy > 0.0 ? cov * cov / (vt * vy) : 1.0;
  f.valid = true;
  return f;
}

std::string CertificationReport::to_text(const std::string& prefix) const {
  std::ostringstream os;
  os << std::setprecision(10);
  auto line = [&](const std::string& k, auto v) { os << prefix << k << " = " << v << '\n'; };
  line("monitor", to_string(kind));
  line("samples", samples);
  line("max_flow_increase", max_flow_increase);
  line("max_flow_increase_t", max_flow_increase_t);
  line("flow_check", flow_enforced ? (flow_ok ? "PASS" : "FAIL") : "REPORTED (noise enabled)");
  line("jump_count", jump_count);
  line("jump_bound", jump_bound);
  line("required_jump_drop", required_drop);
  if (jump_count > 0) {
    line("jump_drop_evaluated_on", jump_on_measurement ? "measured state" : "true state");
    line("min_jump_drop", min_jump_drop);
    line("min_jump_drop_true_state", min_jump_drop_true);
  }
  line("jump_check", jump_ok ? "PASS" : "FAIL");
  line("jump_count_check", count_ok ? "PASS" : "FAIL");
  line("max_torque_jump", max_torque_jump);
  line("lyap0", lyap0);
  line("terminal_dist_Re", terminal_dist_Re);
  line("terminal_omega_e", terminal_omega_e);
  if (fit.valid) {
    line("exp_fit_slope", fit.slope);
    line("exp_fit_r2", fit.r2);
    line("exp_fit_window", std::to_string(fit.t_begin) + " .. " + std::to_string(fit.t_end));
  }
  line("certification", pass() ? "PASS" : "FAIL");
  return os.str();
}

CertificationReport certify_arc(const HybridArc& arc, const ClosedLoopSetup& setup,
                                ControllerKind monitor, const CertificationOptions& opt) {
  if (monitor != setup.kind) {
    throw MonitorMismatch("monitor '" + to_string(monitor) + "' cannot certify an arc of the '" +
                          to_string(setup.kind) + "' controller");
  }
  if (arc.samples.empty()) {
    throw std::invalid_argument("certify_arc: empty arc");
  }
  const int expected_dim = StateLayout::dim(setup.kind);
  if (arc.samples.front().x.size() != expected_dim) {
    throw MonitorMismatch("arc state dimension does not match the '" + to_string(monitor) +
                          "' controller");
  }

  CertificationReport r;
  r.kind = monitor;
  r.samples = static_cast<int>(arc.samples.size());
  r.flow_enforced = opt.enforce_flow;

  const std::vector<MonitorRecord> recs = monitor_arc(arc, setup);
  r.lyap0 = recs.front().lyap;
  for (std::size_t k = 1; k < recs.size(); ++k) {
    if (recs[k].time.j != recs[k - 1].time.j) continue;
    if (recs[k].dlyap > r.max_flow_increase) {
      r.max_flow_increase = recs[k].dlyap;
      r.max_flow_increase_t = recs[k].time.t;
    }
  }
  r.flow_ok = !opt.enforce_flow || r.max_flow_increase <= opt.flow_tol;

  r.required_drop = required_jump_drop(setup);
  r.jump_count = arc.jump_count();
  r.min_jump_drop = std::numeric_limits<double>::infinity();
  r.min_jump_drop_true = std::numeric_limits<double>::infinity();
  r.jump_on_measurement = opt.jump_on_measurement;
  for (const JumpEvent& e : arc.jumps) {
    const LoopState pre = StateLayout::unpack(setup.kind, e.pre);
    const LoopState post = StateLayout::unpack(setup.kind, e.post);
    const double true_drop = lyapunov(pre, setup) - lyapunov(post, setup);
    r.min_jump_drop_true = std::min(r.min_jump_drop_true, true_drop);
    double drop = true_drop;
    if (opt.jump_on_measurement && e.out_pre.size() >= RecordLayout::kDim) {
      const Vec3 n_r = e.out_pre.segment<3>(RecordLayout::kNoiseR);
      const Vec3 n_w = e.out_pre.segment<3>(RecordLayout::kNoiseW);
      drop = lyapunov(measured_state(pre, n_r, n_w), setup) -
             lyapunov(measured_state(post, n_r, n_w), setup);
    }
    r.min_jump_drop = std::min(r.min_jump_drop, drop);
    if (e.out_pre.size() >= 3 && e.out_post.size() >= 3) {
      r.max_torque_jump =
          std::max(r.max_torque_jump,
                   (e.out_post.segment<3>(RecordLayout::kTau) -
                    e.out_pre.segment<3>(RecordLayout::kTau))
                       .norm());
    }
  }
  r.jump_ok = r.jump_count == 0 || r.min_jump_drop >= r.required_drop - opt.jump_slack;
  r.jump_bound = r.required_drop > 0.0
                     ? static_cast<int>(std::ceil(r.lyap0 / r.required_drop))
                     : std::numeric_limits<int>::max();
  r.count_ok = setup.kind == ControllerKind::NonHybrid || r.jump_count <= r.jump_bound;

  r.terminal_dist_Re = recs.back().dist_Re;
  r.terminal_omega_e = recs.back().omega_e_norm;
  if (opt.fit_exponential) {
    r.fit = fit_exponential_tail(arc, setup);
  }
  return r;
}

}  // namespace hyso3
