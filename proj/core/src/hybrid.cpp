#include "hyso3/hybrid.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace hyso3 {

void SolverConfig::validate() const {
  if (!(dt > 0.0) || !std::isfinite(dt)) {
    throw std::invalid_argument("solver: dt must be positive");
  }
  if (!(t_max >= 0.0) || !std::isfinite(t_max)) {
    throw std::invalid_argument("solver: t_max must be nonnegative and finite");
  }
  if (j_max < 1) {
    throw std::invalid_argument("solver: j_max must be at least 1");
  }
  if (max_jumps_same_t < 1) {
    throw std::invalid_argument("solver: max_jumps_same_t must be at least 1");
  }
}

void HybridArc::check_well_formed() const {
  if (samples.empty()) {
    throw std::logic_error("arc has no samples");
  }
  for (std::size_t k = 1; k < samples.size(); ++k) {
    const HybridTime& a = samples[k - 1].time;
    const HybridTime& b = samples[k].time;
    const bool flow_step = b.j == a.j && b.t > a.t;
    const bool jump_step = b.j == a.j + 1 && b.t == a.t;
    if (!flow_step && !jump_step) {
      std::ostringstream os;
      os << "arc sample " << k << " breaks hybrid time ordering: (" << a.t << ", " << a.j
         << ") -> (" << b.t << ", " << b.j << ")";
      throw std::logic_error(os.str());
    }
  }
  for (std::size_t k = 0; k < jumps.size(); ++k) {
    if (jumps[k].time.j != static_cast<int>(k)) {
      throw std::logic_error("jump events are not numbered consecutively");
    }
  }
  if (samples.back().time.j != jump_count()) {
    throw std::logic_error("final jump counter disagrees with the number of jump events");
  }
}

VecX rk4_step(const HybridSystem& sys, double t, const VecX& x, double h) {
  const VecX k1 = sys.flow(t, x);
  const VecX k2 = sys.flow(t + 0.5 * h, x + 0.5 * h * k1);
  const VecX k3 = sys.flow(t + 0.5 * h, x + 0.5 * h * k2);
  const VecX k4 = sys.flow(t + h, x + h * k3);
  return x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

Crossing detect_crossing(double scalar_before, double scalar_after,
                         const std::function<double(double)>& scalar, double dt, double tol,
                         int n_scan) {
  n_scan = std::max(n_scan, 1);
  auto positive = [](double s) { return s >= 0.0; };
  double lo = 0.0;
  double s_lo = scalar_before;
  double hi = -1.0;
  for (int k = 1; k <= n_scan; ++k) {
    const double tk = (k == n_scan) ? dt : dt * k / n_scan;
    const double sk = (k == n_scan) ? scalar_after : scalar(tk);
    if (positive(sk) != positive(s_lo)) {
      hi = tk;
      break;
    }
    lo = tk;
    s_lo = sk;
  }
  if (hi < 0.0) {
    return {};
  }
  const bool lo_class = positive(s_lo);
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (positive(scalar(mid)) == lo_class) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return {true, hi};
}

HybridArc solve(HybridSystem& sys, const VecX& x0, const SolverConfig& cfg) {
  cfg.validate();
  HybridArc arc;
  double t = 0.0;
  int j = 0;
  VecX x = sys.normalize(x0);
  int same_t_jumps = 0;
  const double tol = cfg.effective_refine_tol();
  const double t_end_eps = 1e-9 * cfg.dt;

  sys.begin_step(t);
  for (;;) {
    if (!x.allFinite()) {
      std::ostringstream os;
      os << "state became non-finite at t = " << t << ", j = " << j;
      throw SolverError(os.str());
    }
    arc.samples.push_back({{t, j}, x, sys.record(t, x)});

    if (j >= cfg.j_max) {
      arc.termination = Termination::JMax;
      break;
    }

    const bool in_c = sys.in_flow_set(t, x);
    const bool in_d = sys.in_jump_set(t, x);
    if (!in_c && !in_d) {
      std::ostringstream os;
      os << "state left both the flow and jump sets at t = " << t << ", j = " << j
         << " (jump indicator " << sys.jump_indicator(t, x) << ")";
      arc.termination = Termination::DomainExit;
      throw DomainExitError(os.str(), std::move(arc));
    }

    const bool do_jump = cfg.priority == Priority::Jump ? in_d : (in_d && !in_c);
    if (do_jump) {
      if (++same_t_jumps > cfg.max_jumps_same_t) {
        std::ostringstream os;
        os << "more than " << cfg.max_jumps_same_t << " consecutive jumps at t = " << t
           << "; the jump map does not leave the jump set";
        throw ChatteringError(os.str());
      }
      const VecX xp = sys.normalize(sys.jump(t, x));
      arc.jumps.push_back({{t, j}, x, xp, arc.samples.back().out, sys.record(t, xp)});
      x = xp;
      ++j;
      continue;
    }

    if (t >= cfg.t_max - t_end_eps) {
      arc.termination = Termination::TMax;
      break;
    }

    same_t_jumps = 0;
    double h = std::min(cfg.dt, cfg.t_max - t);
    VecX x1 = sys.normalize(rk4_step(sys, t, x, h));
    if (cfg.refine) {
      const double s0 = sys.jump_indicator(t, x);
      const double s1 = sys.jump_indicator(t + h, x1);
      if (s0 < 0.0 && s1 >= 0.0) {
        auto along = [&](double tau) {
          return sys.jump_indicator(t + tau, sys.normalize(rk4_step(sys, t, x, tau)));
        };
        const Crossing c = detect_crossing(s0, s1, along, h, tol);
        if (c.found && c.tau < h && t + c.tau > t) {
          h = c.tau;
          x1 = sys.normalize(rk4_step(sys, t, x, h));
        }
      }
    }
    x = std::move(x1);
    t += h;
    sys.begin_step(t);
  }
  return arc;
}

}  // namespace hyso3
