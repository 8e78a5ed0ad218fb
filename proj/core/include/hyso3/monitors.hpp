#pragma once

#include "hyso3/closed_loop.hpp"

#include <string>
#include <vector>

namespace hyso3 {

/// kR U(Re, theta) + 1/2 omega_e^T J omega_e
double lyapunov_basic(const BasicLoopState& s, const PotentialParams& p, const ControllerGains& g,
                      const Inertia& j);

/// kR W(Re, theta, zeta) + 1/2 omega_e^T J omega_e
double lyapunov_smooth(const SmoothLoopState& s, const PotentialParams& p,
                       const ControllerGains& g, const Inertia& j);

/// kR U(Re, theta) + k_beta U(Rtilde, theta_bar) + 1/2 omega_e^T J omega_e
double lyapunov_vf(const VelocityFreeLoopState& s, const PotentialParams& p,
                   const ControllerGains& g, const Inertia& j);

/// lyapunov_basic + eps omega_e^T J grad_R_psi(Re, theta). Requires eps >= 0.
double lyapunov_eps(const BasicLoopState& s, const PotentialParams& p, const ControllerGains& g,
                    const Inertia& j, double eps);

/// (1/lambda_M^J) sqrt(2 kR lambda_m^J / alpha1)
double epsilon1_star(const ControllerGains& g, const Inertia& j, const AssumptionConstants& c);

/// The Lyapunov function matching the controller kind (non_hybrid uses the basic one).
double lyapunov(const LoopState& s, const ClosedLoopSetup& setup);

/// Minimum guaranteed decrease of the kind's Lyapunov function across a jump.
double required_jump_drop(const ClosedLoopSetup& setup);

struct MonitorRecord {
  HybridTime time;
  double U = 0.0;
  double lyap = 0.0;
  double dlyap = 0.0;  // change since the previous sample (0 across jumps and at the start)
  double dist_Re = 0.0;
  double omega_e_norm = 0.0;
  double tau_norm = 0.0;
  bool in_flow_set = false;
  bool in_jump_set = false;
};

/// Evaluates the monitors on every sample of an arc produced by `setup`.
std::vector<MonitorRecord> monitor_arc(const HybridArc& arc, const ClosedLoopSetup& setup);

struct ExponentialFit {
  bool valid = false;
  double slope = 0.0;  // of log(U + ||omega_e||^2) against t
  double intercept = 0.0;
  double r2 = 0.0;
  int n = 0;
  double t_begin = 0.0;
  double t_end = 0.0;
};

/**
 * Least-squares line through log(U + ||omega_e||^2) on the samples after the
 * last jump, keeping only values above `floor` so round-off does not bend the tail.
 */
ExponentialFit fit_exponential_tail(const HybridArc& arc, const ClosedLoopSetup& setup,
                                    double floor = 1e-12);

struct CertificationOptions {
  double flow_tol = 1e-7;
  /// Flow monotonicity holds for the true closed loop only; with measurement
  /// noise the check is reported but not enforced.
  bool enforce_flow = true;
  double jump_slack = 1e-9;
  /// Evaluate the jump decrease on the measured state held at the jump instant.
  /// Under noise the jump map acts on measurements, and only that decrease is
  /// guaranteed; the true-state decrease is reported alongside.
  bool jump_on_measurement = false;
  bool fit_exponential = false;
};

struct CertificationReport {
  ControllerKind kind = ControllerKind::Basic;
  int samples = 0;
  double max_flow_increase = 0.0;
  double max_flow_increase_t = 0.0;
  bool flow_enforced = true;
  int jump_count = 0;
  double required_drop = 0.0;
  double min_jump_drop = 0.0;       // +inf when there are no jumps
  double min_jump_drop_true = 0.0;  // same, always on the true state
  bool jump_on_measurement = false;
  int jump_bound = 0;
  double max_torque_jump = 0.0;
  double lyap0 = 0.0;
  double terminal_dist_Re = 0.0;
  double terminal_omega_e = 0.0;
  ExponentialFit fit;

  bool flow_ok = true;
  bool jump_ok = true;
  bool count_ok = true;
  bool pass() const { return flow_ok && jump_ok && count_ok; }

  /// Multi-line "key = value" text, each line prefixed with `prefix`.
  std::string to_text(const std::string& prefix = "") const;
};

class MonitorMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Certifies `arc` with the Lyapunov function of `monitor`. Throws MonitorMismatch
/// when `monitor` differs from the controller that produced the arc.
CertificationReport certify_arc(const HybridArc& arc, const ClosedLoopSetup& setup,
                                ControllerKind monitor, const CertificationOptions& opt = {});

}  // namespace hyso3
