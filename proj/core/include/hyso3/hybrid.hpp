#pragma once

#include <Eigen/Core>

#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace hyso3 {

using VecX = Eigen::VectorXd;

struct HybridTime {
  double t = 0.0;
  int j = 0;
};

inline bool operator<(const HybridTime& a, const HybridTime& b) {
  return a.t < b.t || (a.t == b.t && a.j < b.j);
}

/**
 * Abstract hybrid system  x' = F(x) on C,  x+ = G(x) on D.
 *
 * Membership in C and D is expressed through a single continuous scalar
 * (the jump indicator): D is {s >= 0} and C is {s <= 0} unless the
 * membership predicates are overridden.
 */
class HybridSystem {
 public:
  virtual ~HybridSystem() = default;

  virtual VecX flow(double t, const VecX& x) const = 0;
  virtual VecX jump(double t, const VecX& x) const = 0;
  virtual double jump_indicator(double t, const VecX& x) const = 0;

  virtual bool in_flow_set(double t, const VecX& x) const { return jump_indicator(t, x) <= 0.0; }
  virtual bool in_jump_set(double t, const VecX& x) const { return jump_indicator(t, x) >= 0.0; }

  /// Maps an integrated state back onto the state manifold (e.g. SO(3) re-projection).
  virtual VecX normalize(const VecX& x) const { return x; }

  /// Called once before each flow step and before each jump evaluation; inputs
  /// that are held constant over a step (measurement noise) are drawn here.
  virtual void begin_step(double /*t*/) {}

  /// Extra per-sample outputs stored alongside the state (e.g. applied torque).
  virtual VecX record(double /*t*/, const VecX& /*x*/) const { return VecX(); }
};

enum class Priority { Jump, Flow };

struct SolverConfig {
  double dt = 1e-3;
  double t_max = 20.0;
  int j_max = 50;
  Priority priority = Priority::Jump;
  /// Absolute bisection tolerance on the crossing time. Non-positive selects 1e-9 dt.
  double refine_tol = 0.0;
  bool refine = true;
  /// Jumps at one instant beyond this count abort the solve.
  int max_jumps_same_t = 10;

  void validate() const;
  double effective_refine_tol() const { return refine_tol > 0.0 ? refine_tol : 1e-9 * dt; }
};

struct ArcSample {
  HybridTime time;
  VecX x;
  VecX out;
};

struct JumpEvent {
  HybridTime time;  // hybrid time of the pre-jump state
  VecX pre;
  VecX post;
  VecX out_pre;
  VecX out_post;
};

enum class Termination { TMax, JMax, DomainExit };

struct HybridArc {
  std::vector<ArcSample> samples;
  std::vector<JumpEvent> jumps;
  Termination termination = Termination::TMax;

  int jump_count() const { return static_cast<int>(jumps.size()); }
  const ArcSample& back() const { return samples.back(); }
  /// Throws std::logic_error if hybrid time is not monotone or jump bookkeeping is broken.
  void check_well_formed() const;
};

class SolverError : public std::runtime_error {
 public:
  explicit SolverError(const std::string& what) : std::runtime_error(what) {}
};

/// The state left both the flow and the jump set. Carries the arc up to that point.
class DomainExitError : public SolverError {
 public:
  DomainExitError(const std::string& what, HybridArc partial)
      : SolverError(what), arc(std::move(partial)) {}
  HybridArc arc;
};

/// Too many consecutive jumps at one instant.
class ChatteringError : public SolverError {
 public:
  using SolverError::SolverError;
};

/// One classical RK4 step of x' = f(t, x); no normalization.
VecX rk4_step(const HybridSystem& sys, double t, const VecX& x, double h);

struct Crossing {
  bool found = false;
  double tau = 0.0;  // offset in [0, dt] of the upper bracket
};

/**
 * Locates the earliest sign change of `scalar` on [0, dt].
 *
 * `scalar(tau)` is the indicator along the flow at offset tau. The interval is
 * scanned at n_scan uniform points so that an even number of roots inside one
 * step is not missed, then the first bracket is bisected to `tol`. The returned
 * offset is the upper end of the final bracket, where the indicator is >= 0.
 */
Crossing detect_crossing(double scalar_before, double scalar_after,
                         const std::function<double(double)>& scalar, double dt, double tol,
                         int n_scan = 8);

/// Solves from (0, 0). Throws SolverError subclasses on chattering or domain exit.
HybridArc solve(HybridSystem& sys, const VecX& x0, const SolverConfig& cfg);

}  // namespace hyso3
