#pragma once

#include <vector>

#include "isac/cvx.hpp"
#include "isac/metrics.hpp"
#include "isac/power.hpp"

namespace isac {

/// PDD machinery for the pilot-power subproblem: multipliers omega_1..K and
/// omega_s, slacks tau (>= 0), penalty parameter xi (> 0, the augmented term
/// weighs 1/xi) and the current ascent step size.
struct PddState {
  RVector omega;  // K+1, last entry is the sensing multiplier
  RVector tau;    // K+1, last entry is the sensing slack
  double xi = 1.0;
  double delta = 1.0;

  static PddState init(int k, double xi0, double delta0) {
    PddState s;
    s.omega = RVector::Zero(k + 1);
    s.tau = RVector::Zero(k + 1);
    s.xi = xi0;
    s.delta = delta0;
    return s;
  }
};

/// Everything held fixed while the pilot powers move: data powers, the
/// statistical-stage sensing combiner, thresholds and the per-user pilot
/// power caps from the energy budget. Thresholds <= 0 disable the matching
/// constraint (used by the communication-only baseline).
struct PilotStage {
  const ChannelStatistics* st = nullptr;
  const SystemConfig* cfg = nullptr;
  RVector p_d;
  CVector u_s;
  double gamma_s_th = 0.0;
  RVector r_th;
  RVector cap;  // (P T - T_d p_d) / T_p elementwise

  static PilotStage make(const ChannelStatistics& st, const SystemConfig& cfg,
                         const RVector& p_d, const CVector& u_s,
                         double gamma_s_th);
};

/// Equality-form residuals f_k = 1 - rate_k/R_th,k + tau_k and
/// f_s = 1 - gamma_s/gamma_s_th + tau_s (disabled constraints give 0).
RVector constraint_residuals(const RVector& p_p, const PddState& s,
                             const PilotStage& stage);

/// Augmented Lagrangian
/// L = sum_rate - omega' f - (1/(2 xi)) ||f||^2.
double lagrangian_value(const RVector& p_p, const PddState& s,
                        const PilotStage& stage);

/// Closed-form gradient of L w.r.t. the pilot powers. Requires p_p > 0
/// elementwise (the ascent keeps iterates off the axis for this reason).
RVector lagrangian_gradient(const RVector& p_p, const PddState& s,
                            const PilotStage& stage);

/// d rate_l / d P_p,l for every user (cross-user terms vanish).
/// Exposed for the gradient assembly and its tests.
RVector rate_pilot_gradient(const RVector& p_p, const PilotStage& stage);

/// d gamma_s / d P_p,l for every user.
RVector sensing_pilot_gradient(const RVector& p_p, const PilotStage& stage);

struct AscentResult {
  RVector p_p;
  double delta_used = 0.0;
  bool line_search_failed = false;  // no ascent step found: at a boundary
};

/// One projected gradient-ascent step with Armijo backtracking; iterates are
/// clamped into [floor, cap] where the floor keeps the gradient formulas
/// defined. Updates s.delta with the accepted step for warm starting.
AscentResult pilot_ascent_step(const RVector& p_p, PddState& s,
                               const PilotStage& stage);

/// Slack refresh only: tau_k = max{0, rate_k/R_th,k - 1 - omega_k xi}.
void refresh_slacks(const RVector& p_p, PddState& s, const PilotStage& stage);

/// Full multiplier-round update (tau, omega, then the xi schedule).
PddState pdd_updates(const RVector& p_p, const PddState& s,
                     const PilotStage& stage);

/// One convexified data-power solve around p_d_prev: concave log minorant of
/// the sum rate under the budget, linearized rate and sensing rows. The
/// previous iterate is the warm start; when it is not strictly feasible
/// (possible on the first outer round) a phase-I repair runs first.
/// Throws InfeasibleError when the feasible set is (numerically) empty.
RVector data_power_sca(const RVector& p_d_prev, const RVector& p_p,
                       const DerivedCovariances& dc,
                       const ChannelStatistics& st, const CVector& u_s,
                       const SystemConfig& cfg, double gamma_s_th);

struct PowerTracePoint {
  int iteration = 0;
  double objective = 0.0;     // sum-rate lower bound
  double max_residual = 0.0;  // worst raw constraint violation (relative)
  double xi = 0.0;
};

struct PowerResult {
  PowerAllocation P;
  std::vector<PowerTracePoint> trace;  // entry 0 is the initial point
  bool converged = false;
  int outer_iterations = 0;
  CVector u_s;  // statistical-stage sensing combiner at the last iterate
};

struct PowerOptions {
  int max_outer = 200;
  int max_multiplier_rounds = 40;
  int max_ascent_steps = 300;
  bool sensing_constraint = true;
  bool check_feasibility = true;  // throw InfeasibleError on residual > eps
};

/// Alternating optimization: PDD gradient ascent on the pilot powers, then
/// one SCA data-power round, until the objective settles within cfg.eps.
/// The statistical sensing combiner is refreshed from the current powers at
/// the top of every outer iteration.
PowerResult optimize_power(const SystemConfig& cfg,
                           const ChannelStatistics& st,
                           const PowerAllocation& init,
                           const PowerOptions& opts = {});

/// Budget-feasible equal power point used for initialization and as the
/// fixed-power baseline: p_p = p_d = min(P, PT/T).
PowerAllocation full_equal_power(const SystemConfig& cfg);

}  // namespace isac
