#pragma once

#include <string>
#include <vector>

#include "isac/beamforming.hpp"
#include "isac/config.hpp"
#include "isac/power_alloc.hpp"
#include "isac/report.hpp"

namespace isac {

/// Worker count: ISAC_THREADS when set, hardware concurrency otherwise.
int resolve_thread_count();

struct RunOptions {
  bool fix_placement = false;  // one placement per sweep value
  int threads = 0;             // 0: resolve_thread_count()
};

/// Convergence traces of the power-allocation loop on one §-default scenario
/// per antenna count; rows carry sweep_value = outer iteration and
/// metric = avg_sum_rate (the ergodic lower bound being maximized).
std::vector<ResultRow> run_power_convergence(const FullConfig& cfg,
                                             const std::vector<int>& nb_list,
                                             std::uint64_t seed);

/// Monte Carlo sweep over the configured variable. FPA/OPA rows report the
/// statistical lower bound; ORB/ZF/MRC/COMM_ONLY rows report instantaneous
/// rates under the matching combiners. Per-trial failures (ZF rank collapse,
/// infeasible allocations) are dropped and counted, never averaged.
std::vector<ResultRow> run_rate_sweep(const FullConfig& cfg,
                                      const RunOptions& opts = {});

/// Theory-vs-empirical detection probability at d_t2b = 100 m with equal
/// per-phase powers P = P_tot/K, plus the empirical false-alarm rate.
std::vector<ResultRow> run_detection_validation(const FullConfig& cfg,
                                                const RunOptions& opts = {});

/// One CSV (sorted rows) plus best-effort SVG plots per metric.
void emit_outputs(const std::vector<ResultRow>& rows,
                  const ExperimentSpec& spec, const std::string& outdir);

/// A copy of cfg with the sweep variable applied. Sweeping K re-derives
/// T_p = K + 1; sweeping d_t2u moves the target along the x-axis between the
/// BS and the user-cluster center.
FullConfig apply_sweep_value(const FullConfig& cfg, SweepVar var, double value);

/// Geometry for one trial: cluster users placed with `rng`; for d_t2u sweeps
/// the target position comes from apply_sweep_value via geom_override.
Geometry make_trial_geometry(const FullConfig& cfg, SeededRng& rng);

}  // namespace isac
