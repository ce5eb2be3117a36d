#include "isac/experiments.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <map>
#include <thread>

namespace isac {

int resolve_thread_count() {
  if (const char* env = std::getenv("ISAC_THREADS")) {
    const int n = std::atoi(env);
    if (n >= 1) return n;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

FullConfig apply_sweep_value(const FullConfig& cfg, SweepVar var,
                             double value) {
  FullConfig c = cfg;
  switch (var) {
    case SweepVar::P:
      c.sys.P = dbm_to_watt(value);
      break;
    case SweepVar::P_tot:
      c.sys.P = dbm_to_watt(value) / c.sys.K;
      break;
    case SweepVar::K:
      c.sys.K = static_cast<int>(value);
      c.sys.T_p = c.sys.K + 1;
      break;
    case SweepVar::N_b:
      c.sys.N_b = static_cast<int>(value);
      break;
    case SweepVar::T_p:
      c.sys.T_p = static_cast<int>(value);
      break;
    case SweepVar::d_t2u: {
      // Target on the x-axis between the BS and the cluster center; larger
      // target-to-cluster distance means a shorter target-to-BS hop.
      const double x = c.geom.cluster_center.x() - value;
      c.geom.has_target_override = true;
      c.geom.target_override = Eigen::Vector2d(x, 0.0);
      break;
    }
  }
  c.sys.validate();
  return c;
}

Geometry make_trial_geometry(const FullConfig& cfg, SeededRng& rng) {
  Geometry geom = cfg.geom.to_geometry();
  geom.user_pos =
      place_users(geom.cluster_center, geom.cluster_radius, cfg.sys.K, rng);
  return geom;
}

namespace {

ChannelStatistics strip_echo(const ChannelStatistics& st) {
  ChannelStatistics out = st;
  for (int k = 0; k < st.users(); ++k) {
    out.R_g[k].setZero();
    out.R[k] = out.R_h[k];
  }
  return out;
}

struct Sample {
  std::string metric;
  double value = 0.0;
};

struct TrialOutcome {
  std::map<std::string, std::vector<Sample>> per_baseline;  // ok samples
  std::vector<std::string> dropped;                         // failed baselines

  void add(Baseline b, const std::string& metric, double v) {
    per_baseline[to_string(b)].push_back({metric, v});
  }
  void drop(Baseline b) { dropped.push_back(to_string(b)); }
};

TrialOutcome run_rate_trial(const FullConfig& c, SeededRng placement_rng,
                            SeededRng trial_rng) {
  TrialOutcome out;
  const auto& spec = c.exp;

  Geometry geom = make_trial_geometry(c, placement_rng);
  const ChannelStatistics stats = build_statistics(geom, c.pl, c.sys);
  const CMatrix pilots = dft_pilots(c.sys.K, c.sys.T_p);
  SeededRng channel_rng = trial_rng.child(2);

  if (spec.has(Baseline::FPA)) {
    const PowerAllocation fpa = full_equal_power(c.sys);
    const DerivedCovariances dc = derived_covariances(fpa.p_p, stats, c.sys);
    auto [o1, o2] = build_omega(fpa, dc, c.sys);
    const CVector u_s = sensing_evd(o1, o2, c.sys.T, c.sys.sigma2);
    out.add(Baseline::FPA, "avg_sum_rate",
            uatf_sum_rate(fpa, dc, stats, c.sys).sum);
    out.add(Baseline::FPA, "sensing_sinr",
            ergodic_sensing_sinr(fpa, dc, u_s, c.sys));
  }

  const bool need_opa = spec.has(Baseline::OPA) || spec.has(Baseline::ORB) ||
                        spec.has(Baseline::ZF) || spec.has(Baseline::MRC);
  if (need_opa) {
    bool opa_ok = true;
    PowerResult opa;
    try {
      opa = optimize_power(c.sys, stats, full_equal_power(c.sys));
    } catch (const Error&) {
      opa_ok = false;
      for (Baseline b :
           {Baseline::OPA, Baseline::ORB, Baseline::ZF, Baseline::MRC}) {
        if (spec.has(b)) out.drop(b);
      }
    }
    if (opa_ok) {
      const DerivedCovariances dc =
          derived_covariances(opa.P.p_p, stats, c.sys);
      if (spec.has(Baseline::OPA)) {
        out.add(Baseline::OPA, "avg_sum_rate",
                uatf_sum_rate(opa.P, dc, stats, c.sys).sum);
        out.add(Baseline::OPA, "sensing_sinr",
                ergodic_sensing_sinr(opa.P, dc, opa.u_s, c.sys));
        out.add(Baseline::OPA, "iterations", opa.outer_iterations);
      }
      const bool need_real = spec.has(Baseline::ORB) || spec.has(Baseline::ZF) ||
                             spec.has(Baseline::MRC);
      if (need_real) {
        const ChannelRealization real =
            sample_realization(stats, opa.P.p_p, pilots, c.sys, channel_rng);
        const CVector u_si =
            sensing_evd_instantaneous(opa.P, real, dc, c.sys);
        const double sinr_inst =
            instantaneous_sensing_sinr(opa.P, real, dc, u_si, c.sys);
        if (spec.has(Baseline::MRC)) {
          const auto u = mrc_instantaneous(real);
          out.add(Baseline::MRC, "avg_sum_rate",
                  instantaneous_sum_rate(opa.P, real, dc, u, c.sys).sum);
          out.add(Baseline::MRC, "sensing_sinr", sinr_inst);
        }
        if (spec.has(Baseline::ZF)) {
          try {
            const auto u = zf_instantaneous(real);
            out.add(Baseline::ZF, "avg_sum_rate",
                    instantaneous_sum_rate(opa.P, real, dc, u, c.sys).sum);
            out.add(Baseline::ZF, "sensing_sinr", sinr_inst);
          } catch (const RankDeficientError&) {
            out.drop(Baseline::ZF);
          }
        }
        if (spec.has(Baseline::ORB)) {
          const CombinerResult res = optimize_combiners(
              real, dc, opa.P, c.sys, default_warm_start(real));
          out.add(Baseline::ORB, "avg_sum_rate",
                  instantaneous_sum_rate(opa.P, real, dc, res.set.u_comm,
                                         c.sys)
                      .sum);
          out.add(Baseline::ORB, "sensing_sinr", sinr_inst);
        }
      }
    }
  }

  if (spec.has(Baseline::COMM_ONLY)) {
    try {
      const ChannelStatistics comm = strip_echo(stats);
      PowerOptions popts;
      popts.sensing_constraint = false;
      const PowerResult opa_c =
          optimize_power(c.sys, comm, full_equal_power(c.sys), popts);
      const DerivedCovariances dc_c =
          derived_covariances(opa_c.P.p_p, comm, c.sys);
      SeededRng comm_rng = trial_rng.child(3);
      const ChannelRealization real_c =
          sample_realization(comm, opa_c.P.p_p, pilots, c.sys, comm_rng);
      const CombinerResult res = optimize_combiners(
          real_c, dc_c, opa_c.P, c.sys, default_warm_start(real_c));
      out.add(Baseline::COMM_ONLY, "avg_sum_rate",
              instantaneous_sum_rate(opa_c.P, real_c, dc_c, res.set.u_comm,
                                     c.sys)
                  .sum);
    } catch (const Error&) {
      out.drop(Baseline::COMM_ONLY);
    }
  }
  return out;
}

TrialOutcome run_detect_trial(const FullConfig& c, SeededRng placement_rng,
                              SeededRng trial_rng) {
  TrialOutcome out;
  Geometry geom = make_trial_geometry(c, placement_rng);
  const ChannelStatistics stats = build_statistics(geom, c.pl, c.sys);
  const CMatrix pilots = dft_pilots(c.sys.K, c.sys.T_p);

  const PowerAllocation pa = full_equal_power(c.sys);
  const DerivedCovariances dc = derived_covariances(pa.p_p, stats, c.sys);
  auto [o1, o2] = build_omega(pa, dc, c.sys);
  const CVector u_s = sensing_evd(o1, o2, c.sys.T, c.sys.sigma2);

  const double rho_bar = rho_average(pa, dc, u_s, c.sys);
  out.add(Baseline::FPA, "p_detect_theory",
          detection_probability(rho_bar, c.sys.P_FA));

  // Per-realization Neyman-Pearson test on the simulated residual.
  SeededRng channel_rng = trial_rng.child(2);
  const ChannelRealization real =
      sample_realization(stats, pa.p_p, pilots, c.sys, channel_rng);
  const CMatrix data = sample_data_symbols(c.sys.K, c.sys.T_d(), channel_rng);

  const int dim = c.sys.N_b;
  CMatrix r_eff_p = c.sys.sigma2 * CMatrix::Identity(dim, dim);
  CMatrix r_eff_d = r_eff_p;
  for (int k = 0; k < c.sys.K; ++k) {
    r_eff_p += pa.p_p[k] * dc.R_err[k];
    r_eff_d += pa.p_d[k] * dc.R_err[k];
  }
  const double v_p = std::real(u_s.dot(r_eff_p * u_s));
  const double v_d = std::real(u_s.dot(r_eff_d * u_s));

  CVector w(c.sys.K);
  for (int k = 0; k < c.sys.K; ++k) w[k] = u_s.dot(real.g_hat[k]);
  CVector mu(c.sys.T);
  for (int t = 0; t < c.sys.T_p; ++t) {
    Complex m = 0.0;
    for (int k = 0; k < c.sys.K; ++k) {
      m += w[k] * std::sqrt(pa.p_p[k]) * pilots(t, k);
    }
    mu[t] = m;
  }
  for (int t = 0; t < c.sys.T_d(); ++t) {
    Complex m = 0.0;
    for (int k = 0; k < c.sys.K; ++k) {
      m += w[k] * std::sqrt(pa.p_d[k]) * data(k, t);
    }
    mu[c.sys.T_p + t] = m;
  }
  double rho_inst = 0.0;
  for (int t = 0; t < c.sys.T; ++t) {
    rho_inst += std::norm(mu[t]) / (t < c.sys.T_p ? v_p : v_d);
  }
  const double kappa =
      std::sqrt(rho_inst) / std::sqrt(2.0) * q_inverse(c.sys.P_FA);

  auto decision = [&](const CVector& y) {
    double psi = 0.0;
    for (int t = 0; t < c.sys.T; ++t) {
      psi += std::real(std::conj(y[t]) * mu[t]) / (t < c.sys.T_p ? v_p : v_d);
    }
    return psi > kappa;
  };

  const CVector y1 = sensing_residual(real, pa.p_p, pa.p_d, pilots, data, u_s,
                                      c.sys.sigma2, true, channel_rng);
  const CVector y0 = sensing_residual(real, pa.p_p, pa.p_d, pilots, data, u_s,
                                      c.sys.sigma2, false, channel_rng);
  out.add(Baseline::FPA, "p_detect_empirical", decision(y1) ? 1.0 : 0.0);
  out.add(Baseline::FPA, "p_falsealarm_empirical", decision(y0) ? 1.0 : 0.0);
  return out;
}

using TrialFn = TrialOutcome (*)(const FullConfig&, SeededRng, SeededRng);

std::vector<ResultRow> run_parallel_sweep(const FullConfig& cfg,
                                          const RunOptions& opts,
                                          TrialFn trial_fn) {
  const auto& spec = cfg.exp;
  spec.validate();
  const int threads =
      opts.threads > 0 ? opts.threads : resolve_thread_count();
  const SeededRng master(spec.seed);

  std::vector<ResultRow> rows;
  for (size_t vi = 0; vi < spec.values.size(); ++vi) {
    const double value = spec.values[vi];
    const FullConfig c = apply_sweep_value(cfg, spec.sweep, value);

    std::vector<TrialOutcome> outcomes(spec.trials);
    std::atomic<int> next{0};
    auto worker = [&]() {
      for (;;) {
        const int t = next.fetch_add(1);
        if (t >= spec.trials) return;
        // Streams depend on the trial index only, so sweep values share
        // common random numbers (placements and channels pair up).
        SeededRng trial_rng = master.child(t);
        SeededRng placement_rng = opts.fix_placement
                                      ? master.child(0xf1f00000ULL)
                                      : trial_rng.child(1);
        outcomes[t] = trial_fn(c, placement_rng, trial_rng);
      }
    };
    if (threads <= 1 || spec.trials == 1) {
      worker();
    } else {
      std::vector<std::thread> pool;
      const int n = std::min(threads, spec.trials);
      pool.reserve(n);
      for (int i = 0; i < n; ++i) pool.emplace_back(worker);
      for (auto& th : pool) th.join();
    }

    // Order-independent aggregation: trials are merged in index order.
    std::map<std::string, std::map<std::string, std::vector<double>>> samples;
    std::map<std::string, long> dropped;
    for (const auto& oc : outcomes) {
      for (const auto& [baseline, list] : oc.per_baseline) {
        for (const auto& s : list) samples[baseline][s.metric].push_back(s.value);
      }
      for (const auto& b : oc.dropped) ++dropped[b];
    }
    for (const auto& [baseline, metrics] : samples) {
      for (const auto& [metric, vals] : metrics) {
        const double n = static_cast<double>(vals.size());
        double mean = 0.0;
        for (double v : vals) mean += v;
        mean /= n;
        double var = 0.0;
        for (double v : vals) var += (v - mean) * (v - mean);
        const double std_err =
            vals.size() > 1 ? std::sqrt(var / (n - 1.0) / n) : 0.0;
        rows.push_back({value, baseline, metric, mean, std_err,
                        dropped.count(baseline) ? dropped[baseline] : 0});
      }
    }
    // Baselines that failed on every trial still get their drop count.
    for (const auto& [baseline, cnt] : dropped) {
      if (!samples.count(baseline)) {
        rows.push_back({value, baseline, "avg_sum_rate",
                        std::nan(""), 0.0, cnt});
      }
    }
  }
  sort_rows(rows);
  return rows;
}

}  // namespace

std::vector<ResultRow> run_power_convergence(const FullConfig& cfg,
                                             const std::vector<int>& nb_list,
                                             std::uint64_t seed) {
  std::vector<ResultRow> rows;
  const SeededRng master(seed);
  for (int nb : nb_list) {
    FullConfig c = cfg;
    c.sys.N_b = nb;
    c.sys.validate();
    SeededRng placement_rng = master.child(0);  // same drop for every N_b
    Geometry geom = make_trial_geometry(c, placement_rng);
    const ChannelStatistics stats = build_statistics(geom, c.pl, c.sys);
    const PowerResult res =
        optimize_power(c.sys, stats, full_equal_power(c.sys));
    for (const auto& pt : res.trace) {
      rows.push_back({static_cast<double>(pt.iteration),
                      "Nb" + std::to_string(nb), "avg_sum_rate", pt.objective,
                      0.0, 0});
    }
  }
  sort_rows(rows);
  return rows;
}

std::vector<ResultRow> run_rate_sweep(const FullConfig& cfg,
                                      const RunOptions& opts) {
  return run_parallel_sweep(cfg, opts, &run_rate_trial);
}

std::vector<ResultRow> run_detection_validation(const FullConfig& cfg,
                                                const RunOptions& opts) {
  return run_parallel_sweep(cfg, opts, &run_detect_trial);
}

void emit_outputs(const std::vector<ResultRow>& rows,
                  const ExperimentSpec& spec, const std::string& outdir) {
  std::error_code ec;
  std::filesystem::create_directories(outdir, ec);
  if (ec) throw IoError("emit_outputs: cannot create " + outdir);
  std::vector<ResultRow> sorted = rows;
  sort_rows(sorted);
  write_csv(outdir + "/" + spec.name + ".csv", sorted);
  write_svg_plots(outdir, spec.name, sorted, to_string(spec.sweep));
}

}  // namespace isac
