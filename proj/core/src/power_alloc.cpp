#include "isac/power_alloc.hpp"

#include <cmath>

namespace isac {

namespace {

constexpr double kLn2 = 0.69314718055994530941723212145818;

struct StageEval {
  RVector rates;       // per-user lower-bound rates at (p_p, stage.p_d)
  double sum_rate = 0.0;
  double gamma_s = 0.0;
};

StageEval eval_stage(const RVector& p_p, const PilotStage& stage) {
  const auto& st = *stage.st;
  const auto& cfg = *stage.cfg;
  const PowerAllocation pa{p_p, stage.p_d};
  const DerivedCovariances dc = derived_covariances(p_p, st, cfg);
  StageEval ev;
  const RateReport rr = uatf_sum_rate(pa, dc, st, cfg);
  ev.rates = rr.per_user;
  ev.sum_rate = rr.sum;
  ev.gamma_s = ergodic_sensing_sinr(pa, dc, stage.u_s, cfg);
  return ev;
}

RVector residuals_from_eval(const StageEval& ev, const PddState& s,
                            const PilotStage& stage) {
  const int k_users = static_cast<int>(ev.rates.size());
  RVector f = RVector::Zero(k_users + 1);
  for (int k = 0; k < k_users; ++k) {
    if (stage.r_th[k] > 0.0) {
      f[k] = 1.0 - ev.rates[k] / stage.r_th[k] + s.tau[k];
    }
  }
  if (stage.gamma_s_th > 0.0) {
    f[k_users] = 1.0 - ev.gamma_s / stage.gamma_s_th + s.tau[k_users];
  }
  return f;
}

double lagrangian_from_eval(const StageEval& ev, const PddState& s,
                            const PilotStage& stage) {
  const RVector f = residuals_from_eval(ev, s, stage);
  return ev.sum_rate - s.omega.dot(f) - f.squaredNorm() / (2.0 * s.xi);
}

}  // namespace

PilotStage PilotStage::make(const ChannelStatistics& st,
                            const SystemConfig& cfg, const RVector& p_d,
                            const CVector& u_s, double gamma_s_th) {
  PilotStage stage;
  stage.st = &st;
  stage.cfg = &cfg;
  stage.p_d = p_d;
  stage.u_s = u_s;
  stage.gamma_s_th = gamma_s_th;
  stage.r_th.resize(cfg.K);
  for (int k = 0; k < cfg.K; ++k) stage.r_th[k] = cfg.rate_threshold(k);
  stage.cap = ((cfg.P * cfg.T - cfg.T_d() * p_d.array()) / cfg.T_p)
                  .cwiseMax(0.0)
                  .matrix();
  return stage;
}

RVector constraint_residuals(const RVector& p_p, const PddState& s,
                             const PilotStage& stage) {
  return residuals_from_eval(eval_stage(p_p, stage), s, stage);
}

double lagrangian_value(const RVector& p_p, const PddState& s,
                        const PilotStage& stage) {
  return lagrangian_from_eval(eval_stage(p_p, stage), s, stage);
}

RVector rate_pilot_gradient(const RVector& p_p, const PilotStage& stage) {
  const auto& st = *stage.st;
  const auto& cfg = *stage.cfg;
  const int k_users = cfg.K;
  const double c = cfg.T_d() / (cfg.T * kLn2);
  RVector grad = RVector::Zero(k_users);

  for (int l = 0; l < k_users; ++l) {
    CMatrix cc = p_p[l] * cfg.T_p * st.R[l];
    cc.diagonal().array() += cfg.sigma2;
    const CMatrix x = hermitian_solve(cc, st.R[l]);  // C^{-1} R
    const CMatrix r_est = hermitize(p_p[l] * cfg.T_p * st.R[l] * x);
    // d R_est / d P_p,l = sigma2 T_p (C^{-1} R)^2; R and C commute.
    const CMatrix r_dot = hermitize(cfg.sigma2 * cfg.T_p * x * x);

    const double tr_est = r_est.real().trace();
    const double tr_dot = r_dot.real().trace();
    double t_d = cfg.sigma2 * tr_est;
    double t_d_dot = cfg.sigma2 * tr_dot;
    for (int i = 0; i < k_users; ++i) {
      t_d += stage.p_d[i] * trace_product(st.R[i], r_est);
      t_d_dot += stage.p_d[i] * trace_product(st.R[i], r_dot);
    }
    const double t_n = t_d + stage.p_d[l] * tr_est * tr_est;
    if (t_d <= 0.0 || t_n <= 0.0) continue;  // rate identically zero here
    // c (t_n_dot/t_n - t_d_dot/t_d) rewritten so the near-zero-pilot limit
    // stays well conditioned.
    grad[l] = c * stage.p_d[l] * tr_est *
              (2.0 * tr_dot * t_d - t_d_dot * tr_est) / (t_n * t_d);
  }
  return grad;
}

RVector sensing_pilot_gradient(const RVector& p_p, const PilotStage& stage) {
  const auto& st = *stage.st;
  const auto& cfg = *stage.cfg;
  const int k_users = cfg.K;
  const double t_dur = cfg.T;
  const CVector& u = stage.u_s;

  // Accumulate t_N,s and t_D,s plus the per-user derivative ingredients.
  double t_n = 0.0;
  double t_d = t_dur * cfg.sigma2 * u.squaredNorm();
  RVector t_n_dot(k_users), t_d_dot(k_users);

  for (int l = 0; l < k_users; ++l) {
    CMatrix cc = p_p[l] * cfg.T_p * st.R[l];
    cc.diagonal().array() += cfg.sigma2;
    const CVector gs = st.R_g[l] * u;
    const CVector v = hermitian_solve(cc, gs);         // C^{-1} R_g u
    const CVector ru = st.R[l] * u;
    const CVector w = hermitian_solve(cc, ru);         // C^{-1} R u
    const double a_gg = std::real(gs.dot(v));    // u'R_g C^{-1} R_g u
    const double a_grg = std::real(v.dot(st.R[l] * v));
    const double a_rcrc = w.squaredNorm();       // u'R C^{-1} R C^{-1} u
    const double a_rc = std::real(u.dot(w));     // u'R C^{-1} u

    const double energy = cfg.T_p * p_p[l] + cfg.T_d() * stage.p_d[l];
    t_n += energy * p_p[l] * cfg.T_p * a_gg;
    t_d += energy * cfg.sigma2 * a_rc;

    t_n_dot[l] =
        (2.0 * cfg.T_p * cfg.T_p * p_p[l] +
         cfg.T_d() * cfg.T_p * stage.p_d[l]) *
            a_gg -
        (std::pow(cfg.T_p, 3) * p_p[l] * p_p[l] +
         cfg.T_d() * cfg.T_p * cfg.T_p * stage.p_d[l] * p_p[l]) *
            a_grg;
    t_d_dot[l] = -cfg.sigma2 *
                     (cfg.T_p * cfg.T_p * p_p[l] +
                      cfg.T_p * cfg.T_d() * stage.p_d[l]) *
                     a_rcrc +
                 cfg.sigma2 * cfg.T_p * a_rc;
  }
  RVector grad(k_users);
  for (int l = 0; l < k_users; ++l) {
    grad[l] = (t_n_dot[l] * t_d - t_n * t_d_dot[l]) / (t_d * t_d);
  }
  return grad;
}

RVector lagrangian_gradient(const RVector& p_p, const PddState& s,
                            const PilotStage& stage) {
  const int k_users = static_cast<int>(p_p.size());
  const StageEval ev = eval_stage(p_p, stage);
  const RVector f = residuals_from_eval(ev, s, stage);
  const RVector rate_grad = rate_pilot_gradient(p_p, stage);

  RVector grad(k_users);
  for (int l = 0; l < k_users; ++l) {
    double w = 1.0;
    if (stage.r_th[l] > 0.0) {
      w += s.omega[l] / stage.r_th[l] + f[l] / (stage.r_th[l] * s.xi);
    }
    grad[l] = w * rate_grad[l];
  }
  if (stage.gamma_s_th > 0.0) {
    const RVector gs_grad = sensing_pilot_gradient(p_p, stage);
    const double w_s = s.omega[k_users] + f[k_users] / s.xi;
    grad += (w_s / stage.gamma_s_th) * gs_grad;
  }
  return grad;
}

AscentResult pilot_ascent_step(const RVector& p_p, PddState& s,
                               const PilotStage& stage) {
  const double floor = 1e-12 * std::max(stage.cap.maxCoeff(), 1e-300);
  const RVector grad = lagrangian_gradient(p_p, s, stage);
  const StageEval ev0 = eval_stage(p_p, stage);
  const double l0 = lagrangian_from_eval(ev0, s, stage);

  constexpr double kArmijoC = 1e-4;
  double delta = s.delta;
  for (int bt = 0; bt < 50; ++bt, delta *= 0.5) {
    const RVector cand =
        (p_p + delta * grad).cwiseMax(floor).cwiseMin(stage.cap);
    const double slope = grad.dot(cand - p_p);
    if ((cand - p_p).lpNorm<Eigen::Infinity>() == 0.0) {
      // Fully pinned; the projected step is the current point.
      return {p_p, delta, false};
    }
    if (slope <= 0.0) continue;
    const double l_cand = lagrangian_value(cand, s, stage);
    if (l_cand >= l0 + kArmijoC * slope) {
      s.delta = std::min(4.0 * delta, stage.cfg->delta0);
      return {cand, delta, false};
    }
  }
  return {p_p, 0.0, true};  // converged at a boundary
}

void refresh_slacks(const RVector& p_p, PddState& s, const PilotStage& stage) {
  const StageEval ev = eval_stage(p_p, stage);
  const int k_users = static_cast<int>(p_p.size());
  for (int k = 0; k < k_users; ++k) {
    s.tau[k] = (stage.r_th[k] > 0.0)
                   ? std::max(0.0, ev.rates[k] / stage.r_th[k] - 1.0 -
                                       s.omega[k] * s.xi)
                   : 0.0;
  }
  s.tau[k_users] =
      (stage.gamma_s_th > 0.0)
          ? std::max(0.0, ev.gamma_s / stage.gamma_s_th - 1.0 -
                              s.omega[k_users] * s.xi)
          : 0.0;
}

PddState pdd_updates(const RVector& p_p, const PddState& s,
                     const PilotStage& stage) {
  PddState next = s;
  refresh_slacks(p_p, next, stage);
  const RVector f = constraint_residuals(p_p, next, stage);
  next.omega += f / next.xi;
  next.xi = stage.cfg->pdd_literal_xi_growth ? next.xi * stage.cfg->eta
                                             : next.xi / stage.cfg->eta;
  next.xi = std::min(std::max(next.xi, 1e-10), 1e10);
  return next;
}

namespace {

// Strict feasibility with a row-scale-aware margin, for warm-start checks.
bool strictly_inside(const RMatrix& a, const RVector& b, const RVector& x) {
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    const double scale =
        std::abs(b[i]) +
        a.row(i).cwiseAbs().sum() * (1.0 + x.cwiseAbs().maxCoeff());
    if (!(a.row(i).dot(x) < b[i] - 1e-12 * scale)) return false;
  }
  return (x.array() > 0.0).all();
}

// Phase-I repair: minimize the common relaxation s of the soft rows over the
// hard box (budget and nonnegativity stay hard). Rows are normalized to unit
// norm first: the coefficients span many decades and the relaxation is
// shared, so raw rows would drown the small ones. Reuses the barrier solver
// on the lifted variable y = (x, s - shift).
RVector phase_one(const RMatrix& a_soft_raw, const RVector& b_soft_raw,
                  const RVector& cap_x, const RVector& x_guess) {
  const int n = static_cast<int>(cap_x.size());
  const int soft = static_cast<int>(a_soft_raw.rows());

  RMatrix a_soft = a_soft_raw;
  RVector b_soft = b_soft_raw;
  for (int i = 0; i < soft; ++i) {
    const double nrm = a_soft.row(i).norm();
    if (nrm > 0.0) {
      a_soft.row(i) /= nrm;
      b_soft[i] /= nrm;
    }
  }

  RVector x0 = cap_x * 0.5;
  for (int j = 0; j < n; ++j) x0[j] = std::min(x0[j], x_guess[j] + cap_x[j] * 0.25);
  double worst = 0.0;
  for (int i = 0; i < soft; ++i) {
    worst = std::max(worst, a_soft.row(i).dot(x0) - b_soft[i]);
  }
  const double shift = worst + 1.0;
  const double s_hi = 2.0 * shift + 1.0;

  LinConstrainedConcaveProblem prob;
  prob.dim = n + 1;
  prob.objective = [n](const RVector& y, RVector* grad) {
    if (grad) {
      grad->setZero(n + 1);
      (*grad)[n] = -1.0;
    }
    return -y[n];
  };
  prob.hessian = [](const RVector&, RMatrix& h) { h.setZero(); };

  prob.A.setZero(soft + n + 1, n + 1);
  prob.b.resize(soft + n + 1);
  for (int i = 0; i < soft; ++i) {
    prob.A.block(i, 0, 1, n) = a_soft.row(i);
    prob.A(i, n) = -1.0;
    prob.b[i] = b_soft[i] - shift;
  }
  for (int j = 0; j < n; ++j) {  // hard box x <= cap
    prob.A(soft + j, j) = 1.0;
    prob.b[soft + j] = cap_x[j];
  }
  prob.A(soft + n, n) = 1.0;
  prob.b[soft + n] = s_hi;

  RVector y0(n + 1);
  y0.head(n) = x0;
  y0[n] = shift + worst + 0.5;
  const SolveResult res = solve_linconstrained_concave(prob, y0, 1e-9);
  const double margin = res.x[n] - shift;  // minimized max soft violation
  if (!(margin < -1e-10)) {
    throw InfeasibleError("data_power_sca: thresholds unattainable");
  }
  return res.x.head(n);
}

}  // namespace

RVector data_power_sca(const RVector& p_d_prev, const RVector& p_p,
                       const DerivedCovariances& dc,
                       const ChannelStatistics& st, const CVector& u_s,
                       const SystemConfig& cfg, double gamma_s_th) {
  const int k_users = cfg.K;
  const double c = cfg.T_d() / (cfg.T * kLn2);

  RVector phi(k_users);
  RMatrix varsigma(k_users, k_users);  // varsigma(k, i)
  for (int k = 0; k < k_users; ++k) {
    phi[k] = dc.R_est[k].real().trace();
    for (int i = 0; i < k_users; ++i) {
      varsigma(k, i) =
          phi[k] > 0.0 ? trace_product(st.R[i], dc.R_est[k]) / phi[k] : 0.0;
    }
  }
  RVector den_prev(k_users);
  for (int k = 0; k < k_users; ++k) {
    den_prev[k] = cfg.sigma2 + varsigma.row(k).dot(p_d_prev);
  }

  LinConstrainedConcaveProblem prob;
  prob.dim = k_users;
  prob.objective = [&, c](const RVector& x, RVector* grad) -> double {
    double val = 0.0;
    if (grad) grad->setZero(k_users);
    for (int k = 0; k < k_users; ++k) {
      const double lin = varsigma.row(k).dot(x);
      const double num = cfg.sigma2 + phi[k] * x[k] + lin;
      val += std::log(num) - std::log(den_prev[k]) -
             (lin - varsigma.row(k).dot(p_d_prev)) / den_prev[k];
      if (grad) {
        RVector g = varsigma.row(k).transpose() / num;
        g[k] += phi[k] / num;
        g -= varsigma.row(k).transpose() / den_prev[k];
        *grad += g;
      }
    }
    if (grad) *grad *= c;
    return c * val;
  };
  prob.hessian = [&, c](const RVector& x, RMatrix& h) {
    h.setZero(k_users, k_users);
    for (int k = 0; k < k_users; ++k) {
      const double num = cfg.sigma2 + phi[k] * x[k] + varsigma.row(k).dot(x);
      RVector g = varsigma.row(k).transpose();
      g[k] += phi[k];
      h.noalias() -= (c / (num * num)) * (g * g.transpose());
    }
  };

  // Rows: per-user budget, then linearized rate rows, then the sensing row.
  std::vector<RVector> rows;
  std::vector<double> rhs;
  for (int k = 0; k < k_users; ++k) {
    RVector row = RVector::Zero(k_users);
    row[k] = cfg.T_d();
    const double slack = cfg.P * cfg.T - cfg.T_p * p_p[k];
    if (slack <= 0.0) {
      throw InfeasibleError("data_power_sca: pilot energy exhausts budget");
    }
    rows.push_back(row);
    rhs.push_back(slack);
  }
  for (int k = 0; k < k_users; ++k) {
    const double r_th = cfg.rate_threshold(k);
    if (r_th <= 0.0) continue;
    const double gamma_th =
        std::exp2(r_th * cfg.T / static_cast<double>(cfg.T_d()));
    RVector row = (gamma_th - 1.0) * varsigma.row(k).transpose();
    row[k] -= phi[k];
    rows.push_back(row);
    rhs.push_back(-(gamma_th - 1.0) * cfg.sigma2);
  }
  if (gamma_s_th > 0.0) {
    RVector beta(k_users);
    double pilot_side = -gamma_s_th * cfg.T * cfg.sigma2 * u_s.squaredNorm();
    for (int k = 0; k < k_users; ++k) {
      const CMatrix m = dc.R_g_hat[k] - gamma_s_th * dc.R_err[k];
      beta[k] = std::real(u_s.dot(m * u_s));
      pilot_side += cfg.T_p * p_p[k] * beta[k];
    }
    rows.push_back(-cfg.T_d() * beta);
    rhs.push_back(pilot_side);
  }
  prob.A.resize(static_cast<int>(rows.size()), k_users);
  prob.b.resize(static_cast<int>(rows.size()));
  for (size_t i = 0; i < rows.size(); ++i) {
    prob.A.row(static_cast<int>(i)) = rows[i].transpose();
    prob.b[static_cast<int>(i)] = rhs[i];
  }

  RVector x0 = p_d_prev;
  if (!strictly_inside(prob.A, prob.b, x0)) {
    x0 = 0.999 * p_d_prev.cwiseMax(1e-12 * cfg.P);
    if (!strictly_inside(prob.A, prob.b, x0)) {
      RVector cap_x(k_users);
      for (int k = 0; k < k_users; ++k) {
        cap_x[k] = (cfg.P * cfg.T - cfg.T_p * p_p[k]) / cfg.T_d();
      }
      const int soft_rows = static_cast<int>(rows.size()) - k_users;
      x0 = phase_one(prob.A.bottomRows(soft_rows), prob.b.tail(soft_rows),
                     cap_x, p_d_prev);
    }
  }

  const SolveResult res = solve_linconstrained_concave(prob, x0, 1e-8);
  return res.x;
}

PowerAllocation full_equal_power(const SystemConfig& cfg) {
  const double p = std::min(cfg.P, cfg.P * cfg.T / (cfg.T_p + cfg.T_d()));
  return PowerAllocation::equal(cfg.K, p);
}

PowerResult optimize_power(const SystemConfig& cfg,
                           const ChannelStatistics& st,
                           const PowerAllocation& init,
                           const PowerOptions& opts) {
  cfg.validate();
  const double gamma_s_th =
      opts.sensing_constraint
          ? sinr_threshold_from_pd(cfg.P_D_th, cfg.P_FA, cfg.T)
          : 0.0;

  PowerResult out;
  RVector p_p = init.p_p;
  RVector p_d = init.p_d;

  auto statistical_us = [&](const RVector& pp, const RVector& pd) -> CVector {
    const DerivedCovariances dc = derived_covariances(pp, st, cfg);
    auto [omega1, omega2] = build_omega({pp, pd}, dc, cfg);
    omega2.diagonal().array() += cfg.T * cfg.sigma2;
    return dominant_generalized_eigvec(omega1, omega2).vec;
  };

  auto raw_violation = [&](const PilotStage& stage, const RVector& pp) {
    const StageEval ev = eval_stage(pp, stage);
    double v = 0.0;
    for (int k = 0; k < cfg.K; ++k) {
      if (stage.r_th[k] > 0.0) {
        v = std::max(v, 1.0 - ev.rates[k] / stage.r_th[k]);
      }
    }
    if (stage.gamma_s_th > 0.0) {
      v = std::max(v, 1.0 - ev.gamma_s / stage.gamma_s_th);
    }
    return v;
  };

  CVector u_s = statistical_us(p_p, p_d);
  {
    PilotStage stage0 = PilotStage::make(st, cfg, p_d, u_s, gamma_s_th);
    const StageEval ev0 = eval_stage(p_p, stage0);
    out.trace.push_back({0, ev0.sum_rate, raw_violation(stage0, p_p), cfg.xi0});
  }

  double prev_obj = out.trace.front().objective;
  for (int l = 1; l <= opts.max_outer; ++l) {
    u_s = statistical_us(p_p, p_d);
    PilotStage stage = PilotStage::make(st, cfg, p_d, u_s, gamma_s_th);

    PddState state = PddState::init(cfg.K, cfg.xi0, cfg.delta0);
    refresh_slacks(p_p, state, stage);
    for (int round = 0; round < opts.max_multiplier_rounds; ++round) {
      for (int step = 0; step < opts.max_ascent_steps; ++step) {
        const AscentResult ar = pilot_ascent_step(p_p, state, stage);
        const double moved = (ar.p_p - p_p).lpNorm<Eigen::Infinity>();
        p_p = ar.p_p;
        refresh_slacks(p_p, state, stage);
        if (ar.line_search_failed || moved <= cfg.eps) break;
      }
      const RVector f = constraint_residuals(p_p, state, stage);
      if (f.lpNorm<Eigen::Infinity>() <= cfg.eps) break;
      state = pdd_updates(p_p, state, stage);
    }

    const DerivedCovariances dc = derived_covariances(p_p, st, cfg);
    try {
      p_d = data_power_sca(p_d, p_p, dc, st, u_s, cfg, gamma_s_th);
    } catch (const InfeasibleError&) {
      // Data subproblem has an empty feasible set at this pilot iterate;
      // keep the previous data powers. The terminal feasibility check below
      // surfaces the condition to the caller.
    }

    const RateReport rr = uatf_sum_rate({p_p, p_d}, dc, st, cfg);
    PilotStage stage_now = PilotStage::make(st, cfg, p_d, u_s, gamma_s_th);
    out.trace.push_back(
        {l, rr.sum, raw_violation(stage_now, p_p), state.xi});
    out.outer_iterations = l;
    if (std::abs(rr.sum - prev_obj) <= cfg.eps) {
      out.converged = true;
      prev_obj = rr.sum;
      break;
    }
    prev_obj = rr.sum;
  }

  if (opts.check_feasibility) {
    PilotStage stage = PilotStage::make(st, cfg, p_d, u_s, gamma_s_th);
    if (raw_violation(stage, p_p) > 1e-3) {
      throw InfeasibleError(
          "optimize_power: residuals above 1e-3 at the final iterate");
    }
  }

  out.P = PowerAllocation{p_p, p_d};
  out.u_s = u_s;
  return out;
}

}  // namespace isac
