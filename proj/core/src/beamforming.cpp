#include "isac/beamforming.hpp"

#include <cmath>

#include <Eigen/Eigenvalues>

namespace isac {

namespace {
constexpr double kLn2 = 0.69314718055994530941723212145818;
}

RVector mrc_statistical(const DerivedCovariances& dc) {
  RVector norms(dc.users());
  for (int k = 0; k < dc.users(); ++k) {
    norms[k] = dc.R_est[k].real().trace();
    if (!(norms[k] > 0.0)) {
      throw DegenerateChannelError("mrc_statistical: tr(R_est) = 0 for user " +
                                   std::to_string(k));
    }
  }
  return norms;
}

std::vector<CVector> mrc_instantaneous(const ChannelRealization& real) {
  const int users = static_cast<int>(real.z_hat.size());
  std::vector<CVector> u(users);
  for (int k = 0; k < users; ++k) {
    const double n = real.z_hat[k].norm();
    if (!(n > 0.0)) {
      throw DegenerateChannelError("mrc_instantaneous: z_hat = 0 for user " +
                                   std::to_string(k));
    }
    u[k] = real.z_hat[k] / n;
  }
  return u;
}

std::vector<CVector> zf_instantaneous(const ChannelRealization& real) {
  const int k_users = static_cast<int>(real.z_hat.size());
  const int n_b = static_cast<int>(real.z_hat[0].size());
  if (k_users > n_b) {
    throw RankDeficientError("zf_instantaneous: K > N_b");
  }
  CMatrix z(n_b, k_users);
  for (int k = 0; k < k_users; ++k) z.col(k) = real.z_hat[k];
  const CMatrix gram = z.adjoint() * z;
  {
    Eigen::SelfAdjointEigenSolver<CMatrix> es(gram, Eigen::EigenvaluesOnly);
    const double lo = es.eigenvalues().minCoeff();
    const double hi = es.eigenvalues().maxCoeff();
    if (!(lo > 0.0) || hi / lo > 1e12) {
      throw RankDeficientError("zf_instantaneous: Z^H Z condition number");
    }
  }
  const CMatrix w = z * gram.llt().solve(CMatrix::Identity(k_users, k_users));
  std::vector<CVector> u(k_users);
  for (int k = 0; k < k_users; ++k) {
    u[k] = w.col(k).normalized();
  }
  return u;
}

CVector sensing_evd(const CMatrix& omega1, const CMatrix& omega2, int t,
                    double sigma2) {
  CMatrix b = omega2;
  b.diagonal().array() += t * sigma2;
  return dominant_generalized_eigvec(omega1, b).vec;
}

CVector sensing_evd_instantaneous(const PowerAllocation& p,
                                  const ChannelRealization& real,
                                  const DerivedCovariances& dc,
                                  const SystemConfig& cfg) {
  const int dim = static_cast<int>(real.g_hat[0].size());
  CMatrix omega1 = CMatrix::Zero(dim, dim);
  CMatrix omega2 = CMatrix::Zero(dim, dim);
  for (int k = 0; k < static_cast<int>(real.g_hat.size()); ++k) {
    const double energy = cfg.T_p * p.p_p[k] + cfg.T_d() * p.p_d[k];
    omega1.noalias() += energy * (real.g_hat[k] * real.g_hat[k].adjoint());
    omega2 += energy * dc.R_err[k];
  }
  return sensing_evd(omega1, omega2, cfg.T, cfg.sigma2);
}

ConcaveQuadratic sca_minorant(const CVector& u_prev, int k,
                              const ChannelRealization& real,
                              const DerivedCovariances& dc,
                              const PowerAllocation& p,
                              const SystemConfig& cfg) {
  const int k_users = static_cast<int>(real.z_hat.size());
  const int dim = static_cast<int>(u_prev.size());
  const double scale = cfg.T_d() / (cfg.T * kLn2);

  const Complex x_tilde = u_prev.dot(real.z_hat[k]);  // u^H z_hat_k
  double y_tilde = cfg.sigma2 * u_prev.squaredNorm();
  for (int m = 0; m < k_users; ++m) {
    if (m != k) y_tilde += p.p_d[m] * std::norm(u_prev.dot(real.z_hat[m]));
    y_tilde += p.p_d[m] * std::real(u_prev.dot(dc.R_err[m] * u_prev));
  }
  if (!(y_tilde > 0.0)) {
    throw OutOfDomainError("sca_minorant: interference-plus-noise is zero");
  }

  const double snr = p.p_d[k] * std::norm(x_tilde) / y_tilde;
  const double a_k = p.p_d[k] * std::norm(x_tilde) /
                     (y_tilde * (p.p_d[k] * std::norm(x_tilde) + y_tilde));

  CMatrix m = cfg.sigma2 * CMatrix::Identity(dim, dim);
  for (int i = 0; i < k_users; ++i) {
    m.noalias() += p.p_d[i] * (real.z_hat[i] * real.z_hat[i].adjoint());
    m += p.p_d[i] * dc.R_err[i];
  }

  ConcaveQuadratic q;
  q.c = scale * (std::log1p(snr) - snr);
  q.b = scale * (p.p_d[k] / y_tilde) * std::conj(x_tilde) * real.z_hat[k];
  q.A = scale * a_k * m;
  return q;
}

std::vector<CVector> default_warm_start(const ChannelRealization& real) {
  try {
    return zf_instantaneous(real);
  } catch (const RankDeficientError&) {
    return mrc_instantaneous(real);
  }
}

CombinerResult optimize_combiners(const ChannelRealization& real,
                                  const DerivedCovariances& dc,
                                  const PowerAllocation& p,
                                  const SystemConfig& cfg,
                                  const std::vector<CVector>& u_init,
                                  const CombinerOptions& opts) {
  const int k_users = static_cast<int>(real.z_hat.size());
  const double tol = opts.tol > 0.0 ? opts.tol : cfg.eps;

  std::vector<CVector> u(k_users);
  for (int k = 0; k < k_users; ++k) u[k] = u_init[k].normalized();

  CombinerResult out;
  double r_sum = instantaneous_sum_rate(p, real, dc, u, cfg).sum;
  out.trace.push_back(r_sum);

  std::vector<bool> softened(k_users, false);
  for (int it = 0; it < opts.max_iterations; ++it) {
    for (int k = 0; k < k_users; ++k) {
      const ConcaveQuadratic minorant = sca_minorant(u[k], k, real, dc, p, cfg);

      UnitBallQcqp prob;
      prob.q0 = minorant;
      prob.q0.A.diagonal().array() += cfg.wp;  // regularizer wp ||u||^2
      const double r_th = cfg.rate_threshold(k);

      // The incumbent sits on the ball boundary; nudge it inside so it can
      // seed the interior-point solve.
      const CVector u0 = (1.0 - 1e-6) * u[k];

      if (r_th > 0.0 && minorant.eval(u0) > r_th + 1e-10) {
        prob.has_constraint = true;
        prob.q1 = minorant;
        prob.r = r_th;
        u[k] = solve_unit_ball_qcqp(prob, u0).u;
      } else {
        // Solve without the rate row first; re-impose it when reachable.
        QcqpResult relaxed = solve_unit_ball_qcqp(prob, u0);
        if (r_th > 0.0 && minorant.eval(relaxed.u) > r_th + 1e-10) {
          prob.has_constraint = true;
          prob.q1 = minorant;
          prob.r = r_th;
          u[k] = solve_unit_ball_qcqp(prob, relaxed.u).u;
        } else {
          if (r_th > 0.0) softened[k] = true;
          u[k] = relaxed.u;
        }
      }
    }
    const double r_new = instantaneous_sum_rate(p, real, dc, u, cfg).sum;
    out.trace.push_back(r_new);
    const bool settled = std::abs(r_new - r_sum) <= tol;
    r_sum = r_new;
    if (settled) {
      out.converged = true;
      break;
    }
  }

  out.set.stage = BeamformerStage::instantaneous;
  out.set.u_comm = std::move(u);
  out.pre_norms.resize(k_users);
  for (int k = 0; k < k_users; ++k) {
    out.pre_norms[k] = out.set.u_comm[k].norm();
  }
  for (auto& uk : out.set.u_comm) uk.normalize();
  out.set.u_sense = sensing_evd_instantaneous(p, real, dc, cfg);
  for (int k = 0; k < k_users; ++k) {
    if (softened[k]) out.softened_users.push_back(k);
  }
  return out;
}

}  // namespace isac
