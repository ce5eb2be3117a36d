#include "isac/metrics.hpp"

#include <cmath>
#include <limits>

namespace isac {

namespace {
double quad_form(const CMatrix& m, const CVector& u) {
  return std::real(u.dot(m * u));
}
}  // namespace

double uatf_sinr(int k, const PowerAllocation& p, const DerivedCovariances& dc,
                 const ChannelStatistics& st, const SystemConfig& cfg) {
  const double tr_est = dc.R_est[k].real().trace();
  if (tr_est <= 0.0) return 0.0;
  double denom = cfg.sigma2;
  for (int i = 0; i < st.users(); ++i) {
    denom += p.p_d[i] * trace_product(st.R[i], dc.R_est[k]) / tr_est;
  }
  return p.p_d[k] * tr_est / denom;
}

RateReport uatf_sum_rate(const PowerAllocation& p, const DerivedCovariances& dc,
                         const ChannelStatistics& st, const SystemConfig& cfg) {
  RateReport rep;
  rep.kind = RateKind::ergodic_lower_bound;
  rep.per_user.resize(st.users());
  const double prefactor = static_cast<double>(cfg.T_d()) / cfg.T;
  for (int k = 0; k < st.users(); ++k) {
    rep.per_user[k] =
        prefactor * std::log2(1.0 + uatf_sinr(k, p, dc, st, cfg));
  }
  rep.sum = rep.per_user.sum();
  return rep;
}

std::pair<CMatrix, CMatrix> build_omega(const PowerAllocation& p,
                                        const DerivedCovariances& dc,
                                        const SystemConfig& cfg) {
  const int dim = static_cast<int>(dc.R_est[0].rows());
  CMatrix omega1 = CMatrix::Zero(dim, dim);
  CMatrix omega2 = CMatrix::Zero(dim, dim);
  for (int k = 0; k < dc.users(); ++k) {
    const double energy = cfg.T_p * p.p_p[k] + cfg.T_d() * p.p_d[k];
    omega1 += energy * dc.R_g_hat[k];
    omega2 += energy * dc.R_err[k];
  }
  return {omega1, omega2};
}

double ergodic_sensing_sinr(const PowerAllocation& p,
                            const DerivedCovariances& dc, const CVector& u_s,
                            const SystemConfig& cfg) {
  auto [omega1, omega2] = build_omega(p, dc, cfg);
  const double num = quad_form(omega1, u_s);
  const double den =
      quad_form(omega2, u_s) + cfg.T * cfg.sigma2 * u_s.squaredNorm();
  if (den <= 0.0) return 0.0;
  return std::max(0.0, num / den);
}

double detection_probability(double rho, double p_fa) {
  if (rho < 0.0) throw OutOfDomainError("detection_probability: rho < 0");
  const double pd = q_function(q_inverse(p_fa) - std::sqrt(2.0 * rho));
  // Keep the report inside (0, 1); the open bounds matter only at the
  // extremes where double rounding would hit 0 or 1 exactly.
  return std::min(std::max(pd, std::numeric_limits<double>::denorm_min()),
                  1.0 - std::numeric_limits<double>::epsilon() / 2);
}

double sinr_threshold_from_pd(double p_d_th, double p_fa, int t) {
  if (!(p_fa < p_d_th)) {
    throw OutOfDomainError("sinr_threshold_from_pd: need P_FA < P_D_th");
  }
  const double gap = q_inverse(p_fa) - q_inverse(p_d_th);
  const double rho_th = 0.5 * gap * gap;
  return rho_th / t;
}

double rho_average(const PowerAllocation& p, const DerivedCovariances& dc,
                   const CVector& u_s, const SystemConfig& cfg) {
  const int dim = static_cast<int>(dc.R_est[0].rows());
  CMatrix r_mu_p = CMatrix::Zero(dim, dim);
  CMatrix r_mu_d = CMatrix::Zero(dim, dim);
  CMatrix r_eff_p = cfg.sigma2 * CMatrix::Identity(dim, dim);
  CMatrix r_eff_d = r_eff_p;
  for (int k = 0; k < dc.users(); ++k) {
    r_mu_p += p.p_p[k] * dc.R_g_hat[k];
    r_mu_d += p.p_d[k] * dc.R_g_hat[k];
    r_eff_p += p.p_p[k] * dc.R_err[k];
    r_eff_d += p.p_d[k] * dc.R_err[k];
  }
  return cfg.T_p * quad_form(r_mu_p, u_s) / quad_form(r_eff_p, u_s) +
         cfg.T_d() * quad_form(r_mu_d, u_s) / quad_form(r_eff_d, u_s);
}

double instantaneous_sinr(int k, const PowerAllocation& p,
                          const ChannelRealization& real,
                          const DerivedCovariances& dc, const CVector& u_k,
                          const SystemConfig& cfg) {
  const int users = static_cast<int>(real.z_hat.size());
  double denom = cfg.sigma2 * u_k.squaredNorm();
  for (int m = 0; m < users; ++m) {
    if (m != k) denom += p.p_d[m] * std::norm(u_k.dot(real.z_hat[m]));
    denom += p.p_d[m] * quad_form(dc.R_err[m], u_k);
  }
  return p.p_d[k] * std::norm(u_k.dot(real.z_hat[k])) / denom;
}

RateReport instantaneous_sum_rate(const PowerAllocation& p,
                                  const ChannelRealization& real,
                                  const DerivedCovariances& dc,
                                  const std::vector<CVector>& u,
                                  const SystemConfig& cfg) {
  RateReport rep;
  rep.kind = RateKind::instantaneous;
  const int users = static_cast<int>(real.z_hat.size());
  rep.per_user.resize(users);
  const double prefactor = static_cast<double>(cfg.T_d()) / cfg.T;
  for (int k = 0; k < users; ++k) {
    rep.per_user[k] =
        prefactor *
        std::log2(1.0 + instantaneous_sinr(k, p, real, dc, u[k], cfg));
  }
  rep.sum = rep.per_user.sum();
  return rep;
}

double instantaneous_sensing_sinr(const PowerAllocation& p,
                                  const ChannelRealization& real,
                                  const DerivedCovariances& dc,
                                  const CVector& u_s,
                                  const SystemConfig& cfg) {
  double num = 0.0;
  double den = cfg.T * cfg.sigma2 * u_s.squaredNorm();
  for (int k = 0; k < static_cast<int>(real.g_hat.size()); ++k) {
    const double energy = cfg.T_p * p.p_p[k] + cfg.T_d() * p.p_d[k];
    num += energy * std::norm(u_s.dot(real.g_hat[k]));
    den += energy * quad_form(dc.R_err[k], u_s);
  }
  if (den <= 0.0) return 0.0;
  return num / den;
}

}  // namespace isac
