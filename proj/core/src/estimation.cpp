#include "isac/estimation.hpp"

#include <cmath>

namespace isac {

PilotRx simulate_pilot_rx(const std::vector<CVector>& h,
                          const std::vector<CVector>& g, const RVector& p_p,
                          const CMatrix& pilots, double sigma2,
                          SeededRng& rng) {
  const int k_users = static_cast<int>(h.size());
  const int n_b = static_cast<int>(h[0].size());
  const int t_p = static_cast<int>(pilots.rows());

  CMatrix y = CMatrix::Zero(n_b, t_p);
  for (int k = 0; k < k_users; ++k) {
    y.noalias() +=
        std::sqrt(p_p[k]) * (h[k] + g[k]) * pilots.col(k).transpose();
  }
  if (sigma2 > 0.0) {
    const double s = std::sqrt(sigma2);
    for (int t = 0; t < t_p; ++t) {
      for (int n = 0; n < n_b; ++n) {
        y(n, t) += s * rng.cnormal();
      }
    }
  }
  PilotRx rx;
  rx.Y_p = y;
  rx.y.resize(k_users);
  for (int k = 0; k < k_users; ++k) {
    rx.y[k] = y * pilots.col(k).conjugate();
  }
  return rx;
}

std::pair<CVector, CVector> mmse_estimate(const CVector& y_k, double p_p_k,
                                          int k, const ChannelStatistics& st,
                                          const SystemConfig& cfg) {
  if (p_p_k == 0.0) {
    if (cfg.sigma2 == 0.0) {
      throw SingularError("mmse_estimate: sigma2 = 0 with zero pilot power");
    }
    return {CVector::Zero(y_k.size()), CVector::Zero(y_k.size())};
  }
  CMatrix c = p_p_k * cfg.T_p * st.R[k];
  c.diagonal().array() += cfg.sigma2;
  const CMatrix w = hermitian_solve(c, y_k);  // C^{-1} y, shared by h and g
  const double root_p = std::sqrt(p_p_k);
  return {root_p * (st.R_h[k] * w), root_p * (st.R_g[k] * w)};
}

ChannelRealization sample_realization(const ChannelStatistics& st,
                                      const RVector& p_p,
                                      const CMatrix& pilots,
                                      const SystemConfig& cfg,
                                      SeededRng& rng) {
  const int k_users = st.users();
  ChannelRealization real;
  real.h.resize(k_users);
  real.g.resize(k_users);
  real.h_hat.resize(k_users);
  real.g_hat.resize(k_users);
  real.eps_h.resize(k_users);
  real.eps_g.resize(k_users);
  real.z_hat.resize(k_users);

  for (int k = 0; k < k_users; ++k) {
    real.h[k] = sample_complex_gaussian(st.R_h[k], rng);
    real.g[k] = sample_complex_gaussian(st.R_g[k], rng);
  }
  const PilotRx rx =
      simulate_pilot_rx(real.h, real.g, p_p, pilots, cfg.sigma2, rng);
  for (int k = 0; k < k_users; ++k) {
    auto [h_hat, g_hat] = mmse_estimate(rx.y[k], p_p[k], k, st, cfg);
    real.h_hat[k] = h_hat;
    real.g_hat[k] = g_hat;
    real.eps_h[k] = real.h[k] - h_hat;
    real.eps_g[k] = real.g[k] - g_hat;
    real.z_hat[k] = h_hat + g_hat;
  }
  return real;
}

DerivedCovariances derived_covariances(const RVector& p_p,
                                       const ChannelStatistics& st,
                                       const SystemConfig& cfg) {
  const int k_users = st.users();
  DerivedCovariances dc;
  dc.R_est.resize(k_users);
  dc.R_err.resize(k_users);
  dc.R_g_hat.resize(k_users);

  for (int k = 0; k < k_users; ++k) {
    if (p_p[k] < 0.0) throw OutOfDomainError("derived_covariances: p_p < 0");
    if (p_p[k] == 0.0) {
      dc.R_est[k] = CMatrix::Zero(st.dim, st.dim);
      dc.R_err[k] = st.R[k];
      dc.R_g_hat[k] = CMatrix::Zero(st.dim, st.dim);
      continue;
    }
    const double pt = p_p[k] * cfg.T_p;
    CMatrix c = pt * st.R[k];
    c.diagonal().array() += cfg.sigma2;
    dc.R_est[k] = hermitize(pt * st.R[k] * hermitian_solve(c, st.R[k]));
    dc.R_err[k] = st.R[k] - dc.R_est[k];
    dc.R_g_hat[k] = hermitize(pt * st.R_g[k] * hermitian_solve(c, st.R_g[k]));
  }
  return dc;
}

CVector sensing_residual(const ChannelRealization& real, const RVector& p_p,
                         const RVector& p_d, const CMatrix& pilots,
                         const CMatrix& data_symbols, const CVector& u_s,
                         double sigma2, bool under_h1, SeededRng& rng) {
  const int k_users = real.users();
  const int t_p = static_cast<int>(pilots.rows());
  const int t_d = static_cast<int>(data_symbols.cols());

  // Row weights u_s^H (G_hat + Phi); the G_hat part carries the echo and is
  // present only under H1.
  CVector w(k_users);
  for (int k = 0; k < k_users; ++k) {
    Complex wk = u_s.dot(real.error(k));  // conj(u_s)^T e_k
    if (under_h1) wk += u_s.dot(real.g_hat[k]);
    w[k] = wk;
  }
  const double noise_std = std::sqrt(sigma2) * u_s.norm();

  CVector y(t_p + t_d);
  for (int t = 0; t < t_p; ++t) {
    Complex v = 0.0;
    for (int k = 0; k < k_users; ++k) {
      v += w[k] * std::sqrt(p_p[k]) * pilots(t, k);
    }
    y[t] = v + noise_std * rng.cnormal();
  }
  for (int t = 0; t < t_d; ++t) {
    Complex v = 0.0;
    for (int k = 0; k < k_users; ++k) {
      v += w[k] * std::sqrt(p_d[k]) * data_symbols(k, t);
    }
    y[t_p + t] = v + noise_std * rng.cnormal();
  }
  return y;
}

CMatrix sample_data_symbols(int k, int t_d, SeededRng& rng) {
  CMatrix x(k, t_d);
  for (int t = 0; t < t_d; ++t) {
    for (int i = 0; i < k; ++i) x(i, t) = rng.cnormal();
  }
  return x;
}

}  // namespace isac
