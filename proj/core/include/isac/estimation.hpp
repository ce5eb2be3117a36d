#pragma once

#include <vector>

#include "isac/scenario.hpp"

namespace isac {

/// Channels and their MMSE estimates for one coherence block. The identities
/// h = h_hat + eps_h and g = g_hat + eps_g hold exactly by construction.
struct ChannelRealization {
  std::vector<CVector> h, g;
  std::vector<CVector> h_hat, g_hat;
  std::vector<CVector> eps_h, eps_g;
  std::vector<CVector> z_hat;  // h_hat + g_hat

  int users() const { return static_cast<int>(h.size()); }
  CVector error(int k) const { return eps_h[k] + eps_g[k]; }
};

/// Covariances induced by a pilot power vector:
///   R_est[k] = P_p,k T_p R_k C_k^{-1} R_k   with C_k = P_p,k T_p R_k + s2 I,
///   R_err[k] = R_k - R_est[k],
///   R_g_hat[k] = P_p,k T_p R_g,k C_k^{-1} R_g,k.
/// R_est[k] + R_err[k] = R_k holds by construction.
struct DerivedCovariances {
  std::vector<CMatrix> R_est;
  std::vector<CMatrix> R_err;
  std::vector<CMatrix> R_g_hat;

  int users() const { return static_cast<int>(R_est.size()); }
};

struct PilotRx {
  CMatrix Y_p;                // N_b x T_p received block
  std::vector<CVector> y;     // matched-filter outputs per user
};

/// Received pilot block and matched-filter outputs
/// y_k = sqrt(P_p,k) T_p (h_k + g_k) + N_p x_k^*.
PilotRx simulate_pilot_rx(const std::vector<CVector>& h,
                          const std::vector<CVector>& g, const RVector& p_p,
                          const CMatrix& pilots, double sigma2,
                          SeededRng& rng);

/// MMSE estimates from the matched output of user k:
///   h_hat = sqrt(P_p,k) R_h,k C_k^{-1} y,   g_hat analogous with R_g,k.
/// Throws SingularError only when sigma2 == 0 and P_p,k == 0 simultaneously.
std::pair<CVector, CVector> mmse_estimate(const CVector& y_k, double p_p_k,
                                          int k, const ChannelStatistics& st,
                                          const SystemConfig& cfg);

/// Full block simulation: sample channels, receive pilots, estimate.
ChannelRealization sample_realization(const ChannelStatistics& st,
                                      const RVector& p_p,
                                      const CMatrix& pilots,
                                      const SystemConfig& cfg, SeededRng& rng);

DerivedCovariances derived_covariances(const RVector& p_p,
                                       const ChannelStatistics& st,
                                       const SystemConfig& cfg);

/// Post-IC residual samples for one block, t = 1..T. With the direct-link
/// estimates subtracted the residual keeps the estimated echo (under H1
/// only), the total estimation error, and noise:
///   y_t = u_s^H (G_hat + Phi) Delta x_t + u_s^H n_t.
/// Pilot-phase symbols come from `pilots` rows, data-phase symbols from
/// `data_symbols` (K x T_d).
CVector sensing_residual(const ChannelRealization& real, const RVector& p_p,
                         const RVector& p_d, const CMatrix& pilots,
                         const CMatrix& data_symbols, const CVector& u_s,
                         double sigma2, bool under_h1, SeededRng& rng);

/// i.i.d. CN(0,1) data symbols, K x T_d.
CMatrix sample_data_symbols(int k, int t_d, SeededRng& rng);

}  // namespace isac
