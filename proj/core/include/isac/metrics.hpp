#pragma once

#include <vector>

#include "isac/estimation.hpp"
#include "isac/power.hpp"

namespace isac {

enum class RateKind { ergodic_lower_bound, instantaneous };

struct RateReport {
  RVector per_user;  // bps/Hz
  double sum = 0.0;
  RateKind kind = RateKind::ergodic_lower_bound;
};

struct SensingReport {
  double sinr = 0.0;      // gamma_s (ergodic or instantaneous)
  double rho = 0.0;       // whitened signal energy
  double p_detect = 0.0;  // Q(Q^{-1}(P_FA) - sqrt(2 rho)), clamped to (0,1)
};

/// Ergodic SINR lower-bound term for user k under the statistical-stage
/// matched combiner:
///   gamma_k = P_d,k tr(R_est,k)
///             / (sum_i P_d,i tr(R_i R_est,k)/tr(R_est,k) + sigma2).
/// Returns 0 when tr(R_est,k) = 0.
double uatf_sinr(int k, const PowerAllocation& p, const DerivedCovariances& dc,
                 const ChannelStatistics& st, const SystemConfig& cfg);

/// Per-user and summed (T_d/T) log2(1 + gamma_k).
RateReport uatf_sum_rate(const PowerAllocation& p, const DerivedCovariances& dc,
                         const ChannelStatistics& st, const SystemConfig& cfg);

/// Omega_1 = sum_k (T_p P_p,k + T_d P_d,k) R_g_hat,k and the companion
/// Omega_2 built from R_err,k. Shared by the sensing SINR and the
/// statistical-stage combiner.
std::pair<CMatrix, CMatrix> build_omega(const PowerAllocation& p,
                                        const DerivedCovariances& dc,
                                        const SystemConfig& cfg);

/// gamma_s = u^H Omega_1 u / (u^H (Omega_2 + T sigma2 I) u); invariant to
/// scaling of u. Returns 0 when all powers are zero.
double ergodic_sensing_sinr(const PowerAllocation& p,
                            const DerivedCovariances& dc, const CVector& u_s,
                            const SystemConfig& cfg);

/// Q(Q^{-1}(P_FA) - sqrt(2 rho)); for the block-averaged form the caller
/// passes rho = tr(R_mu R_eff^{-1}).
double detection_probability(double rho, double p_fa);

/// Whitened-energy threshold mapped from the detection target:
/// rho_th = (Q^{-1}(P_FA) - Q^{-1}(P_D_th))^2 / 2 and gamma_s_th = rho_th/T.
/// The division by T is exact when the pilot- and data-phase powers agree
/// and approximate otherwise. Throws OutOfDomainError if P_D_th <= P_FA.
double sinr_threshold_from_pd(double p_d_th, double p_fa, int t);

/// Average rho = tr(R_mu R_eff^{-1}) for the block-averaged detection
/// probability, with R_mu built from R_g_hat and R_eff from R_err.
double rho_average(const PowerAllocation& p, const DerivedCovariances& dc,
                   const CVector& u_s, const SystemConfig& cfg);

/// Instantaneous decoding SINR for user k under combiner u_k.
double instantaneous_sinr(int k, const PowerAllocation& p,
                          const ChannelRealization& real,
                          const DerivedCovariances& dc, const CVector& u_k,
                          const SystemConfig& cfg);

RateReport instantaneous_sum_rate(const PowerAllocation& p,
                                  const ChannelRealization& real,
                                  const DerivedCovariances& dc,
                                  const std::vector<CVector>& u,
                                  const SystemConfig& cfg);

/// Instantaneous sensing SINR with estimated echo directions:
/// numerator sum_k (T_p P_p,k + T_d P_d,k) |u^H g_hat_k|^2.
double instantaneous_sensing_sinr(const PowerAllocation& p,
                                  const ChannelRealization& real,
                                  const DerivedCovariances& dc,
                                  const CVector& u_s, const SystemConfig& cfg);

}  // namespace isac
