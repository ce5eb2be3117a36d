#pragma once

#include <vector>

#include "isac/cvx.hpp"
#include "isac/metrics.hpp"

namespace isac {

enum class BeamformerStage { statistical, instantaneous };

struct BeamformerSet {
  std::vector<CVector> u_comm;  // unit norm, one per user
  CVector u_sense;              // unit norm
  BeamformerStage stage = BeamformerStage::instantaneous;
};

/// Statistical-stage matched-combiner normalizers E{||z_hat_k||^2} =
/// tr(R_est,k); the closed-form rate expressions consume these directly.
/// Throws DegenerateChannelError when a trace is zero.
RVector mrc_statistical(const DerivedCovariances& dc);

/// u_k = z_hat_k / ||z_hat_k||.
std::vector<CVector> mrc_instantaneous(const ChannelRealization& real);

/// Columns of Z (Z^H Z)^{-1}, normalized. Throws RankDeficientError when
/// cond(Z^H Z) exceeds 1e12 (the K -> N_b collapse regime).
std::vector<CVector> zf_instantaneous(const ChannelRealization& real);

/// Unit-norm maximizer of u^H Omega1 u / (u^H (Omega2 + T sigma2 I) u).
CVector sensing_evd(const CMatrix& omega1, const CMatrix& omega2, int t,
                    double sigma2);

/// Instantaneous-stage sensing combiner: Omega1 replaced by the estimated
/// echo outer products, Omega2 kept from the error covariances.
CVector sensing_evd_instantaneous(const PowerAllocation& p,
                                  const ChannelRealization& real,
                                  const DerivedCovariances& dc,
                                  const SystemConfig& cfg);

/// Concave quadratic minorant of the per-user rate R_k(u) around u_prev,
/// tight at u_prev and a global lower bound elsewhere. Units are bps/Hz so
/// the minorant is directly comparable with the rate thresholds.
ConcaveQuadratic sca_minorant(const CVector& u_prev, int k,
                              const ChannelRealization& real,
                              const DerivedCovariances& dc,
                              const PowerAllocation& p,
                              const SystemConfig& cfg);

struct CombinerOptions {
  int max_iterations = 100;
  double tol = 0.0;  // 0: use cfg.eps
};

struct CombinerResult {
  BeamformerSet set;
  std::vector<double> trace;       // instantaneous sum rate per iteration
  bool converged = false;
  std::vector<int> softened_users; // users whose rate row had to be relaxed
  RVector pre_norms;               // ||u_k|| before the final renormalization
};

/// SCA over the per-user ball-constrained quadratic subproblems, warm
/// started from u_init, until the instantaneous sum rate settles. Combiners
/// are renormalized to exactly unit norm on output (the SINRs are scale
/// invariant, so this never changes them).
CombinerResult optimize_combiners(const ChannelRealization& real,
                                  const DerivedCovariances& dc,
                                  const PowerAllocation& p,
                                  const SystemConfig& cfg,
                                  const std::vector<CVector>& u_init,
                                  const CombinerOptions& opts = {});

/// ZF when K <= N_b and well conditioned, MRC otherwise.
std::vector<CVector> default_warm_start(const ChannelRealization& real);

}  // namespace isac
