#pragma once

#include <vector>

#include "isac/numerics.hpp"
#include "isac/rng.hpp"
#include "isac/types.hpp"

namespace isac {

/// All scalar system parameters. Powers are stored linear (watts); the
/// configuration layer converts dBm inputs at the boundary,
/// P = 10^((dBm - 30)/10). The noise figure is treated as the total noise
/// power per symbol, so only power ratios matter anywhere downstream.
struct SystemConfig {
  int K = 4;    // users
  int N_b = 6;  // BS antennas
  int T = 100;  // coherence block length (symbols)
  int T_p = 5;  // pilot length (symbols), K+1 by default

  double P = 1e-2;        // per-user power budget, W (10 dBm)
  double sigma2 = 1e-10;  // noise power, W (-70 dBm)

  double P_FA = 1e-5;    // false-alarm probability
  double P_D_th = 0.99;  // detection-probability threshold
  RVector R_th;          // per-user rate thresholds, bps/Hz (default all 1)

  double eps = 1e-3;   // convergence tolerance
  double xi0 = 1.0;    // initial PDD penalty parameter
  double delta0 = 1.0; // initial gradient-ascent step
  double eta = 1.5;    // penalty scheduling factor
  double wp = 1e-2;    // beamforming regularization weight

  // Penalty schedule: the augmented term weighs 1/xi, so the default
  // tightening is xi <- xi/eta. This switch reproduces the literal
  // xi <- eta*xi rule instead, for comparison.
  bool pdd_literal_xi_growth = false;

  // Optional exponential antenna correlation for the direct channels;
  // 0 keeps the i.i.d. model R_h = L_h * I.
  double rh_corr = 0.0;

  int T_d() const { return T - T_p; }
  double rate_threshold(int k) const {
    if (R_th.size() == 0) return 1.0;
    return R_th.size() == 1 ? R_th[0] : R_th[k];
  }

  void validate() const;
};

/// 2-D deployment. The target azimuth is derived from the positions, so it
/// can never disagree with them: theta_t is measured from the x-axis, which
/// is the array broadside.
struct Geometry {
  Eigen::Vector2d bs_pos{0.0, 0.0};
  Eigen::Vector2d target_pos{50.0 / 1.4142135623730951,
                             50.0 / 1.4142135623730951};
  Eigen::Vector2d cluster_center{100.0, 0.0};
  double cluster_radius = 100.0;
  double d_over_lambda = 0.5;
  std::vector<Eigen::Vector2d> user_pos;

  double theta_t() const;
  double d_t2b() const;
  double d_u2b(int k) const;
  double d_u2t(int k) const;
};

struct PathLossParams {
  double alpha_u2b = 3.6;
  double alpha_u2t = 2.2;
  double alpha_t2b = 2.2;
  double alpha_rcs = 0.8;  // target reflection coefficient
  double d0 = 1.0;         // reference distance, m
  double sigma_g2 = 1.0;   // per-user echo small-scale variance
};

/// Second-order channel statistics: direct covariances R_h (i.i.d. or
/// exponentially correlated), rank-one echo covariances R_g, and their sums
/// R = R_h + R_g.
struct ChannelStatistics {
  std::vector<CMatrix> R_h;
  std::vector<CMatrix> R_g;
  std::vector<CMatrix> R;
  int dim = 0;
  int users() const { return static_cast<int>(R.size()); }
};

/// ULA response a(theta): entry n is exp(-j 2 pi n (d/lambda) sin theta).
CVector steering_vector(double theta, int n_b, double d_over_lambda);

/// K i.i.d. area-uniform points in the disk (radius drawn as R sqrt(u)).
std::vector<Eigen::Vector2d> place_users(const Eigen::Vector2d& center,
                                         double radius, int k,
                                         SeededRng& rng);

ChannelStatistics build_statistics(const Geometry& geom,
                                   const PathLossParams& pl,
                                   const SystemConfig& cfg);

/// T_p x K pilot matrix, column k drawn from the unitary DFT and scaled so
/// that x_i^T x_k^* = T_p when i == k and 0 otherwise (matched-filter
/// identity). Throws PilotShortageError when T_p < K.
CMatrix dft_pilots(int k, int t_p);

double dbm_to_watt(double dbm);
double watt_to_dbm(double watt);

}  // namespace isac
