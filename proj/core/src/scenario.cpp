#include "isac/scenario.hpp"

#include <cmath>

namespace isac {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;
}

void SystemConfig::validate() const {
  if (K < 1 || N_b < 1) throw OutOfDomainError("config: K and N_b must be >= 1");
  if (!(T_p > 0 && T_p < T)) throw OutOfDomainError("config: need 0 < T_p < T");
  if (!(P > 0.0)) throw OutOfDomainError("config: P must be positive");
  if (sigma2 < 0.0) throw OutOfDomainError("config: sigma2 must be >= 0");
  if (!(P_FA > 0.0 && P_FA < P_D_th && P_D_th < 1.0)) {
    throw OutOfDomainError("config: need 0 < P_FA < P_D_th < 1");
  }
  if (R_th.size() != 0 && R_th.size() != 1 && R_th.size() != K) {
    throw OutOfDomainError("config: R_th must be scalar or length K");
  }
  if (!(eps > 0.0) || !(xi0 > 0.0) || !(delta0 > 0.0) || !(eta > 0.0)) {
    throw OutOfDomainError("config: eps, xi0, delta0, eta must be positive");
  }
}

double Geometry::theta_t() const {
  const Eigen::Vector2d d = target_pos - bs_pos;
  return std::atan2(d.y(), d.x());
}

double Geometry::d_t2b() const { return (target_pos - bs_pos).norm(); }

double Geometry::d_u2b(int k) const { return (user_pos.at(k) - bs_pos).norm(); }

double Geometry::d_u2t(int k) const {
  return (user_pos.at(k) - target_pos).norm();
}

CVector steering_vector(double theta, int n_b, double d_over_lambda) {
  CVector a(n_b);
  const double step = -kTwoPi * d_over_lambda * std::sin(theta);
  for (int n = 0; n < n_b; ++n) {
    a[n] = std::polar(1.0, step * n);
  }
  return a;
}

std::vector<Eigen::Vector2d> place_users(const Eigen::Vector2d& center,
                                         double radius, int k,
                                         SeededRng& rng) {
  std::vector<Eigen::Vector2d> pos(k);
  for (int i = 0; i < k; ++i) {
    const double r = radius * std::sqrt(rng.uniform());
    const double phi = kTwoPi * rng.uniform();
    pos[i] = center + r * Eigen::Vector2d(std::cos(phi), std::sin(phi));
  }
  return pos;
}

ChannelStatistics build_statistics(const Geometry& geom,
                                   const PathLossParams& pl,
                                   const SystemConfig& cfg) {
  if (static_cast<int>(geom.user_pos.size()) != cfg.K) {
    throw DimMismatchError("build_statistics: user_pos size != K");
  }
  ChannelStatistics st;
  st.dim = cfg.N_b;
  st.R_h.resize(cfg.K);
  st.R_g.resize(cfg.K);
  st.R.resize(cfg.K);

  const CVector a = steering_vector(geom.theta_t(), cfg.N_b, geom.d_over_lambda);
  const CMatrix echo_dir = a * a.adjoint();
  const double l_t2b = std::pow(geom.d_t2b() / pl.d0, -pl.alpha_t2b);

  for (int k = 0; k < cfg.K; ++k) {
    const double l_h = std::pow(geom.d_u2b(k) / pl.d0, -pl.alpha_u2b);
    if (cfg.rh_corr == 0.0) {
      st.R_h[k] = l_h * CMatrix::Identity(cfg.N_b, cfg.N_b);
    } else {
      CMatrix r(cfg.N_b, cfg.N_b);
      for (int i = 0; i < cfg.N_b; ++i) {
        for (int j = 0; j < cfg.N_b; ++j) {
          r(i, j) = l_h * std::pow(cfg.rh_corr, std::abs(i - j));
        }
      }
      st.R_h[k] = r;
    }
    const double l_g = std::pow(geom.d_u2t(k) / pl.d0, -pl.alpha_u2t) * l_t2b;
    st.R_g[k] = (pl.alpha_rcs * l_g * pl.sigma_g2) * echo_dir;
    st.R[k] = st.R_h[k] + st.R_g[k];
  }
  return st;
}

CMatrix dft_pilots(int k, int t_p) {
  if (t_p < k) throw PilotShortageError("dft_pilots: T_p < K");
  CMatrix x(t_p, k);
  for (int col = 0; col < k; ++col) {
    for (int t = 0; t < t_p; ++t) {
      x(t, col) = std::polar(1.0, -kTwoPi * t * col / t_p);
    }
  }
  return x;
}

double dbm_to_watt(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }

double watt_to_dbm(double watt) { return 10.0 * std::log10(watt) + 30.0; }

}  // namespace isac
