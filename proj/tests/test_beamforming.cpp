#include <doctest.h>

#include <cmath>

#include "isac/beamforming.hpp"
#include "isac/experiments.hpp"

using namespace isac;

namespace {

struct Inst {
  SystemConfig cfg;
  ChannelStatistics st;
  CMatrix pilots;
  PowerAllocation pa;
  DerivedCovariances dc;
  ChannelRealization real;

  explicit Inst(std::uint64_t seed, int k = 4, int n_b = 8,
                bool with_echo = true) {
    cfg.K = k;
    cfg.N_b = n_b;
    cfg.T_p = k + 1;
    FullConfig fc;
    fc.sys = cfg;
    SeededRng rng(seed);
    SeededRng prng = rng.child(1);
    Geometry geom = make_trial_geometry(fc, prng);
    st = build_statistics(geom, fc.pl, cfg);
    if (!with_echo) {
      for (int u = 0; u < k; ++u) {
        st.R_g[u].setZero();
        st.R[u] = st.R_h[u];
      }
    }
    pilots = dft_pilots(k, cfg.T_p);
    pa = full_equal_power(cfg);
    dc = derived_covariances(pa.p_p, st, cfg);
    SeededRng crng = rng.child(2);
    real = sample_realization(st, pa.p_p, pilots, cfg, crng);
  }
};

}  // namespace

TEST_CASE("mrc_statistical: scalar value and sampling oracle") {
  SystemConfig cfg;
  cfg.K = 1;
  cfg.N_b = 1;
  cfg.T = 4;
  cfg.T_p = 1;
  cfg.sigma2 = 1.0;
  ChannelStatistics st;
  st.dim = 1;
  st.R_h = {CMatrix::Identity(1, 1)};
  st.R_g = {CMatrix::Zero(1, 1)};
  st.R = {CMatrix::Identity(1, 1)};
  const DerivedCovariances dc =
      derived_covariances(RVector::Constant(1, 1.0), st, cfg);
  CHECK(mrc_statistical(dc)[0] == doctest::Approx(0.5));

  DerivedCovariances zero = dc;
  zero.R_est[0].setZero();
  CHECK_THROWS_AS(mrc_statistical(zero), DegenerateChannelError);

  // E||z_hat||^2 matches tr(R_est) and |E{u' z}|^2 matches it too.
  Inst inst(5, 2, 3);
  const RVector norms = mrc_statistical(inst.dc);
  SeededRng rng(6);
  const int trials = 100000;
  RVector acc = RVector::Zero(2);
  std::vector<Complex> uz(2, 0.0);
  for (int t = 0; t < trials; ++t) {
    const ChannelRealization real =
        sample_realization(inst.st, inst.pa.p_p, inst.pilots, inst.cfg, rng);
    for (int k = 0; k < 2; ++k) {
      acc[k] += real.z_hat[k].squaredNorm();
      const CVector u = real.z_hat[k] / std::sqrt(norms[k]);
      uz[k] += u.dot(real.h[k] + real.g[k]);
    }
  }
  for (int k = 0; k < 2; ++k) {
    CHECK(acc[k] / trials == doctest::Approx(norms[k]).epsilon(0.02));
    CHECK(std::norm(uz[k] / double(trials)) ==
          doctest::Approx(norms[k]).epsilon(0.03));
  }
}

TEST_CASE("mrc_instantaneous: unit norm and collinearity") {
  Inst inst(7);
  const auto u = mrc_instantaneous(inst.real);
  for (int k = 0; k < inst.cfg.K; ++k) {
    CHECK(u[k].norm() == doctest::Approx(1.0).epsilon(1e-12));
    const Complex inner = u[k].dot(inst.real.z_hat[k]);
    CHECK(inner.imag() == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(inner.real() ==
          doctest::Approx(inst.real.z_hat[k].norm()).epsilon(1e-12));
  }
}

TEST_CASE("zf_instantaneous: hand 2x2 case, nulling, failure mode") {
  ChannelRealization real;
  CVector z1(2), z2(2);
  z1 << 1.0, 0.0;
  z2 << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
  real.z_hat = {z1, z2};
  real.h_hat = real.z_hat;
  real.g_hat = {CVector::Zero(2), CVector::Zero(2)};
  const auto u = zf_instantaneous(real);
  // Directions (1,-1) and (0,1) up to normalization and phase.
  CVector w1(2), w2(2);
  w1 << 1.0, -1.0;
  w2 << 0.0, 1.0;
  CHECK(std::abs(std::abs(u[0].dot(w1.normalized())) - 1.0) < 1e-10);
  CHECK(std::abs(std::abs(u[1].dot(w2.normalized())) - 1.0) < 1e-10);

  Inst inst(8);
  const auto uz = zf_instantaneous(inst.real);
  for (int k = 0; k < inst.cfg.K; ++k) {
    CHECK(uz[k].norm() == doctest::Approx(1.0).epsilon(1e-12));
    for (int m = 0; m < inst.cfg.K; ++m) {
      if (m == k) continue;
      CHECK(std::abs(uz[k].dot(inst.real.z_hat[m])) <
            1e-8 * inst.real.z_hat[m].norm());
    }
  }

  // Orthogonal estimates make ZF and MRC agree.
  ChannelRealization ortho;
  CVector e1(2), e2(2);
  e1 << 2.0, 0.0;
  e2 << 0.0, 0.5;
  ortho.z_hat = {e1, e2};
  const auto uo = zf_instantaneous(ortho);
  CHECK(std::abs(std::abs(uo[0].dot(e1.normalized())) - 1.0) < 1e-12);
  CHECK(std::abs(std::abs(uo[1].dot(e2.normalized())) - 1.0) < 1e-12);

  // Collinear estimates: rank deficiency is reported.
  ChannelRealization bad;
  bad.z_hat = {z1, CVector(z1 * 2.0)};
  CHECK_THROWS_AS(zf_instantaneous(bad), RankDeficientError);
}

TEST_CASE("sensing_evd: diagonal case, rank-one case, random-vector oracle") {
  CMatrix o1 = CMatrix::Zero(2, 2);
  o1(0, 0) = 2.0;
  o1(1, 1) = 1.0;
  const CVector u = sensing_evd(o1, CMatrix::Zero(2, 2), 4, 0.25);
  CHECK(std::abs(u[0]) == doctest::Approx(1.0));

  SeededRng rng(9);
  CVector dir(3);
  for (int i = 0; i < 3; ++i) dir[i] = rng.cnormal();
  const CVector us =
      sensing_evd(dir * dir.adjoint(), CMatrix::Zero(3, 3), 5, 0.1);
  CHECK(std::abs(std::abs(us.dot(dir.normalized())) - 1.0) < 1e-10);

  Inst inst(10, 3, 5);
  auto [om1, om2] = build_omega(inst.pa, inst.dc, inst.cfg);
  const CVector u_opt = sensing_evd(om1, om2, inst.cfg.T, inst.cfg.sigma2);
  const double best =
      ergodic_sensing_sinr(inst.pa, inst.dc, u_opt, inst.cfg);
  for (int t = 0; t < 10000; ++t) {
    CVector v(5);
    for (int i = 0; i < 5; ++i) v[i] = rng.cnormal();
    v.normalize();
    CHECK(ergodic_sensing_sinr(inst.pa, inst.dc, v, inst.cfg) <=
          best + 1e-9);
  }
}

TEST_CASE("sca_minorant: tight at expansion, dominated elsewhere, PSD curvature") {
  Inst inst(11);
  SeededRng rng(12);
  for (int k = 0; k < inst.cfg.K; ++k) {
    CVector u0(inst.cfg.N_b);
    for (int i = 0; i < inst.cfg.N_b; ++i) u0[i] = rng.cnormal();
    u0.normalize();
    const ConcaveQuadratic q =
        sca_minorant(u0, k, inst.real, inst.dc, inst.pa, inst.cfg);
    const double prefactor =
        double(inst.cfg.T_d()) / inst.cfg.T;
    auto rate = [&](const CVector& v) {
      return prefactor *
             std::log2(1.0 + instantaneous_sinr(k, inst.pa, inst.real,
                                                inst.dc, v, inst.cfg));
    };
    CHECK(q.eval(u0) == doctest::Approx(rate(u0)).epsilon(1e-9));
    CHECK(is_psd(q.A));
    for (int t = 0; t < 100; ++t) {
      CVector v(inst.cfg.N_b);
      for (int i = 0; i < inst.cfg.N_b; ++i) v[i] = rng.cnormal();
      v.normalize();
      CHECK(q.eval(v) <= rate(v) + 1e-9);
    }
  }
}

TEST_CASE("optimize_combiners: single user converges to the matched filter") {
  // No echo and i.i.d. direct covariance: the matched filter is optimal.
  Inst inst(13, 1, 4, /*with_echo=*/false);
  SystemConfig cfg = inst.cfg;
  cfg.R_th = RVector::Constant(1, 0.0);
  const auto u0 = mrc_instantaneous(inst.real);
  CVector start = u0[0];
  // Start away from the optimum to make convergence meaningful.
  start[0] += Complex(0.4, -0.3);
  start.normalize();
  const CombinerResult res =
      optimize_combiners(inst.real, inst.dc, inst.pa, cfg, {start});
  CHECK(res.converged);
  const double align = std::abs(res.set.u_comm[0].dot(u0[0]));
  CHECK(std::acos(std::min(align, 1.0)) < 1e-4);
}

TEST_CASE("optimize_combiners: monotone trace, unit norms, binding ball") {
  Inst inst(14);
  const CombinerResult res = optimize_combiners(
      inst.real, inst.dc, inst.pa, inst.cfg, default_warm_start(inst.real));
  CHECK(res.converged);
  for (size_t i = 1; i < res.trace.size(); ++i) {
    CHECK(res.trace[i] >= res.trace[i - 1] - 1e-6);
  }
  for (int k = 0; k < inst.cfg.K; ++k) {
    CHECK(res.set.u_comm[k].norm() == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(res.pre_norms[k] >= 1.0 - 1e-3);  // regularizer keeps the ball tight
  }
  CHECK(res.set.u_sense.norm() == doctest::Approx(1.0).epsilon(1e-8));

  // Ordering against the warm start and MRC on this realization.
  const double orb = res.trace.back();
  const double zf =
      instantaneous_sum_rate(inst.pa, inst.real, inst.dc,
                             zf_instantaneous(inst.real), inst.cfg)
          .sum;
  const double mrc =
      instantaneous_sum_rate(inst.pa, inst.real, inst.dc,
                             mrc_instantaneous(inst.real), inst.cfg)
          .sum;
  CHECK(orb >= zf - 1e-6);
  CHECK(orb >= mrc - 1e-6);
}
