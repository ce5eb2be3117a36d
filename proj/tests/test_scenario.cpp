#include <doctest.h>

#include <cmath>

#include "isac/scenario.hpp"

using namespace isac;

TEST_CASE("steering_vector: broadside, analytic phase, norm") {
  const CVector ones = steering_vector(0.0, 5, 0.5);
  for (int n = 0; n < 5; ++n) CHECK(std::abs(ones[n] - 1.0) < 1e-14);

  // theta = pi/6, d/lambda = 0.5 gives entry exp(-j pi/2) = -j.
  const CVector a = steering_vector(M_PI / 6.0, 2, 0.5);
  CHECK(a[0] == Complex(1.0, 0.0));
  CHECK(a[1].real() == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(a[1].imag() == doctest::Approx(-1.0));

  SeededRng rng(1);
  for (int t = 0; t < 100; ++t) {
    const double theta = (rng.uniform() - 0.5) * M_PI;
    CHECK(steering_vector(theta, 7, 0.5).squaredNorm() ==
          doctest::Approx(7.0));
  }
}

TEST_CASE("steering_vector: conjugate symmetry in the angle") {
  for (double theta : {0.1, 0.7, 1.2}) {
    const CVector p = steering_vector(theta, 6, 0.5);
    const CVector m = steering_vector(-theta, 6, 0.5);
    CHECK((p.conjugate() - m).norm() < 1e-12);
  }
}

TEST_CASE("place_users: support, mean, degenerate radius") {
  SeededRng rng(2);
  const Eigen::Vector2d center(100.0, 0.0);

  for (auto& p : place_users(center, 0.0, 8, rng)) {
    CHECK((p - center).norm() == 0.0);
  }

  const double radius = 50.0;
  Eigen::Vector2d mean = Eigen::Vector2d::Zero();
  const int n = 100000;
  SeededRng rng2(3);
  const auto pts = place_users(center, radius, n, rng2);
  for (const auto& p : pts) {
    CHECK((p - center).norm() <= radius + 1e-12);
    mean += p;
  }
  mean /= n;
  CHECK(std::abs(mean.x() - center.x()) < 0.01 * radius);
  CHECK(std::abs(mean.y() - center.y()) < 0.01 * radius);
}

TEST_CASE("build_statistics: reference distance, power laws, rank-one echo") {
  SystemConfig cfg;
  cfg.K = 2;
  cfg.N_b = 4;
  cfg.T_p = 3;
  PathLossParams pl;
  Geometry geom;
  geom.target_pos = Eigen::Vector2d(50.0 / std::sqrt(2.0), 50.0 / std::sqrt(2.0));
  geom.user_pos = {Eigen::Vector2d(1.0, 0.0), Eigen::Vector2d(120.0, 30.0)};

  const ChannelStatistics st = build_statistics(geom, pl, cfg);

  // User at d0 = 1 m has unit path loss regardless of the exponent.
  CHECK((st.R_h[0] - CMatrix::Identity(4, 4)).norm() < 1e-12);

  // Echo loss is the product of the two power laws.
  const double d_u2t = (geom.user_pos[1] - geom.target_pos).norm();
  const double want = std::pow(d_u2t, -2.2) * std::pow(50.0, -2.2);
  const double got = st.R_g[1].real().trace() / (pl.alpha_rcs * 4.0);
  CHECK(got == doctest::Approx(want).epsilon(1e-12));

  // Rank one: second eigenvalue negligible against the first.
  for (int k = 0; k < 2; ++k) {
    Eigen::SelfAdjointEigenSolver<CMatrix> es(st.R_g[k]);
    const auto& ev = es.eigenvalues();
    CHECK(ev[2] < 1e-10 * ev[3]);
    CHECK((st.R[k] - st.R_h[k] - st.R_g[k]).norm() <=
          1e-15 * (st.R_h[k].norm() + st.R_g[k].norm()));
    CHECK(is_psd(st.R[k]));
    CHECK(is_psd(st.R_g[k]));
  }
}

TEST_CASE("dft_pilots: unit case and Gram identity") {
  const CMatrix one = dft_pilots(1, 1);
  CHECK(one(0, 0) == Complex(1.0, 0.0));

  // Gram matrix x_i^T x_k^* equals T_p I, including the paper default
  // T_p = K + 1.
  for (auto [k, tp] : {std::pair{4, 5}, std::pair{3, 8}, std::pair{5, 5}}) {
    const CMatrix x = dft_pilots(k, tp);
    const CMatrix gram = x.transpose() * x.conjugate();
    CHECK((gram - double(tp) * CMatrix::Identity(k, k)).cwiseAbs().maxCoeff() <
          1e-10);
  }
  CHECK_THROWS_AS(dft_pilots(5, 4), PilotShortageError);
}

TEST_CASE("config validation and dBm conversion") {
  SystemConfig cfg;
  CHECK_NOTHROW(cfg.validate());
  CHECK(dbm_to_watt(10.0) == doctest::Approx(1e-2));
  CHECK(dbm_to_watt(-70.0) == doctest::Approx(1e-10));
  CHECK(watt_to_dbm(dbm_to_watt(13.0)) == doctest::Approx(13.0));

  SystemConfig bad = cfg;
  bad.T_p = bad.T;
  CHECK_THROWS_AS(bad.validate(), OutOfDomainError);
  bad = cfg;
  bad.P_FA = 0.999;  // violates P_FA < P_D_th
  CHECK_THROWS_AS(bad.validate(), OutOfDomainError);
}
