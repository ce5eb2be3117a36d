#include <doctest.h>

#include <cmath>

#include "isac/cvx.hpp"
#include "isac/rng.hpp"

using namespace isac;

TEST_CASE("solve_linconstrained_concave: interior quadratic optimum") {
  LinConstrainedConcaveProblem prob;
  prob.dim = 3;
  RVector c(3);
  c << 0.5, 1.0, 0.2;
  prob.objective = [c](const RVector& x, RVector* g) {
    if (g) *g = -2.0 * (x - c);
    return -(x - c).squaredNorm();
  };
  prob.hessian = [](const RVector& x, RMatrix& h) {
    h = -2.0 * RMatrix::Identity(x.size(), x.size());
  };
  prob.A = RMatrix::Ones(1, 3);  // sum x <= 10, comfortably inactive
  prob.b = RVector::Constant(1, 10.0);

  const SolveResult res =
      solve_linconstrained_concave(prob, RVector::Constant(3, 1.0), 1e-8);
  CHECK((res.x - c).norm() < 1e-6);
  CHECK(res.value == doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("solve_linconstrained_concave: symmetric water filling (FD hessian)") {
  const int n = 3;
  const double budget = 3.0;
  LinConstrainedConcaveProblem prob;
  prob.dim = n;
  prob.objective = [](const RVector& x, RVector* g) {
    double v = 0.0;
    if (g) g->resize(x.size());
    for (int i = 0; i < x.size(); ++i) {
      v += std::log1p(x[i]);
      if (g) (*g)[i] = 1.0 / (1.0 + x[i]);
    }
    return v;
  };
  // no hessian: exercises the finite-difference fallback
  prob.A = RMatrix::Ones(1, n);
  prob.b = RVector::Constant(1, budget);

  const SolveResult res =
      solve_linconstrained_concave(prob, RVector::Constant(n, 0.1), 1e-8);
  for (int i = 0; i < n; ++i) {
    CHECK(res.x[i] == doctest::Approx(budget / n).epsilon(1e-5));
  }

  // Complementary slackness: the budget row is active with a positive
  // multiplier, the sign bounds are inactive with negligible ones.
  CHECK(res.multipliers[0] > 1e-8);
  for (int i = 1; i <= n; ++i) CHECK(res.multipliers[i] <= 1e-7);

  // Monotone value trace across barrier stages.
  for (size_t i = 1; i < res.value_trace.size(); ++i) {
    CHECK(res.value_trace[i] >= res.value_trace[i - 1] - 1e-9);
  }
}

TEST_CASE("solve_linconstrained_concave: grid-search oracle on a P5-shaped problem") {
  SeededRng rng(21);
  const int n = 3;
  const double sigma = 0.05;
  RVector phi(n);
  RMatrix vs(n, n);
  for (int k = 0; k < n; ++k) {
    phi[k] = 0.5 + rng.uniform();
    for (int i = 0; i < n; ++i) vs(k, i) = 0.1 + 0.3 * rng.uniform();
  }
  const double cap = 1.0;

  LinConstrainedConcaveProblem prob;
  prob.dim = n;
  prob.objective = [&](const RVector& x, RVector* g) {
    double v = 0.0;
    if (g) g->setZero(n);
    for (int k = 0; k < n; ++k) {
      const double num = sigma + phi[k] * x[k] + vs.row(k).dot(x);
      v += std::log(num) - 0.8 * vs.row(k).dot(x);
      if (g) {
        RVector gg = vs.row(k).transpose() / num;
        gg[k] += phi[k] / num;
        gg -= 0.8 * vs.row(k).transpose();
        *g += gg;
      }
    }
    return v;
  };
  prob.A = RMatrix::Identity(n, n);  // box x_i <= cap
  prob.b = RVector::Constant(n, cap);

  const SolveResult res =
      solve_linconstrained_concave(prob, RVector::Constant(n, 0.3), 1e-8);

  double best = -1e300;
  const int grid = 60;
  RVector x(n);
  for (int i = 0; i < grid; ++i) {
    x[0] = cap * i / (grid - 1.0);
    for (int j = 0; j < grid; ++j) {
      x[1] = cap * j / (grid - 1.0);
      for (int k = 0; k < grid; ++k) {
        x[2] = cap * k / (grid - 1.0);
        best = std::max(best, prob.objective(x, nullptr));
      }
    }
  }
  CHECK(res.value >= best - 1e-7);  // best may sit exactly on the boundary
  CHECK(std::abs(res.value - best) <= 1e-3 * std::abs(best));
}

TEST_CASE("solve_linconstrained_concave: infeasible start is rejected") {
  LinConstrainedConcaveProblem prob;
  prob.dim = 2;
  prob.objective = [](const RVector& x, RVector* g) {
    if (g) *g = -x;
    return -0.5 * x.squaredNorm();
  };
  prob.A = RMatrix::Ones(1, 2);
  prob.b = RVector::Constant(1, 1.0);
  RVector bad(2);
  bad << 2.0, 2.0;
  CHECK_THROWS_AS(solve_linconstrained_concave(prob, bad, 1e-8),
                  InfeasibleError);
}

TEST_CASE("solve_unit_ball_qcqp: interior and boundary analytic optima") {
  const int n = 3;
  SeededRng rng(22);
  CVector b0(n);
  for (int i = 0; i < n; ++i) b0[i] = 0.4 * rng.cnormal();
  if (b0.norm() >= 1.0) b0 *= 0.8 / b0.norm();

  // max 2Re{b0'u} - ||u||^2 has the interior optimum u = b0.
  UnitBallQcqp prob;
  prob.q0.c = 0.0;
  prob.q0.b = b0;
  prob.q0.A = CMatrix::Identity(n, n);
  QcqpResult res = solve_unit_ball_qcqp(prob, CVector::Zero(n), 1e-9);
  CHECK((res.u - b0).norm() < 1e-5);

  // Pure linear objective pushes to the boundary: u = b0/||b0||.
  UnitBallQcqp lin;
  lin.q0.c = 0.0;
  lin.q0.b = 3.0 * b0;
  lin.q0.A = CMatrix::Zero(n, n);
  res = solve_unit_ball_qcqp(lin, CVector::Zero(n), 1e-9);
  CHECK((res.u - b0.normalized()).norm() < 1e-4);
  CHECK(res.u.norm() <= 1.0 + 1e-8);
}

TEST_CASE("solve_unit_ball_qcqp: sampling-plus-polish oracle with rate row") {
  SeededRng rng(23);
  const int n = 3;
  CMatrix m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = rng.cnormal();
  const CMatrix a0 = m * m.adjoint() / n;
  CVector b0(n), b1(n);
  for (int i = 0; i < n; ++i) {
    b0[i] = rng.cnormal();
    b1[i] = 0.5 * rng.cnormal();
  }

  UnitBallQcqp prob;
  prob.q0 = {0.1, b0, a0};
  prob.has_constraint = true;
  prob.q1 = {0.0, b1, 0.5 * a0};
  // Choose r so that u = 0 is strictly feasible: q1(0) = 0 > r.
  prob.r = -0.5;

  const QcqpResult res = solve_unit_ball_qcqp(prob, CVector::Zero(n), 1e-9);
  CHECK(res.u.norm() <= 1.0 + 1e-8);
  CHECK(prob.q1.eval(res.u) >= prob.r - 1e-8);

  // Oracle: dense random sampling inside the feasible set, then local
  // projected-gradient polish from the best candidate.
  double best = -1e300;
  CVector best_u = CVector::Zero(n);
  for (int t = 0; t < 20000; ++t) {
    CVector u(n);
    for (int i = 0; i < n; ++i) u[i] = rng.cnormal();
    u *= std::pow(rng.uniform(), 1.0 / (2 * n)) / u.norm();
    if (prob.q1.eval(u) < prob.r) continue;
    const double v = prob.q0.eval(u);
    if (v > best) {
      best = v;
      best_u = u;
    }
  }
  CVector u = best_u;
  double step = 0.05;
  for (int it = 0; it < 40000 && step > 1e-14; ++it) {
    const CVector grad = prob.q0.b - prob.q0.A * u;  // 1/2 gradient wrt u*
    CVector cand = u + step * grad;
    if (cand.norm() > 1.0) cand /= cand.norm();
    if (prob.q1.eval(cand) < prob.r) {
      // Slide along the rate boundary: largest feasible blend toward cand.
      double lo = 0.0, hi = 1.0;
      for (int b = 0; b < 50; ++b) {
        const double mid = 0.5 * (lo + hi);
        CVector m = u + mid * (cand - u);
        if (m.norm() > 1.0) m /= m.norm();
        (prob.q1.eval(m) >= prob.r ? lo : hi) = mid;
      }
      cand = u + lo * (cand - u);
      if (cand.norm() > 1.0) cand /= cand.norm();
    }
    if (prob.q1.eval(cand) >= prob.r && prob.q0.eval(cand) > prob.q0.eval(u)) {
      u = cand;
      step = std::min(step * 1.5, 0.5);
    } else {
      step *= 0.5;
    }
  }
  const double oracle = prob.q0.eval(u);
  CHECK(res.value >= oracle - 1e-4 * std::abs(oracle));
  CHECK(std::abs(res.value - oracle) <= 1e-4 * std::abs(oracle));
}

TEST_CASE("solvers are deterministic given identical inputs") {
  const int n = 2;
  LinConstrainedConcaveProblem prob;
  prob.dim = n;
  prob.objective = [](const RVector& x, RVector* g) {
    if (g) *g = RVector::Ones(x.size()) - x;
    return x.sum() - 0.5 * x.squaredNorm();
  };
  prob.A = RMatrix::Ones(1, n);
  prob.b = RVector::Constant(1, 1.5);
  const RVector x0 = RVector::Constant(n, 0.2);
  const SolveResult a = solve_linconstrained_concave(prob, x0, 1e-8);
  const SolveResult b = solve_linconstrained_concave(prob, x0, 1e-8);
  CHECK(a.x == b.x);
  CHECK(a.value == b.value);
}
