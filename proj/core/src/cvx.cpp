#include "isac/cvx.hpp"

#include <cmath>
#include <limits>

#include <Eigen/Cholesky>

namespace isac {

namespace {

// One inequality g(x) <= 0 for the barrier engine.
struct Constraint {
  std::function<double(const RVector&, RVector* grad)> eval;
  // Adds w * hess(g) into h; empty for linear constraints.
  std::function<void(const RVector&, double w, RMatrix& h)> add_hess;
};

struct Objective {
  std::function<double(const RVector&, RVector* grad)> eval;
  // Adds w * hess(f0) into h.
  std::function<void(const RVector&, double w, RMatrix& h)> add_hess;
};

struct BarrierOutcome {
  RVector x;
  std::vector<double> multipliers;
  std::vector<double> value_trace;
  int newton_steps = 0;
};

// Minimizes F_t(x) = -t f0(x) - sum ln(-g_i(x)) along the usual central
// path, multiplying t by kMu until m/t drops below tol.
constexpr double kMu = 20.0;
constexpr int kMaxNewtonPerStage = 200;
constexpr int kMaxBacktracks = 60;

bool strictly_feasible(const std::vector<Constraint>& cons, const RVector& x) {
  for (const auto& c : cons) {
    if (!(c.eval(x, nullptr) < 0.0)) return false;
  }
  return true;
}

BarrierOutcome barrier_maximize(const Objective& f0,
                                const std::vector<Constraint>& cons,
                                const RVector& x0, double tol) {
  if (!strictly_feasible(cons, x0)) {
    throw InfeasibleError("barrier: start is not strictly feasible");
  }
  const int n = static_cast<int>(x0.size());
  const int m = static_cast<int>(cons.size());

  RVector x = x0;
  RVector grad(n), cgrad(n);
  RMatrix hess(n, n);
  BarrierOutcome out;

  double t = 1.0;
  while (true) {
    // Centering stage at fixed t.
    int it = 0;
    for (; it < kMaxNewtonPerStage; ++it) {
      double fval = f0.eval(x, &grad);
      double barrier_val = 0.0;
      RVector total_grad = -t * grad;
      hess.setZero();
      f0.add_hess(x, -t, hess);
      for (const auto& c : cons) {
        const double g = c.eval(x, &cgrad);
        barrier_val -= std::log(-g);
        total_grad += cgrad / (-g);
        hess.noalias() += (cgrad * cgrad.transpose()) / (g * g);
        if (c.add_hess) c.add_hess(x, 1.0 / (-g), hess);
      }
      const double f_t = -t * fval + barrier_val;

      RVector dir;
      Eigen::LDLT<RMatrix> ldlt(hess);
      bool newton_ok = (ldlt.info() == Eigen::Success);
      if (newton_ok) {
        dir = ldlt.solve(-total_grad);
        newton_ok = dir.allFinite() && total_grad.dot(dir) < 0.0;
      }
      if (!newton_ok) {
        dir = -total_grad;  // gradient fallback
      }
      const double slope = total_grad.dot(dir);
      const double decrement = -slope;
      if (newton_ok && decrement * 0.5 < 1e-11 * (1.0 + std::abs(f_t))) break;
      if (!newton_ok && total_grad.norm() < 1e-11 * (1.0 + std::abs(f_t))) {
        break;
      }

      double alpha = 1.0;
      bool accepted = false;
      for (int bt = 0; bt < kMaxBacktracks; ++bt) {
        const RVector cand = x + alpha * dir;
        if (strictly_feasible(cons, cand)) {
          double cand_barrier = 0.0;
          for (const auto& c : cons) cand_barrier -= std::log(-c.eval(cand, nullptr));
          const double f_cand = -t * f0.eval(cand, nullptr) + cand_barrier;
          if (f_cand <= f_t + 0.25 * alpha * slope) {
            x = cand;
            accepted = true;
            break;
          }
        }
        alpha *= 0.5;
      }
      if (!accepted) break;  // step shrank to nothing: centered enough
    }
    out.newton_steps += it;
    if (it >= kMaxNewtonPerStage) {
      throw MaxIterError("barrier: centering did not converge");
    }
    out.value_trace.push_back(f0.eval(x, nullptr));
    if (m == 0 || static_cast<double>(m) / t < 0.5 * tol) break;
    t *= kMu;
  }

  out.x = x;
  out.multipliers.resize(m);
  for (int i = 0; i < m; ++i) {
    out.multipliers[i] = 1.0 / (t * (-cons[i].eval(x, nullptr)));
  }
  return out;
}

}  // namespace

SolveResult solve_linconstrained_concave(
    const LinConstrainedConcaveProblem& prob, const RVector& x0, double tol) {
  const int n = prob.dim;
  if (x0.size() != n) throw DimMismatchError("solve_linconstrained_concave: x0");

  Objective f0;
  f0.eval = prob.objective;
  if (prob.hessian) {
    f0.add_hess = [&prob](const RVector& x, double w, RMatrix& h) {
      RMatrix fh(x.size(), x.size());
      prob.hessian(x, fh);
      h.noalias() += w * fh;
    };
  } else {
    // Central differences of the gradient; fine at these dimensions.
    f0.add_hess = [&prob](const RVector& x, double w, RMatrix& h) {
      const int dim = static_cast<int>(x.size());
      RMatrix fh(dim, dim);
      RVector gp(dim), gm(dim), xx = x;
      for (int j = 0; j < dim; ++j) {
        const double step = 1e-6 * std::max(1.0, std::abs(x[j]));
        xx[j] = x[j] + step;
        prob.objective(xx, &gp);
        xx[j] = x[j] - step;
        prob.objective(xx, &gm);
        xx[j] = x[j];
        fh.col(j) = (gp - gm) / (2.0 * step);
      }
      h.noalias() += w * 0.5 * (fh + fh.transpose());
    };
  }

  std::vector<Constraint> cons;
  const int rows = static_cast<int>(prob.A.rows());
  for (int i = 0; i < rows; ++i) {
    cons.push_back({[&prob, i](const RVector& x, RVector* grad) {
                      if (grad) *grad = prob.A.row(i).transpose();
                      return prob.A.row(i).dot(x) - prob.b[i];
                    },
                    nullptr});
  }
  for (int j = 0; j < n; ++j) {
    cons.push_back({[j, n](const RVector& x, RVector* grad) {
                      if (grad) {
                        grad->setZero(n);
                        (*grad)[j] = -1.0;
                      }
                      return -x[j];
                    },
                    nullptr});
  }

  BarrierOutcome out = barrier_maximize(f0, cons, x0, tol);
  SolveResult res;
  res.x = out.x;
  res.value = prob.objective(out.x, nullptr);
  res.multipliers = std::move(out.multipliers);
  res.value_trace = std::move(out.value_trace);
  res.newton_steps = out.newton_steps;
  return res;
}

namespace {

// Real-coordinate image of a concave complex quadratic: with x = [Re u; Im u],
// q(u) = c + 2 b~'x - x'A~x, where A~ is the symmetric real embedding of A.
struct RealQuadratic {
  double c = 0.0;
  RVector b;
  RMatrix A;

  static RealQuadratic from(const ConcaveQuadratic& q) {
    const int n = static_cast<int>(q.b.size());
    RealQuadratic rq;
    rq.c = q.c;
    rq.b.resize(2 * n);
    rq.b << q.b.real(), q.b.imag();
    rq.A.resize(2 * n, 2 * n);
    rq.A.topLeftCorner(n, n) = q.A.real();
    rq.A.bottomRightCorner(n, n) = q.A.real();
    rq.A.topRightCorner(n, n) = -q.A.imag();
    rq.A.bottomLeftCorner(n, n) = q.A.imag();
    rq.A = 0.5 * (rq.A + rq.A.transpose());
    return rq;
  }

  double eval(const RVector& x, RVector* grad) const {
    const RVector ax = A * x;
    if (grad) *grad = 2.0 * b - 2.0 * ax;
    return c + 2.0 * b.dot(x) - x.dot(ax);
  }
};

RVector to_real(const CVector& u) {
  RVector x(2 * u.size());
  x << u.real(), u.imag();
  return x;
}

CVector to_complex(const RVector& x) {
  const int n = static_cast<int>(x.size()) / 2;
  CVector u(n);
  for (int i = 0; i < n; ++i) u[i] = Complex(x[i], x[n + i]);
  return u;
}

}  // namespace

QcqpResult solve_unit_ball_qcqp(const UnitBallQcqp& prob, const CVector& u0,
                                double tol) {
  const RealQuadratic q0 = RealQuadratic::from(prob.q0);
  const RealQuadratic q1 = prob.has_constraint
                               ? RealQuadratic::from(prob.q1)
                               : RealQuadratic();

  Objective f0;
  f0.eval = [&q0](const RVector& x, RVector* grad) { return q0.eval(x, grad); };
  f0.add_hess = [&q0](const RVector&, double w, RMatrix& h) {
    h.noalias() += w * (-2.0) * q0.A;
  };

  std::vector<Constraint> cons;
  if (prob.has_constraint) {
    const double r = prob.r;
    cons.push_back({[&q1, r](const RVector& x, RVector* grad) {
                      const double v = q1.eval(x, grad);
                      if (grad) *grad = -*grad;
                      return r - v;
                    },
                    [&q1](const RVector&, double w, RMatrix& h) {
                      h.noalias() += w * 2.0 * q1.A;
                    }});
  }
  cons.push_back({[](const RVector& x, RVector* grad) {
                    if (grad) *grad = 2.0 * x;
                    return x.squaredNorm() - 1.0;
                  },
                  [](const RVector& x, double w, RMatrix& h) {
                    h.diagonal().array() += 2.0 * w;
                    (void)x;
                  }});

  BarrierOutcome out = barrier_maximize(f0, cons, to_real(u0), tol);
  QcqpResult res;
  res.u = to_complex(out.x);
  res.value = prob.q0.eval(res.u);
  res.multipliers = std::move(out.multipliers);
  res.value_trace = std::move(out.value_trace);
  res.newton_steps = out.newton_steps;
  return res;
}

}  // namespace isac
