#pragma once

#include <functional>
#include <vector>

#include "isac/types.hpp"

namespace isac {

/// Maximize a smooth concave objective over {A x <= b, x >= 0}.
/// The feasible set must be nonempty and bounded. `objective` returns the
/// value and, when `grad` is non-null, fills the gradient. `hessian` is
/// optional; when absent it is approximated by central differences of the
/// gradient (the dimensions here are tiny).
struct LinConstrainedConcaveProblem {
  int dim = 0;
  std::function<double(const RVector& x, RVector* grad)> objective;
  std::function<void(const RVector& x, RMatrix& h)> hessian;  // optional
  RMatrix A;  // may have zero rows
  RVector b;
};

struct SolveResult {
  RVector x;
  double value = 0.0;
  std::vector<double> multipliers;  // rows of A first, then bounds x >= 0
  std::vector<double> value_trace;  // objective after each barrier stage
  int newton_steps = 0;
};

/// Log-barrier interior point with damped Newton centering; falls back to
/// plain gradient steps when a Newton system is not usable. `x0` must be
/// strictly feasible (throws InfeasibleError otherwise); the returned point
/// satisfies the KKT conditions within `tol`.
SolveResult solve_linconstrained_concave(
    const LinConstrainedConcaveProblem& prob, const RVector& x0,
    double tol = 1e-8);

/// Concave quadratic q(u) = c + 2 Re{b^H u} - u^H A u with A Hermitian PSD.
struct ConcaveQuadratic {
  double c = 0.0;
  CVector b;
  CMatrix A;

  double eval(const CVector& u) const {
    return c + 2.0 * std::real(b.dot(u)) - std::real(u.dot(A * u));
  }
};

/// Maximize q0(u) subject to q1(u) >= r (optional) and ||u||^2 <= 1,
/// u complex. Internally the variable is split into real coordinates; the
/// interface stays complex-typed.
struct UnitBallQcqp {
  ConcaveQuadratic q0;
  bool has_constraint = false;
  ConcaveQuadratic q1;
  double r = 0.0;
};

struct QcqpResult {
  CVector u;
  double value = 0.0;
  std::vector<double> multipliers;  // [rate constraint (if any), ball]
  std::vector<double> value_trace;
  int newton_steps = 0;
};

QcqpResult solve_unit_ball_qcqp(const UnitBallQcqp& prob, const CVector& u0,
                                double tol = 1e-8);

}  // namespace isac
