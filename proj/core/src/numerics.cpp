#include "isac/numerics.hpp"

#include <cmath>
#include <limits>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

namespace isac {

namespace {

constexpr double kSqrt2 = 1.4142135623730950488016887242097;
constexpr double kLogSqrt2Pi = 0.91893853320467274178032973640562;

}  // namespace

bool is_hermitian(const CMatrix& a, double tol) {
  if (a.rows() != a.cols()) return false;
  return (a - a.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

CMatrix hermitize(const CMatrix& a) { return 0.5 * (a + a.adjoint()); }

bool is_psd(const CMatrix& a, double tol) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(a, Eigen::EigenvaluesOnly);
  const double lo = es.eigenvalues().minCoeff();
  const double hi = es.eigenvalues().cwiseAbs().maxCoeff();
  return lo >= -tol * std::max(hi, 1.0e-300);
}

CMatrix psd_sqrt_factor(const CMatrix& cov, double tol) {
  Eigen::LLT<CMatrix> llt(cov);
  if (llt.info() == Eigen::Success) {
    return llt.matrixL();
  }
  Eigen::SelfAdjointEigenSolver<CMatrix> es(cov);
  if (es.info() != Eigen::Success) {
    throw NotPsdError("psd_sqrt_factor: eigendecomposition failed");
  }
  RVector lam = es.eigenvalues();
  const double scale = lam.cwiseAbs().maxCoeff();
  if (lam.minCoeff() < -tol * std::max(scale, 1.0e-300)) {
    throw NotPsdError("psd_sqrt_factor: covariance has eigenvalue " +
                      std::to_string(lam.minCoeff()));
  }
  lam = lam.cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors() * lam.asDiagonal();
}

CVector sample_complex_gaussian(const CMatrix& cov, SeededRng& rng) {
  const CMatrix factor = psd_sqrt_factor(cov);
  CVector w(cov.rows());
  for (Eigen::Index i = 0; i < w.size(); ++i) w[i] = rng.cnormal();
  return factor * w;
}

CMatrix hermitian_solve(const CMatrix& a, const CMatrix& b) {
  if (a.rows() != a.cols() || a.rows() != b.rows()) {
    throw DimMismatchError("hermitian_solve: shape mismatch");
  }
  const double jitter =
      1e-12 * a.real().trace() / static_cast<double>(a.rows());
  CMatrix m = a;
  for (int attempt = 0; attempt <= 3; ++attempt) {
    Eigen::LLT<CMatrix> llt(m);
    if (llt.info() == Eigen::Success) {
      return llt.solve(b);
    }
    m.diagonal().array() += std::max(jitter, 1e-300);
  }
  throw SingularError("hermitian_solve: Cholesky failed after jitter");
}

GevResult dominant_generalized_eigvec(const CMatrix& a, const CMatrix& b) {
  if (a.rows() != a.cols() || b.rows() != b.cols() || a.rows() != b.rows()) {
    throw DimMismatchError("dominant_generalized_eigvec: shape mismatch");
  }
  {
    Eigen::SelfAdjointEigenSolver<CMatrix> esb(b, Eigen::EigenvaluesOnly);
    const double lo = esb.eigenvalues().minCoeff();
    const double hi = esb.eigenvalues().maxCoeff();
    if (lo <= 0.0 || hi / lo > 1e14) {
      throw SingularError("dominant_generalized_eigvec: B condition number");
    }
  }
  Eigen::GeneralizedSelfAdjointEigenSolver<CMatrix> ges(
      hermitize(a), hermitize(b), Eigen::ComputeEigenvectors | Eigen::Ax_lBx);
  if (ges.info() != Eigen::Success) {
    throw SingularError("dominant_generalized_eigvec: solver failed");
  }
  const Eigen::Index last = a.rows() - 1;
  CVector x = ges.eigenvectors().col(last);
  x.normalize();
  // Phase convention: first entry of nonneglible magnitude made real >= 0.
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double mag = std::abs(x[i]);
    if (mag > 1e-12) {
      x *= std::conj(x[i]) / mag;
      break;
    }
  }
  return {x, ges.eigenvalues()[last]};
}

double log_q_function(double x) {
  if (!(x > 0.0)) throw OutOfDomainError("log_q_function: requires x > 0");
  if (x <= 35.0) {
    return std::log(0.5 * std::erfc(x / kSqrt2));
  }
  // Asymptotic series Q(x) = phi(x)/x * (1 - 1/x^2 + 3/x^4 - ...);
  // at x > 35 the terms fall below 1e-16 within a few rounds.
  const double inv2 = 1.0 / (x * x);
  double term = 1.0;
  double series = 1.0;
  for (int n = 1; n <= 30; ++n) {
    term *= -(2.0 * n - 1.0) * inv2;
    series += term;
    if (std::abs(term) < 1e-17 * series) break;
  }
  return -0.5 * x * x - std::log(x) - kLogSqrt2Pi + std::log(series);
}

double q_function(double x) {
  if (!std::isfinite(x)) throw OutOfDomainError("q_function: non-finite x");
  if (x <= 35.0) {
    return 0.5 * std::erfc(x / kSqrt2);
  }
  const double v = std::exp(log_q_function(x));
  // Clamp underflow to the smallest denormal: Q never reaches 0 for finite x.
  return v > 0.0 ? v : std::numeric_limits<double>::denorm_min();
}

double q_inverse(double p) {
  if (!(p > 0.0) || !(p < 1.0)) {
    throw OutOfDomainError("q_inverse: p must lie in (0, 1)");
  }
  // Work on the small-tail side so the Newton polish below stays well
  // conditioned; 1 - p is exact for p >= 0.5.
  if (p > 0.5) return -q_inverse(1.0 - p);
  // Wichura's PPND16 rational approximation for the standard normal
  // quantile, evaluated at p and negated (Q^{-1}(p) = -Phi^{-1}(p)).
  double x;
  const double q = p - 0.5;
  if (std::abs(q) <= 0.425) {
    const double r = 0.180625 - q * q;
    x = q *
        (((((((2.5090809287301226727e3 * r + 3.3430575583588128105e4) * r +
              6.7265770927008700853e4) *
                 r +
             4.5921953931549871457e4) *
                r +
            1.3731693765509461125e4) *
               r +
           1.9715909503065514427e3) *
              r +
          1.3314166789178437745e2) *
             r +
         3.3871328727963666080e0) /
        (((((((5.2264952788528545610e3 * r + 2.8729085735721942674e4) * r +
              3.9307895800092710610e4) *
                 r +
             2.1213794301586595867e4) *
                r +
            5.3941960214247511077e3) *
               r +
           6.8718700749205790830e2) *
              r +
          4.2313330701600911252e1) *
             r +
         1.0);
  } else {
    double r = (q < 0.0) ? p : 1.0 - p;
    r = std::sqrt(-std::log(r));
    if (r <= 5.0) {
      r -= 1.6;
      x = (((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) *
                    r +
                2.41780725177450611770e-1) *
                   r +
               1.27045825245236838258e0) *
                  r +
              3.64784832476320460504e0) *
                 r +
             5.76949722146069140550e0) *
                r +
            4.63033784615654529590e0) *
               r +
           1.42343711074968357734e0) /
          (((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) *
                    r +
                1.51986665636164571966e-2) *
                   r +
               1.48103976427480074590e-1) *
                  r +
              6.89767334985100004550e-1) *
                 r +
             1.67638483018380384940e0) *
                r +
            2.05319162663775882187e0) *
               r +
           1.0);
    } else {
      r -= 5.0;
      x = (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) *
                    r +
                1.24266094738807843860e-3) *
                   r +
               2.65321895265761230930e-2) *
                  r +
              2.96560571828504891230e-1) *
                 r +
             1.78482653991729133580e0) *
                r +
            5.46378491116411436990e0) *
               r +
           6.65790464350110377720e0) /
          (((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-7) *
                    r +
                1.84631831751005468180e-5) *
                   r +
               7.86869131145613259100e-4) *
                  r +
              1.48753612908506148525e-2) *
                 r +
             1.36929880922735805310e-1) *
                r +
            5.99832206555887937690e-1) *
               r +
           1.0);
    }
    if (q < 0.0) x = -x;
  }
  x = -x;
  // One Newton step on Q(x) - p tightens the rational approximation to
  // machine round-off (dQ/dx = -phi(x)).
  const double phi = std::exp(-0.5 * x * x - kLogSqrt2Pi);
  if (phi > 0.0) {
    x += (q_function(x) - p) / phi;
  }
  return x;
}

double trace_product(const CMatrix& a, const CMatrix& b) {
  if (a.rows() != a.cols() || b.rows() != b.cols() || a.rows() != b.rows()) {
    throw DimMismatchError("trace_product: shape mismatch");
  }
  // tr(AB) = sum_{ij} A_ij B_ji; imaginary residue is round-off for
  // Hermitian inputs and is discarded.
  return a.cwiseProduct(b.transpose()).sum().real();
}

}  // namespace isac
