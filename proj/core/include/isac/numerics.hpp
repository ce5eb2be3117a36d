#pragma once

#include "isac/rng.hpp"
#include "isac/types.hpp"

namespace isac {

/// Hermitian symmetry check: max |A - A^H| elementwise against `tol`.
bool is_hermitian(const CMatrix& a, double tol = 1e-12);

/// (A + A^H) / 2 — cheap cleanup after products that are Hermitian in
/// exact arithmetic.
CMatrix hermitize(const CMatrix& a);

/// Smallest eigenvalue must satisfy lambda_min >= -tol * max|lambda|.
bool is_psd(const CMatrix& a, double tol = 1e-10);

/// Factor F with F F^H = cov for a Hermitian PSD matrix.
///
/// Fast path is a Cholesky factorization; on failure (the echo covariances
/// are exactly rank one, so singular inputs are the normal case) the factor
/// is built from the eigendecomposition with eigenvalues below zero clamped.
/// Throws NotPsdError when an eigenvalue is below -tol * max|lambda|.
CMatrix psd_sqrt_factor(const CMatrix& cov, double tol = 1e-10);

/// One draw from CN(0, cov). Exactly rank-deficient covariances give
/// exactly zero components in the null directions.
CVector sample_complex_gaussian(const CMatrix& cov, SeededRng& rng);

/// Solve A X = B for Hermitian positive definite A via Cholesky, retrying
/// with a diagonal jitter of 1e-12 * tr(A)/dim at most three times.
/// Throws SingularError if the factorization never succeeds.
CMatrix hermitian_solve(const CMatrix& a, const CMatrix& b);

struct GevResult {
  CVector vec;   // unit 2-norm, first nonzero entry real and >= 0
  double value;  // achieved quotient x^H A x / x^H B x
};

/// Unit-norm maximizer of the generalized Rayleigh quotient
/// x^H A x / x^H B x, i.e. the dominant eigenvector of B^{-1} A.
///
/// Computed by Cholesky whitening of B so the reduced problem stays
/// Hermitian. Throws SingularError when B is not positive definite or its
/// condition number exceeds 1e14.
GevResult dominant_generalized_eigvec(const CMatrix& a, const CMatrix& b);

/// Right tail of the standard normal, Q(x) = 0.5 erfc(x / sqrt(2)).
///
/// For x > 35 the value is evaluated through log_q_function so deep-tail
/// arguments stay meaningful; when the true value underflows double
/// precision the smallest positive denormal is returned instead of 0, so
/// Q(x) > 0 for every finite x.
double q_function(double x);

/// ln Q(x) for x > 0, usable far beyond the underflow point of Q itself.
double log_q_function(double x);

/// Inverse of q_function on (0, 1). Monotone decreasing;
/// |Q(q_inverse(p)) - p| <= 1e-12 relative for p in [1e-9, 1 - 1e-9].
/// Throws OutOfDomainError outside (0, 1).
double q_inverse(double p);

/// Re tr(A B) for Hermitian A, B of matching dimension.
/// Throws DimMismatchError on shape disagreement.
double trace_product(const CMatrix& a, const CMatrix& b);

}  // namespace isac
