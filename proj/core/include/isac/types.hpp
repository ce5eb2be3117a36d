#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace isac {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;

/// Base class for all library errors.
struct Error : std::runtime_error {
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// A covariance input has an eigenvalue below the negative tolerance.
struct NotPsdError : Error {
  using Error::Error;
};

/// A matrix that must be invertible is singular or too ill-conditioned.
struct SingularError : Error {
  using Error::Error;
};

struct DimMismatchError : Error {
  using Error::Error;
};

struct OutOfDomainError : Error {
  using Error::Error;
};

/// A constrained subproblem has an empty (or numerically empty) feasible set.
struct InfeasibleError : Error {
  using Error::Error;
};

struct MaxIterError : Error {
  using Error::Error;
};

/// An estimated channel vector (or its covariance trace) is exactly zero.
struct DegenerateChannelError : Error {
  using Error::Error;
};

/// Stacked channel-estimate matrix lost column rank (ZF collapse regime).
struct RankDeficientError : Error {
  using Error::Error;
};

/// Fewer pilot symbols than users; orthogonal pilots cannot be built.
struct PilotShortageError : Error {
  using Error::Error;
};

struct IoError : Error {
  using Error::Error;
};

}  // namespace isac
