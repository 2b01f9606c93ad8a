#pragma once

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace splitprec {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;

// Error hierarchy. The CLI maps ConfigError to exit code 2 and BudgetError to
// exit code 3; everything else is a generic failure.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

// A solver instance exceeds the exact-search budget guard.
class BudgetError : public Error {
 public:
  using Error::Error;
};

// Input has no usable structure (zero rows, rank deficiency, empty samples).
class DegenerateError : public Error {
 public:
  using Error::Error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

// Cholesky of the ILS Gram matrix failed.
class NotPositiveDefiniteError : public Error {
 public:
  using Error::Error;
};

// Selects between the serial reference path and the OpenMP kernel.
enum class Execution { serial, parallel };

}  // namespace splitprec
