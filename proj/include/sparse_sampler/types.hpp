#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace sparse_sampler {

using Complex = std::complex<double>;

/// Point lists are stored one point per row.
using Points = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

/// Rows = dictionary indices, columns = output coordinates.
using CoefficientBlock = Eigen::MatrixXcd;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A generated set would exceed the configured cardinality cap.
class CapacityError : public Error {
 public:
  using Error::Error;
};

/// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Inconsistent dimensions or shapes.
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// Numerical breakdown: rank deficiency, non-orthonormal input, nonfinite data.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// Rejection sampling could not find points in a domain.
class SamplingError : public Error {
 public:
  using Error::Error;
};

/// Request outside the regime an exact algorithm supports.
class RegimeError : public Error {
 public:
  using Error::Error;
};

class FormatError : public Error {
 public:
  using Error::Error;
};

}  // namespace sparse_sampler
