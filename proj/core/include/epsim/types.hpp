#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace epsim {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;
using RealMatrix = Eigen::MatrixXd;

// Error hierarchy; the command line tool maps these onto exit codes.
struct Error : std::runtime_error {
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Bad inputs: malformed specs, out-of-domain parameters, violated preconditions.
struct ValidationError : Error {
  explicit ValidationError(const std::string& what) : Error(what) {}
};

// Numeric failure: non-finite results, overflow, impossible post-selection.
struct NumericError : Error {
  explicit NumericError(const std::string& what) : Error(what) {}
};

// Post-selection norm below the representable threshold.
struct UnderflowError : NumericError {
  explicit UnderflowError(const std::string& what) : NumericError(what) {}
};

// Requested problem size exceeds the configured dimension cap.
struct CapacityError : Error {
  explicit CapacityError(const std::string& what) : Error(what) {}
};

}  // namespace epsim
