#ifndef SGFL_TYPES_HPP
#define SGFL_TYPES_HPP

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace sgfl {

using cplx = std::complex<double>;

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;

/// Raised for violated preconditions and invalid inputs.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised when a numerical procedure cannot produce a valid result
/// (non-convergence, loss of positive semidefiniteness, singular systems).
class NumericalError : public Error {
 public:
  using Error::Error;
};

}  // namespace sgfl

#endif  // SGFL_TYPES_HPP
