#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace doa {

using Complex = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;
using RVector = Eigen::VectorXd;
using RMatrix = Eigen::MatrixXd;
using Index   = Eigen::Index;

// Floating-point breakdown inside a recursion (non-positive denominator,
// non-finite result). State passed in by the caller is left untouched.
class NumericalFault : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A quantity the algorithm divides by is exactly zero (e.g. a vanishing
// auxiliary vector). Distinct from NumericalFault: the input is degenerate,
// not the arithmetic.
class DegenerateState : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace doa
