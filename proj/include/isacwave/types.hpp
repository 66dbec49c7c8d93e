// SPDX-License-Identifier: Apache-2.0
//
// types.hpp - shared scalar/matrix aliases and the error taxonomy.

#pragma once

#include <Eigen/Dense>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

namespace isacwave {

using Complex = std::complex<double>;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;
using RMat = Eigen::MatrixXd;
using RVec = Eigen::VectorXd;

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Serialized stand-in for -inf dB (all-zero sidelobe regions).
inline constexpr double kDbFloor = -300.0;

// Invalid experiment description (bad dimensions, bad keys, inconsistent
// grids). CLI exit code 2.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A factor required to be full rank is numerically rank deficient.
// CLI exit code 3.
class RankError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Degenerate numeric input (e.g. an all-zero signal column). CLI exit code 3.
class DegenerateInputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline double amplitude_db(double ratio) {
    return ratio > 0.0 ? std::max(20.0 * std::log10(ratio), kDbFloor) : kDbFloor;
}

inline double power_db(double ratio) {
    return ratio > 0.0 ? std::max(10.0 * std::log10(ratio), kDbFloor) : kDbFloor;
}

} // namespace isacwave
