#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace dualquad {

using Eigen::Matrix3d;
using Eigen::Vector3d;
using Eigen::Vector4d;
using Vector6d = Eigen::Matrix<double, 6, 1>;
using Vector8d = Eigen::Matrix<double, 8, 1>;

// Indices into the stacked [x, y, z, phi, theta, psi] error/surface vectors.
enum Axis : int { kX = 0, kY, kZ, kRoll, kPitch, kYaw };

inline constexpr const char* kAxisNames[6] = {"x", "y", "z", "phi", "theta", "psi"};

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Raised when an attitude-dependent map is evaluated too close to its singularity.
class SingularityError : public Error {
public:
    using Error::Error;
};

class InvalidParameter : public Error {
public:
    using Error::Error;
};

}  // namespace dualquad
