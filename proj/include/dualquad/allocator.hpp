#pragma once

#include "dualquad/types.hpp"

#include <span>

namespace dualquad {

using AllocationMatrix = Eigen::Matrix<double, 4, 8>;

/// [F_t, U_t] = B u_q with u_q = [u11, u21, u31, u41, u12, u22, u32, u42].
/// The z-components of the offsets do not enter B.
AllocationMatrix build_allocation_matrix(const Vector3d& d1, const Vector3d& d2);

/// H = diag(sqrt(c)). Throws InvalidParameter unless every c_j > 0.
Eigen::DiagonalMatrix<double, 8> build_cost_matrix(std::span<const double> costs);

/// Weighted minimum-norm split of the total wrench across both quadrotors.
class ControlAllocator {
public:
    ControlAllocator(const Vector3d& d1, const Vector3d& d2, std::span<const double> costs);

    /// u* = H^-2 B^T (B H^-2 B^T)^-1 w, solved by Cholesky on the 4x4 normal matrix.
    Vector8d allocate(double total_thrust, const Vector3d& moments) const;

    const AllocationMatrix& matrix() const { return B_; }
    const Vector8d& weights() const { return H_; }

private:
    AllocationMatrix B_;
    Vector8d H_;          // diagonal of H
    Vector8d inv_cost_;   // diagonal of H^-2
    Eigen::LLT<Eigen::Matrix4d> normal_;
};

/// Forward X-frame mixer: rotor thrusts -> (u1, u2, u3, u4).
Vector4d quad_mixer(const Vector4d& thrusts, double arm_length, double moment_ratio);

struct RotorThrusts {
    Vector4d raw = Vector4d::Zero();      // exact inverse, may be negative
    Vector4d clamped = Vector4d::Zero();  // max(raw, 0)
    bool saturated = false;
};

/// Exact inverse of quad_mixer with non-negativity clamp.
RotorThrusts quad_mixer_inverse(const Vector4d& inputs, double arm_length, double moment_ratio);

/// Omega = sqrt(f / k_t) in rpm. Throws InvalidParameter for negative thrust.
Vector4d rotor_speeds(const Vector4d& thrusts, double thrust_coeff);

}  // namespace dualquad
