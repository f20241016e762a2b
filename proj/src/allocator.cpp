#include "dualquad/allocator.hpp"

#include <cmath>

namespace dualquad {

AllocationMatrix build_allocation_matrix(const Vector3d& d1, const Vector3d& d2)
{
    AllocationMatrix B = AllocationMatrix::Zero();
    const Vector3d* offsets[2] = {&d1, &d2};
    for (int i = 0; i < 2; ++i) {
        auto block = B.block<4, 4>(0, 4 * i);
        block.setIdentity();
        block(1, 0) = (*offsets[i])[1];
        block(2, 0) = -(*offsets[i])[0];
    }
    return B;
}

Eigen::DiagonalMatrix<double, 8> build_cost_matrix(std::span<const double> costs)
{
    if (costs.size() != 8)
        throw InvalidParameter("allocation.costs needs exactly 8 coefficients");
    Vector8d h;
    for (int j = 0; j < 8; ++j) {
        if (!(costs[j] > 0.0) || !std::isfinite(costs[j]))
            throw InvalidParameter("allocation.costs entries must be > 0");
        h[j] = std::sqrt(costs[j]);
    }
    return Eigen::DiagonalMatrix<double, 8>(h);
}

ControlAllocator::ControlAllocator(const Vector3d& d1, const Vector3d& d2, std::span<const double> costs)
    : B_(build_allocation_matrix(d1, d2)), H_(build_cost_matrix(costs).diagonal())
{
    inv_cost_ = H_.cwiseProduct(H_).cwiseInverse();
    const Eigen::Matrix4d N = B_ * inv_cost_.asDiagonal() * B_.transpose();
    normal_.compute(N);
    if (normal_.info() != Eigen::Success)
        throw Error("allocation normal matrix B H^-2 B^T is singular");
    const Vector4d d = Eigen::Matrix4d(normal_.matrixL()).diagonal();
    if (d.cwiseAbs().minCoeff() < 1e-9 * d.cwiseAbs().maxCoeff())
        throw Error("allocation normal matrix B H^-2 B^T is singular");
}

Vector8d ControlAllocator::allocate(double total_thrust, const Vector3d& moments) const
{
    Vector4d w;
    w << total_thrust, moments;
    return inv_cost_.asDiagonal() * (B_.transpose() * normal_.solve(w));
}

Vector4d quad_mixer(const Vector4d& f, double l, double mu)
{
    return {f.sum(), l * (f[1] - f[3]), l * (f[2] - f[0]), mu * (f[0] - f[1] + f[2] - f[3])};
}

RotorThrusts quad_mixer_inverse(const Vector4d& u, double l, double mu)
{
    if (!(l > 0.0) || !(mu > 0.0))
        throw InvalidParameter("mixer needs arm length and moment ratio > 0");
    // Rotors 1,3 and 2,4 spin in opposite senses.
    const double s13 = 0.5 * (u[0] + u[3] / mu);
    const double s24 = 0.5 * (u[0] - u[3] / mu);
    RotorThrusts out;
    out.raw << 0.5 * (s13 - u[2] / l), 0.5 * (s24 + u[1] / l), 0.5 * (s13 + u[2] / l), 0.5 * (s24 - u[1] / l);
    out.clamped = out.raw.cwiseMax(0.0);
    out.saturated = (out.raw.array() < 0.0).any();
    return out;
}

Vector4d rotor_speeds(const Vector4d& thrusts, double thrust_coeff)
{
    if (!(thrust_coeff > 0.0))
        throw InvalidParameter("k_t must be > 0");
    if ((thrusts.array() < 0.0).any())
        throw InvalidParameter("rotor thrust must be non-negative");
    return (thrusts / thrust_coeff).cwiseSqrt();
}

}  // namespace dualquad
