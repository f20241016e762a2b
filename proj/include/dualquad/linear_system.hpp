#pragma once

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

namespace dualquad {

/// Exact zero-order-hold discretization of x' = A x + B u for a fixed step.
template <int N>
struct DiscreteLinearSystem {
    Eigen::Matrix<double, N, N> Ad;
    Eigen::Matrix<double, N, 1> Bd;

    static DiscreteLinearSystem zoh(const Eigen::Matrix<double, N, N>& A, const Eigen::Matrix<double, N, 1>& B,
                                    double dt)
    {
        // exp([[A, B], [0, 0]] dt) = [[Ad, Bd], [0, 1]]; works for singular A.
        Eigen::Matrix<double, N + 1, N + 1> aug = Eigen::Matrix<double, N + 1, N + 1>::Zero();
        aug.template topLeftCorner<N, N>() = A * dt;
        aug.template topRightCorner<N, 1>() = B * dt;
        const Eigen::Matrix<double, N + 1, N + 1> e = aug.exp();
        return {e.template topLeftCorner<N, N>(), e.template topRightCorner<N, 1>()};
    }

    Eigen::Matrix<double, N, 1> step(const Eigen::Matrix<double, N, 1>& x, double u) const { return Ad * x + Bd * u; }
};

/// Exact discretization when the input is linearly interpolated between consecutive samples.
template <int N>
struct InterpolatedLinearSystem {
    Eigen::Matrix<double, N, N> Ad;
    Eigen::Matrix<double, N, 1> B0;  // weight of the sample at the start of the step
    Eigen::Matrix<double, N, 1> B1;  // weight of the sample at the end of the step

    static InterpolatedLinearSystem foh(const Eigen::Matrix<double, N, N>& A, const Eigen::Matrix<double, N, 1>& B,
                                        double dt)
    {
        // Augmented state [x, u, u'] with u' constant over the step.
        Eigen::Matrix<double, N + 2, N + 2> aug = Eigen::Matrix<double, N + 2, N + 2>::Zero();
        aug.template topLeftCorner<N, N>() = A * dt;
        aug.template block<N, 1>(0, N) = B * dt;
        aug(N, N + 1) = dt;
        const Eigen::Matrix<double, N + 2, N + 2> e = aug.exp();
        const Eigen::Matrix<double, N, 1> g0 = e.template block<N, 1>(0, N);
        const Eigen::Matrix<double, N, 1> g1 = e.template block<N, 1>(0, N + 1) / dt;
        return {e.template topLeftCorner<N, N>(), g0 - g1, g1};
    }

    Eigen::Matrix<double, N, 1> step(const Eigen::Matrix<double, N, 1>& x, double u0, double u1) const
    {
        return Ad * x + B0 * u0 + B1 * u1;
    }
};

}  // namespace dualquad
