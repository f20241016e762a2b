#pragma once

#include "dualquad/types.hpp"

#include <optional>

namespace dualquad {

/// Roll, pitch, yaw in radians. Rotation sequence is Z-X-Y (yaw, then roll, then pitch).
struct EulerAngles {
    double phi = 0.0;
    double theta = 0.0;
    double psi = 0.0;

    Vector3d vector() const { return {phi, theta, psi}; }
    static EulerAngles from(const Vector3d& v) { return {v.x(), v.y(), v.z()}; }
};

/// Pose and twist of the combined rigid body. Velocity is inertial, rates are body-frame.
struct SystemState {
    Vector3d position = Vector3d::Zero();
    Vector3d velocity = Vector3d::Zero();
    EulerAngles attitude;
    Vector3d body_rates = Vector3d::Zero();

    using Packed = Eigen::Matrix<double, 12, 1>;
    Packed pack() const;
    static SystemState unpack(const Packed& x);
    bool finite() const;
};

struct QuadParams {
    double mass = 1.5;
    Vector3d inertia{2.9125e-2, 2.9125e-2, 5.5225e-2};
    double arm_length = 0.25;
    double thrust_coeff = 8.54858e-06;   // N/rpm^2
    double moment_coeff = 1.367773e-07;  // N.m/rpm^2

    double moment_ratio() const { return moment_coeff / thrust_coeff; }
    void validate() const;
};

/// Uniform circular-section beam.
struct PayloadParams {
    double mass = 0.5;
    Vector3d inertia{16.6667e-2, 6.25e-4, 16.6667e-2};
    double length = 2.0;
    double radius = 0.05;

    void validate() const;
};

struct SystemParams {
    double mass = 3.5;
    Vector3d inertia{3.227327, 0.061286, 3.277117};
    Vector3d d1{0.0, 1.0, 0.0};
    Vector3d d2{0.0, -1.0, 0.0};
    Vector3d linear_drag{6e-3, 6e-3, 6e-3};
    Vector3d angular_drag{6e-3, 6e-3, 6e-3};
    double gravity = 9.81;

    void validate() const;
};

struct Disturbance {
    Vector3d force = Vector3d::Zero();
    Vector3d torque = Vector3d::Zero();
};

Matrix3d rotation_matrix(const EulerAngles& att);

/// Matrix W with omega = W * d(Theta)/dt. det W = cos(phi).
Matrix3d euler_rate_matrix(const EulerAngles& att);

Vector3d body_rate_from_euler_rate(const EulerAngles& att, const Vector3d& euler_rate);

/// Throws SingularityError when |det W| < 1e-9.
Vector3d euler_rate_from_body_rate(const EulerAngles& att, const Vector3d& body_rates);

struct StateDerivative {
    Vector3d velocity;
    Vector3d acceleration;
    Vector3d euler_rate;
    Vector3d angular_acceleration;

    SystemState::Packed pack() const;
};

/// Combined-body equations of motion with linear drag and additive disturbances.
/// Attitude kinematics use the full Euler-rate map, not the small-angle shortcut.
StateDerivative system_derivative(const SystemState& state, double total_thrust, const Vector3d& moments,
                                  const Disturbance& dist, const SystemParams& params);

struct SystemComposition {
    SystemParams params;
    Vector3d parallel_axis_inertia;  // cross-check only
    Vector3d inertia_deviation;      // (configured - parallel_axis) / configured
};

/// Builds SystemParams from component records. The configured inertia wins when given;
/// otherwise the parallel-axis estimate about the combined CoM is used.
/// Throws InvalidParameter if the quadrotors differ or d1 != -d2.
SystemComposition compose_system_params(const QuadParams& q1, const QuadParams& q2, const PayloadParams& payload,
                                        const Vector3d& d1, const Vector3d& d2,
                                        std::optional<Vector3d> configured_inertia, double gravity = 9.81);

struct PayloadMotion {
    Vector3d position = Vector3d::Zero();
    Vector3d velocity = Vector3d::Zero();
    Vector3d acceleration = Vector3d::Zero();
    EulerAngles attitude;
};

struct PointMotion {
    Vector3d position;
    Vector3d velocity;
    Vector3d acceleration;
};

/// Motion of a point rigidly attached at body-frame offset d from the payload CoM.
PointMotion rigid_link_kinematics(const PayloadMotion& payload, const Vector3d& body_rates,
                                  const Vector3d& angular_acceleration, const Vector3d& offset);

/// Translational kinetic + rotational kinetic + gravitational potential energy.
double mechanical_energy(const SystemState& state, const SystemParams& params);

}  // namespace dualquad
