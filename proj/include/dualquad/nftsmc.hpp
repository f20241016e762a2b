#pragma once

#include "dualquad/dynamics.hpp"
#include "dualquad/linear_system.hpp"
#include "dualquad/types.hpp"

#include <cmath>
#include <limits>
#include <optional>

namespace dualquad {

enum class SwitchMode { Sign, Saturation };

/// Nonsingular fast terminal sliding-mode gains, one entry per axis
/// in [x, y, z, phi, theta, psi] order.
struct ControlGains {
    Vector6d xi = (Vector6d() << 4, 2, 11, 25, 80, 25).finished();
    Vector6d eta = (Vector6d() << 0.2, 0.1, 0.2, 0.2, 0.2, 0.2).finished();
    Vector6d lambda1 = (Vector6d() << 0.2, 0.1, 200, 40, 40, 40).finished();
    Vector6d lambda2 = (Vector6d() << 2, 1, 100, 30, 30, 30).finished();
    double a = 3.0;
    double boundary_layer = 0.5;  // Phi, 0 < Phi < 1
    double yaw_ref = 0.0;
    SwitchMode mode = SwitchMode::Saturation;
    double attitude_filter_hz = 20.0;
    double angle_guard = 80.0 * M_PI / 180.0;
    /// Assumed bound on the lumped disturbance norm; only checked against scripted
    /// disturbances, never used in the control law. Infinite means unchecked.
    double disturbance_bound = std::numeric_limits<double>::infinity();

    /// Throws InvalidParameter on non-positive gains, a < 1, or Phi outside (0, 1).
    void validate() const;
};

double sgn(double x);

/// |e|^a sgn(e)
double sgn_pow(double e, double a);

/// d/dt of sgn_pow along e(t): a |e|^(a-1) e_dot. Returns e_dot at e = 0 when a = 1.
double sgn_pow_rate(double e, double e_dot, double a);

/// Unit saturation clamp(x, -1, 1); the boundary |x| = 1 belongs to the linear branch.
double sat(double x);

struct TrackingError {
    Vector6d e = Vector6d::Zero();
    Vector6d e_dot = Vector6d::Zero();
};

Vector6d sliding_surface(const TrackingError& err, const ControlGains& gains);

/// S_dot under the surface definition: e_ddot + (xi + eta a |e|^(a-1)) e_dot.
Vector6d sliding_surface_rate(const TrackingError& err, const Vector6d& e_ddot, const ControlGains& gains);

/// lambda1 S + lambda2 sgn(S), or lambda1 S + lambda2 sat(S / Phi) in saturation mode.
Vector6d switch_term(const Vector6d& S, const ControlGains& gains);

inline Vector6d lyapunov(const Vector6d& S) { return 0.5 * S.cwiseProduct(S); }

/// Desired translational trajectory (position, velocity, acceleration).
struct TranslationalReference {
    Vector3d position = Vector3d::Zero();
    Vector3d velocity = Vector3d::Zero();
    Vector3d acceleration = Vector3d::Zero();
};

/// Virtual force commands (u_x, u_y, u_z); the total-mass factor is applied to every axis.
Vector3d position_virtual_controls(const SystemState& state, const TranslationalReference& ref,
                                   const ControlGains& gains, const SystemParams& params,
                                   const Vector3d& force_estimate = Vector3d::Zero());

struct ThrustCommand {
    double thrust = 0.0;
    bool negative = false;
};

/// U1 = u_z / (cos(phi) cos(theta)). Throws SingularityError outside the angle guard.
ThrustCommand thrust_command(double u_z, const EulerAngles& att, double angle_guard);

struct TiltCommand {
    double phi = 0.0;
    double theta = 0.0;
};

/// Roll/pitch that point the body z axis along (u_x, u_y, u_z) for a given yaw; exact for the
/// Z-X-Y rotation order, so U1 = u_z / (c_phi c_theta) reproduces u. Throws Error when |u_z| < 1e-6.
TiltCommand desired_attitude(const Vector3d& u, double yaw_ref);

struct AttitudeReference {
    Vector3d angles = Vector3d::Zero();
    Vector3d rates = Vector3d::Zero();
    Vector3d accelerations = Vector3d::Zero();
};

/// Rolling, pitching and yawing moments (U2, U3, U4). Euler rates are taken equal to the
/// body rates inside the law.
Vector3d attitude_moments(const SystemState& state, const AttitudeReference& ref, const ControlGains& gains,
                          const SystemParams& params, const Vector3d& torque_estimate = Vector3d::Zero());

/// Upper bound on the time to reach S = 0 from V(0) = V0.
double reaching_time_bound(double V0, double lambda1, double lambda2);

/// Critically damped second-order filter that differentiates the desired attitude twice.
/// Samples are joined by straight lines, so a ramp yields its exact slope and zero curvature.
class AttitudeReferenceFilter {
public:
    AttitudeReferenceFilter(double cutoff_hz, double dt);

    AttitudeReference update(const Vector3d& angles);
    void reset() { initialized_ = false; }

private:
    InterpolatedLinearSystem<2> sys_;
    double omega_;
    bool initialized_ = false;
    Vector3d last_input_ = Vector3d::Zero();
    Eigen::Matrix<double, 2, 1> state_[3];
};

struct ControlOutput {
    Vector3d virtual_force = Vector3d::Zero();
    AttitudeReference attitude_ref;
    Vector6d chi_d = Vector6d::Zero();
    Vector6d S = Vector6d::Zero();
    double thrust = 0.0;
    Vector3d moments = Vector3d::Zero();
    bool negative_thrust = false;
};

/// Position loop -> desired tilt -> attitude loop. Holds only gains and the reference filter.
class NftsmController {
public:
    NftsmController(ControlGains gains, SystemParams params, double dt);

    ControlOutput compute(const SystemState& state, const TranslationalReference& ref);

    const ControlGains& gains() const { return gains_; }
    void reset() { filter_.reset(); }

private:
    ControlGains gains_;
    SystemParams params_;
    AttitudeReferenceFilter filter_;
};

/// Stacks the six-axis tracking error; attitude rates use the body rates.
TrackingError tracking_error(const SystemState& state, const TranslationalReference& pos,
                             const AttitudeReference& att);

}  // namespace dualquad
