#include "dualquad/dynamics.hpp"

#include <cmath>

namespace dualquad {

SystemState::Packed SystemState::pack() const
{
    Packed x;
    x << position, velocity, attitude.vector(), body_rates;
    return x;
}

SystemState SystemState::unpack(const Packed& x)
{
    SystemState s;
    s.position = x.segment<3>(0);
    s.velocity = x.segment<3>(3);
    s.attitude = EulerAngles::from(x.segment<3>(6));
    s.body_rates = x.segment<3>(9);
    return s;
}

bool SystemState::finite() const { return pack().allFinite(); }

SystemState::Packed StateDerivative::pack() const
{
    SystemState::Packed x;
    x << velocity, acceleration, euler_rate, angular_acceleration;
    return x;
}

void QuadParams::validate() const
{
    if (!(mass > 0 && (inertia.array() > 0).all() && arm_length > 0 && thrust_coeff > 0 && moment_coeff > 0))
        throw InvalidParameter("quadrotor parameters must be strictly positive");
}

void PayloadParams::validate() const
{
    if (!(mass > 0 && (inertia.array() > 0).all() && length > 0 && radius > 0))
        throw InvalidParameter("payload parameters must be strictly positive");
}

void SystemParams::validate() const
{
    if (!(mass > 0))
        throw InvalidParameter("system mass must be positive");
    if (!(inertia.array() > 0).all())
        throw InvalidParameter("system inertia diagonal must be positive");
    if ((linear_drag.array() < 0).any() || (angular_drag.array() < 0).any())
        throw InvalidParameter("drag coefficients must be non-negative");
    if (!(gravity > 0))
        throw InvalidParameter("gravity must be positive");
    if (!d1.allFinite() || !d2.allFinite())
        throw InvalidParameter("CoM offsets must be finite");
}

Matrix3d rotation_matrix(const EulerAngles& att)
{
    const double cf = std::cos(att.phi), sf = std::sin(att.phi);
    const double ct = std::cos(att.theta), st = std::sin(att.theta);
    const double cp = std::cos(att.psi), sp = std::sin(att.psi);
    Matrix3d R;
    R << ct * cp - sf * st * sp, -cf * sp, st * cp + sf * ct * sp,
         ct * sp + sf * st * cp,  cf * cp, st * sp - sf * ct * cp,
         -cf * st,                sf,      cf * ct;
    return R;
}

Matrix3d euler_rate_matrix(const EulerAngles& att)
{
    const double cf = std::cos(att.phi), sf = std::sin(att.phi);
    const double ct = std::cos(att.theta), st = std::sin(att.theta);
    Matrix3d W;
    W << ct, 0.0, -cf * st,
         0.0, 1.0, sf,
         st, 0.0, cf * ct;
    return W;
}

Vector3d body_rate_from_euler_rate(const EulerAngles& att, const Vector3d& euler_rate)
{
    return euler_rate_matrix(att) * euler_rate;
}

Vector3d euler_rate_from_body_rate(const EulerAngles& att, const Vector3d& body_rates)
{
    // W^-1 in closed form; det W = cos(phi).
    const double cf = std::cos(att.phi), sf = std::sin(att.phi);
    const double ct = std::cos(att.theta), st = std::sin(att.theta);
    if (std::abs(cf) < 1e-9)
        throw SingularityError("Euler-rate map is singular (|cos(phi)| < 1e-9)");
    const double p = body_rates.x(), q = body_rates.y(), r = body_rates.z();
    const double psi_dot = (-st * p + ct * r) / cf;
    const double phi_dot = ct * p + st * r;
    const double theta_dot = q - sf * psi_dot;
    return {phi_dot, theta_dot, psi_dot};
}

StateDerivative system_derivative(const SystemState& state, double total_thrust, const Vector3d& moments,
                                  const Disturbance& dist, const SystemParams& params)
{
    const Matrix3d R = rotation_matrix(state.attitude);
    const Vector3d& w = state.body_rates;
    const Vector3d Jw = params.inertia.cwiseProduct(w);

    StateDerivative d;
    d.velocity = state.velocity;
    d.acceleration = (R.col(2) * total_thrust - Vector3d(0.0, 0.0, params.mass * params.gravity)
                      - params.linear_drag.cwiseProduct(state.velocity) + dist.force)
                     / params.mass;
    d.euler_rate = euler_rate_from_body_rate(state.attitude, w);
    d.angular_acceleration =
        (moments - w.cross(Jw) - params.angular_drag.cwiseProduct(w) + dist.torque).cwiseQuotient(params.inertia);
    return d;
}

namespace {

Vector3d parallel_axis_terms(const Vector3d& r)
{
    return {r.y() * r.y() + r.z() * r.z(), r.x() * r.x() + r.z() * r.z(), r.x() * r.x() + r.y() * r.y()};
}

}  // namespace

SystemComposition compose_system_params(const QuadParams& q1, const QuadParams& q2, const PayloadParams& payload,
                                        const Vector3d& d1, const Vector3d& d2,
                                        std::optional<Vector3d> configured_inertia, double gravity)
{
    q1.validate();
    q2.validate();
    if (q1.mass != q2.mass || q1.inertia != q2.inertia || q1.arm_length != q2.arm_length)
        throw InvalidParameter("the two quadrotors must be identical");
    if (!(payload.mass >= 0) || (payload.inertia.array() < 0).any())
        throw InvalidParameter("payload mass and inertia must be non-negative");
    if ((d1 + d2).cwiseAbs().maxCoeff() > 1e-12)
        throw InvalidParameter("asymmetric geometry: d1 must equal -d2");

    SystemComposition out;
    out.params.mass = q1.mass + q2.mass + payload.mass;
    out.params.d1 = d1;
    out.params.d2 = d2;
    out.params.gravity = gravity;

    // Combined CoM relative to the payload CoM, then parallel-axis sum about it.
    const Vector3d com = (q1.mass * d1 + q2.mass * d2) / out.params.mass;
    out.parallel_axis_inertia = payload.inertia + payload.mass * parallel_axis_terms(-com)
                                + q1.inertia + q1.mass * parallel_axis_terms(d1 - com)
                                + q2.inertia + q2.mass * parallel_axis_terms(d2 - com);

    out.params.inertia = configured_inertia.value_or(out.parallel_axis_inertia);
    out.inertia_deviation =
        (out.params.inertia - out.parallel_axis_inertia).cwiseQuotient(out.params.inertia);
    return out;
}

PointMotion rigid_link_kinematics(const PayloadMotion& payload, const Vector3d& body_rates,
                                  const Vector3d& angular_acceleration, const Vector3d& offset)
{
    // Offset and rates live in the body frame; R maps the relative terms to inertial.
    const Matrix3d R = rotation_matrix(payload.attitude);
    const Vector3d w_x_d = body_rates.cross(offset);
    PointMotion m;
    m.position = payload.position + R * offset;
    m.velocity = payload.velocity + R * w_x_d;
    m.acceleration = payload.acceleration + R * (angular_acceleration.cross(offset) + body_rates.cross(w_x_d));
    return m;
}

double mechanical_energy(const SystemState& state, const SystemParams& params)
{
    const double kinetic = 0.5 * params.mass * state.velocity.squaredNorm()
                           + 0.5 * state.body_rates.dot(params.inertia.cwiseProduct(state.body_rates));
    return kinetic + params.mass * params.gravity * state.position.z();
}

}  // namespace dualquad
