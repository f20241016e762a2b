#include "dualquad/nftsmc.hpp"

#include <algorithm>
#include <cmath>

namespace dualquad {

void ControlGains::validate() const
{
    auto positive = [](const Vector6d& v) { return v.allFinite() && (v.array() > 0).all(); };
    if (!positive(xi))
        throw InvalidParameter("controller.xi entries must be > 0");
    if (!positive(eta))
        throw InvalidParameter("controller.eta entries must be > 0");
    if (!positive(lambda1))
        throw InvalidParameter("controller.lambda1 entries must be > 0");
    if (!positive(lambda2))
        throw InvalidParameter("controller.lambda2 entries must be > 0");
    if (!(a >= 1.0))
        throw InvalidParameter("controller.a must be >= 1");
    if (!(boundary_layer > 0.0 && boundary_layer < 1.0))
        throw InvalidParameter("controller.Phi must lie in (0, 1)");
    if (!(attitude_filter_hz > 0.0))
        throw InvalidParameter("controller.attitude_filter_hz must be > 0");
    if (!(angle_guard > 0.0 && angle_guard < M_PI / 2))
        throw InvalidParameter("controller.angle_guard must lie in (0, pi/2)");
    if (!(disturbance_bound > 0.0))
        throw InvalidParameter("controller.disturbance_bound must be > 0");
}

double sgn(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

double sgn_pow(double e, double a) { return std::pow(std::abs(e), a) * sgn(e); }

double sgn_pow_rate(double e, double e_dot, double a)
{
    if (a == 1.0)
        return e_dot;
    return a * std::pow(std::abs(e), a - 1.0) * e_dot;
}

double sat(double x) { return std::clamp(x, -1.0, 1.0); }

Vector6d sliding_surface(const TrackingError& err, const ControlGains& gains)
{
    Vector6d S;
    for (int k = 0; k < 6; ++k)
        S[k] = err.e_dot[k] + gains.xi[k] * err.e[k] + gains.eta[k] * sgn_pow(err.e[k], gains.a);
    return S;
}

Vector6d sliding_surface_rate(const TrackingError& err, const Vector6d& e_ddot, const ControlGains& gains)
{
    Vector6d Sd;
    for (int k = 0; k < 6; ++k)
        Sd[k] = e_ddot[k] + gains.xi[k] * err.e_dot[k] + gains.eta[k] * sgn_pow_rate(err.e[k], err.e_dot[k], gains.a);
    return Sd;
}

namespace {

double switch_axis(int k, double S, const ControlGains& gains)
{
    const double sw = gains.mode == SwitchMode::Sign ? sgn(S) : sat(S / gains.boundary_layer);
    return gains.lambda1[k] * S + gains.lambda2[k] * sw;
}

// (xi + eta a |e|^(a-1)) e_dot + lambda1 S + lambda2 switch(S), for a single axis.
double reaching_law(int k, double e, double e_dot, const ControlGains& gains)
{
    const double S = e_dot + gains.xi[k] * e + gains.eta[k] * sgn_pow(e, gains.a);
    return gains.xi[k] * e_dot + gains.eta[k] * sgn_pow_rate(e, e_dot, gains.a) + switch_axis(k, S, gains);
}

}  // namespace

Vector6d switch_term(const Vector6d& S, const ControlGains& gains)
{
    Vector6d out;
    for (int k = 0; k < 6; ++k)
        out[k] = switch_axis(k, S[k], gains);
    return out;
}

Vector3d position_virtual_controls(const SystemState& state, const TranslationalReference& ref,
                                   const ControlGains& gains, const SystemParams& params,
                                   const Vector3d& force_estimate)
{
    Vector3d u;
    for (int k = 0; k < 3; ++k) {
        const double e = ref.position[k] - state.position[k];
        const double e_dot = ref.velocity[k] - state.velocity[k];
        u[k] = params.mass * (ref.acceleration[k] + reaching_law(k, e, e_dot, gains))
               + params.linear_drag[k] * state.velocity[k] - force_estimate[k];
    }
    u.z() += params.mass * params.gravity;
    return u;
}

ThrustCommand thrust_command(double u_z, const EulerAngles& att, double angle_guard)
{
    if (std::abs(att.phi) > angle_guard || std::abs(att.theta) > angle_guard)
        throw SingularityError("attitude outside the angle guard");
    ThrustCommand cmd;
    cmd.thrust = u_z / (std::cos(att.phi) * std::cos(att.theta));
    cmd.negative = cmd.thrust < 0.0;
    return cmd;
}

TiltCommand desired_attitude(const Vector3d& u, double yaw_ref)
{
    if (std::abs(u.z()) < 1e-6)
        throw Error("degenerate thrust: |u_z| < 1e-6");
    // With the Z-X-Y order the thrust axis is U1 (s_theta c_psi + s_phi c_theta s_psi,
    // s_theta s_psi - s_phi c_theta c_psi, c_phi c_theta); project onto yaw-aligned axes.
    const double c = std::cos(yaw_ref), s = std::sin(yaw_ref);
    const double along = u.x() * c + u.y() * s;
    const double across = u.x() * s - u.y() * c;
    TiltCommand t;
    t.phi = std::atan(across / u.z());
    t.theta = std::atan(std::cos(t.phi) * along / u.z());
    return t;
}

Vector3d attitude_moments(const SystemState& state, const AttitudeReference& ref, const ControlGains& gains,
                          const SystemParams& params, const Vector3d& torque_estimate)
{
    const Vector3d& J = params.inertia;
    const Vector3d& w = state.body_rates;
    const Vector3d gyro{(J.y() - J.z()) * w.y() * w.z(), (J.z() - J.x()) * w.x() * w.z(),
                        (J.x() - J.y()) * w.x() * w.y()};
    const Vector3d angles = state.attitude.vector();

    Vector3d U;
    for (int j = 0; j < 3; ++j) {
        const int k = kRoll + j;
        const double e = ref.angles[j] - angles[j];
        const double e_dot = ref.rates[j] - w[j];
        U[j] = J[j] * (ref.accelerations[j] + reaching_law(k, e, e_dot, gains)) - gyro[j]
               + params.angular_drag[j] * w[j] - torque_estimate[j];
    }
    return U;
}

double reaching_time_bound(double V0, double lambda1, double lambda2)
{
    if (!(lambda1 > 0 && lambda2 > 0))
        throw InvalidParameter("reaching-time gains must be positive");
    const double gamma = std::sqrt(2.0) * lambda2;
    return std::log(std::abs((2.0 * lambda1 * std::sqrt(std::max(V0, 0.0)) + gamma) / gamma)) / lambda1;
}

AttitudeReferenceFilter::AttitudeReferenceFilter(double cutoff_hz, double dt)
    : omega_(2.0 * M_PI * cutoff_hz)
{
    Eigen::Matrix2d A;
    A << 0.0, 1.0, -omega_ * omega_, -2.0 * omega_;
    const Eigen::Vector2d B(0.0, omega_ * omega_);
    sys_ = InterpolatedLinearSystem<2>::foh(A, B, dt);
}

AttitudeReference AttitudeReferenceFilter::update(const Vector3d& angles)
{
    AttitudeReference ref;
    ref.angles = angles;
    if (!initialized_) {
        for (int j = 0; j < 3; ++j)
            state_[j] = {angles[j], 0.0};
        initialized_ = true;
        last_input_ = angles;
        return ref;
    }
    for (int j = 0; j < 3; ++j) {
        state_[j] = sys_.step(state_[j], last_input_[j], angles[j]);
        ref.rates[j] = state_[j][1];
        ref.accelerations[j] = omega_ * omega_ * (angles[j] - state_[j][0]) - 2.0 * omega_ * state_[j][1];
    }
    last_input_ = angles;
    return ref;
}

TrackingError tracking_error(const SystemState& state, const TranslationalReference& pos,
                             const AttitudeReference& att)
{
    TrackingError err;
    err.e.head<3>() = pos.position - state.position;
    err.e_dot.head<3>() = pos.velocity - state.velocity;
    err.e.tail<3>() = att.angles - state.attitude.vector();
    err.e_dot.tail<3>() = att.rates - state.body_rates;
    return err;
}

NftsmController::NftsmController(ControlGains gains, SystemParams params, double dt)
    : gains_(std::move(gains)), params_(std::move(params)),
      filter_((gains_.validate(), gains_.attitude_filter_hz), dt)
{
    params_.validate();
}

ControlOutput NftsmController::compute(const SystemState& state, const TranslationalReference& ref)
{
    ControlOutput out;
    out.virtual_force = position_virtual_controls(state, ref, gains_, params_);
    const TiltCommand tilt = desired_attitude(out.virtual_force, gains_.yaw_ref);
    out.attitude_ref = filter_.update({tilt.phi, tilt.theta, gains_.yaw_ref});

    const ThrustCommand thrust = thrust_command(out.virtual_force.z(), state.attitude, gains_.angle_guard);
    out.thrust = thrust.thrust;
    out.negative_thrust = thrust.negative;
    out.moments = attitude_moments(state, out.attitude_ref, gains_, params_);

    out.chi_d << ref.position, out.attitude_ref.angles;
    out.S = sliding_surface(tracking_error(state, ref, out.attitude_ref), gains_);
    return out;
}

}  // namespace dualquad
