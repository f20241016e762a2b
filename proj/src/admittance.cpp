#include "dualquad/admittance.hpp"

namespace dualquad {

void AdmittanceConfig::validate() const
{
    if (!(mass.array() > 0).all())
        throw InvalidParameter("admittance.M entries must be > 0");
    if (!(damping.array() > 0).all())
        throw InvalidParameter("admittance.C entries must be > 0");
    if (!(stiffness.array() >= 0).all())
        throw InvalidParameter("admittance.K entries must be >= 0");
    if (!(force_threshold >= 0))
        throw InvalidParameter("admittance.threshold must be >= 0");
    if (!(hold_speed > 0))
        throw InvalidParameter("admittance.hold_speed must be > 0");
}

Vector3d gate_force(const Vector3d& force, double threshold)
{
    return force.norm() > threshold ? force : Vector3d::Zero();
}

AdmittanceFilter::AdmittanceFilter(const AdmittanceConfig& cfg, double dt) : cfg_(cfg), dt_(dt)
{
    cfg_.validate();
    if (!(dt > 0))
        throw InvalidParameter("admittance step needs dt > 0");
    for (int k = 0; k < 3; ++k) {
        Eigen::Matrix2d A;
        A << 0.0, 1.0, -cfg.stiffness[k] / cfg.mass[k], -cfg.damping[k] / cfg.mass[k];
        axes_[k] = DiscreteLinearSystem<2>::zoh(A, Eigen::Vector2d(0.0, 1.0 / cfg.mass[k]), dt);
    }
}

AdmittanceState AdmittanceFilter::step(const AdmittanceState& s, const Vector3d& force) const
{
    AdmittanceState next = s;
    for (int k = 0; k < 3; ++k) {
        const Eigen::Vector2d x = axes_[k].step({s.position[k] - s.hold[k], s.velocity[k]}, force[k]);
        next.position[k] = s.hold[k] + x[0];
        next.velocity[k] = x[1];
        next.acceleration[k] = (force[k] - cfg_.damping[k] * x[1] - cfg_.stiffness[k] * x[0]) / cfg_.mass[k];
    }
    return next;
}

AdmittanceState admittance_step(const AdmittanceState& s, const Vector3d& force, const AdmittanceConfig& cfg,
                                double dt)
{
    return AdmittanceFilter(cfg, dt).step(s, force);
}

HoldResult hold_reset(const AdmittanceState& s, bool gate_open, const AdmittanceConfig& cfg)
{
    HoldResult r{s, false};
    if (gate_open) {
        r.state.holding = false;
        return r;
    }
    if (!s.holding && s.velocity.norm() < cfg.hold_speed) {
        r.state.hold = s.position;
        r.state.holding = true;
        r.fired = true;
    }
    return r;
}

}  // namespace dualquad
