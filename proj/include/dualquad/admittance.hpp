#pragma once

#include "dualquad/linear_system.hpp"
#include "dualquad/types.hpp"

#include <array>

namespace dualquad {

/// Virtual mass-damper-spring parameters (per-axis diagonals).
struct AdmittanceConfig {
    Vector3d mass{1.0, 1.0, 1.0};
    Vector3d damping{1.6, 1.6, 1.6};
    Vector3d stiffness{0.0, 0.0, 0.0};
    double force_threshold = 0.5;  // N, on the force norm
    double hold_speed = 0.02;      // m/s

    void validate() const;
};

/// Reference trajectory produced by the admittance law plus the held set point.
struct AdmittanceState {
    Vector3d position = Vector3d::Zero();
    Vector3d velocity = Vector3d::Zero();
    Vector3d acceleration = Vector3d::Zero();
    Vector3d hold = Vector3d::Zero();
    bool holding = true;

    static AdmittanceState at(const Vector3d& p)
    {
        AdmittanceState s;
        s.position = p;
        s.hold = p;
        return s;
    }
};

/// Returns the force when its norm exceeds the threshold, zero otherwise.
Vector3d gate_force(const Vector3d& force, double threshold);

/// Exact per-axis discretization of M q'' + C q' + K q = F with q = position - hold.
/// The reference moves along the applied force.
class AdmittanceFilter {
public:
    AdmittanceFilter(const AdmittanceConfig& cfg, double dt);

    AdmittanceState step(const AdmittanceState& s, const Vector3d& force) const;

    const AdmittanceConfig& config() const { return cfg_; }
    double dt() const { return dt_; }

private:
    AdmittanceConfig cfg_;
    double dt_;
    std::array<DiscreteLinearSystem<2>, 3> axes_;
};

/// One-shot convenience; builds the discretization on every call.
AdmittanceState admittance_step(const AdmittanceState& s, const Vector3d& force, const AdmittanceConfig& cfg,
                                double dt);

struct HoldResult {
    AdmittanceState state;
    bool fired = false;
};

/// Latches the current reference as the held set point once the gate has closed and the
/// reference speed has dropped below cfg.hold_speed. Fires at most once per push. The reference
/// itself is left untouched; with K = 0 it coasts to rest on its own.
HoldResult hold_reset(const AdmittanceState& s, bool gate_open, const AdmittanceConfig& cfg);

}  // namespace dualquad
