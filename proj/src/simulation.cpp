#include "dualquad/simulation.hpp"

#include "dualquad/integrator.hpp"

#include <cmath>

namespace dualquad {

void ForceProfile::validate() const
{
    if (!(sigma > 0))
        throw InvalidParameter("force profile sigma must be > 0");
    if (std::abs(direction.norm() - 1.0) > 1e-9)
        throw InvalidParameter("force profile direction must be a unit vector");
    if (!std::isfinite(t0) || !std::isfinite(amplitude))
        throw InvalidParameter("force profile t0 and amplitude must be finite");
}

Vector3d gaussian_force(double t, const ForceProfile& p)
{
    const double s = (t - p.t0) / p.sigma;
    return p.amplitude * std::exp(-0.5 * s * s) * p.direction;
}

Disturbance DisturbanceEvent::at(double t) const
{
    double scale = 0.0;
    switch (kind) {
    case DisturbanceKind::Constant:
        scale = 1.0;
        break;
    case DisturbanceKind::Step:
        scale = (t >= t0 && t < t1) ? 1.0 : 0.0;
        break;
    case DisturbanceKind::Sinusoid:
        scale = (t >= t0 && t < t1) ? std::sin(2.0 * M_PI * frequency * (t - t0)) : 0.0;
        break;
    }
    return {scale * force, scale * torque};
}

Disturbance total_disturbance(const std::vector<DisturbanceEvent>& events, double t)
{
    Disturbance d;
    for (const auto& e : events) {
        const Disturbance di = e.at(t);
        d.force += di.force;
        d.torque += di.torque;
    }
    return d;
}

void ScenarioConfig::validate() const
{
    system.validate();
    controller.validate();
    admittance.validate();
    if (!(sim.dt >= 1e-4 && sim.dt <= 1e-2))
        throw InvalidParameter("sim.dt must lie in [1e-4, 1e-2]");
    if (!(sim.duration > 0))
        throw InvalidParameter("sim.duration must be > 0");
    if (!sim.initial.finite())
        throw InvalidParameter("sim.initial must be finite");
    for (const auto& f : forces)
        f.validate();
    for (const auto* ramp : {&sim.takeoff, &sim.landing})
        if (*ramp && !((*ramp)->t1 > (*ramp)->t0))
            throw InvalidParameter("altitude ramp needs t1 > t0");
    build_cost_matrix(allocation.costs);
    double peak = 0.0;
    for (const auto& d : disturbances) {
        Vector6d w;
        w << d.force, d.torque;
        peak += w.norm();
    }
    if (peak > controller.disturbance_bound)
        throw InvalidParameter("disturbances can reach " + std::to_string(peak)
                               + ", above controller.disturbance_bound");
}

std::size_t ScenarioConfig::record_count() const
{
    return static_cast<std::size_t>(std::floor(sim.duration / sim.dt + 1e-9)) + 1;
}

Simulation::Simulation(ScenarioConfig cfg)
    : cfg_((cfg.validate(), std::move(cfg))),
      controller_(cfg_.controller, cfg_.system, cfg_.sim.dt),
      admittance_(cfg_.admittance, cfg_.sim.dt),
      allocator_(cfg_.system.d1, cfg_.system.d2, cfg_.allocation.costs),
      state_(cfg_.sim.initial),
      adm_state_(AdmittanceState::at(cfg_.sim.reference.value_or(cfg_.sim.initial.position)))
{
}

namespace {

struct RampPoint {
    double z, vz, az;
};

RampPoint ramp_at(const AltitudeRamp& r, double z0, double t)
{
    const double T = r.t1 - r.t0;
    const double s = std::clamp((t - r.t0) / T, 0.0, 1.0);
    const double dz = r.target - z0;
    if (s >= 1.0)
        return {r.target, 0.0, 0.0};
    return {z0 + 0.5 * dz * (1.0 - std::cos(M_PI * s)), 0.5 * dz * M_PI / T * std::sin(M_PI * s),
            0.5 * dz * M_PI * M_PI / (T * T) * std::cos(M_PI * s)};
}

}  // namespace

TranslationalReference Simulation::reference_at(double t)
{
    auto apply_ramp = [&](const std::optional<AltitudeRamp>& ramp, RampProgress& progress) {
        if (!ramp || progress.done || t < ramp->t0)
            return;
        if (!progress.start)
            progress.start = adm_state_.position.z();
        const RampPoint p = ramp_at(*ramp, *progress.start, t);
        adm_state_.position.z() = p.z;
        adm_state_.velocity.z() = p.vz;
        adm_state_.acceleration.z() = p.az;
        adm_state_.hold.z() = p.z;
        progress.done = t >= ramp->t1;
    };
    apply_ramp(cfg_.sim.takeoff, takeoff_);
    apply_ramp(cfg_.sim.landing, landing_);
    return {adm_state_.position, adm_state_.velocity, adm_state_.acceleration};
}

TelemetryRecord Simulation::step(const Vector3d& live_force)
{
    const double t = time();
    const double dt = cfg_.sim.dt;

    TelemetryRecord rec;
    rec.t = t;
    rec.state = state_;

    Vector3d scripted = Vector3d::Zero();
    for (const auto& f : cfg_.forces)
        scripted += gaussian_force(t, f);
    rec.force = scripted + live_force;
    const Vector3d gated = gate_force(rec.force, cfg_.admittance.force_threshold);
    rec.gated = rec.force.norm() > cfg_.admittance.force_threshold;

    const TranslationalReference ref = reference_at(t);

    ControlOutput ctl;
    try {
        ctl = controller_.compute(state_, ref);
    } catch (const Error& e) {
        throw SimulationAbort(std::string("control failure at t=") + std::to_string(t) + ": " + e.what());
    }
    rec.chi_d = ctl.chi_d;
    rec.S = ctl.S;
    rec.V = lyapunov(ctl.S);

    if (cfg_.sim.landing && t >= cfg_.sim.landing->t1 && state_.position.z() < cfg_.sim.landed_altitude)
        landed_ = true;
    if (!landed_)
        rec.U << ctl.thrust, ctl.moments;

    rec.u_q = allocator_.allocate(rec.U[0], rec.U.tail<3>());
    for (int i = 0; i < 2; ++i) {
        const RotorThrusts f =
            quad_mixer_inverse(rec.u_q.segment<4>(4 * i), cfg_.quad.arm_length, cfg_.quad.moment_ratio());
        rec.rotor_thrust.segment<4>(4 * i) = f.clamped;
        rec.rotor_speed.segment<4>(4 * i) = rotor_speeds(f.clamped, cfg_.quad.thrust_coeff);
        rec.clamped = rec.clamped || f.saturated;
    }

    // Reference advances with the force sampled at t; the plant with the held wrench.
    adm_state_ = admittance_.step(adm_state_, gated);
    const HoldResult hold = hold_reset(adm_state_, rec.gated, cfg_.admittance);
    adm_state_ = hold.state;
    hold_resets_ += hold.fired ? 1 : 0;

    if (landed_) {
        state_.position.z() = 0.0;
        state_.velocity.setZero();
        state_.body_rates.setZero();
    } else {
        const double thrust = rec.U[0];
        const Vector3d moments = rec.U.tail<3>();
        auto f = [&](double tau, const SystemState::Packed& x) -> SystemState::Packed {
            return system_derivative(SystemState::unpack(x), thrust, moments,
                                     total_disturbance(cfg_.disturbances, tau), cfg_.system)
                .pack();
        };
        SystemState next;
        try {
            next = SystemState::unpack(rk4_step(f, t, state_.pack(), dt));
        } catch (const Error& e) {
            throw SimulationAbort(std::string("plant failure at t=") + std::to_string(t) + ": " + e.what(), rec);
        }
        if (!next.finite())
            throw SimulationAbort("non-finite state at t=" + std::to_string(t + dt), rec);
        const double guard = cfg_.controller.angle_guard;
        if (std::abs(next.attitude.phi) > guard || std::abs(next.attitude.theta) > guard)
            throw SimulationAbort("angle guard exceeded at t=" + std::to_string(t + dt), rec);
        if (cfg_.sim.ground_clamp && next.position.z() < 0.0) {
            next.position.z() = 0.0;
            next.velocity.z() = std::max(next.velocity.z(), 0.0);
        }
        state_ = next;
    }
    ++index_;
    return rec;
}

RunResult run_scenario(const ScenarioConfig& cfg, const LiveForceSource& live)
{
    RunResult result;
    RunSummary& sum = result.summary;
    sum.dt = cfg.sim.dt;
    sum.duration = cfg.sim.duration;
    sum.inertia_deviation = cfg.parallel_axis_inertia.isZero()
                                ? Vector3d::Zero()
                                : Vector3d((cfg.system.inertia - cfg.parallel_axis_inertia)
                                               .cwiseQuotient(cfg.system.inertia));

    Simulation sim(cfg);
    const std::size_t n = cfg.record_count();
    result.records.reserve(n);
    try {
        for (std::size_t k = 0; k < n; ++k) {
            const Vector3d live_force = live ? live(sim.time(), k) : Vector3d::Zero();
            result.records.push_back(sim.step(live_force));
        }
    } catch (const SimulationAbort& e) {
        sum.status = "aborted";
        sum.message = e.what();
        if (e.last_record)
            result.records.push_back(*e.last_record);
    }

    sum.steps = result.records.size();
    sum.hold_resets = sim.hold_resets();
    for (const auto& r : result.records) {
        sum.max_abs_S = sum.max_abs_S.cwiseMax(r.S.cwiseAbs());
        sum.clamp_count += r.clamped ? 1 : 0;
        sum.negative_thrust_count += (r.U[0] < 0.0) ? 1 : 0;
    }
    if (!result.records.empty()) {
        const auto& last = result.records.back();
        sum.final_position_error = last.chi_d.head<3>() - last.state.position;
    }
    for (int k = 0; k < 6; ++k)
        sum.reach_time[k] = first_reach_time(result.records, k);
    sum.allocation_residual = max_allocation_residual(result.records, sim.allocator().matrix());
    return result;
}

std::optional<double> first_reach_time(const std::vector<TelemetryRecord>& records, int axis, double tol)
{
    for (std::size_t k = 0; k < records.size(); ++k) {
        const double s = records[k].S[axis];
        if (std::abs(s) <= tol)
            return records[k].t;
        if (k > 0) {
            const double prev = records[k - 1].S[axis];
            if (prev * s < 0.0) {
                const double frac = std::abs(prev) / (std::abs(prev) + std::abs(s));
                return records[k - 1].t + frac * (records[k].t - records[k - 1].t);
            }
        }
    }
    return std::nullopt;
}

double total_variation(const std::vector<TelemetryRecord>& records, int channel)
{
    double tv = 0.0;
    for (std::size_t k = 1; k < records.size(); ++k)
        tv += std::abs(records[k].U[channel] - records[k - 1].U[channel]);
    return tv;
}

double max_allocation_residual(const std::vector<TelemetryRecord>& records, const AllocationMatrix& B)
{
    double worst = 0.0;
    for (const auto& r : records)
        worst = std::max(worst, (B * r.u_q - r.U).cwiseAbs().maxCoeff());
    return worst;
}

}  // namespace dualquad
