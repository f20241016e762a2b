#pragma once

#include "dualquad/admittance.hpp"
#include "dualquad/allocator.hpp"
#include "dualquad/dynamics.hpp"
#include "dualquad/nftsmc.hpp"

#include <array>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace dualquad {

/// Gaussian push: amplitude * exp(-(t - t0)^2 / (2 sigma^2)) * direction.
struct ForceProfile {
    double t0 = 0.0;
    double sigma = 1.0;
    double amplitude = 0.0;
    Vector3d direction = Vector3d::UnitX();

    void validate() const;
};

Vector3d gaussian_force(double t, const ForceProfile& profile);

enum class DisturbanceKind { Constant, Step, Sinusoid };

/// Scripted external wrench. Constant is always on; step is on for t in [t0, t1);
/// sinusoid scales the amplitudes by sin(2 pi f (t - t0)) on [t0, t1).
struct DisturbanceEvent {
    DisturbanceKind kind = DisturbanceKind::Constant;
    Vector3d force = Vector3d::Zero();
    Vector3d torque = Vector3d::Zero();
    double t0 = 0.0;
    double t1 = std::numeric_limits<double>::infinity();
    double frequency = 0.0;

    Disturbance at(double t) const;
};

Disturbance total_disturbance(const std::vector<DisturbanceEvent>& events, double t);

/// Smooth altitude-reference ramp (half-cosine) from the altitude at t0 to `target` at t1.
struct AltitudeRamp {
    double t0 = 0.0;
    double t1 = 1.0;
    double target = 0.0;
};

struct SimSettings {
    double duration = 10.0;
    double dt = 1e-3;
    SystemState initial;
    std::optional<Vector3d> reference;  // initial admittance reference; defaults to initial position
    std::optional<AltitudeRamp> takeoff;
    std::optional<AltitudeRamp> landing;
    bool ground_clamp = true;
    double landed_altitude = 0.02;
};

struct AllocationConfig {
    std::array<double, 8> costs{1, 1, 1, 1, 1, 1, 1, 1};
};

struct ScenarioConfig {
    SystemParams system;
    QuadParams quad;
    PayloadParams payload;
    Vector3d parallel_axis_inertia = Vector3d::Zero();
    ControlGains controller;
    AdmittanceConfig admittance;
    AllocationConfig allocation;
    std::vector<ForceProfile> forces;
    std::vector<DisturbanceEvent> disturbances;
    SimSettings sim;

    /// Throws InvalidParameter with the offending section.
    void validate() const;

    /// Number of recorded samples for a headless run: floor(duration / dt) + 1.
    std::size_t record_count() const;
};

struct TelemetryRecord {
    double t = 0.0;
    SystemState state;
    Vector6d chi_d = Vector6d::Zero();
    Vector6d S = Vector6d::Zero();
    Vector6d V = Vector6d::Zero();
    Vector4d U = Vector4d::Zero();
    Vector8d u_q = Vector8d::Zero();
    Vector8d rotor_thrust = Vector8d::Zero();
    Vector8d rotor_speed = Vector8d::Zero();
    Vector3d force = Vector3d::Zero();
    bool gated = false;
    bool clamped = false;
};

class SimulationAbort : public Error {
public:
    explicit SimulationAbort(const std::string& what, std::optional<TelemetryRecord> last = std::nullopt)
        : Error(what), last_record(std::move(last))
    {
    }

    /// Record of the step whose integration failed, when its control was computed.
    std::optional<TelemetryRecord> last_record;
};

/// Single-rate closed loop: admittance -> position -> attitude -> allocation -> plant.
class Simulation {
public:
    explicit Simulation(ScenarioConfig cfg);

    /// Computes the control at the current time, returns its record and advances the plant
    /// by one step. Throws SimulationAbort on guard violation or non-finite state.
    TelemetryRecord step(const Vector3d& live_force = Vector3d::Zero());

    double time() const { return static_cast<double>(index_) * cfg_.sim.dt; }
    std::size_t index() const { return index_; }
    const SystemState& state() const { return state_; }
    const AdmittanceState& reference() const { return adm_state_; }
    const ScenarioConfig& config() const { return cfg_; }
    const ControlAllocator& allocator() const { return allocator_; }
    std::size_t hold_resets() const { return hold_resets_; }
    bool landed() const { return landed_; }

private:
    TranslationalReference reference_at(double t);

    ScenarioConfig cfg_;
    NftsmController controller_;
    AdmittanceFilter admittance_;
    ControlAllocator allocator_;
    SystemState state_;
    AdmittanceState adm_state_;
    std::size_t index_ = 0;
    std::size_t hold_resets_ = 0;
    bool landed_ = false;
    struct RampProgress {
        std::optional<double> start;
        bool done = false;
    };
    RampProgress takeoff_;
    RampProgress landing_;
};

struct RunSummary {
    std::string status = "ok";
    std::string message;
    double dt = 0.0;
    double duration = 0.0;
    std::size_t steps = 0;
    Vector3d final_position_error = Vector3d::Zero();
    Vector6d max_abs_S = Vector6d::Zero();
    std::array<std::optional<double>, 6> reach_time;
    std::size_t clamp_count = 0;
    std::size_t negative_thrust_count = 0;
    std::size_t hold_resets = 0;
    double allocation_residual = 0.0;
    Vector3d inertia_deviation = Vector3d::Zero();
};

struct RunResult {
    std::vector<TelemetryRecord> records;
    RunSummary summary;
    bool ok() const { return summary.status == "ok"; }
};

/// Live input sampled once per step; returns the force to add to the scripted profile.
using LiveForceSource = std::function<Vector3d(double t, std::size_t step)>;

/// Deterministic headless run. Aborts stop the run and keep the records collected so far.
RunResult run_scenario(const ScenarioConfig& cfg, const LiveForceSource& live = {});

// Telemetry analysis helpers shared by the summary, the CLI and the acceptance suite.

/// First time |S| <= tol or S changes sign between samples (crossing time interpolated).
std::optional<double> first_reach_time(const std::vector<TelemetryRecord>& records, int axis, double tol = 1e-3);

/// Sum of |x_{k+1} - x_k| for one of U1..U4 (index 0..3).
double total_variation(const std::vector<TelemetryRecord>& records, int channel);

/// max_k || B u_q - [U1, U2, U3, U4] ||_inf
double max_allocation_residual(const std::vector<TelemetryRecord>& records, const AllocationMatrix& B);

}  // namespace dualquad
