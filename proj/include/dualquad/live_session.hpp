#pragma once

#include "dualquad/simulation.hpp"
#include "dualquad/wire.hpp"

#include <deque>
#include <memory>
#include <mutex>
#include <optional>

namespace dualquad {

/// Live-mode wrapper around Simulation. Commands may be submitted from any thread; they
/// are drained once at the start of every step, in arrival order, so the force of the
/// latest apply/clear within a step wins.
class LiveSession {
public:
    /// Sim-time after which an applied force is released without a clear_force.
    static constexpr double kHoldTimeout = 2.0;

    explicit LiveSession(ScenarioConfig cfg);

    void submit(const Command& cmd);

    /// Advances one control step unless paused. Returns the record, or nullopt when paused.
    /// A SimulationAbort propagates; the session is reset first so it stays usable.
    std::optional<TelemetryRecord> step();

    bool paused() const { return paused_; }
    const Simulation& simulation() const { return *sim_; }
    /// Live force currently held (commands still queued are not reflected).
    Vector3d held_force() const { return held_force_; }

private:
    void drain();
    void reset();

    ScenarioConfig cfg_;
    std::unique_ptr<Simulation> sim_;
    std::mutex mutex_;
    std::deque<Command> pending_;
    Vector3d held_force_ = Vector3d::Zero();
    std::optional<double> held_since_;
    bool paused_ = false;
};

}  // namespace dualquad
