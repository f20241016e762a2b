#include "dualquad/live_session.hpp"

namespace dualquad {

LiveSession::LiveSession(ScenarioConfig cfg)
    : cfg_(std::move(cfg)), sim_(std::make_unique<Simulation>(cfg_))
{
}

void LiveSession::submit(const Command& cmd)
{
    std::lock_guard lock(mutex_);
    pending_.push_back(cmd);
}

void LiveSession::reset()
{
    sim_ = std::make_unique<Simulation>(cfg_);
    held_force_.setZero();
    held_since_.reset();
}

void LiveSession::drain()
{
    std::deque<Command> batch;
    {
        std::lock_guard lock(mutex_);
        batch.swap(pending_);
    }
    for (const Command& cmd : batch) {
        switch (cmd.kind) {
        case CommandKind::ApplyForce:
            held_force_ = cmd.force;
            held_since_ = sim_->time();
            break;
        case CommandKind::ClearForce:
            held_force_.setZero();
            held_since_.reset();
            break;
        case CommandKind::Pause:
            paused_ = true;
            break;
        case CommandKind::Resume:
            paused_ = false;
            break;
        case CommandKind::Reset:
            reset();
            break;
        }
    }
}

std::optional<TelemetryRecord> LiveSession::step()
{
    drain();
    if (paused_)
        return std::nullopt;
    if (held_since_ && sim_->time() - *held_since_ >= kHoldTimeout) {
        held_force_.setZero();
        held_since_.reset();
    }
    try {
        return sim_->step(held_force_);
    } catch (const SimulationAbort&) {
        reset();
        throw;
    }
}

}  // namespace dualquad
