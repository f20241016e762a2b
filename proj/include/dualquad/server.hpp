#pragma once

#include "dualquad/simulation.hpp"
#include "dualquad/wire.hpp"

#include <atomic>
#include <cstdint>
#include <functional>
#include <list>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

namespace dualquad {

class ServerError : public Error {
public:
    using Error::Error;
};

/// Line-oriented TCP fan-out. Every client gets its own reader and writer thread and a
/// bounded outgoing queue; when a slow client's queue is full the oldest line is dropped
/// and counted, so broadcast() never blocks.
class LineServer {
public:
    /// Called on the reader thread for each incoming line; a returned string is sent back
    /// to that client only.
    using LineHandler = std::function<std::optional<std::string>(const std::string& line)>;

    /// Binds 127.0.0.1:port (0 picks a free port). Throws ServerError on failure.
    LineServer(std::uint16_t port, std::string greeting, LineHandler handler, std::size_t queue_capacity = 4096);
    ~LineServer();

    LineServer(const LineServer&) = delete;
    LineServer& operator=(const LineServer&) = delete;

    std::uint16_t port() const { return port_; }
    void broadcast(const std::string& line);
    std::size_t client_count() const;
    std::size_t dropped() const { return dropped_.load(); }

    /// Flushes pending output, disconnects everyone and joins all threads. Idempotent.
    void stop();

private:
    struct Client;

    void accept_loop();
    void reap();

    int listen_fd_ = -1;
    std::uint16_t port_ = 0;
    std::string greeting_;
    LineHandler handler_;
    std::size_t capacity_;
    std::atomic<bool> stopping_{false};
    std::atomic<std::size_t> dropped_{0};
    mutable std::mutex clients_mutex_;
    std::list<std::shared_ptr<Client>> clients_;
    std::thread acceptor_;
};

struct ServeOptions {
    std::uint16_t port = 0;
    int decimate = 20;
    /// Wall-clock pacing factor: 2 plays twice as fast as real time. <= 0 disables pacing.
    double speed = 1.0;
    /// Do not start streaming until the first client has connected.
    bool wait_for_client = false;
    /// Optional cap on the number of simulated steps (live mode); 0 means unbounded.
    std::size_t max_steps = 0;
    /// Invoked once the port is bound.
    std::function<void(std::uint16_t)> on_listening;
};

/// Live mode: runs the closed loop in real time, broadcasting every `decimate`-th record and
/// accepting force commands. Returns when `stop` becomes true or max_steps is reached.
void serve_live(const ScenarioConfig& cfg, const ServeOptions& opts, const std::atomic<bool>& stop);

/// Replay mode: streams recorded rows (each one a frame) paced by their timestamps.
/// Commands are answered with a "replay_mode" error. Returns after the last row or on stop.
void serve_replay(const std::vector<TelemetryRecord>& records, const ServeOptions& opts,
                  const std::atomic<bool>& stop);

}  // namespace dualquad
