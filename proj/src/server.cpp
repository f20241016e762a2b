#include "dualquad/server.hpp"

#include "dualquad/live_session.hpp"

#include <arpa/inet.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <condition_variable>
#include <cstring>
#include <deque>

namespace dualquad {

struct LineServer::Client {
    int fd = -1;
    std::mutex mutex;
    std::condition_variable cv;
    std::deque<std::string> queue;
    bool closing = false;
    std::atomic<bool> reader_done{false};
    std::atomic<bool> writer_done{false};
    std::thread reader;
    std::thread writer;

    /// Enqueues a line; returns true when an old line had to be dropped.
    bool push(std::string line, std::size_t capacity)
    {
        bool dropped = false;
        {
            std::lock_guard lock(mutex);
            if (closing)
                return false;
            if (queue.size() >= capacity) {
                queue.pop_front();
                dropped = true;
            }
            queue.push_back(std::move(line));
        }
        cv.notify_one();
        return dropped;
    }

    void close_and_join()
    {
        {
            std::lock_guard lock(mutex);
            closing = true;
        }
        cv.notify_all();
        if (writer.joinable())
            writer.join();
        ::shutdown(fd, SHUT_RDWR);
        if (reader.joinable())
            reader.join();
        ::close(fd);
        fd = -1;
    }
};

namespace {

bool send_all(int fd, const std::string& data)
{
    std::size_t sent = 0;
    while (sent < data.size()) {
        const ssize_t n = ::send(fd, data.data() + sent, data.size() - sent, MSG_NOSIGNAL);
        if (n < 0) {
            if (errno == EINTR)
                continue;
            return false;
        }
        sent += static_cast<std::size_t>(n);
    }
    return true;
}

}  // namespace

LineServer::LineServer(std::uint16_t port, std::string greeting, LineHandler handler, std::size_t queue_capacity)
    : greeting_(std::move(greeting)), handler_(std::move(handler)), capacity_(queue_capacity == 0 ? 1 : queue_capacity)
{
    listen_fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
    if (listen_fd_ < 0)
        throw ServerError(std::string("socket: ") + std::strerror(errno));
    const int one = 1;
    ::setsockopt(listen_fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof(one));

    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
    addr.sin_port = htons(port);
    if (::bind(listen_fd_, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) < 0
        || ::listen(listen_fd_, 16) < 0) {
        const std::string err = std::strerror(errno);
        ::close(listen_fd_);
        throw ServerError("cannot bind 127.0.0.1:" + std::to_string(port) + ": " + err);
    }
    socklen_t len = sizeof(addr);
    ::getsockname(listen_fd_, reinterpret_cast<sockaddr*>(&addr), &len);
    port_ = ntohs(addr.sin_port);
    acceptor_ = std::thread([this] { accept_loop(); });
}

LineServer::~LineServer() { stop(); }

void LineServer::accept_loop()
{
    while (!stopping_) {
        pollfd pfd{listen_fd_, POLLIN, 0};
        const int ready = ::poll(&pfd, 1, 50);
        reap();
        if (ready <= 0 || !(pfd.revents & POLLIN))
            continue;
        const int fd = ::accept(listen_fd_, nullptr, nullptr);
        if (fd < 0)
            continue;
        const int one = 1;
        ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof(one));
        const timeval send_timeout{2, 0};  // a stalled reader cannot wedge stop()
        ::setsockopt(fd, SOL_SOCKET, SO_SNDTIMEO, &send_timeout, sizeof(send_timeout));

        auto client = std::make_shared<Client>();
        client->fd = fd;
        client->queue.push_back(greeting_);

        client->writer = std::thread([c = client.get()] {
            std::unique_lock lock(c->mutex);
            for (;;) {
                c->cv.wait(lock, [c] { return c->closing || !c->queue.empty(); });
                if (c->queue.empty())
                    break;
                std::string line = std::move(c->queue.front());
                c->queue.pop_front();
                lock.unlock();
                line.push_back('\n');
                const bool ok = send_all(c->fd, line);
                lock.lock();
                if (!ok) {
                    c->closing = true;
                    c->queue.clear();
                    break;
                }
            }
            c->writer_done = true;
        });

        client->reader = std::thread([this, c = client.get()] {
            std::string buffer;
            char chunk[4096];
            for (;;) {
                const ssize_t n = ::recv(c->fd, chunk, sizeof(chunk), 0);
                if (n < 0 && errno == EINTR)
                    continue;
                if (n <= 0)
                    break;
                buffer.append(chunk, static_cast<std::size_t>(n));
                std::size_t pos;
                while ((pos = buffer.find('\n')) != std::string::npos) {
                    std::string line = buffer.substr(0, pos);
                    buffer.erase(0, pos + 1);
                    if (!line.empty() && line.back() == '\r')
                        line.pop_back();
                    if (line.empty())
                        continue;
                    if (auto reply = handler_(line))
                        c->push(std::move(*reply), capacity_);
                }
            }
            {
                std::lock_guard lock(c->mutex);
                c->closing = true;
            }
            c->cv.notify_all();
            c->reader_done = true;
        });

        std::lock_guard lock(clients_mutex_);
        clients_.push_back(std::move(client));
    }
}

void LineServer::reap()
{
    std::list<std::shared_ptr<Client>> finished;
    {
        std::lock_guard lock(clients_mutex_);
        for (auto it = clients_.begin(); it != clients_.end();) {
            if ((*it)->reader_done && (*it)->writer_done) {
                finished.push_back(*it);
                it = clients_.erase(it);
            } else {
                ++it;
            }
        }
    }
    for (auto& c : finished)
        c->close_and_join();
}

void LineServer::broadcast(const std::string& line)
{
    std::lock_guard lock(clients_mutex_);
    for (auto& c : clients_)
        if (c->push(line, capacity_))
            ++dropped_;
}

std::size_t LineServer::client_count() const
{
    std::lock_guard lock(clients_mutex_);
    std::size_t n = 0;
    for (const auto& c : clients_)
        n += !c->reader_done;
    return n;
}

void LineServer::stop()
{
    if (stopping_.exchange(true))
        return;
    if (acceptor_.joinable())
        acceptor_.join();
    std::list<std::shared_ptr<Client>> all;
    {
        std::lock_guard lock(clients_mutex_);
        all.swap(clients_);
    }
    for (auto& c : all)
        c->close_and_join();
    ::close(listen_fd_);
    listen_fd_ = -1;
}

namespace {

using Clock = std::chrono::steady_clock;

void wait_for_first_client(const LineServer& server, const std::atomic<bool>& stop)
{
    while (!stop && server.client_count() == 0)
        std::this_thread::sleep_for(std::chrono::milliseconds(5));
}

Clock::time_point deadline(Clock::time_point start, double sim_seconds, double speed)
{
    return start + std::chrono::duration_cast<Clock::duration>(std::chrono::duration<double>(sim_seconds / speed));
}

}  // namespace

void serve_live(const ScenarioConfig& cfg, const ServeOptions& opts, const std::atomic<bool>& stop)
{
    if (opts.decimate < 1)
        throw InvalidParameter("decimate must be >= 1");
    LiveSession session(cfg);
    SessionInfo info;
    info.mode = "live";
    info.dt = cfg.sim.dt;
    info.decimate = opts.decimate;
    info.threshold = cfg.admittance.force_threshold;

    LineServer server(opts.port, encode_greeting(info), [&session](const std::string& line) -> std::optional<std::string> {
        try {
            session.submit(parse_command(line));
            return std::nullopt;
        } catch (const WireError& e) {
            return encode_error("bad_command", e.what());
        }
    });
    if (opts.on_listening)
        opts.on_listening(server.port());
    if (opts.wait_for_client)
        wait_for_first_client(server, stop);

    const double dt = cfg.sim.dt;
    const auto start = Clock::now();
    std::size_t ticks = 0;
    std::size_t steps = 0;
    while (!stop && (opts.max_steps == 0 || steps < opts.max_steps)) {
        try {
            if (auto rec = session.step()) {
                ++steps;
                if ((session.simulation().index() - 1) % static_cast<std::size_t>(opts.decimate) == 0)
                    server.broadcast(encode_frame(*rec));
            }
        } catch (const SimulationAbort& e) {
            server.broadcast(encode_error("aborted", std::string(e.what()) + "; session reset"));
        }
        ++ticks;
        if (opts.speed > 0)
            std::this_thread::sleep_until(deadline(start, static_cast<double>(ticks) * dt, opts.speed));
    }
    server.stop();
}

void serve_replay(const std::vector<TelemetryRecord>& records, const ServeOptions& opts, const std::atomic<bool>& stop)
{
    if (opts.decimate < 1)
        throw InvalidParameter("decimate must be >= 1");
    SessionInfo info;
    info.mode = "replay";
    info.dt = records.size() > 1 ? records[1].t - records[0].t : 0.0;
    info.decimate = opts.decimate;
    info.threshold = AdmittanceConfig{}.force_threshold;

    LineServer server(opts.port, encode_greeting(info), [](const std::string& line) -> std::optional<std::string> {
        try {
            parse_command(line);
        } catch (const WireError& e) {
            return encode_error("bad_command", e.what());
        }
        return encode_error("replay_mode", "replay mode: commands are not accepted");
    });
    if (opts.on_listening)
        opts.on_listening(server.port());
    if (opts.wait_for_client)
        wait_for_first_client(server, stop);

    const auto start = Clock::now();
    const double t0 = records.empty() ? 0.0 : records.front().t;
    for (std::size_t i = 0; i < records.size() && !stop; i += static_cast<std::size_t>(opts.decimate)) {
        if (opts.speed > 0)
            std::this_thread::sleep_until(deadline(start, records[i].t - t0, opts.speed));
        server.broadcast(encode_frame(records[i]));
    }
    server.stop();
}

}  // namespace dualquad
