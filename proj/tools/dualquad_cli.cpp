// dualquad — headless runs, live piloting service and log replay.
//
// Exit codes: 0 success, 1 simulation aborted, 2 configuration error, 3 I/O or service error.

#include "dualquad/config.hpp"
#include "dualquad/server.hpp"
#include "dualquad/telemetry.hpp"

#include <CLI11.hpp>

#include <atomic>
#include <csignal>
#include <filesystem>
#include <iostream>

namespace {

std::atomic<bool> g_stop{false};

void on_signal(int) { g_stop = true; }

void install_signal_handlers()
{
    std::signal(SIGINT, on_signal);
    std::signal(SIGTERM, on_signal);
}

int cmd_run(const std::string& scenario, std::optional<double> dt, std::string out)
{
    dualquad::ScenarioConfig cfg = dualquad::load_scenario(scenario);
    if (dt) {
        cfg.sim.dt = *dt;
        try {
            cfg.validate();
        } catch (const dualquad::InvalidParameter& e) {
            throw dualquad::ConfigError(std::string("--dt: ") + e.what());
        }
    }
    if (out.empty())
        out = std::filesystem::path(scenario).stem().string() + ".csv";
    const std::filesystem::path csv(out);
    std::filesystem::path summary_path = csv;
    summary_path.replace_extension(".summary.json");

    const dualquad::RunResult result = dualquad::run_scenario(cfg);
    dualquad::export_csv(csv, result.records);
    dualquad::export_summary(summary_path, result.summary);
    std::cout << dualquad::summary_json(result.summary) << '\n';
    if (!result.ok()) {
        std::cerr << "simulation aborted: " << result.summary.message << '\n';
        return 1;
    }
    return 0;
}

void announce(std::uint16_t port)
{
    std::cout << "listening on 127.0.0.1:" << port << std::endl;
}

int cmd_serve(const std::string& scenario, std::uint16_t port, int decimate)
{
    const dualquad::ScenarioConfig cfg = dualquad::load_scenario(scenario);
    dualquad::ServeOptions opts;
    opts.port = port;
    opts.decimate = decimate;
    opts.on_listening = announce;
    install_signal_handlers();
    dualquad::serve_live(cfg, opts, g_stop);
    return 0;
}

int cmd_replay(const std::string& log, std::uint16_t port, double speed)
{
    const auto records = dualquad::import_csv(log);
    dualquad::ServeOptions opts;
    opts.port = port;
    opts.decimate = 1;
    opts.speed = speed;
    opts.wait_for_client = true;
    opts.on_listening = announce;
    install_signal_handlers();
    dualquad::serve_replay(records, opts, g_stop);
    return 0;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Dual-quadrotor rigid-payload simulator"};
    app.require_subcommand(1);

    std::string scenario, out, log;
    std::optional<double> dt;
    std::uint16_t port = 7878;
    int decimate = 20;
    double speed = 1.0;

    auto* run = app.add_subcommand("run", "Run a scenario headless; writes a CSV log and a JSON summary");
    run->add_option("scenario", scenario, "Scenario JSON file")->required();
    run->add_option("--dt", dt, "Override the control/integration step [s]");
    run->add_option("--out", out, "CSV output path (summary goes next to it as .summary.json)");

    auto* serve = app.add_subcommand("serve", "Run a scenario live and accept force commands over TCP");
    serve->add_option("scenario", scenario, "Scenario JSON file")->required();
    serve->add_option("--port", port, "TCP port on 127.0.0.1 (0 = any free port)");
    serve->add_option("--decimate", decimate, "Broadcast every N-th step")->check(CLI::PositiveNumber);

    auto* replay = app.add_subcommand("replay", "Stream a recorded CSV log over TCP");
    replay->add_option("log", log, "Telemetry CSV")->required();
    replay->add_option("--port", port, "TCP port on 127.0.0.1 (0 = any free port)");
    replay->add_option("--speed", speed, "Playback speed factor")->check(CLI::PositiveNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (*run)
            return cmd_run(scenario, dt, out);
        if (*serve)
            return cmd_serve(scenario, port, decimate);
        return cmd_replay(log, port, speed);
    } catch (const dualquad::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const dualquad::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    }
}
