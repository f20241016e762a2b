#include "dualquad/wire.hpp"

#include <json.hpp>

#include <array>
#include <cmath>

namespace dualquad {

namespace {

using nlohmann::json;

constexpr std::array<const char*, 12> kStateKeys = {"x",   "y",     "z",   "vx", "vy", "vz",
                                                    "phi", "theta", "psi", "p",  "q",  "r"};
constexpr std::array<const char*, 6> kRefKeys = {"xd", "yd", "zd", "phid", "thetad", "psid"};

constexpr std::array<std::pair<const char*, CommandKind>, 5> kKinds = {{
    {"apply_force", CommandKind::ApplyForce},
    {"clear_force", CommandKind::ClearForce},
    {"pause", CommandKind::Pause},
    {"resume", CommandKind::Resume},
    {"reset", CommandKind::Reset},
}};

template <typename Vec>
json to_array(const Vec& v)
{
    json a = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i)
        a.push_back(v[i]);
    return a;
}

template <typename Vec>
void from_array(const json& j, const char* key, Vec& out)
{
    const json& a = j.at(key);
    if (!a.is_array() || a.size() != static_cast<std::size_t>(out.size()))
        throw WireError(std::string("frame field '") + key + "' has wrong shape");
    for (Eigen::Index i = 0; i < out.size(); ++i)
        out[i] = a[static_cast<std::size_t>(i)].get<double>();
}

}  // namespace

const char* to_string(CommandKind kind)
{
    for (const auto& [name, k] : kKinds)
        if (k == kind)
            return name;
    return "?";
}

Command parse_command(const std::string& line)
{
    json j;
    try {
        j = json::parse(line);
    } catch (const json::exception& e) {
        throw WireError(std::string("malformed message: ") + e.what());
    }
    if (!j.is_object())
        throw WireError("command must be a JSON object");
    for (const auto& [key, _] : j.items())
        if (key != "kind" && key != "force" && key != "client" && key != "ts")
            throw WireError("unknown field '" + key + "'");
    if (!j.contains("kind") || !j["kind"].is_string())
        throw WireError("missing string field 'kind'");

    Command cmd;
    const std::string kind = j["kind"].get<std::string>();
    bool known = false;
    for (const auto& [name, k] : kKinds) {
        if (kind == name) {
            cmd.kind = k;
            known = true;
        }
    }
    if (!known)
        throw WireError("unknown command kind '" + kind + "'");

    if (j.contains("force")) {
        const json& f = j["force"];
        if (!f.is_array() || f.size() != 3)
            throw WireError("'force' must be an array of 3 numbers");
        for (int i = 0; i < 3; ++i) {
            if (!f[i].is_number())
                throw WireError("'force' must be an array of 3 numbers");
            cmd.force[i] = f[i].get<double>();
        }
        if (!cmd.force.allFinite())
            throw WireError("'force' must be finite");
    } else if (cmd.kind == CommandKind::ApplyForce) {
        throw WireError("apply_force requires 'force'");
    }
    if (j.contains("client")) {
        if (!j["client"].is_string())
            throw WireError("'client' must be a string");
        cmd.client = j["client"].get<std::string>();
    }
    if (j.contains("ts")) {
        if (!j["ts"].is_number())
            throw WireError("'ts' must be a number");
        cmd.ts = j["ts"].get<double>();
    }
    return cmd;
}

std::string encode_command(const Command& cmd)
{
    json j;
    j["kind"] = to_string(cmd.kind);
    j["force"] = to_array(cmd.force);
    j["client"] = cmd.client;
    j["ts"] = cmd.ts;
    return j.dump();
}

std::string encode_frame(const TelemetryRecord& rec)
{
    json j;
    j["v"] = kWireVersion;
    j["t"] = rec.t;
    const SystemState::Packed x = rec.state.pack();
    json state = json::object();
    for (std::size_t i = 0; i < kStateKeys.size(); ++i)
        state[kStateKeys[i]] = x[static_cast<Eigen::Index>(i)];
    j["state"] = std::move(state);
    json ref = json::object();
    for (std::size_t i = 0; i < kRefKeys.size(); ++i)
        ref[kRefKeys[i]] = rec.chi_d[static_cast<Eigen::Index>(i)];
    j["ref"] = std::move(ref);
    j["S"] = to_array(rec.S);
    j["U"] = to_array(rec.U);
    j["force"] = to_array(rec.force);
    j["gated"] = rec.gated;
    return j.dump();
}

TelemetryRecord decode_frame(const std::string& line)
{
    TelemetryRecord rec;
    try {
        const json j = json::parse(line);
        if (j.at("v").get<int>() != kWireVersion)
            throw WireError("unsupported schema version " + j.at("v").dump());
        rec.t = j.at("t").get<double>();
        SystemState::Packed x;
        for (std::size_t i = 0; i < kStateKeys.size(); ++i)
            x[static_cast<Eigen::Index>(i)] = j.at("state").at(kStateKeys[i]).get<double>();
        rec.state = SystemState::unpack(x);
        for (std::size_t i = 0; i < kRefKeys.size(); ++i)
            rec.chi_d[static_cast<Eigen::Index>(i)] = j.at("ref").at(kRefKeys[i]).get<double>();
        from_array(j, "S", rec.S);
        from_array(j, "U", rec.U);
        from_array(j, "force", rec.force);
        rec.gated = j.at("gated").get<bool>();
        rec.V = lyapunov(rec.S);
    } catch (const json::exception& e) {
        throw WireError(std::string("malformed frame: ") + e.what());
    }
    return rec;
}

std::string encode_error(const std::string& code, const std::string& message)
{
    json j;
    j["v"] = kWireVersion;
    j["error"] = {{"code", code}, {"message", message}};
    return j.dump();
}

std::string encode_greeting(const SessionInfo& info)
{
    json j;
    j["v"] = kWireVersion;
    j["config"] = {
        {"mode", info.mode}, {"dt", info.dt}, {"decimate", info.decimate}, {"threshold", info.threshold}};
    return j.dump();
}

}  // namespace dualquad
