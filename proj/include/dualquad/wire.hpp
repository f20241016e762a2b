#pragma once

#include "dualquad/simulation.hpp"

#include <string>

namespace dualquad {

/// Wire schema version stamped into every outgoing message as "v".
inline constexpr int kWireVersion = 1;

class WireError : public Error {
public:
    using Error::Error;
};

enum class CommandKind { ApplyForce, ClearForce, Pause, Resume, Reset };

const char* to_string(CommandKind kind);

/// Client -> service: {"kind", "force":[x,y,z], "client", "ts"}.
struct Command {
    CommandKind kind = CommandKind::ClearForce;
    Vector3d force = Vector3d::Zero();
    std::string client;
    double ts = 0.0;
};

/// Throws WireError on malformed JSON, unknown kind, or a missing/non-finite force.
Command parse_command(const std::string& line);
std::string encode_command(const Command& cmd);

/// Service -> client telemetry line (no trailing newline):
/// {"v":1,"t","state":{x..r},"ref":{xd..psid},"S":[6],"U":[4],"force":[3],"gated"}.
std::string encode_frame(const TelemetryRecord& rec);

/// Inverse of encode_frame for the fields it carries; everything else stays default.
TelemetryRecord decode_frame(const std::string& line);

/// {"v":1,"error":{"code","message"}}
std::string encode_error(const std::string& code, const std::string& message);

/// Greeting sent once per connection: {"v":1,"config":{"mode","dt","decimate","threshold"}}.
struct SessionInfo {
    std::string mode = "live";
    double dt = 1e-3;
    int decimate = 1;
    double threshold = 0.5;
};

std::string encode_greeting(const SessionInfo& info);

}  // namespace dualquad
