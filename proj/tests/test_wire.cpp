#include "dualquad/wire.hpp"

#include "test_support.hpp"

#include <json.hpp>

using namespace dualquad;
using nlohmann::json;

TEST_SUITE("commands")
{
    TEST_CASE("apply_force with every field")
    {
        const Command c = parse_command(R"({"kind":"apply_force","force":[1.5,-2,0.25],"client":"ui-1","ts":12.5})");
        CHECK(c.kind == CommandKind::ApplyForce);
        CHECK(dqtest::max_abs(c.force - Vector3d(1.5, -2, 0.25)) == 0.0);
        CHECK(c.client == "ui-1");
        CHECK(c.ts == 12.5);
    }

    TEST_CASE("every kind parses and round-trips")
    {
        for (auto kind : {CommandKind::ApplyForce, CommandKind::ClearForce, CommandKind::Pause, CommandKind::Resume,
                          CommandKind::Reset}) {
            Command c;
            c.kind = kind;
            c.force = Vector3d(0.5, 0, -1);
            c.client = "tester";
            c.ts = 3.0;
            const Command back = parse_command(encode_command(c));
            CHECK(back.kind == kind);
            CHECK(back.force == c.force);
            CHECK(back.client == c.client);
            CHECK(back.ts == c.ts);
        }
    }

    TEST_CASE("optional fields")
    {
        const Command c = parse_command(R"({"kind":"pause"})");
        CHECK(c.kind == CommandKind::Pause);
        CHECK(c.client.empty());
        CHECK(c.force.norm() == 0.0);
    }

    TEST_CASE("malformed commands are rejected with a reason")
    {
        const std::pair<const char*, const char*> cases[] = {
            {"not json", "malformed"},
            {"[1,2]", "object"},
            {R"({"force":[1,0,0]})", "kind"},
            {R"({"kind":"launch"})", "launch"},
            {R"({"kind":"apply_force"})", "requires 'force'"},
            {R"({"kind":"apply_force","force":[1,0]})", "3 numbers"},
            {R"({"kind":"apply_force","force":[1,"a",0]})", "3 numbers"},
            {R"({"kind":"apply_force","force":[1e400,0,0]})", ""},
            {R"({"kind":"clear_force","client":7})", "client"},
            {R"({"kind":"clear_force","ts":"now"})", "ts"},
            {R"({"kind":"pause","extra":1})", "extra"},
        };
        for (const auto& [text, reason] : cases) {
            CAPTURE(text);
            CHECK_THROWS_WITH_AS(parse_command(text), doctest::Contains(reason), WireError);
        }
    }
}

TEST_SUITE("frames")
{
    TelemetryRecord sample()
    {
        TelemetryRecord r;
        r.t = 1.234;
        r.state.position = Vector3d(0.1, -0.2, 1.0);
        r.state.velocity = Vector3d(0.01, 0.02, -0.03);
        r.state.attitude = {0.01, -0.02, 0.003};
        r.state.body_rates = Vector3d(0.1, 0.2, 0.3);
        r.chi_d << 0.1, 0, 1, 0.011, -0.019, 0;
        r.S << 1, -2, 3, -4, 5, -6;
        r.U << 34.3, 0.1, -0.2, 0.3;
        r.force = Vector3d(2, 0, 0);
        r.gated = true;
        return r;
    }

    TEST_CASE("schema")
    {
        const json j = json::parse(encode_frame(sample()));
        CHECK(j["v"] == kWireVersion);
        CHECK(j["t"].get<double>() == 1.234);
        for (const char* k : {"x", "y", "z", "vx", "vy", "vz", "phi", "theta", "psi", "p", "q", "r"})
            CHECK(j["state"].contains(k));
        for (const char* k : {"xd", "yd", "zd", "phid", "thetad", "psid"})
            CHECK(j["ref"].contains(k));
        CHECK(j["S"].size() == 6);
        CHECK(j["U"].size() == 4);
        CHECK(j["force"].size() == 3);
        CHECK(j["gated"] == true);
        CHECK(j["state"]["theta"].get<double>() == -0.02);
    }

    TEST_CASE("single line")
    {
        CHECK(encode_frame(sample()).find('\n') == std::string::npos);
    }

    TEST_CASE("decode inverts encode exactly")
    {
        const TelemetryRecord r = sample();
        const TelemetryRecord back = decode_frame(encode_frame(r));
        CHECK(back.t == r.t);
        CHECK(back.state.pack() == r.state.pack());
        CHECK(back.chi_d == r.chi_d);
        CHECK(back.S == r.S);
        CHECK(back.V == lyapunov(r.S));
        CHECK(back.U == r.U);
        CHECK(back.force == r.force);
        CHECK(back.gated == r.gated);
    }

    TEST_CASE("version and shape are checked")
    {
        json j = json::parse(encode_frame(sample()));
        j["v"] = 2;
        CHECK_THROWS_WITH_AS(decode_frame(j.dump()), doctest::Contains("version"), WireError);
        j["v"] = 1;
        j["S"] = json::array({1, 2});
        CHECK_THROWS_AS(decode_frame(j.dump()), WireError);
        j.erase("S");
        CHECK_THROWS_AS(decode_frame(j.dump()), WireError);
        CHECK_THROWS_AS(decode_frame("{"), WireError);
    }
}

TEST_SUITE("control messages")
{
    TEST_CASE("error")
    {
        const json j = json::parse(encode_error("bad_command", "unknown command kind 'x'"));
        CHECK(j["v"] == 1);
        CHECK(j["error"]["code"] == "bad_command");
        CHECK(j["error"]["message"] == "unknown command kind 'x'");
    }

    TEST_CASE("greeting")
    {
        const json j = json::parse(encode_greeting({"replay", 0.002, 5, 0.75}));
        CHECK(j["v"] == 1);
        CHECK(j["config"]["mode"] == "replay");
        CHECK(j["config"]["dt"].get<double>() == 0.002);
        CHECK(j["config"]["decimate"] == 5);
        CHECK(j["config"]["threshold"].get<double>() == 0.75);
    }
}
