#include "dualquad/config.hpp"

#include "test_support.hpp"

#include <filesystem>

using namespace dualquad;

namespace {

std::string error_of(const std::string& text)
{
    try {
        parse_scenario(text, "test.json");
    } catch (const ConfigError& e) {
        return e.what();
    }
    return {};
}

}  // namespace

TEST_SUITE("defaults")
{
    TEST_CASE("empty object is the reference configuration")
    {
        const ScenarioConfig cfg = parse_scenario("{}");
        const ScenarioConfig ref;
        CHECK(cfg.system.mass == doctest::Approx(3.5));
        CHECK(cfg.system.mass * cfg.system.gravity == doctest::Approx(34.335));
        CHECK(dqtest::max_abs(cfg.controller.xi - ref.controller.xi) == 0.0);
        CHECK(dqtest::max_abs(cfg.controller.lambda2 - ref.controller.lambda2) == 0.0);
        CHECK(cfg.controller.mode == ref.controller.mode);
        CHECK(cfg.sim.dt == 1e-3);
        CHECK(cfg.forces.empty());
        // Reference inertia is kept; the parallel-axis value is reported alongside.
        CHECK(dqtest::max_abs(cfg.system.inertia - ref.system.inertia) == 0.0);
        CHECK(cfg.parallel_axis_inertia.x() == doctest::Approx(3.224917).epsilon(1e-6));
    }

    TEST_CASE("geometry-derived inertia on request")
    {
        const ScenarioConfig cfg = parse_scenario(R"({"system": {"inertia_from_geometry": true}})");
        CHECK(dqtest::max_abs(cfg.system.inertia - cfg.parallel_axis_inertia) < 1e-12);
    }

    TEST_CASE("explicit inertia")
    {
        const ScenarioConfig cfg = parse_scenario(R"({"system": {"J_tx": 3, "J_ty": 0.1, "J_tz": 3.1}})");
        CHECK(cfg.system.inertia.x() == 3.0);
        CHECK(cfg.system.inertia.y() == 0.1);
    }
}

TEST_SUITE("sections")
{
    TEST_CASE("full scenario")
    {
        const ScenarioConfig cfg = parse_scenario(R"({
          "system": {"m_L": 0.7, "k_l_drag": 0.1, "k_r_drag": [0.01, 0.02, 0.03]},
          "controller": {"switch_mode": "sign", "Phi": 0.3, "a": 2.5, "angle_guard_deg": 60},
          "admittance": {"M": 2, "C": [1, 2, 3], "K": 0.5, "threshold": 0.8, "hold_speed": 0.01},
          "allocation": {"costs": [1, 2, 1, 1, 1, 1, 1, 2]},
          "forces": [{"t0": 1, "sigma": 0.2, "amplitude": 3, "direction": [0, 3, 4]}],
          "disturbances": [{"kind": "step", "force": [1, 0, 0], "t0": 1, "t1": 2}],
          "sim": {"duration": 4, "dt": 0.002, "initial": {"position": [0, 0, 1], "attitude": [0.1, 0, 0]},
                  "takeoff": {"t0": 0.5, "t1": 1.5}, "landing": {"t0": 3, "t1": 3.5, "altitude": 0.1},
                  "ground_clamp": false}
        })");
        CHECK(cfg.system.mass == doctest::Approx(3.7));
        CHECK(cfg.system.linear_drag.y() == 0.1);
        CHECK(cfg.system.angular_drag.z() == 0.03);
        CHECK(cfg.controller.mode == SwitchMode::Sign);
        CHECK(cfg.controller.boundary_layer == 0.3);
        CHECK(cfg.controller.angle_guard == doctest::Approx(M_PI / 3));
        CHECK(cfg.admittance.mass.z() == 2.0);
        CHECK(cfg.admittance.damping.z() == 3.0);
        CHECK(cfg.admittance.stiffness.x() == 0.5);
        CHECK(cfg.admittance.force_threshold == 0.8);
        CHECK(cfg.allocation.costs[7] == 2.0);
        REQUIRE(cfg.forces.size() == 1);
        CHECK(dqtest::max_abs(cfg.forces[0].direction - Vector3d(0, 0.6, 0.8)) < 1e-15);
        REQUIRE(cfg.disturbances.size() == 1);
        CHECK(cfg.disturbances[0].kind == DisturbanceKind::Step);
        CHECK(cfg.sim.dt == 0.002);
        CHECK(cfg.sim.initial.attitude.phi == 0.1);
        REQUIRE(cfg.sim.takeoff);
        CHECK(cfg.sim.takeoff->target == 1.0);
        REQUIRE(cfg.sim.landing);
        CHECK(cfg.sim.landing->target == 0.1);
        CHECK_FALSE(cfg.sim.ground_clamp);
    }

    TEST_CASE("bundled scenarios load")
    {
        for (const char* name : {"hover.json", "pulse.json", "guidance.json"}) {
            CAPTURE(name);
            CHECK_NOTHROW(load_scenario(std::filesystem::path(DUALQUAD_SCENARIOS) / name));
        }
    }
}

TEST_SUITE("errors")
{
    TEST_CASE("syntax errors carry line and column")
    {
        const std::string msg = error_of("{\n  \"sim\": {\n    \"dt\": ,\n  }\n}");
        CHECK(msg.find("test.json") != std::string::npos);
        CHECK(msg.find("line 3") != std::string::npos);
    }

    TEST_CASE("unknown keys carry the key path")
    {
        CHECK(error_of(R"({"sim": {"dtt": 0.001}})").find("sim.dtt: unknown key") != std::string::npos);
        CHECK(error_of(R"({"sim": {"initial": {"pos": [0,0,0]}}})").find("sim.initial.pos") != std::string::npos);
        CHECK(error_of(R"({"extra": 1})").find("extra: unknown key") != std::string::npos);
    }

    TEST_CASE("type errors carry the key path")
    {
        CHECK(error_of(R"({"controller": {"a": "three"}})").find("controller.a: expected a number")
              != std::string::npos);
        CHECK(error_of(R"({"controller": {"xi": [1, 2]}})").find("controller.xi") != std::string::npos);
        CHECK(error_of(R"({"sim": {"initial": {"position": [0, "z", 0]}}})").find("sim.initial.position[1]")
              != std::string::npos);
        CHECK(error_of(R"({"forces": {"t0": 1}})").find("forces: expected an array") != std::string::npos);
    }

    TEST_CASE("range errors")
    {
        CHECK(error_of(R"({"sim": {"dt": 0.05}})").find("sim.dt") != std::string::npos);
        CHECK(error_of(R"({"sim": {"duration": -1}})").find("sim.duration") != std::string::npos);
        CHECK(error_of(R"({"forces": [{"sigma": 0}]})").find("forces[0].sigma") != std::string::npos);
        CHECK(error_of(R"({"forces": [{"direction": [0, 0, 0]}]})").find("forces[0].direction") != std::string::npos);
        CHECK(error_of(R"({"allocation": {"costs": [1, 1, 1, 0, 1, 1, 1, 1]}})").find("allocation.costs[3]")
              != std::string::npos);
        CHECK(error_of(R"({"controller": {"switch_mode": "smooth"}})").find("controller.switch_mode")
              != std::string::npos);
        CHECK(error_of(R"({"controller": {"Phi": 2}})").find("controller") != std::string::npos);
        CHECK(error_of(R"({"admittance": {"C": 0}})").find("admittance") != std::string::npos);
        CHECK(error_of(R"({"system": {"m_i": -1}})").find("system") != std::string::npos);
        CHECK(error_of(R"({"sim": {"landing": {"t0": 2, "t1": 1}}})").find("sim.landing.t1") != std::string::npos);
        CHECK(error_of(R"({"disturbances": [{"kind": "gust"}]})").find("disturbances[0].kind") != std::string::npos);
    }

    TEST_CASE("scripted disturbances must respect the assumed bound")
    {
        const char* text = R"({"controller": {"disturbance_bound": 1.0},
                               "disturbances": [{"force": [0.6, 0, 0]}, {"kind": "step", "torque": [0, 0, 0.5]}]})";
        CHECK(error_of(text).find("disturbance_bound") != std::string::npos);
        CHECK_NOTHROW(parse_scenario(R"({"controller": {"disturbance_bound": 1.2},
                                         "disturbances": [{"force": [0.6, 0, 0]}, {"torque": [0, 0, 0.5]}]})"));
        CHECK(error_of(R"({"controller": {"disturbance_bound": 0}})").find("disturbance_bound") != std::string::npos);
    }

    TEST_CASE("partial inertia is rejected")
    {
        CHECK(error_of(R"({"system": {"J_tx": 3}})").find("system.J_t") != std::string::npos);
        CHECK(error_of(R"({"system": {"J_tx": 3, "J_ty": 3, "J_tz": 3, "inertia_from_geometry": true}})")
                  .find("conflict")
              != std::string::npos);
    }

    TEST_CASE("missing file")
    {
        CHECK_THROWS_WITH_AS(load_scenario("/nonexistent/scenario.json"), doctest::Contains("cannot open"),
                             ConfigError);
    }
}
