#include "dualquad/admittance.hpp"

#include "test_support.hpp"

#include <cmath>

using namespace dualquad;
using dqtest::max_abs;
using dqtest::Sampler;

namespace {

AdmittanceConfig config(double M, double C, double K)
{
    AdmittanceConfig cfg;
    cfg.mass.setConstant(M);
    cfg.damping.setConstant(C);
    cfg.stiffness.setConstant(K);
    return cfg;
}

/// Step response of M q'' + C q' + K q = F from rest (q = 0, q' = 0).
struct Analytic {
    double M, C, K, F;

    double position(double t) const
    {
        if (K == 0.0) {
            const double tau = M / C;
            return F / C * (t - tau * (1.0 - std::exp(-t / tau)));
        }
        const double wn = std::sqrt(K / M), zeta = C / (2.0 * std::sqrt(K * M));
        if (zeta < 1.0) {
            const double wd = wn * std::sqrt(1.0 - zeta * zeta);
            return F / K
                   * (1.0 - std::exp(-zeta * wn * t) * (std::cos(wd * t) + zeta * wn / wd * std::sin(wd * t)));
        }
        const double r1 = -wn * (zeta - std::sqrt(zeta * zeta - 1.0));
        const double r2 = -wn * (zeta + std::sqrt(zeta * zeta - 1.0));
        return F / K * (1.0 + (r2 * std::exp(r1 * t) - r1 * std::exp(r2 * t)) / (r1 - r2));
    }

    double velocity(double t) const
    {
        const double h = 1e-6;
        return (position(t + h) - position(t - h)) / (2 * h);
    }
};

}  // namespace

TEST_SUITE("gate")
{
    TEST_CASE("zero force stays zero")
    {
        CHECK(gate_force(Vector3d::Zero(), 0.5).norm() == 0.0);
    }

    TEST_CASE("below threshold is suppressed")
    {
        CHECK(gate_force({0.3, 0, 0}, 0.5).norm() == 0.0);
    }

    TEST_CASE("above threshold passes through")
    {
        CHECK(max_abs(gate_force({2, 0, 0}, 0.5) - Vector3d(2, 0, 0)) == 0.0);
    }

    TEST_CASE("gating uses the vector norm")
    {
        // Each component is below the threshold but the norm is above it.
        const Vector3d f(0.4, 0.4, 0.0);
        CHECK(max_abs(gate_force(f, 0.5) - f) == 0.0);
    }

    TEST_CASE("idempotent")
    {
        Sampler s(171);
        for (int i = 0; i < 1000; ++i) {
            const Vector3d f = s.vec3(-1, 1);
            CHECK(max_abs(gate_force(gate_force(f, 0.5), 0.5) - gate_force(f, 0.5)) == 0.0);
        }
    }
}

TEST_SUITE("admittance step")
{
    TEST_CASE("equilibrium without force")
    {
        const AdmittanceState s = AdmittanceState::at({1, 2, 3});
        const AdmittanceState n = admittance_step(s, Vector3d::Zero(), AdmittanceConfig{}, 1e-3);
        CHECK(max_abs(n.position - s.position) == 0.0);
        CHECK(n.velocity.norm() == 0.0);
    }

    TEST_CASE("reference velocity settles at F / C")
    {
        const AdmittanceFilter f(config(1.0, 1.6, 0.0), 1e-3);
        AdmittanceState s;
        for (int k = 0; k < 3125; ++k)
            s = f.step(s, {1.6, 0, 0});
        CHECK(std::abs(s.velocity.x() - 1.0) <= 0.02);
        CHECK(s.velocity.x() > 0.0);  // moves along the push
    }

    TEST_CASE("spring offset settles at F / K")
    {
        const AdmittanceFilter f(config(1.0, 1.6, 2.0), 1e-3);
        AdmittanceState s = AdmittanceState::at({0.5, 0, 0});
        for (int k = 0; k < 20000; ++k)
            s = f.step(s, {1.0, 0, 0});
        CHECK(std::abs((s.position.x() - s.hold.x()) - 0.5) <= 0.005);
    }

    TEST_CASE("directional compliance")
    {
        Sampler s(181);
        const AdmittanceConfig cfg = config(1.0, 1.6, 0.0);
        const AdmittanceFilter f(cfg, 1e-3);
        for (int i = 0; i < 20; ++i) {
            const Vector3d dir = s.vec3(-1, 1).normalized();
            const Vector3d F = 2.0 * dir;
            AdmittanceState st;
            for (int k = 0; k < 3125; ++k)
                st = f.step(st, F);
            const Vector3d expected = F.cwiseQuotient(cfg.damping);
            CHECK((st.velocity - expected).norm() <= 0.02 * expected.norm());
            CHECK(st.velocity.normalized().dot(dir) > 1.0 - 1e-12);
        }
    }

    TEST_CASE("matches the analytic solution over ten seconds")
    {
        for (const auto& [M, C, K] : {std::tuple{1.0, 1.6, 0.0}, std::tuple{1.0, 1.6, 2.0}, std::tuple{2.0, 5.0, 1.0}}) {
            const Analytic ref{M, C, K, 1.3};
            const AdmittanceFilter f(config(M, C, K), 1e-3);
            AdmittanceState s;
            double worst = 0;
            double scale = 0;
            for (int k = 1; k <= 10000; ++k) {
                s = f.step(s, {ref.F, 0, 0});
                const double t = k * 1e-3;
                scale = std::max(scale, std::abs(ref.position(t)));
                worst = std::max(worst, std::abs(s.position.x() - ref.position(t)));
            }
            CHECK(worst / scale < 1e-4);
            CHECK(std::abs(s.velocity.x() - ref.velocity(10.0)) < 1e-4 * std::max(1.0, std::abs(ref.velocity(10.0))));
        }
    }

    TEST_CASE("zero input with a spring never diverges")
    {
        const AdmittanceFilter f(config(1.0, 1.6, 2.0), 1e-3);
        AdmittanceState s;
        s.position = Vector3d(1, -0.5, 0.2);
        double prev_peak = (s.position - s.hold).norm();
        int overshoots = 0;
        double last_sign = 1.0;
        for (int k = 0; k < 20000; ++k) {
            s = f.step(s, Vector3d::Zero());
            const double err = s.position.x() - s.hold.x();
            if (err * last_sign < 0) {
                ++overshoots;
                last_sign = -last_sign;
            }
            CHECK((s.position - s.hold).norm() <= prev_peak + 1e-12);
        }
        CHECK((s.position - s.hold).norm() < 1e-6);
        MESSAGE("zero crossings: " << overshoots);
    }

    TEST_CASE("invalid parameters")
    {
        CHECK_THROWS_AS(AdmittanceFilter(config(0.0, 1.6, 0.0), 1e-3), InvalidParameter);
        CHECK_THROWS_AS(AdmittanceFilter(config(1.0, 0.0, 0.0), 1e-3), InvalidParameter);
        CHECK_THROWS_AS(AdmittanceFilter(config(1.0, 1.6, -1.0), 1e-3), InvalidParameter);
        CHECK_THROWS_AS(AdmittanceFilter(AdmittanceConfig{}, 0.0), InvalidParameter);
    }
}

TEST_SUITE("hold reset")
{
    const AdmittanceConfig cfg;

    TEST_CASE("latches the reference once the push has decayed")
    {
        const AdmittanceFilter f(cfg, 1e-3);
        AdmittanceState s;
        int fired = 0;
        for (int k = 0; k < 10000; ++k) {
            const bool open = k < 1000;
            s = f.step(s, open ? Vector3d(2, 0, 0) : Vector3d::Zero());
            const HoldResult h = hold_reset(s, open, cfg);
            fired += h.fired;
            s = h.state;
        }
        CHECK(fired == 1);
        CHECK(s.holding);
        CHECK(s.position.x() > 0.5);
        // The latch does not disturb the reference: it keeps coasting to rest, at most
        // hold_speed * M / C past the held point.
        CHECK(s.velocity.norm() < 1e-3);
        CHECK(s.position.x() - s.hold.x() > 0.0);
        CHECK(s.position.x() - s.hold.x() <= cfg.hold_speed * cfg.mass.x() / cfg.damping.x());
    }

    TEST_CASE("latching leaves the trajectory untouched")
    {
        AdmittanceState s;
        s.holding = false;
        s.position = Vector3d(0.7, 0.1, 1.0);
        s.velocity = Vector3d(0.01, 0, 0);
        s.acceleration = Vector3d(-0.016, 0, 0);
        const HoldResult h = hold_reset(s, false, cfg);
        CHECK(h.fired);
        CHECK(max_abs(h.state.hold - s.position) == 0.0);
        CHECK(h.state.position == s.position);
        CHECK(h.state.velocity == s.velocity);
        CHECK(h.state.acceleration == s.acceleration);
        CHECK_FALSE(hold_reset(h.state, false, cfg).fired);
    }

    TEST_CASE("no reset while the gate is open")
    {
        AdmittanceState s;
        s.holding = false;
        s.position = Vector3d(1, 0, 0);
        const HoldResult h = hold_reset(s, true, cfg);
        CHECK_FALSE(h.fired);
        CHECK(h.state.hold.norm() == 0.0);
    }

    TEST_CASE("repeated pulses give one update each")
    {
        const AdmittanceFilter f(cfg, 1e-3);
        AdmittanceState s;
        std::vector<double> holds;
        for (int k = 0; k < 30000; ++k) {
            const bool open = (k % 10000) < 500;
            s = f.step(s, open ? Vector3d(1.5, 0, 0) : Vector3d::Zero());
            const HoldResult h = hold_reset(s, open, cfg);
            if (h.fired)
                holds.push_back(h.state.hold.x());
            s = h.state;
        }
        REQUIRE(holds.size() == 3);
        CHECK(holds[0] < holds[1]);
        CHECK(holds[1] < holds[2]);
    }
}
