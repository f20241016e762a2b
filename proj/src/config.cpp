#include "dualquad/config.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace dualquad {

namespace {

using nlohmann::json;

class Section {
public:
    Section(const json& node, std::string path, std::string source)
        : node_(node), path_(std::move(path)), source_(std::move(source))
    {
        if (!node_.is_object())
            fail(path_, "expected an object");
    }

    [[noreturn]] void fail(const std::string& key, const std::string& msg) const
    {
        throw ConfigError(source_ + ": " + key + ": " + msg);
    }

    std::string key(const std::string& k) const { return path_.empty() ? k : path_ + "." + k; }
    bool has(const std::string& k) const { return node_.contains(k); }

    Section child(const std::string& k) const { return Section(at(k), key(k), source_); }

    const json& at(const std::string& k) const
    {
        seen_.insert(k);
        return node_.at(k);
    }

    void number(const std::string& k, double& out) const
    {
        if (!has(k))
            return;
        const json& v = at(k);
        if (!v.is_number())
            fail(key(k), "expected a number");
        out = v.get<double>();
        if (!std::isfinite(out))
            fail(key(k), "expected a finite number");
    }

    void boolean(const std::string& k, bool& out) const
    {
        if (!has(k))
            return;
        if (!at(k).is_boolean())
            fail(key(k), "expected true or false");
        out = at(k).get<bool>();
    }

    template <typename Vec>
    void vector(const std::string& k, Vec& out, bool allow_scalar = false) const
    {
        if (!has(k))
            return;
        const json& v = at(k);
        const auto n = static_cast<std::size_t>(out.size());
        if (allow_scalar && v.is_number()) {
            for (std::size_t i = 0; i < n; ++i)
                out[i] = v.get<double>();
            return;
        }
        if (!v.is_array() || v.size() != n)
            fail(key(k), "expected an array of " + std::to_string(n) + " numbers");
        for (std::size_t i = 0; i < n; ++i) {
            if (!v[i].is_number())
                fail(key(k) + "[" + std::to_string(i) + "]", "expected a number");
            out[i] = v[i].get<double>();
        }
    }

    std::string string(const std::string& k, const std::string& fallback) const
    {
        if (!has(k))
            return fallback;
        if (!at(k).is_string())
            fail(key(k), "expected a string");
        return at(k).get<std::string>();
    }

    /// Rejects keys that were never read.
    void finish() const
    {
        for (const auto& [k, _] : node_.items())
            if (!seen_.count(k))
                fail(key(k), "unknown key");
    }

private:
    const json& node_;
    std::string path_;
    std::string source_;
    mutable std::set<std::string> seen_;
};

void read_system(const Section& s, ScenarioConfig& cfg, Vector3d& d1, Vector3d& d2)
{
    QuadParams& q = cfg.quad;
    PayloadParams& pl = cfg.payload;
    s.number("m_i", q.mass);
    s.number("J_x", q.inertia.x());
    s.number("J_y", q.inertia.y());
    s.number("J_z", q.inertia.z());
    s.number("l", q.arm_length);
    s.number("k_t", q.thrust_coeff);
    s.number("k_m", q.moment_coeff);
    s.number("m_L", pl.mass);
    s.number("J_Lx", pl.inertia.x());
    s.number("J_Ly", pl.inertia.y());
    s.number("J_Lz", pl.inertia.z());
    s.number("L", pl.length);
    s.number("r_L", pl.radius);
    s.vector("k_l_drag", cfg.system.linear_drag, true);
    s.vector("k_r_drag", cfg.system.angular_drag, true);
    s.number("g", cfg.system.gravity);

    // Combined inertia: explicit J_t* keys, or the parallel-axis value on request, otherwise
    // the reference value.
    bool from_geometry = false;
    s.boolean("inertia_from_geometry", from_geometry);
    const int given = s.has("J_tx") + s.has("J_ty") + s.has("J_tz");
    std::optional<Vector3d> configured = cfg.system.inertia;
    if (given == 3 && !from_geometry) {
        Vector3d J;
        s.number("J_tx", J.x());
        s.number("J_ty", J.y());
        s.number("J_tz", J.z());
        configured = J;
    } else if (given != 0) {
        s.fail(s.key("J_t"), from_geometry ? "J_tx/J_ty/J_tz conflict with inertia_from_geometry"
                                           : "give all of J_tx, J_ty, J_tz or none");
    } else if (from_geometry) {
        configured.reset();
    }
    s.finish();

    try {
        q.validate();
        pl.validate();
        const auto comp = compose_system_params(q, q, pl, d1, d2, configured, cfg.system.gravity);
        const Vector3d lin = cfg.system.linear_drag, ang = cfg.system.angular_drag;
        cfg.system = comp.params;
        cfg.system.linear_drag = lin;
        cfg.system.angular_drag = ang;
        cfg.parallel_axis_inertia = comp.parallel_axis_inertia;
        cfg.system.validate();
    } catch (const InvalidParameter& e) {
        s.fail("system", e.what());
    }
}

void read_controller(const Section& s, ControlGains& g)
{
    s.vector("xi", g.xi);
    s.vector("eta", g.eta);
    s.vector("lambda1", g.lambda1);
    s.vector("lambda2", g.lambda2);
    s.number("a", g.a);
    s.number("Phi", g.boundary_layer);
    s.number("psi_d", g.yaw_ref);
    s.number("attitude_filter_hz", g.attitude_filter_hz);
    s.number("disturbance_bound", g.disturbance_bound);
    double guard_deg = g.angle_guard * 180.0 / M_PI;
    s.number("angle_guard_deg", guard_deg);
    g.angle_guard = guard_deg * M_PI / 180.0;
    const std::string mode = s.string("switch_mode", g.mode == SwitchMode::Sign ? "sign" : "saturation");
    if (mode == "sign")
        g.mode = SwitchMode::Sign;
    else if (mode == "saturation")
        g.mode = SwitchMode::Saturation;
    else
        s.fail(s.key("switch_mode"), "expected \"sign\" or \"saturation\"");
    s.finish();
    try {
        g.validate();
    } catch (const InvalidParameter& e) {
        s.fail("controller", e.what());
    }
}

void read_admittance(const Section& s, AdmittanceConfig& a)
{
    s.vector("M", a.mass, true);
    s.vector("C", a.damping, true);
    s.vector("K", a.stiffness, true);
    s.number("threshold", a.force_threshold);
    s.number("hold_speed", a.hold_speed);
    s.finish();
    try {
        a.validate();
    } catch (const InvalidParameter& e) {
        s.fail("admittance", e.what());
    }
}

void read_allocation(const Section& s, AllocationConfig& a, Vector3d& d1, Vector3d& d2)
{
    Vector8d costs = Eigen::Map<const Vector8d>(a.costs.data());
    s.vector("costs", costs);
    for (int j = 0; j < 8; ++j) {
        if (!(costs[j] > 0))
            s.fail(s.key("costs") + "[" + std::to_string(j) + "]", "cost coefficients must be > 0");
        a.costs[j] = costs[j];
    }
    s.vector("d1", d1);
    s.vector("d2", d2);
    s.finish();
}

ForceProfile read_force(const Section& s)
{
    ForceProfile f;
    s.number("t0", f.t0);
    s.number("sigma", f.sigma);
    s.number("amplitude", f.amplitude);
    s.vector("direction", f.direction);
    s.finish();
    if (!(f.sigma > 0))
        s.fail(s.key("sigma"), "must be > 0");
    const double n = f.direction.norm();
    if (!(n > 0))
        s.fail(s.key("direction"), "must be non-zero");
    f.direction /= n;
    return f;
}

DisturbanceEvent read_disturbance(const Section& s)
{
    DisturbanceEvent d;
    const std::string kind = s.string("kind", "constant");
    if (kind == "constant")
        d.kind = DisturbanceKind::Constant;
    else if (kind == "step")
        d.kind = DisturbanceKind::Step;
    else if (kind == "sinusoid")
        d.kind = DisturbanceKind::Sinusoid;
    else
        s.fail(s.key("kind"), "expected \"constant\", \"step\" or \"sinusoid\"");
    s.vector("force", d.force);
    s.vector("torque", d.torque);
    s.number("t0", d.t0);
    s.number("t1", d.t1);
    s.number("frequency", d.frequency);
    s.finish();
    return d;
}

AltitudeRamp read_ramp(const Section& s, const char* target_key, double target)
{
    AltitudeRamp r;
    r.target = target;
    s.number("t0", r.t0);
    s.number("t1", r.t1);
    s.number(target_key, r.target);
    s.finish();
    if (!(r.t1 > r.t0))
        s.fail(s.key("t1"), "must be greater than t0");
    return r;
}

void read_sim(const Section& s, SimSettings& sim)
{
    s.number("duration", sim.duration);
    s.number("dt", sim.dt);
    if (s.has("initial")) {
        const Section init = s.child("initial");
        init.vector("position", sim.initial.position);
        init.vector("velocity", sim.initial.velocity);
        Vector3d att = sim.initial.attitude.vector();
        init.vector("attitude", att);
        sim.initial.attitude = EulerAngles::from(att);
        init.vector("rates", sim.initial.body_rates);
        init.finish();
    }
    if (s.has("reference")) {
        Vector3d ref = sim.initial.position;
        s.vector("reference", ref);
        sim.reference = ref;
    }
    if (s.has("takeoff"))
        sim.takeoff = read_ramp(s.child("takeoff"), "height", 1.0);
    if (s.has("landing"))
        sim.landing = read_ramp(s.child("landing"), "altitude", 0.0);
    s.boolean("ground_clamp", sim.ground_clamp);
    s.number("landed_altitude", sim.landed_altitude);
    s.finish();
    if (!(sim.dt >= 1e-4 && sim.dt <= 1e-2))
        s.fail(s.key("dt"), "must lie in [1e-4, 1e-2]");
    if (!(sim.duration > 0))
        s.fail(s.key("duration"), "must be > 0");
}

std::string line_col(const std::string& text, std::size_t byte)
{
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
        if (text[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

}  // namespace

ScenarioConfig parse_scenario(const std::string& text, const std::string& source)
{
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(source + ": " + line_col(text, e.byte == 0 ? 0 : e.byte - 1) + ": " + e.what());
    }

    ScenarioConfig cfg;
    const Section top(root, "", source);

    Vector3d d1 = cfg.system.d1, d2 = cfg.system.d2;
    if (top.has("allocation"))
        read_allocation(top.child("allocation"), cfg.allocation, d1, d2);
    {
        const json empty = json::object();
        const Section sys = top.has("system") ? top.child("system") : Section(empty, "system", source);
        read_system(sys, cfg, d1, d2);
    }
    if (top.has("controller"))
        read_controller(top.child("controller"), cfg.controller);
    if (top.has("admittance"))
        read_admittance(top.child("admittance"), cfg.admittance);
    if (top.has("forces")) {
        const json& arr = top.at("forces");
        if (!arr.is_array())
            top.fail("forces", "expected an array");
        for (std::size_t i = 0; i < arr.size(); ++i)
            cfg.forces.push_back(read_force(Section(arr[i], "forces[" + std::to_string(i) + "]", source)));
    }
    if (top.has("disturbances")) {
        const json& arr = top.at("disturbances");
        if (!arr.is_array())
            top.fail("disturbances", "expected an array");
        for (std::size_t i = 0; i < arr.size(); ++i)
            cfg.disturbances.push_back(
                read_disturbance(Section(arr[i], "disturbances[" + std::to_string(i) + "]", source)));
    }
    if (top.has("sim"))
        read_sim(top.child("sim"), cfg.sim);
    top.finish();

    try {
        cfg.validate();
    } catch (const InvalidParameter& e) {
        throw ConfigError(source + ": " + e.what());
    }
    return cfg;
}

ScenarioConfig load_scenario(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError(path.string() + ": cannot open scenario file");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_scenario(ss.str(), path.string());
}

}  // namespace dualquad
