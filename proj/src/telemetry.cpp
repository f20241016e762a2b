#include "dualquad/telemetry.hpp"

#include <json.hpp>

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace dualquad {

const std::vector<std::string>& csv_columns()
{
    static const std::vector<std::string> cols = [] {
        std::vector<std::string> c = {"t",   "x",    "y",     "z",    "vx", "vy", "vz", "phi", "theta", "psi",
                                      "p",   "q",    "r",     "xd",   "yd", "zd", "phid", "thetad", "psid",
                                      "Sx",  "Sy",   "Sz",    "Sphi", "Stheta", "Spsi", "U1", "U2", "U3", "U4"};
        for (const char* prefix : {"u", "f"})
            for (int i = 1; i <= 2; ++i)
                for (int j = 1; j <= 4; ++j)
                    c.push_back(prefix + std::to_string(j) + std::to_string(i));
        for (const char* name : {"Fx", "Fy", "Fz", "gated", "clampflag"})
            c.emplace_back(name);
        return c;
    }();
    return cols;
}

namespace {

constexpr std::size_t kColumnCount = 50;

std::vector<double> flatten(const TelemetryRecord& r)
{
    std::vector<double> v;
    v.reserve(kColumnCount);
    v.push_back(r.t);
    const SystemState::Packed x = r.state.pack();
    v.insert(v.end(), x.data(), x.data() + 12);
    v.insert(v.end(), r.chi_d.data(), r.chi_d.data() + 6);
    v.insert(v.end(), r.S.data(), r.S.data() + 6);
    v.insert(v.end(), r.U.data(), r.U.data() + 4);
    v.insert(v.end(), r.u_q.data(), r.u_q.data() + 8);
    v.insert(v.end(), r.rotor_thrust.data(), r.rotor_thrust.data() + 8);
    v.insert(v.end(), r.force.data(), r.force.data() + 3);
    v.push_back(r.gated ? 1.0 : 0.0);
    v.push_back(r.clamped ? 1.0 : 0.0);
    return v;
}

TelemetryRecord unflatten(const std::vector<double>& v)
{
    TelemetryRecord r;
    std::size_t i = 0;
    auto take = [&](auto& vec) {
        for (Eigen::Index k = 0; k < vec.size(); ++k)
            vec[k] = v[i++];
    };
    r.t = v[i++];
    SystemState::Packed x;
    take(x);
    r.state = SystemState::unpack(x);
    take(r.chi_d);
    take(r.S);
    take(r.U);
    take(r.u_q);
    take(r.rotor_thrust);
    take(r.force);
    r.gated = v[i++] != 0.0;
    r.clamped = v[i++] != 0.0;
    r.V = lyapunov(r.S);
    return r;
}

void append_number(std::string& line, double value)
{
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), value);
    line.append(buf, res.ptr);
}

std::vector<std::string> split(const std::string& line)
{
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ','))
        out.push_back(cell);
    if (!line.empty() && line.back() == ',')
        out.emplace_back();
    return out;
}

}  // namespace

void write_csv(std::ostream& out, std::span<const TelemetryRecord> records)
{
    const auto& cols = csv_columns();
    std::string line;
    for (std::size_t c = 0; c < cols.size(); ++c) {
        if (c)
            line += ',';
        line += cols[c];
    }
    out << line << '\n';
    for (const auto& r : records) {
        line.clear();
        const std::vector<double> v = flatten(r);
        for (std::size_t c = 0; c < v.size(); ++c) {
            if (c)
                line += ',';
            append_number(line, v[c]);
        }
        out << line << '\n';
    }
}

void export_csv(const std::filesystem::path& path, std::span<const TelemetryRecord> records)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw TelemetryIoError("cannot open '" + path.string() + "' for writing");
    write_csv(out, records);
    out.flush();
    if (!out)
        throw TelemetryIoError("write failed for '" + path.string() + "'");
}

std::vector<TelemetryRecord> read_csv(std::istream& in)
{
    std::string line;
    if (!std::getline(in, line))
        throw TelemetryIoError("empty telemetry log (missing header)");
    const auto header = split(line);
    const auto& cols = csv_columns();
    for (std::size_t c = 0; c < cols.size(); ++c) {
        if (c >= header.size())
            throw TelemetryIoError("schema mismatch: missing column '" + cols[c] + "'");
        if (header[c] != cols[c])
            throw TelemetryIoError("schema mismatch at column " + std::to_string(c + 1) + ": expected '" + cols[c]
                                   + "', found '" + header[c] + "'");
    }
    if (header.size() > cols.size())
        throw TelemetryIoError("schema mismatch: unexpected column '" + header[cols.size()] + "'");

    std::vector<TelemetryRecord> records;
    std::size_t row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (line.empty())
            continue;
        const auto cells = split(line);
        if (cells.size() != cols.size())
            throw TelemetryIoError("row " + std::to_string(row) + " has " + std::to_string(cells.size())
                                   + " fields, expected " + std::to_string(cols.size()));
        std::vector<double> v(cells.size());
        for (std::size_t c = 0; c < cells.size(); ++c) {
            const auto& s = cells[c];
            const auto res = std::from_chars(s.data(), s.data() + s.size(), v[c]);
            if (res.ec != std::errc() || res.ptr != s.data() + s.size())
                throw TelemetryIoError("row " + std::to_string(row) + ", column '" + cols[c] + "': bad number '" + s
                                       + "'");
        }
        records.push_back(unflatten(v));
    }
    return records;
}

std::vector<TelemetryRecord> import_csv(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw TelemetryIoError("cannot open '" + path.string() + "' for reading");
    return read_csv(in);
}

std::string summary_json(const RunSummary& summary)
{
    using nlohmann::json;
    auto array = [](const auto& v) {
        json a = json::array();
        for (Eigen::Index i = 0; i < v.size(); ++i)
            a.push_back(v[i]);
        return a;
    };
    json reach = json::object();
    for (int k = 0; k < 6; ++k)
        reach[kAxisNames[k]] = summary.reach_time[k] ? json(*summary.reach_time[k]) : json(nullptr);

    json j;
    j["status"] = summary.status;
    j["message"] = summary.message;
    j["dt"] = summary.dt;
    j["duration"] = summary.duration;
    j["steps"] = summary.steps;
    j["final_position_error"] = array(summary.final_position_error);
    j["final_position_error_norm"] = summary.final_position_error.norm();
    j["max_abs_S"] = array(summary.max_abs_S);
    j["reach_time"] = std::move(reach);
    j["clamp_count"] = summary.clamp_count;
    j["negative_thrust_count"] = summary.negative_thrust_count;
    j["hold_resets"] = summary.hold_resets;
    j["allocation_residual"] = summary.allocation_residual;
    j["inertia_deviation"] = array(summary.inertia_deviation);
    return j.dump(2);
}

void export_summary(const std::filesystem::path& path, const RunSummary& summary)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw TelemetryIoError("cannot open '" + path.string() + "' for writing");
    out << summary_json(summary) << '\n';
    if (!out)
        throw TelemetryIoError("write failed for '" + path.string() + "'");
}

}  // namespace dualquad
