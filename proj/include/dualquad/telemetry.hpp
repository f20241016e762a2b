#pragma once

#include "dualquad/simulation.hpp"

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace dualquad {

/// Fixed CSV column order of the telemetry log.
const std::vector<std::string>& csv_columns();

class TelemetryIoError : public Error {
public:
    using Error::Error;
};

/// Header row always; one row per record. Values use shortest round-trip formatting.
void write_csv(std::ostream& out, std::span<const TelemetryRecord> records);
void export_csv(const std::filesystem::path& path, std::span<const TelemetryRecord> records);

/// Parses a log written by write_csv. Header mismatches name the offending column.
/// Fields not present in the CSV (rotor speeds) are left zero; V is rebuilt from S.
std::vector<TelemetryRecord> read_csv(std::istream& in);
std::vector<TelemetryRecord> import_csv(const std::filesystem::path& path);

/// Run summary as pretty-printed JSON; unreached axes have a null reach time.
std::string summary_json(const RunSummary& summary);
void export_summary(const std::filesystem::path& path, const RunSummary& summary);

}  // namespace dualquad
