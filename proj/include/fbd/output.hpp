#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "fbd/types.hpp"

namespace fbd {

inline constexpr const char* kToolVersion = "0.1.0";

/// Tabular command result shared by the CSV and JSON writers.
///
/// JSON keys are emitted in sorted order and floats in shortest round-trip
/// form, so parsing and re-serialising a record reproduces it byte for byte.
struct OutputRecord {
    std::string command;
    nlohmann::json parameters = nlohmann::json::object();
    std::vector<std::string> columns;
    /// Each cell is a JSON number (integer or float).
    std::vector<std::vector<nlohmann::json>> rows;
    std::optional<std::uint64_t> seed;
    /// Command-specific scalars such as tail bounds or verdicts.
    nlohmann::json summary = nlohmann::json::object();
    std::string version = kToolVersion;

    nlohmann::json to_json_value() const;
    std::string to_json() const;
    /// Commented header lines, one header row, then data rows. Uses '.' and ','
    /// independently of the process locale.
    std::string to_csv() const;

    static OutputRecord from_json(const nlohmann::json& j);
};

}  // namespace fbd
