#include "fbd/output.hpp"

#include <charconv>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace fbd {

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    if (res.ec != std::errc()) throw std::runtime_error("float formatting failed");
    return std::string(buf, res.ptr);
}

namespace {

std::string csv_cell(const nlohmann::json& cell) {
    if (cell.is_number_float()) return format_double(cell.get<double>());
    if (cell.is_number_unsigned()) return std::to_string(cell.get<std::uint64_t>());
    if (cell.is_number_integer()) return std::to_string(cell.get<std::int64_t>());
    if (cell.is_boolean()) return cell.get<bool>() ? "true" : "false";
    if (cell.is_string()) return cell.get<std::string>();
    return cell.dump();
}

}  // namespace

nlohmann::json OutputRecord::to_json_value() const {
    nlohmann::json j;
    j["command"] = command;
    j["parameters"] = parameters;
    j["columns"] = columns;
    j["rows"] = rows;
    j["summary"] = summary;
    j["version"] = version;
    if (seed) j["seed"] = *seed;
    return j;
}

std::string OutputRecord::to_json() const { return to_json_value().dump(2) + "\n"; }

std::string OutputRecord::to_csv() const {
    std::ostringstream out;
    out << "# command: " << command << "\n";
    out << "# version: " << version << "\n";
    if (seed) out << "# seed: " << *seed << "\n";
    out << "# parameters: " << parameters.dump() << "\n";
    if (!summary.empty()) out << "# summary: " << summary.dump() << "\n";
    for (std::size_t i = 0; i < columns.size(); ++i) out << (i ? "," : "") << columns[i];
    out << "\n";
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << csv_cell(row[i]);
        out << "\n";
    }
    return out.str();
}

OutputRecord OutputRecord::from_json(const nlohmann::json& j) {
    OutputRecord r;
    r.command = j.at("command").get<std::string>();
    r.parameters = j.at("parameters");
    r.columns = j.at("columns").get<std::vector<std::string>>();
    for (const auto& row : j.at("rows")) r.rows.emplace_back(row.begin(), row.end());
    r.summary = j.value("summary", nlohmann::json::object());
    r.version = j.at("version").get<std::string>();
    if (j.contains("seed")) r.seed = j.at("seed").get<std::uint64_t>();
    return r;
}

}  // namespace fbd
