#include "ksl/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace ksl {

void ProbeReport::add_row(std::vector<double> r) {
    if (r.size() != columns.size()) throw std::logic_error(probe + ": row width does not match the header");
    rows.push_back(std::move(r));
}

bool ProbeReport::all_pass() const {
    for (const auto& [k, v] : pass)
        if (!v) return false;
    return true;
}

namespace {
nlohmann::json finite_or_string(const nlohmann::json& j) {
    // JSON has no inf/nan; keep them readable
    if (j.is_number_float()) {
        double x = j.get<double>();
        if (std::isnan(x)) return "nan";
        if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
        return j;
    }
    if (j.is_structured()) {
        nlohmann::json out = j;
        for (auto it = out.begin(); it != out.end(); ++it) *it = finite_or_string(*it);
        return out;
    }
    return j;
}
}  // namespace

nlohmann::json ProbeReport::to_json() const {
    nlohmann::json j;
    j["probe"] = probe;
    j["summary"] = finite_or_string(summary);
    j["pass"] = pass;
    j["all_pass"] = all_pass();
    j["provenance"] = finite_or_string(provenance);
    j["rows"] = rows.size();
    return j;
}

std::string format_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

void write_csv(const ProbeReport& r, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    for (std::size_t i = 0; i < r.columns.size(); ++i) out << (i ? "," : "") << r.columns[i];
    out << "\n";
    for (const auto& row : r.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << format_double(row[i]);
        out << "\n";
    }
}

void write_json(const std::vector<ProbeReport>& reports, const std::string& path, const nlohmann::json& extra) {
    nlohmann::json j;
    j["schema_version"] = kSchemaVersion;
    bool all = true;
    j["probes"] = nlohmann::json::array();
    for (const auto& r : reports) {
        j["probes"].push_back(r.to_json());
        all = all && r.all_pass();
    }
    j["all_pass"] = all;
    if (!extra.is_null())
        for (auto it = extra.begin(); it != extra.end(); ++it) j[it.key()] = it.value();
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << j.dump(2) << "\n";
}

}  // namespace ksl
