// Probe reports: long-format CSV rows plus a JSON summary.
#pragma once

#include <map>
#include <string>
#include <vector>

#include "json.hpp"

namespace ksl {

inline constexpr int kSchemaVersion = 1;

struct ProbeReport {
    std::string probe;
    std::vector<std::string> columns;       // axis columns then value columns
    std::vector<std::vector<double>> rows;
    nlohmann::json summary = nlohmann::json::object();     // measured functionals, fits
    std::map<std::string, bool> pass;
    nlohmann::json provenance = nlohmann::json::object();  // grid, seeds, tolerances

    void add_row(std::vector<double> r);
    bool all_pass() const;
    nlohmann::json to_json() const;
};

// floats as 17 significant digits
std::string format_double(double x);
void write_csv(const ProbeReport& r, const std::string& path);
void write_json(const std::vector<ProbeReport>& reports, const std::string& path, const nlohmann::json& extra = {});

}  // namespace ksl
