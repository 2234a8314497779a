// Run configuration: YAML file with a top-level grid/operator block and one
// block per subcommand. Every key has a default or is marked required.
#pragma once

#include <yaml-cpp/yaml.h>

#include <string>
#include <vector>

#include "json.hpp"
#include "ksl/grid.hpp"
#include "ksl/potential.hpp"

namespace ksl {

struct SchemaEntry {
    std::string section;  // "" for top level
    std::string key;      // dotted path inside the section
    std::string type;     // int | double | bool | string | list<double> | list<int>
    std::string def;      // YAML literal; "~" inherits the top-level value
    std::string doc;
    bool required = false;
};

const std::vector<SchemaEntry>& config_schema();
const std::vector<std::string>& subcommands();
nlohmann::json schema_json();
// a complete config built from the defaults (required keys get example values)
std::string default_config_yaml();

struct PotentialSpec {
    std::string family = "gaussian-bump";  // gaussian-well | gaussian-bump | polynomial-decay | embedded-counterexample | file | zero
    double depth = 1.0;
    double width = 1.0;
    double s = 6.0;
    double coupling = 1.0;
    double delta = 1.0;
    std::string path;
};

Potential build_potential(const PotentialSpec& spec, const GridSpec& g, int m);

// thrown for config problems; maps to exit status 2
struct ConfigError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

class Section {
public:
    Section() = default;
    Section(std::string name, YAML::Node node) : name_(std::move(name)), node_(std::move(node)) {}
    double num(const std::string& key) const;
    int integer(const std::string& key) const;
    bool flag(const std::string& key) const;
    std::string str(const std::string& key) const;
    std::vector<double> nums(const std::string& key) const;
    std::vector<int> ints(const std::string& key) const;
    const std::string& name() const { return name_; }

private:
    YAML::Node get(const std::string& key) const;
    std::string name_;
    YAML::Node node_;
};

struct RunConfig {
    std::uint64_t seed = 0;
    int threads = 0;
    std::string output = "out";
    GridSpec grid;
    std::size_t mem_cap = 0;
    int m = 2;
    PotentialSpec potential;
    YAML::Node root;  // merged with defaults

    Section section(const std::string& name) const;
    // grid/operator of a section, falling back to the top level
    GridSpec grid_for(const std::string& name) const;
    int m_for(const std::string& name) const;
    PotentialSpec potential_for(const std::string& name) const;
};

RunConfig parse_config(const YAML::Node& node);
RunConfig load_config(const std::string& path);

}  // namespace ksl
