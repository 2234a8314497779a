#include "ksl/config.hpp"

#include <cmath>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>

#include "ksl/counterexample.hpp"

namespace ksl {

namespace {

std::vector<SchemaEntry> build_schema() {
    std::vector<SchemaEntry> s;
    auto add = [&](std::string sec, std::string key, std::string type, std::string def, std::string doc,
                   bool req = false) { s.push_back({std::move(sec), std::move(key), std::move(type), std::move(def), std::move(doc), req}); };
    // top level
    add("", "seed", "int", "", "seed for every random sample set", true);
    add("", "threads", "int", "0", "OpenMP threads, 0 = hardware");
    add("", "output", "string", "out", "output directory");
    add("", "grid.n", "int", "5", "spatial dimension (odd)");
    add("", "grid.N", "int", "12", "points per axis (even)");
    add("", "grid.L", "double", "16.32", "box half-width");
    add("", "grid.mem_cap_mb", "int", "4096", "memory cap for grid allocations");
    add("", "operator.m", "int", "2", "order of (-Delta)^m");
    add("", "potential.family", "string", "gaussian-bump",
        "gaussian-well | gaussian-bump | polynomial-decay | embedded-counterexample | file | zero");
    add("", "potential.depth", "double", "1.0", "well depth or bump height");
    add("", "potential.width", "double", "2.0", "Gaussian width");
    add("", "potential.s", "double", "6.0", "decay exponent for polynomial-decay");
    add("", "potential.coupling", "double", "1.0", "coupling multiplier");
    add("", "potential.delta", "double", "1.0", "support radius for embedded-counterexample");
    add("", "potential.path", "string", "\"\"", "Field binary for family = file");

    auto inherit = [&](const std::string& sec, const std::string& n, const std::string& N, const std::string& L,
                       const std::string& m, const std::string& fam, const std::string& depth, const std::string& width) {
        add(sec, "grid.n", "int", n, "dimension, ~ inherits");
        add(sec, "grid.N", "int", N, "points per axis, ~ inherits");
        add(sec, "grid.L", "double", L, "box half-width, ~ inherits");
        add(sec, "operator.m", "int", m, "order, ~ inherits");
        add(sec, "potential.family", "string", fam, "potential family, ~ inherits");
        add(sec, "potential.depth", "double", depth, "~ inherits");
        add(sec, "potential.width", "double", width, "~ inherits");
        add(sec, "potential.s", "double", "~", "~ inherits");
        add(sec, "potential.coupling", "double", "~", "~ inherits");
        add(sec, "potential.delta", "double", "~", "~ inherits");
        add(sec, "potential.path", "string", "~", "~ inherits");
    };

    add("kernels", "pf_samples", "int", "1000", "random (xi, z) pairs for the partial-fraction identity");
    add("kernels", "pf_tol", "double", "1e-12", "partial-fraction residual tolerance");
    add("kernels", "pf_m", "list<int>", "[1, 2, 3]", "orders tested");
    add("kernels", "kernel_m", "int", "2", "order for the kernel/quadrature comparison");
    add("kernels", "kernel_n", "int", "5", "dimension for the kernel/quadrature comparison");
    add("kernels", "kernel_z", "double", "-1.0", "real z for the kernel comparison");
    add("kernels", "kernel_radii", "list<double>", "[0.5, 1, 2, 3]", "radii compared");
    add("kernels", "kernel_tol", "double", "1e-6", "relative kernel tolerance");
    add("kernels", "decay.enabled", "bool", "true", "run the high-energy decay fits");
    add("kernels", "decay.points", "int", "8", "z samples per fit");
    add("kernels", "decay.tol", "double", "0.05", "slope tolerance");
    add("kernels", "decay.power_iter", "int", "50", "power iterations per z");
    add("kernels", "decay.m1.N", "int", "64", "grid for m = 1, n = 3");
    add("kernels", "decay.m1.L", "double", "8.0", "box half-width for m = 1");
    add("kernels", "decay.m1.eps", "double", "0.2", "damping of the z curve");
    add("kernels", "decay.m1.s", "double", "1.0", "weight <x>^{-s}");
    add("kernels", "decay.m1.lambda_lo", "double", "3.5", "lower end of Re z for m = 1");
    add("kernels", "decay.m1.lambda_hi", "double", "128.0", "upper end of Re z for m = 1");
    add("kernels", "decay.m2.N", "int", "20", "grid for m = 2, n = 5");
    add("kernels", "decay.m2.L", "double", "2.5", "box half-width for m = 2");
    add("kernels", "decay.m2.eps", "double", "0.5", "damping of the z curve for m = 2");
    add("kernels", "decay.m2.s", "double", "0.6", "weight <x>^{-s} for m = 2");
    add("kernels", "decay.m2.lambda_lo", "double", "100.0", "lower end of Re z for m = 2");
    add("kernels", "decay.m2.lambda_hi", "double", "4500.0", "upper end of Re z for m = 2");

    inherit("bs-sweep", "3", "16", "8.0", "1", "gaussian-well", "6.0", "1.0");
    add("bs-sweep", "gamma", "double", "0.0", "smoothing order of the supersmooth weight");
    add("bs-sweep", "eps", "double", "0.1", "weight exponent margin at gamma = m - 1/2");
    add("bs-sweep", "lambdas", "list<double>", "[-3.0, -2.5, -2.0, -1.5, -1.0, -0.75, -0.5, -0.25]", "real parts swept");
    add("bs-sweep", "thetas", "list<double>", "[0.3, 0.1, 0.03, 0.01]", "imaginary parts, the ladder theta -> 0");
    add("bs-sweep", "nu", "double", "0.05", "exclusion radius around eigenvalues");
    add("bs-sweep", "plateau_tol", "double", "0.1", "sup change between the two smallest thetas");
    add("bs-sweep", "growth_factor", "double", "10.0", "required growth of the unprojected norm at an eigenvalue");
    add("bs-sweep", "power_iter", "int", "50", "power iterations per norm");
    add("bs-sweep", "power_tol", "double", "1e-6", "power iteration stagnation tolerance");
    add("bs-sweep", "cap", "int", "4000", "dense support cap");
    add("bs-sweep", "neumann", "bool", "true", "search the Neumann radius");

    inherit("spectrum", "3", "16", "8.0", "1", "gaussian-well", "~", "1.0");
    add("spectrum", "family_depths", "list<double>", "[4.0, 8.0, 12.0]", "well depths located by both routes");
    add("spectrum", "rel_tol", "double", "1e-3", "relative agreement of the two routes");
    add("spectrum", "scan", "int", "200", "Birman-Schwinger scan points");
    add("spectrum", "clr_depth", "double", "4.0", "base depth of the CLR family");
    add("spectrum", "clr_couplings", "list<double>", "[0.5, 1.0, 1.5, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0]",
        "coupling ladder; C is calibrated on the deepest member");
    add("spectrum", "lanczos_tol", "double", "1e-9", "Lanczos residual tolerance");
    add("spectrum", "k_cap", "int", "50", "largest number of negative eigenvalues resolved");

    add("counterexample", "m", "int", "2", "even order");
    add("counterexample", "n", "int", "3", "odd dimension");
    add("counterexample", "delta", "double", "1.0", "support radius");
    add("counterexample", "L", "double", "1.05", "box half-width (periodic solve, so only L > delta is needed)");
    add("counterexample", "Ns", "list<int>", "[24, 48, 96]", "refinement ladder");
    add("counterexample", "check_N", "int", "48", "grid where the residual tolerance applies");
    add("counterexample", "cap", "double", "0.3", "phi(0) = G(cap)");
    add("counterexample", "bump", "int", "0", "cap profile exponent, 0 = 2m + 4");
    add("counterexample", "residual_tol", "double", "1e-3", "relative residual target at check_N");
    add("counterexample", "leak_tol", "double", "1e-6", "largest |V| outside the support ball");
    add("counterexample", "save", "bool", "true", "write V.bin, phi.bin and manifest.json");

    inherit("smoothing", "~", "~", "~", "~", "~", "~", "~");
    add("smoothing", "gamma", "double", "0.0", "0 gives the local decay functional");
    add("smoothing", "eps", "double", "0.1", "weight exponent margin");
    add("smoothing", "Ts", "list<double>", "[5, 10, 20]", "truncation ladder");
    add("smoothing", "dt", "double", "0.1", "time quadrature step");
    add("smoothing", "samples", "int", "1", "Gaussian packets");
    add("smoothing", "plateau_tol", "double", "0.15", "relative change between the two largest T");
    add("smoothing", "boundary_tol", "double", "1e-10", "largest |f| on the box edge relative to max |f|");
    add("smoothing", "drift_Ns", "list<int>", "[8, 12]", "grid ladder for the drift check");
    add("smoothing", "drift_tol", "double", "0.1", "relative change of the plateau across drift_Ns");
    add("smoothing", "project", "bool", "true", "apply P_ac");
    add("smoothing", "free_baseline", "bool", "true", "also run V = 0 on the same samples");
    add("smoothing", "refine_iters", "int", "0", "power refinement of the quadratic form");
    add("smoothing", "inhomogeneous", "bool", "true", "run the Duhamel probe");
    add("smoothing", "t_force", "double", "2.0", "forcing window");
    add("smoothing", "substeps", "int", "2", "Duhamel substeps per dt");
    add("smoothing", "prop_tol", "double", "1e-10", "Chebyshev truncation tolerance");

    inherit("strichartz", "~", "~", "~", "~", "~", "~", "~");
    add("strichartz", "p", "double", "2", "standard pair, alpha = n/(2m)");
    add("strichartz", "q", "double", "10", "standard pair exponent");
    add("strichartz", "gain", "bool", "true", "also run the gain-of-regularity pair");
    add("strichartz", "gain_p", "double", "2", "pair with alpha = n/2");
    add("strichartz", "gain_q", "double", "3.3333333333333335", "gain pair exponent");
    add("strichartz", "Ts", "list<double>", "[5, 10, 20]", "truncation ladder");
    add("strichartz", "dt", "double", "0.1", "time quadrature step");
    add("strichartz", "samples", "int", "1", "Gaussian packets");
    add("strichartz", "plateau_tol", "double", "0.15", "relative change between the two largest T");
    add("strichartz", "boundary_tol", "double", "1e-10", "largest |f| on the box edge relative to max |f|");
    add("strichartz", "drift_Ns", "list<int>", "[8, 12]", "grid ladder for the drift check");
    add("strichartz", "drift_tol", "double", "0.1", "relative change of the plateau across drift_Ns");
    add("strichartz", "project", "bool", "true", "apply P_ac");
    add("strichartz", "prop_tol", "double", "1e-10", "Chebyshev truncation tolerance");

    add("sobolev", "m", "list<int>", "[1, 1, 2]", "one entry per case");
    add("sobolev", "n", "list<int>", "[3, 3, 5]", "dimension per case");
    add("sobolev", "alpha", "list<double>", "[0, 0, 1]", "derivative order per case");
    add("sobolev", "p", "list<double>", "[1.2, 1.3333333333333333, 1.4285714285714286]", "source exponent per case");
    add("sobolev", "q", "list<double>", "[6, 4, 10]", "target exponent per case");
    add("sobolev", "arg", "double", "1.5707963267948966", "ray arg z");
    add("sobolev", "points", "int", "8", "|z| samples");
    add("sobolev", "decades", "double", "1.5", "span of |z| starting at 1");
    add("sobolev", "tol", "double", "0.05", "exponent tolerance");
    add("sobolev", "samples", "int", "8", "random shell mixtures");
    add("sobolev", "R", "double", "60.0", "radial extent");
    add("sobolev", "dk", "double", "0.01", "frequency step");

    add("stein-weiss", "n", "int", "3", "dimension");
    add("stein-weiss", "lambda", "list<double>", "[3, 2, 2]", "one entry per case");
    add("stein-weiss", "alpha", "list<double>", "[0, 0, 2]", "weight exponent on the left per case");
    add("stein-weiss", "beta", "list<double>", "[0, 1, -1]", "weight exponent on the right per case");
    add("stein-weiss", "Ns", "list<int>", "[16, 32, 64]", "refinement ladder");
    add("stein-weiss", "L", "double", "8.0", "box half-width");
    add("stein-weiss", "stable_tol", "double", "0.05", "relative change on the last doubling");
    add("stein-weiss", "power_iter", "int", "200", "power iterations per norm");
    add("stein-weiss", "power_tol", "double", "1e-8", "power iteration stagnation tolerance");
    return s;
}

std::vector<std::string> split(const std::string& key) {
    std::vector<std::string> parts;
    std::stringstream ss(key);
    std::string p;
    while (std::getline(ss, p, '.')) parts.push_back(p);
    return parts;
}

// nullopt when the key is absent; an explicit ~ comes back as a Null node
std::optional<YAML::Node> lookup(const YAML::Node& root, const std::string& key) {
    YAML::Node cur = YAML::Clone(root);
    for (const auto& p : split(key)) {
        if (!cur.IsMap() || !cur[p]) return std::nullopt;
        cur = cur[p];
    }
    return cur;
}

void assign(YAML::Node root, const std::string& key, const YAML::Node& value) {
    auto parts = split(key);
    YAML::Node cur = root;
    for (std::size_t i = 0; i + 1 < parts.size(); ++i) {
        if (!cur[parts[i]]) cur[parts[i]] = YAML::Node(YAML::NodeType::Map);
        cur.reset(cur[parts[i]]);
    }
    cur[parts.back()] = value;
}

// collects the dotted leaf keys of a user block
void leaves(const YAML::Node& n, const std::string& prefix, std::vector<std::string>& out) {
    if (n.IsMap()) {
        for (auto it = n.begin(); it != n.end(); ++it) {
            const std::string k = it->first.as<std::string>();
            leaves(it->second, prefix.empty() ? k : prefix + "." + k, out);
        }
    } else {
        out.push_back(prefix);
    }
}

void check_type(const SchemaEntry& e, const YAML::Node& v, const std::string& where) {
    if (v.IsNull()) return;
    try {
        if (e.type == "int") {
            double d = v.as<double>();
            if (d != std::floor(d)) throw ConfigError("");
        } else if (e.type == "double") {
            v.as<double>();
        } else if (e.type == "bool") {
            v.as<bool>();
        } else if (e.type == "string") {
            v.as<std::string>();
        } else if (e.type == "list<double>" || e.type == "list<int>") {
            if (!v.IsSequence()) throw ConfigError("");
            for (const auto& x : v) x.as<double>();
        }
    } catch (const std::exception&) {
        throw ConfigError("config: " + where + " must be of type " + e.type);
    }
}

}  // namespace

const std::vector<SchemaEntry>& config_schema() {
    static const std::vector<SchemaEntry> s = build_schema();
    return s;
}

const std::vector<std::string>& subcommands() {
    static const std::vector<std::string> s = {"kernels",    "bs-sweep",   "spectrum", "counterexample", "smoothing",
                                               "strichartz", "sobolev",    "stein-weiss", "all"};
    return s;
}

nlohmann::json schema_json() {
    nlohmann::json j;
    j["schema_version"] = 1;
    j["usage"] = "<binary> <subcommand> --config <path> [--out <dir>] [--threads k]";
    j["subcommands"] = subcommands();
    nlohmann::json fields = nlohmann::json::object();
    for (const auto& e : config_schema()) {
        const std::string sec = e.section.empty() ? "global" : e.section;
        nlohmann::json f = {{"key", e.key}, {"type", e.type}, {"doc", e.doc}, {"required", e.required}};
        if (!e.required) f["default"] = e.def;
        fields[sec].push_back(f);
    }
    j["fields"] = fields;
    nlohmann::json probes = nlohmann::json::object();
    for (const auto& s : subcommands()) {
        if (s == "all") {
            probes[s] = {{"runs", std::vector<std::string>(subcommands().begin(), subcommands().end() - 1)}};
            continue;
        }
        probes[s] = {{"section", s}, {"fields", fields.contains(s) ? fields[s] : nlohmann::json::array()}};
    }
    j["probes"] = probes;
    return j;
}

std::string default_config_yaml() {
    YAML::Node root(YAML::NodeType::Map);
    for (const auto& e : config_schema()) {
        YAML::Node v = e.required ? YAML::Load("1") : YAML::Load(e.def);
        if (e.section.empty())
            assign(root, e.key, v);
        else {
            if (!root[e.section]) root[e.section] = YAML::Node(YAML::NodeType::Map);
            assign(root[e.section], e.key, v);
        }
    }
    YAML::Emitter out;
    out << root;
    return std::string(out.c_str()) + "\n";
}

Potential build_potential(const PotentialSpec& p, const GridSpec& g, int m) {
    if (p.family == "zero") return zero_potential(g);
    if (p.family == "gaussian-well") return gaussian_well(g, p.depth, p.width, p.coupling);
    if (p.family == "gaussian-bump") return gaussian_bump(g, p.depth * p.coupling, p.width);
    if (p.family == "polynomial-decay") {
        if (p.s <= 2.0 * m)
            std::cerr << "warning: polynomial-decay with s <= 2m is outside the decay class of the smoothing theorems\n";
        return polynomial_decay(g, p.depth * p.coupling, p.s);
    }
    if (p.family == "embedded-counterexample") {
        auto pair = build_embedded_pair(g, m, p.delta);
        return pair.V.scaled(p.coupling);
    }
    if (p.family == "file") {
        if (p.path.empty()) throw ConfigError("config: potential.path is required for family = file");
        Field f = read_field(p.path);
        if (!(f.grid == g)) throw ConfigError("config: potential file grid differs from the configured grid");
        return potential_from_field(f).scaled(p.coupling);
    }
    throw ConfigError("config: unknown potential family '" + p.family + "'");
}

YAML::Node Section::get(const std::string& key) const {
    const auto v = lookup(node_, key);
    if (!v || v->IsNull()) throw ConfigError("config: " + name_ + "." + key + " is missing");
    return *v;
}

double Section::num(const std::string& key) const { return get(key).as<double>(); }
int Section::integer(const std::string& key) const { return static_cast<int>(std::lround(get(key).as<double>())); }
bool Section::flag(const std::string& key) const { return get(key).as<bool>(); }
std::string Section::str(const std::string& key) const { return get(key).as<std::string>(); }
std::vector<double> Section::nums(const std::string& key) const { return get(key).as<std::vector<double>>(); }
std::vector<int> Section::ints(const std::string& key) const {
    std::vector<int> out;
    for (double d : get(key).as<std::vector<double>>()) out.push_back(static_cast<int>(std::lround(d)));
    return out;
}

Section RunConfig::section(const std::string& name) const {
    if (!root[name]) throw ConfigError("config: no section " + name);
    return Section(name, root[name]);
}

namespace {
YAML::Node pick(const YAML::Node& root, const std::string& sec, const std::string& key) {
    if (!sec.empty()) {
        const auto v = lookup(root[sec], key);
        if (v && !v->IsNull()) return *v;
    }
    const auto v = lookup(root, key);
    if (!v) throw ConfigError("config: " + key + " is missing");
    return *v;
}
}  // namespace

GridSpec RunConfig::grid_for(const std::string& name) const {
    GridSpec g;
    g.n = pick(root, name, "grid.n").as<int>();
    g.N = pick(root, name, "grid.N").as<int>();
    g.L = pick(root, name, "grid.L").as<double>();
    return g;
}

int RunConfig::m_for(const std::string& name) const { return pick(root, name, "operator.m").as<int>(); }

PotentialSpec RunConfig::potential_for(const std::string& name) const {
    PotentialSpec p;
    p.family = pick(root, name, "potential.family").as<std::string>();
    p.depth = pick(root, name, "potential.depth").as<double>();
    p.width = pick(root, name, "potential.width").as<double>();
    p.s = pick(root, name, "potential.s").as<double>();
    p.coupling = pick(root, name, "potential.coupling").as<double>();
    p.delta = pick(root, name, "potential.delta").as<double>();
    p.path = pick(root, name, "potential.path").as<std::string>();
    return p;
}

RunConfig parse_config(const YAML::Node& user) {
    if (!user || !user.IsMap()) throw ConfigError("config: top level must be a mapping");
    std::set<std::string> sections(subcommands().begin(), subcommands().end());
    sections.erase("all");
    // unknown keys are errors, not silently ignored
    std::set<std::string> known_top, known;
    for (const auto& e : config_schema()) (e.section.empty() ? known_top : known).insert(e.section + "/" + e.key);
    for (auto it = user.begin(); it != user.end(); ++it) {
        const std::string k = it->first.as<std::string>();
        if (sections.count(k)) {
            std::vector<std::string> ls;
            leaves(it->second, "", ls);
            for (const auto& l : ls)
                if (!known.count(k + "/" + l)) throw ConfigError("config: unknown key " + k + "." + l);
            continue;
        }
        std::vector<std::string> ls;
        leaves(it->second, k, ls);
        for (const auto& l : ls)
            if (!known_top.count("/" + l)) throw ConfigError("config: unknown key " + l);
    }

    YAML::Node merged(YAML::NodeType::Map);
    for (const auto& e : config_schema()) {
        YAML::Node base = e.section.empty() ? user : user[e.section];
        const auto found = base ? lookup(base, e.key) : std::nullopt;
        const std::string where = (e.section.empty() ? "" : e.section + ".") + e.key;
        if (!found && e.required) throw ConfigError("config: " + where + " is required");
        YAML::Node v = found ? *found : YAML::Load(e.def);
        // ~ only means "inherit" where the default says so
        if (v.IsNull() && e.def != "~") throw ConfigError("config: " + where + " must not be null");
        check_type(e, v, where);
        if (e.section.empty()) {
            assign(merged, e.key, v);
        } else {
            if (!merged[e.section]) merged[e.section] = YAML::Node(YAML::NodeType::Map);
            assign(merged[e.section], e.key, v);
        }
        // every tolerance strictly positive
        if (!v.IsNull() && e.key.size() >= 3 && e.key.compare(e.key.size() - 3, 3, "tol") == 0 && !(v.as<double>() > 0.0))
            throw ConfigError("config: " + where + " must be strictly positive");
        static const std::set<std::string> positive{"L", "dt", "eps", "t_force", "decades", "R", "dk", "delta", "nu"};
        const std::string leaf = e.key.substr(e.key.rfind('.') + 1);
        if (!v.IsNull() && positive.count(leaf) && !(v.as<double>() > 0.0))
            throw ConfigError("config: " + where + " must be strictly positive");
    }

    RunConfig c;
    c.root = merged;
    c.seed = merged["seed"].as<std::uint64_t>();
    c.threads = merged["threads"].as<int>();
    c.output = merged["output"].as<std::string>();
    c.grid = c.grid_for("");
    c.mem_cap = static_cast<std::size_t>(merged["grid"]["mem_cap_mb"].as<double>()) << 20;
    c.m = merged["operator"]["m"].as<int>();
    c.potential = c.potential_for("");
    try {
        c.grid.validate(c.mem_cap);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    if (c.m < 1) throw ConfigError("config: operator.m must be >= 1");
    if (c.grid.n <= 2 * c.m) throw ConfigError("config: n > 2m is required (grid.n = " + std::to_string(c.grid.n) +
                                               ", operator.m = " + std::to_string(c.m) + ")");
    if (c.threads < 0) throw ConfigError("config: threads must be >= 0");
    // per-section operator blocks are validated before anything runs
    for (const std::string sec : {"bs-sweep", "spectrum", "smoothing", "strichartz"}) {
        const GridSpec g = c.grid_for(sec);
        const int m = c.m_for(sec);
        try {
            g.validate(c.mem_cap);
        } catch (const std::invalid_argument& e) {
            throw ConfigError("config: " + sec + ": " + e.what());
        }
        if (g.n <= 2 * m) throw ConfigError("config: " + sec + ": n > 2m is required");
    }
    return c;
}

RunConfig load_config(const std::string& path) {
    YAML::Node node;
    try {
        node = YAML::LoadFile(path);
    } catch (const std::exception& e) {
        throw ConfigError("config: cannot read " + path + ": " + e.what());
    }
    return parse_config(node);
}

}  // namespace ksl
