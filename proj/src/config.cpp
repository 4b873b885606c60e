#include "nsadr/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace nsadr {

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, sep))
        if (!item.empty()) out.push_back(item);
    return out;
}

double parse_double(const std::string& key, const std::string& v) {
    try {
        size_t pos = 0;
        const double d = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return d;
    } catch (const std::exception&) {
        throw ConfigError("invalid numeric value for '" + key + "': " + v);
    }
}

int parse_int(const std::string& key, const std::string& v) {
    try {
        size_t pos = 0;
        const int i = std::stoi(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return i;
    } catch (const std::exception&) {
        throw ConfigError("invalid integer value for '" + key + "': " + v);
    }
}

bool parse_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1" || v == "on") return true;
    if (v == "false" || v == "0" || v == "off") return false;
    throw ConfigError("invalid boolean value for '" + key + "': " + v);
}

}  // namespace

std::string method_name(Method m) {
    return m == Method::Galerkin ? "galerkin" : "asgs";
}

Method parse_method(const std::string& name) {
    if (name == "galerkin") return Method::Galerkin;
    if (name == "asgs") return Method::ASGS;
    throw ConfigError("unknown method '" + name + "' (expected galerkin or asgs)");
}

void apply_override(StudyConfig& cfg, const std::string& key,
                    const std::string& value) {
    if (key == "case") {
        cfg.case_key = value;
    } else if (key == "grids") {
        cfg.grids.clear();
        for (const auto& s : split(value, ','))
            cfg.grids.push_back(parse_int(key, s));
    } else if (key == "dts") {
        cfg.dts.clear();
        for (const auto& s : split(value, ','))
            cfg.dts.push_back(parse_double(key, s));
    } else if (key == "method" || key == "methods") {
        cfg.methods.clear();
        for (const auto& s : split(value, ','))
            cfg.methods.push_back(parse_method(s));
    } else if (key == "time.theta") {
        cfg.theta = parse_double(key, value);
    } else if (key == "time.dt") {
        cfg.dts = {parse_double(key, value)};
    } else if (key == "time.T") {
        cfg.T = parse_double(key, value);
    } else if (key == "stab.c1") {
        cfg.stab.c1 = parse_double(key, value);
    } else if (key == "stab.c2") {
        cfg.stab.c2 = parse_double(key, value);
    } else if (key == "stab.c3") {
        cfg.stab.c3 = parse_double(key, value);
    } else if (key == "stab.subscale_mode") {
        if (value == "quasistatic")
            cfg.stab.mode = SubscaleMode::QuasiStatic;
        else if (value == "dynamic")
            cfg.stab.mode = SubscaleMode::Dynamic;
        else
            throw ConfigError("stab.subscale_mode must be quasistatic or dynamic");
    } else if (key == "stab.tau_scale") {
        cfg.stab.tau_scale = parse_double(key, value);
    } else if (key == "stab.truncation") {
        cfg.stab.truncation = parse_int(key, value);
    } else if (key == "solver.method") {
        if (value == "direct-lu")
            cfg.solver.method = SolverMethod::DirectLU;
        else if (value == "bicgstab-ilu")
            cfg.solver.method = SolverMethod::BiCgStabIlu;
        else
            throw ConfigError("solver.method must be direct-lu or bicgstab-ilu");
    } else if (key == "solver.tol") {
        cfg.solver.tol = parse_double(key, value);
    } else if (key == "solver.max_iters") {
        cfg.solver.max_iters = parse_int(key, value);
    } else if (key == "solver.pressure_fix") {
        if (value == "pin-node")
            cfg.solver.pressure_fix = PressureFix::PinNode;
        else if (value == "mean-shift")
            cfg.solver.pressure_fix = PressureFix::MeanShift;
        else
            throw ConfigError("solver.pressure_fix must be pin-node or mean-shift");
    } else if (key == "picard_iters") {
        cfg.picard_iters = parse_int(key, value);
    } else if (key == "estimate") {
        cfg.estimate = parse_bool(key, value);
    } else if (key == "estimator.advection") {
        if (value == "discrete")
            cfg.estimator_advection = EstimatorAdvection::Discrete;
        else if (value == "exact")
            cfg.estimator_advection = EstimatorAdvection::Exact;
        else
            throw ConfigError("estimator.advection must be discrete or exact");
    } else if (key == "jobs") {
        cfg.jobs = parse_int(key, value);
    } else if (key == "out") {
        cfg.out_path = value;
    } else {
        throw ConfigError("unknown config key '" + key + "'");
    }
}

StudyConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);

    StudyConfig cfg;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        // trim
        const auto b = line.find_first_not_of(" \t\r");
        if (b == std::string::npos) continue;
        const auto e = line.find_last_not_of(" \t\r");
        line = line.substr(b, e - b + 1);

        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError(path + ":" + std::to_string(lineno) +
                              ": expected key=value");
        std::string key = line.substr(0, eq);
        std::string value = line.substr(eq + 1);
        auto trim = [](std::string& s) {
            const auto b2 = s.find_first_not_of(" \t");
            const auto e2 = s.find_last_not_of(" \t");
            s = (b2 == std::string::npos) ? "" : s.substr(b2, e2 - b2 + 1);
        };
        trim(key);
        trim(value);
        apply_override(cfg, key, value);
    }
    return cfg;
}

void validate(const StudyConfig& cfg) {
    if (cfg.grids.empty()) throw ConfigError("grids list is empty");
    if (cfg.grids.size() != cfg.dts.size())
        throw ConfigError("length mismatch: " + std::to_string(cfg.grids.size()) +
                          " grids vs " + std::to_string(cfg.dts.size()) + " dts");
    for (size_t i = 0; i < cfg.grids.size(); ++i) {
        if (cfg.grids[i] < 1) throw ConfigError("grid sizes must be >= 1");
        if (cfg.dts[i] <= 0.0) throw ConfigError("time steps must be > 0");
        if (i > 0 && cfg.grids[i] != 2 * cfg.grids[i - 1])
            throw ConfigError("grids must double: " +
                              std::to_string(cfg.grids[i - 1]) + " -> " +
                              std::to_string(cfg.grids[i]));
    }
    if (cfg.theta != 0.0 && cfg.theta != 1.0)
        throw ConfigError("time.theta must be 0 or 1");
    if (cfg.T <= 0.0) throw ConfigError("time.T must be > 0");
    for (double dt : cfg.dts) {
        const double n = cfg.T / dt;
        if (std::abs(n - std::lround(n)) > 1e-9)
            throw ConfigError("time.T must be a multiple of every dt");
    }
    if (cfg.methods.empty()) throw ConfigError("methods list is empty");
    if (cfg.stab.c1 <= 0.0 || cfg.stab.c2 < 0.0 || cfg.stab.c3 <= 0.0)
        throw ConfigError("stabilization constants must be positive");
    if (cfg.solver.tol <= 0.0) throw ConfigError("solver.tol must be > 0");
    if (cfg.solver.max_iters < 1) throw ConfigError("solver.max_iters must be >= 1");
    if (cfg.stab.truncation != 0 && cfg.stab.truncation != 1)
        throw ConfigError("stab.truncation must be 0 (full history) or 1");
    if (cfg.picard_iters < 0) throw ConfigError("picard_iters must be >= 0");
    if (cfg.jobs < 1) throw ConfigError("jobs must be >= 1");
    try {
        make_case(cfg.case_key);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
}

}  // namespace nsadr
