#include "config.hpp"

#include <fstream>
#include <sstream>

#include "gkpmod/core.hpp"

namespace gkpmod::cli {

Json default_config() {
    return Json::parse(R"({
  "seed": 1,
  "threads": 1,
  "target_dim": 500,
  "ancilla_cutoff": 20,
  "counter_displacement": true,
  "fig_wigner": {
    "nbar": 3.0,
    "squeezed_delta": 3.0,
    "grid": {"qmin": -5.0, "qmax": 5.0, "nq": 101, "pmin": -5.0, "pmax": 5.0, "np": 101},
    "beta_extent": 4.0,
    "beta_points": 81,
    "ml_spacing": 0.05
  },
  "fig_scaling": {"nbar": [1.0, 2.0, 3.0, 4.0], "shots": 200},
  "fig_cubic": {
    "nbar": 3.0,
    "squeezed_delta": 3.0,
    "strength_ratio": 0.001,
    "grid": {"qmin": -5.0, "qmax": 5.0, "nq": 101, "pmin": -5.0, "pmax": 5.0, "np": 101},
    "ml_spacing": 0.05,
    "noise_shots": 100,
    "noise_nbar": 3.0,
    "loss_strengths": [0.01, 0.05, 0.1, 0.2],
    "readout_etas": [1.0, 0.75, 0.5, 0.43]
  },
  "drive": {
    "deltas": [1.0, 0.5],
    "omega_T_hz": 250e6,
    "branch": 1,
    "n_harmonics": 4,
    "sample_rate": 2.4e9,
    "samples": 2001,
    "epsilon": 0.1
  },
  "params": {
    "E_J_hz": 10e9,
    "L_A": 2e-9,
    "f_A_hz": 10e9,
    "L_T": 0.2e-9,
    "f_T_hz": 0.5e9,
    "C_J_ratio": 0.01,
    "delta": 1.0
  },
  "release": {"nbar": 3.0, "kappa_t": 8.0, "steps": 0, "shots": 500, "target_dim": 500},
  "appd": {"nbar": [1.0, 2.0, 3.0, 3.5, 4.0], "shots": 200, "threshold": 0.01}
})");
}

namespace {

void check_known(const Json& defaults, const Json& cfg, const std::string& prefix) {
    for (auto it = cfg.begin(); it != cfg.end(); ++it) {
        std::string key = prefix.empty() ? it.key() : prefix + "." + it.key();
        if (!defaults.contains(it.key())) throw ConfigError("unknown config key '" + key + "'");
        const Json& d = defaults.at(it.key());
        if (d.is_object()) {
            if (!it->is_object()) throw ConfigError("config key '" + key + "' must be an object");
            check_known(d, *it, key);
        } else if (d.is_number() != it->is_number() || d.is_boolean() != it->is_boolean() ||
                   d.is_array() != it->is_array()) {
            throw ConfigError("config key '" + key + "' has the wrong type");
        }
    }
}

Json::json_pointer pointer_of(const std::string& dotted) {
    std::string p;
    std::stringstream ss(dotted);
    std::string part;
    while (std::getline(ss, part, '.')) {
        if (part.empty()) throw ConfigError("malformed config path '" + dotted + "'");
        p += "/" + part;
    }
    return Json::json_pointer(p);
}

const Json& at_path(const Json& cfg, const std::string& path) {
    auto ptr = pointer_of(path);
    if (!cfg.contains(ptr)) throw ConfigError("missing config key '" + path + "'");
    return cfg.at(ptr);
}

}  // namespace

void apply_override(Json& cfg, const std::string& assignment) {
    auto eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0) throw ConfigError("override must look like key=value: " + assignment);
    std::string key = assignment.substr(0, eq), text = assignment.substr(eq + 1);
    Json value = Json::parse(text, nullptr, false);
    if (value.is_discarded()) value = text;
    Json patch = Json::object();
    patch[pointer_of(key)] = value;
    check_known(default_config(), patch, "");
    cfg[pointer_of(key)] = value;
}

Json resolve_config(const std::string& path, const std::vector<std::string>& overrides) {
    Json cfg = default_config();
    if (!path.empty()) {
        std::ifstream in(path);
        if (!in) throw ConfigError("cannot open config file " + path);
        Json file = Json::parse(in, nullptr, false);
        if (file.is_discarded() || !file.is_object()) throw ConfigError("config file is not a JSON object: " + path);
        check_known(cfg, file, "");
        cfg.merge_patch(file);
    }
    for (const auto& o : overrides) apply_override(cfg, o);
    return cfg;
}

double get_double(const Json& cfg, const std::string& path) {
    const Json& v = at_path(cfg, path);
    if (!v.is_number()) throw ConfigError("config key '" + path + "' must be a number");
    return v.get<double>();
}

int get_int(const Json& cfg, const std::string& path) {
    const Json& v = at_path(cfg, path);
    if (!v.is_number()) throw ConfigError("config key '" + path + "' must be an integer");
    double d = v.get<double>();
    if (d != std::floor(d)) throw ConfigError("config key '" + path + "' must be an integer");
    return static_cast<int>(d);
}

bool get_bool(const Json& cfg, const std::string& path) {
    const Json& v = at_path(cfg, path);
    if (!v.is_boolean()) throw ConfigError("config key '" + path + "' must be a boolean");
    return v.get<bool>();
}

std::vector<double> get_doubles(const Json& cfg, const std::string& path) {
    const Json& v = at_path(cfg, path);
    if (!v.is_array()) throw ConfigError("config key '" + path + "' must be an array");
    std::vector<double> out;
    for (const auto& x : v) {
        if (!x.is_number()) throw ConfigError("config key '" + path + "' must hold numbers");
        out.push_back(x.get<double>());
    }
    return out;
}

}  // namespace gkpmod::cli
