#pragma once

// Scenario definition, the four built-in presets, and JSON config ingestion.

#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "cuksim/controller.hpp"
#include "cuksim/converter.hpp"
#include "cuksim/sim.hpp"

namespace cuksim {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A fully resolved run description: circuit parameters, operating point,
/// polytope construction inputs, and simulation controls.
struct Scenario {
    std::string name;
    ConverterParams params;
    OperatingSpec op;
    std::vector<int> J;
    double k2_fraction = 0.0;
    double k4_fraction = 0.0;
    SimConfig sim;
};

inline PolytopeSpec make_polytope(const Scenario& sc) {
    return coefficients_from_spec(sc.params, sc.op, sc.J, sc.k2_fraction, sc.k4_fraction);
}

inline const std::vector<std::string>& preset_names() {
    static const std::vector<std::string> names = {"fig2", "fig3", "fig4", "fig5"};
    return names;
}

inline bool is_preset(const std::string& name) {
    for (const auto& n : preset_names())
        if (n == name) return true;
    return false;
}

/// The four built-in scenarios. All share the reference circuit
/// (L1 = L2 = 1 mH, C1 = 1 uF, C2 = 20 uF, R = 5 ohm, v_in = 10 V) at
/// d = 0.5, T_s = 10 us, simulated for 5 ms from circuit startup (x0 = 0);
/// they differ in which state variables shape the polytope:
///   fig2: J = {1,2},     k2 = -L2/(2 rho)
///   fig3: J = {1,2},     k2 = +L2/(2 rho)
///   fig4: J = {1,2,3},   k2 = -L2/(2 rho)
///   fig5: J = {1,2,3,4}, k2 = -3 L2/(4 rho), k4 = -L2 C2/(100 rho T_s)
inline Scenario preset_scenario(const std::string& name) {
    Scenario sc;
    sc.name = name;
    sc.params = ConverterParams{1e-3, 1e-3, 1e-6, 2e-5, 5.0, 10.0};
    sc.op = OperatingSpec{0.5, 1e-5};
    sc.sim = SimConfig::with_period(sc.op.T_s, 5e-3);
    if (name == "fig2") {
        sc.J = {1, 2};
        sc.k2_fraction = -0.5;
    } else if (name == "fig3") {
        sc.J = {1, 2};
        sc.k2_fraction = +0.5;
    } else if (name == "fig4") {
        sc.J = {1, 2, 3};
        sc.k2_fraction = -0.5;
    } else if (name == "fig5") {
        sc.J = {1, 2, 3, 4};
        sc.k2_fraction = -0.75;
        sc.k4_fraction = -0.00125;
    } else {
        throw ConfigError("unknown preset: " + name);
    }
    return sc;
}

namespace detail {

inline const nlohmann::json& require_key(const nlohmann::json& j, const std::string& key,
                                         const std::string& path) {
    if (!j.is_object() || !j.contains(key))
        throw ConfigError("config: missing key " + path);
    return j.at(key);
}

inline double require_number(const nlohmann::json& j, const std::string& key,
                             const std::string& path) {
    const auto& v = require_key(j, key, path);
    if (!v.is_number()) throw ConfigError("config: " + path + " must be a number");
    return v.get<double>();
}

inline double optional_number(const nlohmann::json& j, const std::string& key, double fallback,
                              const std::string& path) {
    if (!j.is_object() || !j.contains(key)) return fallback;
    const auto& v = j.at(key);
    if (!v.is_number()) throw ConfigError("config: " + path + " must be a number");
    return v.get<double>();
}

}  // namespace detail

/// Loads and validates a scenario from a JSON file. Field-level checks name
/// the offending key path; structural defaults for omitted sim keys come
/// from the nominal switching period.
inline Scenario load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open " + path);
    nlohmann::json root;
    try {
        root = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError("config: " + path + ": " + e.what());
    }

    Scenario sc;
    const auto stem = path.find_last_of('/');
    sc.name = stem == std::string::npos ? path : path.substr(stem + 1);
    if (const auto dotpos = sc.name.find_last_of('.'); dotpos != std::string::npos)
        sc.name = sc.name.substr(0, dotpos);

    const auto& params = detail::require_key(root, "params", "params");
    sc.params.L1 = detail::require_number(params, "L1", "params.L1");
    sc.params.L2 = detail::require_number(params, "L2", "params.L2");
    sc.params.C1 = detail::require_number(params, "C1", "params.C1");
    sc.params.C2 = detail::require_number(params, "C2", "params.C2");
    sc.params.R = detail::require_number(params, "R", "params.R");
    sc.params.v_in = detail::require_number(params, "v_in", "params.v_in");
    for (const auto& [field, value] :
         {std::pair<const char*, double>{"L1", sc.params.L1}, {"L2", sc.params.L2},
          {"C1", sc.params.C1}, {"C2", sc.params.C2}, {"R", sc.params.R},
          {"v_in", sc.params.v_in}}) {
        if (!(value > 0.0) || !std::isfinite(value))
            throw ConfigError(std::string("config: params.") + field +
                              " must be strictly positive and finite");
    }

    const auto& op = detail::require_key(root, "op", "op");
    sc.op.d = detail::require_number(op, "d", "op.d");
    sc.op.T_s = detail::require_number(op, "T_s", "op.T_s");
    if (!(sc.op.d > 0.0) || !(sc.op.d < 1.0))
        throw ConfigError("config: op.d must lie strictly inside (0, 1)");
    if (!(sc.op.T_s > 0.0)) throw ConfigError("config: op.T_s must be strictly positive");

    const auto& poly = detail::require_key(root, "polytope", "polytope");
    const auto& jset = detail::require_key(poly, "J", "polytope.J");
    if (!jset.is_array() || jset.empty())
        throw ConfigError("config: polytope.J must be a nonempty array");
    for (const auto& v : jset) {
        if (!v.is_number_integer() || v.get<int>() < 1 || v.get<int>() > 4)
            throw ConfigError("config: polytope.J entries must be integers in {1,2,3,4}");
        sc.J.push_back(v.get<int>());
    }
    sc.k2_fraction = detail::optional_number(poly, "k2_fraction", 0.0, "polytope.k2_fraction");
    sc.k4_fraction = detail::optional_number(poly, "k4_fraction", 0.0, "polytope.k4_fraction");

    sc.sim = SimConfig::with_period(sc.op.T_s, 5e-3);
    if (root.contains("sim")) {
        const auto& sim = root.at("sim");
        sc.sim.duration = detail::optional_number(sim, "duration", sc.sim.duration, "sim.duration");
        sc.sim.max_step = detail::optional_number(sim, "max_step", sc.sim.max_step, "sim.max_step");
        sc.sim.event_tol = detail::optional_number(sim, "event_tol", sc.sim.event_tol, "sim.event_tol");
        sc.sim.min_dwell = detail::optional_number(sim, "min_dwell", sc.sim.min_dwell, "sim.min_dwell");
        sc.sim.sample_stride =
            detail::optional_number(sim, "sample_stride", sc.sim.sample_stride, "sim.sample_stride");
        if (sim.contains("x0")) {
            const auto& x0 = sim.at("x0");
            if (!x0.is_array() || x0.size() != 4)
                throw ConfigError("config: sim.x0 must be an array of 4 numbers");
            for (std::size_t i = 0; i < 4; ++i) {
                if (!x0[i].is_number()) throw ConfigError("config: sim.x0 must be an array of 4 numbers");
                sc.sim.x0[i] = x0[i].get<double>();
            }
        }
    }

    try {
        sc.sim.validate();
        make_polytope(sc);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    return sc;
}

/// Resolves a preset name or a config file path.
inline Scenario load_scenario(const std::string& name_or_path) {
    if (is_preset(name_or_path)) return preset_scenario(name_or_path);
    return load_config(name_or_path);
}

inline nlohmann::json scenario_to_json(const Scenario& sc) {
    nlohmann::json j;
    j["name"] = sc.name;
    j["params"] = {{"L1", sc.params.L1}, {"L2", sc.params.L2}, {"C1", sc.params.C1},
                   {"C2", sc.params.C2}, {"R", sc.params.R},   {"v_in", sc.params.v_in}};
    j["op"] = {{"d", sc.op.d}, {"T_s", sc.op.T_s}};
    j["polytope"] = {{"J", sc.J}, {"k2_fraction", sc.k2_fraction}, {"k4_fraction", sc.k4_fraction}};
    j["sim"] = {{"duration", sc.sim.duration},
                {"x0", {sc.sim.x0[0], sc.sim.x0[1], sc.sim.x0[2], sc.sim.x0[3]}},
                {"max_step", sc.sim.max_step},
                {"event_tol", sc.sim.event_tol},
                {"min_dwell", sc.sim.min_dwell},
                {"sample_stride", sc.sim.sample_stride}};
    return j;
}

}  // namespace cuksim
