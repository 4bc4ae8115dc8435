// config.hpp — Run configuration: JSON loading with line-accurate errors,
// schema validation (unknown keys rejected), and typed extraction. The
// schema is embedded here and shipped verbatim at schema/run_config.schema.json;
// a test keeps the two in sync.

#pragma once

#include <json.hpp>

#include <fstream>
#include <optional>
#include <sstream>
#include <string>

#include "simplexreach/common.hpp"
#include "simplexreach/io.hpp"
#include "simplexreach/verify.hpp"

namespace simplexreach {

inline constexpr const char* kRunConfigSchema = R"json({
  "title": "simplex-reach run configuration",
  "description": "One JSON object per invocation. Keys are validated against the command's property table: unknown keys are rejected, types are checked, required keys must be present. Types: integer, number, boolean, string, number[] (array of numbers), control[] (array of {perm: integer[], dwell: number}).",
  "commands": {
    "simulate": {
      "required": ["x0", "out_csv"],
      "properties": {
        "n": "integer",
        "theta": "number[]",
        "temperature": "number",
        "energies": "number[]",
        "x0": "number[]",
        "controls": "control[]",
        "t_max": "number",
        "samples": "integer",
        "permutations": "boolean",
        "out_csv": "string",
        "out_svg": "string"
      }
    },
    "region": {
      "required": ["x0"],
      "properties": {
        "n": "integer",
        "theta": "number[]",
        "temperature": "number",
        "energies": "number[]",
        "x0": "number[]",
        "raster": "integer",
        "field_grid": "integer",
        "out_svg": "string",
        "out_json": "string"
      }
    },
    "verify": {
      "required": ["suite"],
      "properties": {
        "suite": "string",
        "n": "integer",
        "m": "integer",
        "spacing": "number",
        "epsilon": "number",
        "budget": "integer",
        "trials": "integer",
        "steps": "integer",
        "runs": "integer",
        "samples_per_dwell": "integer",
        "instances": "integer",
        "seed": "integer",
        "threads": "integer",
        "theta": "number[]",
        "temperature": "number",
        "energies": "number[]",
        "x0": "number[]",
        "out_report": "string",
        "timing": "boolean"
      }
    },
    "figure1": {
      "required": [],
      "properties": {
        "out_dir": "string",
        "raster": "integer",
        "field_grid": "integer",
        "samples": "integer",
        "t_max": "number"
      }
    }
  }
})json";

// ------------------------------ loading & errors ------------------------------

inline ordered_json parse_config_text(const std::string& text, const std::string& origin) {
    try {
        return ordered_json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        // e.byte is 1-based; convert to line/column for the message
        std::size_t line = 1, col = 1;
        for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
            if (text[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
        std::ostringstream msg;
        msg << origin << ":" << line << ":" << col << ": " << e.what();
        throw config_error(msg.str());
    }
}

inline ordered_json load_config_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw config_error("cannot open config file: " + path);
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_config_text(buffer.str(), path);
}

// ------------------------------ schema validation -----------------------------

namespace config_detail {

inline bool matches_type(const ordered_json& value, const std::string& type) {
    if (type == "integer") return value.is_number_integer() || value.is_number_unsigned();
    if (type == "number") return value.is_number();
    if (type == "boolean") return value.is_boolean();
    if (type == "string") return value.is_string();
    if (type == "number[]") {
        if (!value.is_array()) return false;
        for (const auto& v : value) {
            if (!v.is_number()) return false;
        }
        return true;
    }
    if (type == "control[]") {
        if (!value.is_array()) return false;
        for (const auto& v : value) {
            if (!v.is_object()) return false;
            for (const auto& [k, sub] : v.items()) {
                if (k == "perm") {
                    if (!matches_type(sub, "number[]")) return false;
                } else if (k == "dwell") {
                    if (!sub.is_number()) return false;
                } else {
                    return false;
                }
            }
            if (!v.contains("perm") || !v.contains("dwell")) return false;
        }
        return true;
    }
    return false;
}

}  // namespace config_detail

inline void validate_config(const std::string& command, const ordered_json& config) {
    static const ordered_json schema = ordered_json::parse(kRunConfigSchema);
    if (!schema["commands"].contains(command)) {
        throw config_error("unknown command in schema: " + command);
    }
    if (!config.is_object()) throw config_error("config for '" + command + "' must be a JSON object");
    const ordered_json& spec = schema["commands"][command];
    const ordered_json& props = spec["properties"];
    for (const auto& [key, value] : config.items()) {
        if (!props.contains(key)) {
            throw config_error("unknown key '" + key + "' for command '" + command + "'");
        }
        const std::string type = props[key].get<std::string>();
        if (!config_detail::matches_type(value, type)) {
            throw config_error("key '" + key + "' for command '" + command + "' must have type " +
                               type);
        }
    }
    for (const auto& req : spec["required"]) {
        const std::string key = req.get<std::string>();
        if (!config.contains(key)) {
            throw config_error("missing required key '" + key + "' for command '" + command + "'");
        }
    }
}

// ------------------------------ typed extraction ------------------------------

namespace config_detail {

template <typename T>
T get_or(const ordered_json& j, const std::string& key, T fallback) {
    if (!j.contains(key)) return fallback;
    return j.at(key).get<T>();
}

inline std::optional<Vector> opt_vector(const ordered_json& j, const std::string& key) {
    if (!j.contains(key)) return std::nullopt;
    return vector_from_json(j.at(key));
}

}  // namespace config_detail

// Generator specification shared by simulate/region: either explicit angles
// or a temperature with (optionally implicit equidistant) energies.
struct InstanceConfig {
    int n = 3;
    std::optional<Vector> theta;
    std::optional<double> temperature;
    std::optional<Vector> energies;
    Vector x0;

    GeneratorMatrix build_generator() const {
        if (theta.has_value()) return build_B0(build_lindblad_pair(n, *theta));
        if (temperature.has_value()) {
            Vector e;
            if (energies.has_value()) {
                e = *energies;
            } else {
                e.resize(n);
                for (int k = 0; k < n; ++k) e[k] = k;
            }
            return thermal_generator(gibbs_vector(EnergySpec(e, *temperature)));
        }
        // reference instance: ratio-1/3 thermal profile
        Vector t(n - 1);
        t.setConstant(M_PI / 6.0);
        return build_B0(build_lindblad_pair(n, t));
    }
};

inline InstanceConfig parse_instance(const ordered_json& config) {
    InstanceConfig inst;
    inst.x0 = vector_from_json(config.at("x0"));
    inst.n = config_detail::get_or<int>(config, "n", static_cast<int>(inst.x0.size()));
    if (inst.n != inst.x0.size()) throw config_error("x0 length does not match n");
    inst.theta = config_detail::opt_vector(config, "theta");
    if (config.contains("temperature")) inst.temperature = config.at("temperature").get<double>();
    inst.energies = config_detail::opt_vector(config, "energies");
    if (inst.theta.has_value() && inst.theta->size() != inst.n - 1) {
        throw config_error("theta must have n-1 entries");
    }
    return inst;
}

inline VerifyParams parse_verify_params(const ordered_json& config) {
    VerifyParams p;
    // per-suite defaults where the generic ones do not apply
    const std::string suite = config_detail::get_or<std::string>(config, "suite", "");
    if (suite == "thm2") {
        p.n = 2;
        p.m = 2;
        p.spacing = 0.1;
        p.epsilon = 0.03;
    }
    p.n = config_detail::get_or<int>(config, "n", p.n);
    p.m = config_detail::get_or<int>(config, "m", p.m);
    p.spacing = config_detail::get_or<double>(config, "spacing", p.spacing);
    p.epsilon = config_detail::get_or<double>(config, "epsilon", p.epsilon);
    p.budget = config_detail::get_or<int>(config, "budget", p.budget);
    p.trials = config_detail::get_or<int>(config, "trials", p.trials);
    p.steps = config_detail::get_or<int>(config, "steps", p.steps);
    p.runs = config_detail::get_or<int>(config, "runs", p.runs);
    p.samples_per_dwell = config_detail::get_or<int>(config, "samples_per_dwell", p.samples_per_dwell);
    p.instances = config_detail::get_or<int>(config, "instances", p.instances);
    p.seed = config_detail::get_or<std::uint64_t>(config, "seed", p.seed);
    p.threads = config_detail::get_or<int>(config, "threads", p.threads);
    p.theta = config_detail::opt_vector(config, "theta");
    if (config.contains("temperature")) p.temperature = config.at("temperature").get<double>();
    p.energies = config_detail::opt_vector(config, "energies");
    p.x0 = config_detail::opt_vector(config, "x0");
    return p;
}

inline ControlSequence parse_controls(const ordered_json& arr, int n) {
    ControlSequence c;
    for (const auto& step : arr) {
        std::vector<int> src;
        for (const auto& v : step.at("perm")) src.push_back(v.get<int>());
        if (static_cast<int>(src.size()) != n) throw config_error("control perm length must be n");
        ControlStep s;
        try {
            s.perm = Permutation(std::move(src));
        } catch (const invalid_input_error& e) {
            throw config_error(std::string("invalid control permutation: ") + e.what());
        }
        s.dwell = step.at("dwell").get<double>();
        if (s.dwell < 0.0) throw config_error("control dwell must be >= 0");
        c.steps.push_back(std::move(s));
    }
    return c;
}

}  // namespace simplexreach
