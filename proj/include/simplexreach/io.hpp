// io.hpp — JSON serialisation of polytopes and reports, CSV output for
// trajectories. All output is deterministic: ordered keys, fixed float
// formatting, ordered reductions upstream.

#pragma once

#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <string>

#include "simplexreach/common.hpp"
#include "simplexreach/majorisation.hpp"
#include "simplexreach/reachability.hpp"

namespace simplexreach {

using ordered_json = nlohmann::ordered_json;

inline ordered_json to_json(const Vector& v) {
    ordered_json arr = ordered_json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v[i]);
    return arr;
}

inline Vector vector_from_json(const ordered_json& arr) {
    if (!arr.is_array()) throw config_error("expected a JSON array of numbers");
    Vector v(static_cast<Eigen::Index>(arr.size()));
    for (std::size_t i = 0; i < arr.size(); ++i) {
        if (!arr[i].is_number()) throw config_error("expected a JSON array of numbers");
        v[static_cast<Eigen::Index>(i)] = arr[i].get<double>();
    }
    return v;
}

// ------------------------------ polytope JSON --------------------------------

inline ordered_json polytope_to_json(const MajorisationPolytope& P) {
    ordered_json j;
    j["d"] = to_json(P.d.vec());
    j["y"] = to_json(P.y.vec());
    ordered_json halfspaces = ordered_json::array();
    for (const Halfspace& h : P.halfspaces) {
        ordered_json row;
        row["a"] = to_json(h.a);
        row["b"] = h.b;
        halfspaces.push_back(std::move(row));
    }
    j["halfspaces"] = std::move(halfspaces);
    ordered_json vertices = ordered_json::array();
    for (const ProbVector& v : P.vertices) vertices.push_back(to_json(v.vec()));
    j["vertices"] = std::move(vertices);
    return j;
}

inline MajorisationPolytope polytope_from_json(const ordered_json& j) {
    MajorisationPolytope P;
    P.d = ProbVector(vector_from_json(j.at("d")));
    P.y = ProbVector(vector_from_json(j.at("y")));
    for (const auto& row : j.at("halfspaces")) {
        P.halfspaces.push_back({vector_from_json(row.at("a")), row.at("b").get<double>()});
    }
    for (const auto& v : j.at("vertices")) {
        P.vertices.push_back(ProbVector::clamped(vector_from_json(v), 1e-9));
    }
    P.vertices_enumerated = !P.vertices.empty();
    return P;
}

// ------------------------------ trajectory CSV -------------------------------

// Comma separated, '.' decimal point, 17 significant digits (round-trip safe).
inline std::string trajectory_csv(const Trajectory& traj) {
    std::string out = "t";
    const int n = traj.samples.empty() ? 0 : traj.samples.front().state.size();
    char buf[64];
    for (int i = 1; i <= n; ++i) {
        std::snprintf(buf, sizeof(buf), ",x_%d", i);
        out += buf;
    }
    out += "\n";
    for (const TrajectorySample& s : traj.samples) {
        std::snprintf(buf, sizeof(buf), "%.17g", s.time);
        out += buf;
        for (int i = 0; i < n; ++i) {
            std::snprintf(buf, sizeof(buf), ",%.17g", s.state[i]);
            out += buf;
        }
        out += "\n";
    }
    return out;
}

// ------------------------------- file helpers --------------------------------

inline void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw numerical_failure_error("cannot open output file: " + path);
    out << content;
    if (!out) throw numerical_failure_error("failed writing output file: " + path);
}

inline std::string dump_report(const ordered_json& j) { return j.dump(2) + "\n"; }

}  // namespace simplexreach
