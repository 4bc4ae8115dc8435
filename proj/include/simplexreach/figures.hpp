// figures.hpp — The rendering commands behind the CLI: trajectory CSV/SVG
// output, the d-majorisation region picture with its permuted images, hull,
// extreme points and vector-field arrows, and the composite three-panel
// figure for the reference instance.

#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <string>
#include <vector>

#include "simplexreach/config.hpp"
#include "simplexreach/io.hpp"
#include "simplexreach/majorisation.hpp"
#include "simplexreach/reachability.hpp"
#include "simplexreach/svg.hpp"

namespace simplexreach {

namespace figures_detail {

inline const std::vector<std::string>& palette() {
    static const std::vector<std::string> colors = {"#1f77b4", "#ff7f0e", "#2ca02c",
                                                    "#d62728", "#9467bd", "#8c564b",
                                                    "#17becf", "#bcbd22", "#e377c2"};
    return colors;
}

inline std::string with_suffix(const std::string& path, const std::string& tag) {
    const std::size_t dot = path.find_last_of('.');
    const std::size_t slash = path.find_last_of("/\\");
    if (dot == std::string::npos || (slash != std::string::npos && dot < slash)) {
        return path + tag;
    }
    return path.substr(0, dot) + tag + path.substr(dot);
}

// Vertices of conv{pi(z)} projected to 2-d have a convex outline; order them
// by angle around their centroid.
inline std::vector<Vector> hull_outline(const std::vector<Vector>& points,
                                        const svg::TernaryProjection& proj) {
    std::vector<std::pair<double, std::size_t>> angles;
    double cx = 0.0, cy = 0.0;
    std::vector<svg::Point2> projected;
    for (const Vector& v : points) {
        projected.push_back(proj.project(v));
        cx += projected.back().x;
        cy += projected.back().y;
    }
    cx /= static_cast<double>(points.size());
    cy /= static_cast<double>(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) {
        angles.emplace_back(std::atan2(projected[i].y - cy, projected[i].x - cx), i);
    }
    std::sort(angles.begin(), angles.end());
    std::vector<Vector> ordered;
    for (const auto& [angle, idx] : angles) ordered.push_back(points[idx]);
    return ordered;
}

}  // namespace figures_detail

// --------------------------------- simulate ----------------------------------

struct SimulateOutcome {
    std::vector<Trajectory> trajectories;  // first entry starts at x0
    std::vector<std::string> csv_paths;
};

// Runs the configured trajectory (explicit controls, or a single dissipation
// interval of t_max sampled `samples` times), optionally together with every
// permutation of the initial state, and writes CSV plus an optional ternary
// SVG for three-level systems.
inline SimulateOutcome cmd_simulate(const ordered_json& config) {
    validate_config("simulate", config);
    log_msg(LogLevel::info, "simulate: writing " + config.at("out_csv").get<std::string>());
    InstanceConfig inst = parse_instance(config);
    GeneratorMatrix gen = inst.build_generator();
    ProbVector x0(inst.x0);

    ControlSequence controls;
    int samples_per_dwell = 1;
    if (config.contains("controls")) {
        controls = parse_controls(config.at("controls"), inst.n);
        samples_per_dwell = std::max(1, config_detail::get_or<int>(config, "samples", 1));
    } else {
        const double t_max = config_detail::get_or<double>(config, "t_max", 0.0);
        if (t_max > 0.0) {
            controls.steps.push_back({Permutation::identity(inst.n), t_max});
            samples_per_dwell = std::max(1, config_detail::get_or<int>(config, "samples", 120));
        }
    }

    SimulateOutcome outcome;
    outcome.trajectories.push_back(simulate(x0, gen, controls, samples_per_dwell));
    if (config_detail::get_or<bool>(config, "permutations", false)) {
        for (const Permutation& pi : all_permutations(inst.n)) {
            if (pi.is_identity()) continue;
            outcome.trajectories.push_back(simulate(x0.permuted(pi), gen, controls, samples_per_dwell));
        }
    }

    const std::string out_csv = config.at("out_csv").get<std::string>();
    for (std::size_t k = 0; k < outcome.trajectories.size(); ++k) {
        const std::string path =
            k == 0 ? out_csv : figures_detail::with_suffix(out_csv, ".p" + std::to_string(k));
        write_file(path, trajectory_csv(outcome.trajectories[k]));
        outcome.csv_paths.push_back(path);
    }

    if (config.contains("out_svg")) {
        if (inst.n != 3) throw config_error("out_svg requires n = 3");
        svg::Scene scene;
        scene.add_simplex_frame();
        for (std::size_t k = 0; k < outcome.trajectories.size(); ++k) {
            std::vector<Vector> pts;
            for (const auto& s : outcome.trajectories[k].samples) pts.push_back(s.state.vec());
            scene.add_trajectory(pts, "layer-trajectories",
                                 figures_detail::palette()[k % figures_detail::palette().size()]);
        }
        scene.add_dot(gen.fixed_point.vec(), "layer-fixed-point", "black", 5.0);
        scene.add_legend({{"black", "fixed point d"}, {"#1f77b4", "trajectories"}});
        write_file(config.at("out_svg").get<std::string>(), scene.render());
    }
    return outcome;
}

// ---------------------------------- region -----------------------------------

struct RegionOutcome {
    MajorisationPolytope polytope;  // for sorted x0
    ProbVector dominating;
    std::vector<Vector> hull_vertices;
};

// Renders the region d-majorised by x0 (red), its permuted images (blue),
// the permutation hull of the dominating vertex, the hull's extreme points
// and the vector-field arrows; writes the vertex data as JSON.
inline RegionOutcome cmd_region(const ordered_json& config) {
    validate_config("region", config);
    InstanceConfig inst = parse_instance(config);
    if (inst.n > 5) throw size_error("region: n capped at 5");
    GeneratorMatrix gen = inst.build_generator();
    const ProbVector d = gen.fixed_point;
    ProbVector x0(inst.x0);

    RegionOutcome outcome;
    outcome.polytope = build_polytope(d, x0.sorted_descending());
    enumerate_vertices(outcome.polytope);
    outcome.dominating = dominating_vertex(outcome.polytope);
    for (const Permutation& pi : all_permutations(inst.n)) {
        Vector v = pi.apply(outcome.dominating.vec());
        bool seen = false;
        for (const Vector& w : outcome.hull_vertices) {
            if ((w - v).cwiseAbs().sum() < 1e-12) {
                seen = true;
                break;
            }
        }
        if (!seen) outcome.hull_vertices.push_back(std::move(v));
    }

    if (config.contains("out_json")) {
        ordered_json j = polytope_to_json(outcome.polytope);
        j["dominating_vertex"] = to_json(outcome.dominating.vec());
        ordered_json hull = ordered_json::array();
        for (const Vector& v : outcome.hull_vertices) hull.push_back(to_json(v));
        j["hull_vertices"] = std::move(hull);
        write_file(config.at("out_json").get<std::string>(), dump_report(j));
    }

    if (config.contains("out_svg")) {
        if (inst.n != 3) throw config_error("out_svg requires n = 3");
        const int raster = config_detail::get_or<int>(config, "raster", 400);
        const int field_grid = config_detail::get_or<int>(config, "field_grid", 12);
        svg::Scene scene;
        scene.add_simplex_frame();

        // hull of the permuted dominating vertices, drawn under the regions
        scene.add_polygon(figures_detail::hull_outline(outcome.hull_vertices, scene.projection()),
                          "layer-hull", "#555555", "#dddddd", 0.5);

        // blue: permuted images pi(region), tested via pi^{-1}x in the region
        for (const Permutation& pi : all_permutations(inst.n)) {
            if (pi.is_identity()) continue;
            const Permutation inv = pi.inverse();
            scene.add_region_raster(
                [&](const Vector& x) { return d_majorises(d, x0.vec(), inv.apply(x)); },
                "layer-region-blue", "#4477cc", 0.35, raster);
        }
        // red: the region itself
        scene.add_region_raster([&](const Vector& x) { return d_majorises(d, x0.vec(), x); },
                                "layer-region-red", "#cc2222", 0.55, raster);

        // exact vertex polygons on top of the raster fills (the polytope here
        // is built for x0 as given, matching the raster membership test)
        MajorisationPolytope shown = build_polytope(d, x0);
        enumerate_vertices(shown);
        if (shown.vertices.size() >= 3) {
            std::vector<Vector> raw;
            for (const ProbVector& v : shown.vertices) raw.push_back(v.vec());
            scene.add_polygon(figures_detail::hull_outline(raw, scene.projection()),
                              "layer-region-red-outline", "#881111", "none", 0.0);
            for (const Permutation& pi : all_permutations(inst.n)) {
                if (pi.is_identity()) continue;
                std::vector<Vector> permuted;
                for (const Vector& v : raw) permuted.push_back(pi.apply(v));
                scene.add_polygon(figures_detail::hull_outline(permuted, scene.projection()),
                                  "layer-region-blue-outline", "#223388", "none", 0.0);
            }
        }

        scene.add_vector_field([&](const Vector& x) { return vector_field(gen, x); },
                               "layer-field", "#333333", field_grid);
        for (const Vector& v : outcome.hull_vertices) scene.add_dot(v, "layer-vertices", "#222222", 4.0);
        scene.add_dot(d.vec(), "layer-fixed-point", "black", 5.0);
        scene.add_dot(x0.vec(), "layer-start", "#cc2222", 5.0);
        scene.add_legend({{"#cc2222", "d-majorised by x0"},
                          {"#4477cc", "permuted images"},
                          {"#dddddd", "hull of extreme points"},
                          {"black", "fixed point d"}});
        write_file(config.at("out_svg").get<std::string>(), scene.render());
    }
    return outcome;
}

// ---------------------------------- figure1 ----------------------------------

// Composite of the three panels for the reference instance: (a) trajectories
// of x0 and its permutations, (b) additionally trajectories started at
// permutations of d, (c) the region picture.
inline void cmd_figure1(const ordered_json& config) {
    validate_config("figure1", config);
    const std::string out_dir = config_detail::get_or<std::string>(config, "out_dir", "figure1_out");
    std::filesystem::create_directories(out_dir);
    const int samples = config_detail::get_or<int>(config, "samples", 160);
    const double t_max = config_detail::get_or<double>(config, "t_max", 10.0);
    const int raster = config_detail::get_or<int>(config, "raster", 400);
    const int field_grid = config_detail::get_or<int>(config, "field_grid", 12);

    ordered_json panel_a;
    panel_a["x0"] = {0.9, 0.07, 0.03};
    panel_a["theta"] = {M_PI / 6.0, M_PI / 6.0};
    panel_a["t_max"] = t_max;
    panel_a["samples"] = samples;
    panel_a["permutations"] = true;
    panel_a["out_csv"] = out_dir + "/fig1a.csv";
    panel_a["out_svg"] = out_dir + "/fig1a.svg";
    cmd_simulate(panel_a);

    // panel (b): panel (a) plus trajectories from permutations of d
    {
        InstanceConfig inst;
        inst.n = 3;
        Vector theta(2);
        theta << M_PI / 6.0, M_PI / 6.0;
        inst.theta = theta;
        GeneratorMatrix gen = build_B0(build_lindblad_pair(3, theta));
        ProbVector x0 = verify_detail::default_x0();

        ControlSequence relax{{{Permutation::identity(3), t_max}}};
        svg::Scene scene;
        scene.add_simplex_frame();
        int color = 0;
        for (const Permutation& pi : all_permutations(3)) {
            Trajectory traj = simulate(x0.permuted(pi), gen, relax, samples);
            std::vector<Vector> pts;
            for (const auto& s : traj.samples) pts.push_back(s.state.vec());
            scene.add_trajectory(pts, "layer-trajectories",
                                 figures_detail::palette()[color++ % figures_detail::palette().size()]);
            write_file(out_dir + "/fig1b_x0_p" + std::to_string(color - 1) + ".csv",
                       trajectory_csv(traj));
        }
        for (const Permutation& pi : all_permutations(3)) {
            if (pi.is_identity()) continue;
            Trajectory traj = simulate(gen.fixed_point.permuted(pi), gen, relax, samples);
            std::vector<Vector> pts;
            for (const auto& s : traj.samples) pts.push_back(s.state.vec());
            scene.add_trajectory(pts, "layer-trajectories-from-d",
                                 figures_detail::palette()[color++ % figures_detail::palette().size()]);
            write_file(out_dir + "/fig1b_d_p" + std::to_string(color - 1) + ".csv",
                       trajectory_csv(traj));
        }
        scene.add_dot(gen.fixed_point.vec(), "layer-fixed-point", "black", 5.0);
        scene.add_legend({{"black", "fixed point d"},
                          {"#1f77b4", "from x0 and permutations"},
                          {"#17becf", "from permutations of d"}});
        write_file(out_dir + "/fig1b.svg", scene.render());
    }

    ordered_json panel_c;
    panel_c["x0"] = {0.9, 0.07, 0.03};
    panel_c["theta"] = {M_PI / 6.0, M_PI / 6.0};
    panel_c["raster"] = raster;
    panel_c["field_grid"] = field_grid;
    panel_c["out_svg"] = out_dir + "/fig1c.svg";
    panel_c["out_json"] = out_dir + "/fig1c_vertices.json";
    cmd_region(panel_c);
}

}  // namespace simplexreach
