// simplex-reach — command-line front end: trajectory simulation, region
// pictures, verification suites and the composite reference figure.
//
// Exit codes: 0 success, 1 verification violation, 2 config error,
// 3 numerical failure.

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <sstream>
#include <string>

#include "simplexreach/config.hpp"
#include "simplexreach/figures.hpp"
#include "simplexreach/verify.hpp"

namespace {

using simplexreach::ordered_json;

struct Overrides {
    std::string config_path;
    std::string out;
    std::string theta_csv;
    long long n = -1;
    long long seed = -1;
    double temperature = std::numeric_limits<double>::quiet_NaN();
};

void add_common_flags(CLI::App* cmd, Overrides& ov) {
    cmd->add_option("--config", ov.config_path, "JSON config file (see schema/run_config.schema.json)");
    cmd->add_option("--n", ov.n, "override the level count n");
    cmd->add_option("--seed", ov.seed, "override the master seed");
    cmd->add_option("--out", ov.out, "override the primary output path");
    cmd->add_option("--temperature", ov.temperature, "override the bath temperature");
    cmd->add_option("--theta", ov.theta_csv, "override the angles, comma separated");
}

ordered_json assemble_config(const Overrides& ov, const std::string& out_key) {
    ordered_json cfg = ov.config_path.empty() ? ordered_json::object()
                                              : simplexreach::load_config_file(ov.config_path);
    if (!cfg.is_object()) throw simplexreach::config_error("config root must be a JSON object");
    if (ov.n >= 0) cfg["n"] = ov.n;
    if (ov.seed >= 0) cfg["seed"] = ov.seed;
    if (!ov.out.empty()) cfg[out_key] = ov.out;
    if (!std::isnan(ov.temperature)) cfg["temperature"] = ov.temperature;
    if (!ov.theta_csv.empty()) {
        ordered_json theta = ordered_json::array();
        std::stringstream ss(ov.theta_csv);
        std::string item;
        while (std::getline(ss, item, ',')) {
            try {
                theta.push_back(std::stod(item));
            } catch (const std::exception&) {
                throw simplexreach::config_error("--theta expects comma-separated numbers");
            }
        }
        cfg["theta"] = std::move(theta);
    }
    return cfg;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"simplex-reach: hybrid permutation/dissipation control on the probability simplex"};
    app.require_subcommand(1);

    Overrides ov_sim, ov_region, ov_verify, ov_fig;
    std::string verify_suite;
    bool verify_timing = false;

    CLI::App* sim = app.add_subcommand("simulate", "simulate a controlled trajectory (CSV, optional SVG)");
    add_common_flags(sim, ov_sim);

    CLI::App* region = app.add_subcommand("region", "render the d-majorisation region picture");
    add_common_flags(region, ov_region);

    CLI::App* verify = app.add_subcommand("verify", "run a verification suite and write a JSON report");
    verify->add_option("suite", verify_suite,
                       "suite: thm1|thm2|thm4|thm5|thm6|facts|quantum|oracle");
    verify->add_flag("--timing", verify_timing, "include runtime_ms in the report (breaks byte determinism)");
    add_common_flags(verify, ov_verify);

    CLI::App* fig = app.add_subcommand("figure1", "produce the three reference panels");
    add_common_flags(fig, ov_fig);

    CLI11_PARSE(app, argc, argv);

    try {
        if (sim->parsed()) {
            simplexreach::cmd_simulate(assemble_config(ov_sim, "out_csv"));
            return 0;
        }
        if (region->parsed()) {
            simplexreach::cmd_region(assemble_config(ov_region, "out_svg"));
            return 0;
        }
        if (fig->parsed()) {
            simplexreach::cmd_figure1(assemble_config(ov_fig, "out_dir"));
            return 0;
        }
        // verify
        ordered_json cfg = assemble_config(ov_verify, "out_report");
        if (!verify_suite.empty()) cfg["suite"] = verify_suite;
        if (verify_timing) cfg["timing"] = true;
        simplexreach::validate_config("verify", cfg);
        const std::string suite = cfg.at("suite").get<std::string>();
        simplexreach::VerifyParams params = simplexreach::parse_verify_params(cfg);

        const auto t0 = std::chrono::steady_clock::now();
        simplexreach::SuiteResult result = simplexreach::run_suite(suite, params);
        const double ms =
            std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
        if (simplexreach::config_detail::get_or<bool>(cfg, "timing", false)) {
            result.report["runtime_ms"] = ms;
        }
        const std::string out_path =
            simplexreach::config_detail::get_or<std::string>(cfg, "out_report", "report.json");
        simplexreach::write_file(out_path, simplexreach::dump_report(result.report));
        std::printf("[%s] suite %s: %d samples, %zu violations (report: %s)\n",
                    result.pass ? "PASS" : "FAIL", suite.c_str(),
                    result.report["samples"].get<int>(), result.report["violations"].size(),
                    out_path.c_str());
        return result.pass ? 0 : 1;
    } catch (const simplexreach::config_error& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const simplexreach::violation_error& e) {
        std::fprintf(stderr, "verification violation: %s\n", e.what());
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    }
}
