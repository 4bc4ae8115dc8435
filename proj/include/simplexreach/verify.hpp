// verify.hpp — The numbered verification suites run by `simplex-reach verify`
// and by the acceptance tests. Every suite returns a deterministic JSON
// report: fixed key order, per-run seeds derived from the master seed,
// reductions ordered by index, no timestamps.

#pragma once

#include <cmath>
#include <optional>
#include <string>

#include "simplexreach/generator.hpp"
#include "simplexreach/io.hpp"
#include "simplexreach/majorisation.hpp"
#include "simplexreach/quantum_lift.hpp"
#include "simplexreach/reachability.hpp"

namespace simplexreach {

struct VerifyParams {
    int n = 3;
    int m = 2;                 // qudit count (thm2)
    double spacing = 0.05;     // coverage grid spacing
    double epsilon = 0.02;     // coverage admissible distance
    int budget = 40;           // coverage steps per target
    int trials = 1000;         // oracle triples / thm4 initial states
    int steps = 30;            // control steps per random run
    int runs = 30;             // random runs (hull sampling)
    int samples_per_dwell = 4;
    int instances = 200;       // randomised (d, x0) instances
    std::uint64_t seed = 42;
    int threads = 1;
    std::optional<Vector> theta;
    std::optional<double> temperature;
    std::optional<Vector> energies;
    std::optional<Vector> x0;
};

struct SuiteResult {
    ordered_json report;
    bool pass = false;
};

namespace verify_detail {

// Reference instance used throughout: theta = pi/6 detailed balance, i.e.
// level ratios of one third.
inline ProbVector default_d(int n) {
    Vector v(n);
    double x = 1.0;
    for (int i = 0; i < n; ++i) {
        v[i] = x;
        x /= 3.0;
    }
    v /= v.sum();
    return ProbVector(std::move(v));
}

inline ProbVector default_x0() {
    Vector v(3);
    v << 0.9, 0.07, 0.03;
    return ProbVector(std::move(v));
}

inline ProbVector resolve_d(const VerifyParams& p) {
    if (p.theta.has_value()) {
        GeneratorMatrix gen = build_B0(build_lindblad_pair(p.n, *p.theta));
        return gen.fixed_point;
    }
    if (p.temperature.has_value()) {
        Vector energies = p.energies.value_or([&] {
            Vector e(p.n);
            for (int k = 0; k < p.n; ++k) e[k] = k;
            return e;
        }());
        return gibbs_vector(EnergySpec(energies, *p.temperature));
    }
    return default_d(p.n);
}

inline ProbVector resolve_x0(const VerifyParams& p) {
    if (p.x0.has_value()) return ProbVector(*p.x0);
    if (p.n == 3) return default_x0();
    Vector v = Vector::Zero(p.n);
    v[0] = 0.9;
    for (int i = 1; i < p.n; ++i) v[i] = 0.1 / (p.n - 1);
    return ProbVector(std::move(v));
}

inline double finite_or(double v, double fallback) { return std::isfinite(v) ? v : fallback; }

// The theorems for finite temperature assume equally spaced levels, i.e. a
// geometric thermal profile: consecutive ratios of d all equal. Returns the
// worst ratio deviation so the suites can flag instances that leave the
// theorems' hypotheses.
inline double assumption_a_deviation(const ProbVector& d) {
    if (d.size() < 3) return 0.0;
    if (!d.strictly_positive()) return std::numeric_limits<double>::infinity();
    const double r0 = d[1] / d[0];
    double dev = 0.0;
    for (int k = 1; k + 1 < d.size(); ++k) {
        dev = std::max(dev, std::abs(d[k + 1] / d[k] - r0));
    }
    return dev;
}

inline void attach_assumption_a(ordered_json& report, const ProbVector& d) {
    const double dev = assumption_a_deviation(d);
    const bool ok = dev <= 1e-9;
    report["assumption_a"] = {{"satisfied", ok}, {"ratio_deviation", finite_or(dev, -1.0)}};
    if (!ok) {
        log_msg(LogLevel::warn,
                "instance violates the equidistant-levels assumption; the theorem being "
                "checked does not cover it");
    }
}

inline ordered_json containment_to_json(const ContainmentReport& rep) {
    ordered_json j;
    j["runs"] = rep.runs;
    j["samples"] = rep.samples;
    j["max_margin"] = finite_or(rep.max_margin, 0.0);
    ordered_json vs = ordered_json::array();
    for (const auto& v : rep.violations) {
        ordered_json e;
        e["run"] = v.run;
        e["sample"] = v.sample;
        e["margin"] = v.margin;
        vs.push_back(std::move(e));
    }
    j["violations"] = std::move(vs);
    return j;
}

// Candidate generator shared by the oracle suite: members constructed from
// maps that are column stochastic and fix d, plus boundary and free points.
inline ProbVector oracle_candidate(Rng& rng, const ProbVector& d, const GeneratorMatrix& gen,
                                   const ProbVector& y, int kind) {
    const int n = d.size();
    switch (kind % 4) {
        case 0: {
            const double lambda = rng.uniform01();
            Matrix mix = (1.0 - lambda) * Matrix::Identity(n, n) +
                         lambda * d.vec() * Vector::Ones(n).transpose();
            Matrix A = semigroup_matrix(gen, rng.log_uniform(-2.0, 1.0)) * mix *
                       semigroup_matrix(gen, rng.log_uniform(-2.0, 1.0));
            return ProbVector::clamped(A * y.vec());
        }
        case 1:
            return y;
        case 2:
            return d;
        default: {
            Vector v(n);
            for (int i = 0; i < n; ++i) v[i] = -std::log(1.0 - rng.uniform01());
            v /= v.sum();
            return ProbVector(std::move(v));
        }
    }
}

inline ProbVector random_interior(Rng& rng, int n, double spread = 2.0) {
    Vector v(n);
    for (int i = 0; i < n; ++i) v[i] = rng.log_uniform(-spread, 0.0);
    v /= v.sum();
    return ProbVector(std::move(v));
}

inline ProbVector random_point(Rng& rng, int n) {
    Vector v(n);
    for (int i = 0; i < n; ++i) v[i] = -std::log(1.0 - rng.uniform01());
    v /= v.sum();
    return ProbVector(std::move(v));
}

// Geometric profile with a random ratio: the thermal shape of equally spaced
// levels, sorted descending.
inline ProbVector random_geometric(Rng& rng, int n) {
    const double q = rng.uniform(0.05, 0.95);
    Vector v(n);
    double x = 1.0;
    for (int i = 0; i < n; ++i) {
        v[i] = x;
        x *= q;
    }
    v /= v.sum();
    return ProbVector(std::move(v));
}

}  // namespace verify_detail

// ---------------------------------- suites -----------------------------------

// Agreement of the two d-majorisation oracles: the 1-norm characterisation
// against LP witness feasibility.
inline SuiteResult run_suite_oracle(const VerifyParams& p) {
    struct Outcome {
        bool conditions = false;
        bool witness = false;
        double residual = 0.0;
    };
    auto run_one = [&](int trial) {
        Rng rng = Rng::for_run(p.seed, static_cast<std::uint64_t>(trial));
        ProbVector d = verify_detail::random_interior(rng, p.n);
        ProbVector y = verify_detail::random_point(rng, p.n);
        GeneratorMatrix gen = thermal_generator(d);
        ProbVector x = verify_detail::oracle_candidate(rng, d, gen, y, trial);
        Outcome o;
        o.conditions = d_majorises(d, y.vec(), x.vec());
        auto w = witness_matrix(d, y.vec(), x.vec());
        o.witness = w.has_value();
        if (w.has_value()) o.residual = w->max_residual(d, y.vec(), x.vec());
        return o;
    };
    std::vector<Outcome> outcomes = parallel_indexed<Outcome>(p.trials, p.threads, run_one);

    ordered_json violations = ordered_json::array();
    double max_residual = 0.0;
    for (int t = 0; t < p.trials; ++t) {
        const Outcome& o = outcomes[static_cast<std::size_t>(t)];
        max_residual = std::max(max_residual, o.residual);
        if (o.conditions != o.witness) {
            ordered_json v;
            v["trial"] = t;
            v["conditions"] = o.conditions;
            v["witness_feasible"] = o.witness;
            violations.push_back(std::move(v));
        }
    }

    SuiteResult result;
    result.report["suite"] = "oracle";
    result.report["instance"] = {{"n", p.n}, {"trials", p.trials}, {"seed", p.seed}};
    result.report["samples"] = p.trials;
    result.report["violations"] = std::move(violations);
    result.report["max_margin"] = max_residual;
    result.pass = result.report["violations"].empty();
    result.report["pass"] = result.pass;
    return result;
}

// Density-matrix lift consistency: diagonal restriction matches the simplex
// semigroup, the trace functional is preserved, the Choi matrix stays
// positive, diagonal states stay diagonal.
inline SuiteResult run_suite_quantum(const VerifyParams& p) {
    const ProbVector d = verify_detail::resolve_d(p);
    const int n = d.size();
    GeneratorMatrix gen = thermal_generator(d);
    LindbladPair pair = build_lindblad_pair(n, thermal_angles(d));
    const std::vector<ComplexMatrix> Vs = to_complex({pair.V_plus, pair.V_minus});

    ordered_json violations = ordered_json::array();
    ordered_json checks = ordered_json::array();
    double worst = 0.0;
    auto record = [&](const std::string& name, double t, double value, double bound) {
        ordered_json c;
        c["check"] = name;
        c["t"] = t;
        c["value"] = value;
        c["bound"] = bound;
        checks.push_back(c);
        worst = std::max(worst, value);
        if (!(value <= bound)) violations.push_back(std::move(c));
    };

    for (double t : {0.01, 0.1, 1.0, 10.0}) {
        SuperOperator S = lift_semigroup(Vs, n, t);
        const double diag_residual =
            (diagonal_restriction_matrix(S) - semigroup_matrix(gen, t)).cwiseAbs().maxCoeff();
        record("diagonal_restriction", t, diag_residual, 1e-10);
        record("trace_preservation", t, trace_preservation_defect(S), 1e-10);
        record("choi_negativity", t, std::max(0.0, -choi_min_eigenvalue(S)), 1e-10);
    }
    const auto invariance = diagonal_invariance_check(Vs, n);
    record("diagonal_invariance", 0.0, invariance.max_offdiagonal, tol::entry);

    SuiteResult result;
    result.report["suite"] = "quantum";
    result.report["instance"] = {{"n", n}, {"d", to_json(d.vec())}};
    result.report["samples"] = static_cast<int>(checks.size());
    result.report["checks"] = std::move(checks);
    result.report["violations"] = std::move(violations);
    result.report["max_margin"] = worst;
    result.pass = result.report["violations"].empty();
    result.report["pass"] = result.pass;
    return result;
}

namespace verify_detail {

inline SuiteResult coverage_result(const std::string& suite, const ProbVector& x0,
                                   const GeneratorMatrix& gen, const VerifyParams& p,
                                   ordered_json instance) {
    CoverageOptions opts;
    opts.epsilon = p.epsilon;
    opts.budget = p.budget;
    CoverageReport rep = grid_coverage_check(x0, gen, p.spacing, opts, p.threads);

    ordered_json violations = ordered_json::array();
    for (const CoverageFailure& f : rep.failures) {
        ordered_json v;
        v["target"] = to_json(f.target);
        v["residual"] = f.residual;
        v["steps_used"] = f.steps_used;
        violations.push_back(std::move(v));
    }
    SuiteResult result;
    result.report["suite"] = suite;
    result.report["instance"] = std::move(instance);
    result.report["samples"] = rep.grid_points;
    result.report["reached"] = rep.reached;
    result.report["max_residual"] = rep.max_residual;
    result.report["max_steps_used"] = rep.max_steps_used;
    result.report["violations"] = std::move(violations);
    result.report["max_margin"] = rep.max_residual;
    result.pass = rep.full_coverage();
    result.report["pass"] = result.pass;
    return result;
}

}  // namespace verify_detail

// Zero-temperature coverage: every grid point of the simplex is reached
// within epsilon.
inline SuiteResult run_suite_thm1(const VerifyParams& p) {
    GeneratorMatrix gen = zero_temperature_generator(p.n);
    ProbVector x0 = p.x0.has_value() ? ProbVector(*p.x0) : ProbVector::basis(p.n, 0);
    ordered_json instance = {{"n", p.n},
                             {"spacing", p.spacing},
                             {"epsilon", p.epsilon},
                             {"budget", p.budget},
                             {"x0", to_json(x0.vec())}};
    return verify_detail::coverage_result("thm1", x0, gen, p, std::move(instance));
}

// The m-qudit analogue with the bath on the last factor.
inline SuiteResult run_suite_thm2(const VerifyParams& p) {
    GeneratorMatrix gen = build_tensor_B0(p.n, p.m, zero_temperature_angles(p.n));
    ProbVector x0 = p.x0.has_value() ? ProbVector(*p.x0) : ProbVector::basis(gen.dim(), 0);
    ordered_json instance = {{"n", p.n},
                             {"m", p.m},
                             {"spacing", p.spacing},
                             {"epsilon", p.epsilon},
                             {"budget", p.budget},
                             {"x0", to_json(x0.vec())}};
    return verify_detail::coverage_result("thm2", x0, gen, p, std::move(instance));
}

// Initial states classically below d stay below d under random controls.
inline SuiteResult run_suite_thm4(const VerifyParams& p) {
    const ProbVector d = verify_detail::resolve_d(p);
    GeneratorMatrix gen = thermal_generator(d);
    ContainmentReport rep =
        containment_below_d_check(d, gen, p.trials, p.steps, p.seed, p.threads,
                                  p.samples_per_dwell);
    SuiteResult result;
    result.report["suite"] = "thm4";
    result.report["instance"] = {{"n", d.size()},
                                 {"d", to_json(d.vec())},
                                 {"trials", p.trials},
                                 {"steps", p.steps},
                                 {"seed", p.seed}};
    verify_detail::attach_assumption_a(result.report, d);
    ordered_json c = verify_detail::containment_to_json(rep);
    result.report["samples"] = c["samples"];
    result.report["violations"] = c["violations"];
    result.report["max_margin"] = c["max_margin"];
    result.pass = rep.clean();
    result.report["pass"] = result.pass;
    return result;
}

namespace verify_detail {

struct InstanceCheck {
    bool z_found = false;
    bool z_dominates_vertices = false;
    bool inward = false;
    double worst_inner = 0.0;
    double hull_coverage = 0.0;
    ContainmentReport containment;
    ProbVector z;
};

// Full check of one (d, x0) instance: dominating vertex exists and majorises
// every polytope vertex, the field points inward at all hull vertices, and a
// sampled reachable cloud stays inside the hull.
inline InstanceCheck check_instance(const ProbVector& d, const ProbVector& x0,
                                    const SamplePlan& plan) {
    InstanceCheck out;
    GeneratorMatrix gen = thermal_generator(d);
    MajorisationPolytope P = build_polytope(d, x0.sorted_descending());
    enumerate_vertices(P);
    try {
        out.z = dominating_vertex(P);
        out.z_found = true;
    } catch (const violation_error&) {
        return out;
    }
    out.z_dominates_vertices = true;
    for (const ProbVector& v : P.vertices) {
        if (!classical_majorises(out.z.vec(), v.vec(), 1e-9)) out.z_dominates_vertices = false;
    }
    InwardCheckReport inward = inward_check(gen, out.z);
    out.inward = inward.inward;
    out.worst_inner = inward.worst_inner;

    HullContainmentReport hull = hull_containment_check(d, x0, gen, plan);
    out.containment = hull.containment;
    out.hull_coverage = hull.hull_coverage_fraction;
    return out;
}

}  // namespace verify_detail

// The reference instance in full: dominating vertex, inward field, and a
// large sampled cloud inside the hull.
inline SuiteResult run_suite_thm5(const VerifyParams& p) {
    const ProbVector d = verify_detail::resolve_d(p);
    const ProbVector x0 = verify_detail::resolve_x0(p);
    SamplePlan plan;
    plan.runs = p.runs;
    plan.steps = p.steps;
    plan.samples_per_dwell = p.samples_per_dwell;
    plan.seed = p.seed;
    plan.threads = p.threads;
    verify_detail::InstanceCheck check = verify_detail::check_instance(d, x0, plan);

    ordered_json violations = ordered_json::array();
    if (!check.z_found) violations.push_back({{"check", "dominating_vertex_exists"}});
    if (check.z_found && !check.z_dominates_vertices) {
        violations.push_back({{"check", "dominating_vertex_majorises_all"}});
    }
    if (check.z_found && !check.inward) {
        violations.push_back({{"check", "inward_field"}, {"worst_inner", check.worst_inner}});
    }
    for (const auto& v : check.containment.violations) {
        violations.push_back({{"check", "hull_containment"},
                              {"run", v.run},
                              {"sample", v.sample},
                              {"margin", v.margin}});
    }

    SuiteResult result;
    result.report["suite"] = "thm5";
    result.report["instance"] = {{"n", d.size()},
                                 {"d", to_json(d.vec())},
                                 {"x0", to_json(x0.vec())},
                                 {"runs", plan.runs},
                                 {"steps", plan.steps},
                                 {"seed", p.seed}};
    verify_detail::attach_assumption_a(result.report, d);
    if (check.z_found) result.report["dominating_vertex"] = to_json(check.z.vec());
    result.report["worst_inner"] = verify_detail::finite_or(check.worst_inner, 0.0);
    result.report["hull_coverage_fraction"] = check.hull_coverage;
    result.report["samples"] = check.containment.samples;
    result.report["violations"] = std::move(violations);
    result.report["max_margin"] = verify_detail::finite_or(check.containment.max_margin, 0.0);
    result.pass = result.report["violations"].empty();
    result.report["pass"] = result.pass;
    return result;
}

// Randomised (d, x0) instances of the hull inclusion, d geometric (equally
// spaced levels at some temperature), full per-instance checks.
inline SuiteResult run_suite_thm6(const VerifyParams& p) {
    auto run_one = [&](int idx) {
        Rng rng = Rng::for_run(p.seed, static_cast<std::uint64_t>(idx));
        ProbVector d = verify_detail::random_geometric(rng, p.n);
        ProbVector x0 = verify_detail::random_point(rng, p.n);
        SamplePlan plan;
        plan.runs = 4;
        plan.steps = 12;
        plan.samples_per_dwell = 3;
        plan.seed = rng.next_u64();
        plan.threads = 1;
        return verify_detail::check_instance(d, x0, plan);
    };
    std::vector<verify_detail::InstanceCheck> checks =
        parallel_indexed<verify_detail::InstanceCheck>(p.instances, p.threads, run_one);

    ordered_json violations = ordered_json::array();
    int total_samples = 0;
    double max_margin = 0.0;
    for (int i = 0; i < p.instances; ++i) {
        const auto& c = checks[static_cast<std::size_t>(i)];
        total_samples += c.containment.samples;
        max_margin = std::max(max_margin, verify_detail::finite_or(c.containment.max_margin, 0.0));
        if (!c.z_found) violations.push_back({{"instance", i}, {"check", "dominating_vertex_exists"}});
        if (c.z_found && !c.z_dominates_vertices) {
            violations.push_back({{"instance", i}, {"check", "dominating_vertex_majorises_all"}});
        }
        if (c.z_found && !c.inward) {
            violations.push_back(
                {{"instance", i}, {"check", "inward_field"}, {"worst_inner", c.worst_inner}});
        }
        for (const auto& v : c.containment.violations) {
            violations.push_back({{"instance", i},
                                  {"check", "hull_containment"},
                                  {"run", v.run},
                                  {"sample", v.sample},
                                  {"margin", v.margin}});
        }
    }

    SuiteResult result;
    result.report["suite"] = "thm6";
    result.report["instance"] = {{"n", p.n}, {"instances", p.instances}, {"seed", p.seed}};
    result.report["samples"] = total_samples;
    result.report["violations"] = std::move(violations);
    result.report["max_margin"] = max_margin;
    result.pass = result.report["violations"].empty();
    result.report["pass"] = result.pass;
    return result;
}

// The two structural facts alone (dominating vertex and inward field), on the
// reference instance plus randomised ones.
inline SuiteResult run_suite_facts(const VerifyParams& p) {
    struct FactOutcome {
        bool z_found = false;
        bool dominates = false;
        bool inward = false;
        double worst_inner = 0.0;
    };
    auto check_one = [&](const ProbVector& d, const ProbVector& x0) {
        FactOutcome o;
        MajorisationPolytope P = build_polytope(d, x0.sorted_descending());
        enumerate_vertices(P);
        try {
            ProbVector z = dominating_vertex(P);
            o.z_found = true;
            o.dominates = true;
            for (const ProbVector& v : P.vertices) {
                if (!classical_majorises(z.vec(), v.vec(), 1e-9)) o.dominates = false;
            }
            InwardCheckReport rep = inward_check(thermal_generator(d), z);
            o.inward = rep.inward;
            o.worst_inner = rep.worst_inner;
        } catch (const violation_error&) {
        }
        return o;
    };
    auto run_one = [&](int idx) {
        if (idx == 0) return check_one(verify_detail::resolve_d(p), verify_detail::resolve_x0(p));
        Rng rng = Rng::for_run(p.seed, static_cast<std::uint64_t>(idx));
        return check_one(verify_detail::random_geometric(rng, p.n),
                         verify_detail::random_point(rng, p.n));
    };
    std::vector<FactOutcome> outcomes =
        parallel_indexed<FactOutcome>(p.instances + 1, p.threads, run_one);

    ordered_json violations = ordered_json::array();
    double worst_inner = -1.0;
    for (int i = 0; i <= p.instances; ++i) {
        const FactOutcome& o = outcomes[static_cast<std::size_t>(i)];
        worst_inner = std::max(worst_inner, o.worst_inner);
        if (!o.z_found) violations.push_back({{"instance", i}, {"check", "dominating_vertex_exists"}});
        if (o.z_found && !o.dominates) {
            violations.push_back({{"instance", i}, {"check", "dominating_vertex_majorises_all"}});
        }
        if (o.z_found && !o.inward) {
            violations.push_back(
                {{"instance", i}, {"check", "inward_field"}, {"worst_inner", o.worst_inner}});
        }
    }

    SuiteResult result;
    result.report["suite"] = "facts";
    result.report["instance"] = {{"n", p.n}, {"instances", p.instances}, {"seed", p.seed}};
    result.report["samples"] = p.instances + 1;
    result.report["worst_inner"] = worst_inner;
    result.report["violations"] = std::move(violations);
    result.report["max_margin"] = worst_inner;
    result.pass = result.report["violations"].empty();
    result.report["pass"] = result.pass;
    return result;
}

inline SuiteResult run_suite(const std::string& suite, const VerifyParams& p) {
    log_msg(LogLevel::info, "running verify suite '" + suite + "' with " +
                                std::to_string(p.threads) + " thread(s)");
    if (suite == "oracle") return run_suite_oracle(p);
    if (suite == "quantum") return run_suite_quantum(p);
    if (suite == "thm1") return run_suite_thm1(p);
    if (suite == "thm2") return run_suite_thm2(p);
    if (suite == "thm4") return run_suite_thm4(p);
    if (suite == "thm5") return run_suite_thm5(p);
    if (suite == "thm6") return run_suite_thm6(p);
    if (suite == "facts") return run_suite_facts(p);
    throw config_error("unknown verify suite: " + suite);
}

}  // namespace simplexreach
