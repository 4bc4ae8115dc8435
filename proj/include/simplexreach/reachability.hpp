// reachability.hpp — The hybrid control system on the simplex: instantaneous
// permutations interleaved with dissipative flow intervals. Provides the
// simulator, randomised reachable-set sampling, a deterministic
// target-coverage search, and the containment checks used by the
// verification suites.

#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "simplexreach/common.hpp"
#include "simplexreach/generator.hpp"
#include "simplexreach/majorisation.hpp"
#include "simplexreach/prob_vector.hpp"

namespace simplexreach {

// ------------------------------ control model --------------------------------

struct ControlStep {
    Permutation perm;
    double dwell = 0.0;  // in 1/rate units
};

struct ControlSequence {
    std::vector<ControlStep> steps;

    void validate(int n) const {
        for (const ControlStep& s : steps) {
            if (s.perm.size() != n) throw invalid_input_error("ControlSequence: permutation size");
            if (!(s.dwell >= 0.0)) throw invalid_input_error("ControlSequence: negative dwell");
        }
    }
};

struct TrajectorySample {
    double time = 0.0;
    ProbVector state;
};

struct Trajectory {
    std::vector<TrajectorySample> samples;
    ControlSequence controls;

    const ProbVector& endpoint() const { return samples.back().state; }
};

// Applies, per step, the instantaneous permutation and then the flow for the
// dwell time, recording `samples_per_dwell` uniform intermediate samples.
inline Trajectory simulate(const ProbVector& x0, const GeneratorMatrix& G,
                           const ControlSequence& controls, int samples_per_dwell = 1) {
    if (x0.size() != G.dim()) throw invalid_input_error("simulate: dimension mismatch");
    if (samples_per_dwell < 1) throw invalid_input_error("simulate: need samples_per_dwell >= 1");
    controls.validate(G.dim());

    Trajectory traj;
    traj.controls = controls;
    traj.samples.push_back({0.0, x0});
    double t = 0.0;
    ProbVector state = x0;
    for (const ControlStep& step : controls.steps) {
        if (!step.perm.is_identity()) {
            state = state.permuted(step.perm);
            traj.samples.push_back({t, state});
        }
        if (step.dwell > 0.0) {
            const double dt = step.dwell / samples_per_dwell;
            const Matrix E = semigroup_matrix(G, dt);
            for (int k = 0; k < samples_per_dwell; ++k) {
                state = ProbVector::clamped(E * state.vec());
                t += dt;
                traj.samples.push_back({t, state});
            }
        }
    }
    return traj;
}

inline Vector vector_field(const GeneratorMatrix& G, const Vector& x) { return -(G.B0 * x); }

// ------------------------- randomised reachable sets -------------------------

// Dwells are drawn log-uniformly over [1e-2, 1e2]/|B0| and permutations
// uniformly, spanning fast and slow switching.
inline ControlSequence random_control_sequence(const GeneratorMatrix& G, int steps, Rng& rng) {
    const std::vector<Permutation> perms = all_permutations(G.dim());
    ControlSequence c;
    c.steps.reserve(static_cast<std::size_t>(steps));
    const double rate_scale = G.norm1();
    for (int k = 0; k < steps; ++k) {
        ControlStep step;
        step.perm = perms[rng.below(perms.size())];
        step.dwell = rng.log_uniform(-2.0, 2.0) / rate_scale;
        c.steps.push_back(std::move(step));
    }
    return c;
}

// x = (product of `mixes` random T-transforms) y, classically majorised by y.
inline ProbVector doubly_stochastic_mix(const ProbVector& y, Rng& rng, int mixes) {
    Vector x = y.vec();
    const int n = y.size();
    for (int m = 0; m < mixes; ++m) {
        const int i = static_cast<int>(rng.below(n));
        int j = static_cast<int>(rng.below(n));
        if (i == j) j = (j + 1) % n;
        const double lambda = rng.uniform01();
        const double xi = x[i], xj = x[j];
        x[i] = (1.0 - lambda) * xi + lambda * xj;
        x[j] = lambda * xi + (1.0 - lambda) * xj;
    }
    return ProbVector(std::move(x));
}

struct SamplePlan {
    int runs = 16;
    int steps = 20;              // control steps per run
    int samples_per_dwell = 4;
    std::uint64_t seed = 0;
    int threads = 1;
};

struct PointCloud {
    std::vector<ProbVector> points;  // trajectory samples, ordered by (run, time)
};

// Reachable-set sampling by independent random control sequences. Output is
// deterministic in (plan.seed, plan.runs, plan.steps) for any thread count.
inline PointCloud sample_reachable(const ProbVector& x0, const GeneratorMatrix& G,
                                   const SamplePlan& plan) {
    auto run_one = [&](int run) {
        Rng rng = Rng::for_run(plan.seed, static_cast<std::uint64_t>(run));
        ControlSequence c = random_control_sequence(G, plan.steps, rng);
        Trajectory traj = simulate(x0, G, c, plan.samples_per_dwell);
        std::vector<ProbVector> pts;
        pts.reserve(traj.samples.size());
        for (auto& s : traj.samples) pts.push_back(std::move(s.state));
        return pts;
    };
    std::vector<std::vector<ProbVector>> per_run =
        parallel_indexed<std::vector<ProbVector>>(plan.runs, plan.threads, run_one);
    PointCloud cloud;
    if (plan.runs == 0) {
        cloud.points.push_back(x0);
        return cloud;
    }
    for (auto& run_points : per_run) {
        for (auto& p : run_points) cloud.points.push_back(std::move(p));
    }
    return cloud;
}

// --------------------------- target coverage search --------------------------

struct CoverageOptions {
    int budget = 40;             // maximum control steps per target
    double epsilon = 0.02;       // admissible 1-norm distance to the target
    int tau_grid = 140;          // dwell candidates per search level
    double tau_max_scaled = 60.0;  // dwell range upper end, in units of 1/|B0|
    int beam_depth = 6;
    int beam_width = 48;
    double beam_spacing = 0.03;  // minimum pairwise 1-norm distance kept in the beam
    int polish_seeds = 6;        // beam nodes refined by Gauss-Newton on their dwells
};

struct TargetSearchResult {
    ControlSequence controls;
    ProbVector endpoint;
    double residual = 0.0;
    int steps_used = 0;
};

namespace detail {

// min over permutations pi of |x - pi(g)|_1; by the rearrangement inequality
// this is the 1-norm distance of the descending-sorted vectors. Searching in
// this quotient and appending one aligning permutation at the end is
// equivalent to searching for g itself, but the landscape loses the n!
// redundancy and the constructive control paths become monotone.
inline double sorted_l1(const Vector& x, const Vector& g_sorted_desc) {
    Vector xs = x;
    std::sort(xs.data(), xs.data() + xs.size(), std::greater<double>());
    return (xs - g_sorted_desc).cwiseAbs().sum();
}

// The permutation p with p.apply(x) ranked like g (descending ranks match).
inline Permutation aligning_permutation(const Vector& x, const Vector& g) {
    const int n = static_cast<int>(x.size());
    std::vector<int> rank_x(static_cast<std::size_t>(n)), rank_g(static_cast<std::size_t>(n));
    std::iota(rank_x.begin(), rank_x.end(), 0);
    std::iota(rank_g.begin(), rank_g.end(), 0);
    std::stable_sort(rank_x.begin(), rank_x.end(), [&](int a, int b) { return x[a] > x[b]; });
    std::stable_sort(rank_g.begin(), rank_g.end(), [&](int a, int b) { return g[a] > g[b]; });
    std::vector<int> src(static_cast<std::size_t>(n));
    for (int r = 0; r < n; ++r) {
        src[static_cast<std::size_t>(rank_g[static_cast<std::size_t>(r)])] =
            rank_x[static_cast<std::size_t>(r)];
    }
    return Permutation(std::move(src));
}

// Dwell grid {0} ∪ logspace shared across a coverage run, with the flow
// matrices precomputed once.
struct DwellTable {
    std::vector<double> taus;
    std::vector<Matrix> flows;

    DwellTable(const GeneratorMatrix& G, int count, double tau_max_scaled) {
        const double scale = G.norm1();
        taus.push_back(0.0);
        const double lo = std::log10(1e-3 / scale);
        const double hi = std::log10(tau_max_scaled / scale);
        for (int k = 0; k < count; ++k) {
            taus.push_back(std::pow(10.0, lo + (hi - lo) * k / (count - 1.0)));
        }
        flows.reserve(taus.size());
        for (double tau : taus) flows.push_back(semigroup_matrix(G, tau));
    }
};

inline double golden_dwell(const GeneratorMatrix& G, const Vector& from,
                           const Vector& target_sorted, double lo, double hi, int iters = 48) {
    const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
    auto f = [&](double tau) {
        return sorted_l1(semigroup_matrix(G, tau) * from, target_sorted);
    };
    double a = lo, b = hi;
    double c = b - phi * (b - a), d = a + phi * (b - a);
    double fc = f(c), fd = f(d);
    for (int k = 0; k < iters; ++k) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + phi * (b - a);
            fd = f(d);
        }
    }
    const double tau = 0.5 * (a + b);
    // compare against the bracket ends; the best endpoint may sit at lo
    double best_tau = tau, best = f(tau);
    for (double cand : {lo, hi}) {
        const double val = f(cand);
        if (val < best) {
            best = val;
            best_tau = cand;
        }
    }
    return best_tau;
}

struct StepChoice {
    int perm_index = -1;
    double tau = 0.0;
    double dist = std::numeric_limits<double>::infinity();
};

// Best single (permutation, dwell) step from `from` toward the sorted
// target: exhaustive over permutations, grid + golden polish over the dwell.
inline StepChoice best_step(const GeneratorMatrix& G, const DwellTable& table,
                            const std::vector<Permutation>& perms, const Vector& from,
                            const Vector& target_sorted) {
    StepChoice best;
    int best_tau_index = 0;
    for (std::size_t p = 0; p < perms.size(); ++p) {
        const Vector moved = perms[p].apply(from);
        for (std::size_t k = 0; k < table.taus.size(); ++k) {
            const double dist = sorted_l1(table.flows[k] * moved, target_sorted);
            if (dist < best.dist) {
                best.dist = dist;
                best.perm_index = static_cast<int>(p);
                best.tau = table.taus[k];
                best_tau_index = static_cast<int>(k);
            }
        }
    }
    // polish the dwell inside the bracketing grid cells
    const Vector moved = perms[static_cast<std::size_t>(best.perm_index)].apply(from);
    const double lo = table.taus[static_cast<std::size_t>(std::max(0, best_tau_index - 1))];
    const double hi = table.taus[std::min(table.taus.size() - 1,
                                          static_cast<std::size_t>(best_tau_index + 1))];
    if (hi > lo) {
        const double tau = golden_dwell(G, moved, target_sorted, lo, hi);
        const double dist = sorted_l1(semigroup_matrix(G, tau) * moved, target_sorted);
        if (dist < best.dist) {
            best.dist = dist;
            best.tau = tau;
        }
    }
    return best;
}

struct BeamNode {
    Vector state;
    std::vector<std::pair<int, double>> steps;  // (permutation index, dwell)
    double dist = std::numeric_limits<double>::infinity();
};

// Deterministic beam search over control prefixes: each level extends every
// beam node by all (permutation, grid dwell) steps and keeps the `width`
// closest candidates subject to a minimum pairwise spacing, so states far
// from the target survive as stepping stones. The best node seen at any
// depth is remembered. Candidate keys are unique, so the selection is
// order-independent. Returns the kept final nodes sorted by distance, best
// overall node first.
inline std::vector<BeamNode> beam_search(const Vector& x0, const DwellTable& table,
                                         const std::vector<Permutation>& perms,
                                         const Vector& target_sorted, int depth, int width,
                                         double spacing, double stop_dist) {
    struct Candidate {
        double dist;
        int node, perm, tau;
        bool operator<(const Candidate& o) const {
            if (dist != o.dist) return dist < o.dist;
            if (node != o.node) return node < o.node;
            if (perm != o.perm) return perm < o.perm;
            return tau < o.tau;
        }
    };
    auto sorted_copy = [](const Vector& v) {
        Vector s = v;
        std::sort(s.data(), s.data() + s.size(), std::greater<double>());
        return s;
    };

    BeamNode best;
    best.state = x0;
    best.dist = sorted_l1(x0, target_sorted);
    std::vector<BeamNode> beam{best};

    for (int level = 0; level < depth && best.dist > stop_dist; ++level) {
        std::vector<Candidate> candidates;
        candidates.reserve(beam.size() * perms.size() * (table.taus.size() / 2 + 1));
        for (std::size_t b = 0; b < beam.size(); ++b) {
            for (std::size_t p = 0; p < perms.size(); ++p) {
                const Vector moved = perms[p].apply(beam[b].state);
                for (std::size_t k = 0; k < table.taus.size(); k += 2) {
                    const double dist = sorted_l1(table.flows[k] * moved, target_sorted);
                    candidates.push_back({dist, static_cast<int>(b), static_cast<int>(p),
                                          static_cast<int>(k)});
                }
            }
        }
        std::sort(candidates.begin(), candidates.end());

        std::vector<BeamNode> next;
        std::vector<Vector> next_sorted;
        next.reserve(static_cast<std::size_t>(width));
        for (const Candidate& cand : candidates) {
            if (next.size() >= static_cast<std::size_t>(width)) break;
            const BeamNode& parent = beam[static_cast<std::size_t>(cand.node)];
            Vector state = table.flows[static_cast<std::size_t>(cand.tau)] *
                           perms[static_cast<std::size_t>(cand.perm)].apply(parent.state);
            Vector state_sorted = sorted_copy(state);
            bool crowded = false;
            for (const Vector& kept : next_sorted) {
                if ((kept - state_sorted).cwiseAbs().sum() < spacing) {
                    crowded = true;
                    break;
                }
            }
            if (crowded) continue;
            BeamNode node;
            node.state = std::move(state);
            node.steps = parent.steps;
            node.steps.emplace_back(cand.perm, table.taus[static_cast<std::size_t>(cand.tau)]);
            node.dist = cand.dist;
            if (node.dist < best.dist) best = node;
            next.push_back(std::move(node));
            next_sorted.push_back(std::move(state_sorted));
        }
        if (next.empty()) break;
        beam = std::move(next);
    }

    std::sort(beam.begin(), beam.end(), [](const BeamNode& a, const BeamNode& b) {
        if (a.dist != b.dist) return a.dist < b.dist;
        return a.steps < b.steps;
    });
    bool have_best = false;
    for (const BeamNode& node : beam) {
        if (node.dist == best.dist && node.steps == best.steps) {
            have_best = true;
            break;
        }
    }
    if (!have_best) beam.insert(beam.begin(), best);
    return beam;
}

// Damped Gauss–Newton on the dwell vector of a fixed permutation pattern,
// minimising the squared distance of the endpoint map to the target. The
// Jacobian is exact: d(endpoint)/d(tau_i) = suffix(-B0 state_after_step_i).
// Dwells are kept nonnegative by projection. Returns the achieved distance.
inline double gauss_newton_dwells(const GeneratorMatrix& G, const Vector& x0,
                                  const std::vector<Permutation>& perms, const Vector& target,
                                  std::vector<std::pair<int, double>>& steps, int max_iters = 30) {
    const int n = static_cast<int>(x0.size());
    const int k = static_cast<int>(steps.size());
    if (k == 0) return (x0 - target).cwiseAbs().sum();

    auto forward = [&](const std::vector<std::pair<int, double>>& s, std::vector<Vector>* after) {
        Vector state = x0;
        if (after) after->clear();
        for (const auto& [p, tau] : s) {
            state = perms[static_cast<std::size_t>(p)].apply(state);
            if (tau > 0.0) state = semigroup_matrix(G, tau) * state;
            if (after) after->push_back(state);
        }
        return state;
    };

    double lambda = 1e-6;
    std::vector<Vector> after;
    Vector endpoint = forward(steps, &after);
    double best_norm = (endpoint - target).norm();
    for (int iter = 0; iter < max_iters && best_norm > 1e-13; ++iter) {
        Matrix J(n, k);
        for (int i = 0; i < k; ++i) {
            Vector v = -(G.B0 * after[static_cast<std::size_t>(i)]);
            for (int j = i + 1; j < k; ++j) {
                v = perms[static_cast<std::size_t>(steps[static_cast<std::size_t>(j)].first)].apply(v);
                const double tau = steps[static_cast<std::size_t>(j)].second;
                if (tau > 0.0) v = semigroup_matrix(G, tau) * v;
            }
            J.col(i) = v;
        }
        const Vector residual = target - endpoint;
        bool improved = false;
        for (int attempt = 0; attempt < 8; ++attempt) {
            Matrix JtJ = J.transpose() * J + lambda * Matrix::Identity(k, k);
            Vector delta = JtJ.ldlt().solve(J.transpose() * residual);
            std::vector<std::pair<int, double>> trial = steps;
            for (int i = 0; i < k; ++i) {
                trial[static_cast<std::size_t>(i)].second =
                    std::max(0.0, trial[static_cast<std::size_t>(i)].second + delta[i]);
            }
            Vector trial_end = forward(trial, nullptr);
            const double trial_norm = (trial_end - target).norm();
            if (trial_norm < best_norm) {
                steps = std::move(trial);
                best_norm = trial_norm;
                lambda = std::max(lambda * 0.3, 1e-12);
                endpoint = forward(steps, &after);
                improved = true;
                break;
            }
            lambda *= 10.0;
        }
        if (!improved) break;
    }
    return (endpoint - target).cwiseAbs().sum();
}

}  // namespace detail

// Deterministic search for a control sequence steering x0 to within
// opts.epsilon of the target. The search minimises the permutation-free
// distance (sorted profiles) and appends one aligning permutation at the
// end. Strictly improving greedy steps (permutation exhaustive, dwell by
// line search) run first; single-horizon greedy stalls on interior targets,
// so a diversity-kept beam search over short control prefixes takes over and
// its best few dwell patterns are polished by Gauss-Newton against the
// aligned target before greedy resumes.
inline TargetSearchResult reach_target(const ProbVector& x0, const GeneratorMatrix& G,
                                       const ProbVector& target, const CoverageOptions& opts) {
    const int n = G.dim();
    const std::vector<Permutation> perms = all_permutations(n);
    const detail::DwellTable table(G, opts.tau_grid, opts.tau_max_scaled);
    const Vector g_sorted = target.sorted_descending().vec();

    TargetSearchResult result;
    result.endpoint = x0;
    result.residual = detail::sorted_l1(x0.vec(), g_sorted);

    auto apply_step = [&](const Permutation& perm, double tau) {
        result.controls.steps.push_back({perm, tau});
        ProbVector moved = result.endpoint.permuted(perm);
        result.endpoint = tau > 0.0 ? semigroup_step(G, tau, moved) : moved;
        result.residual = detail::sorted_l1(result.endpoint.vec(), g_sorted);
        ++result.steps_used;
    };

    auto greedy_until_stall = [&](int step_limit) {
        while (result.steps_used < step_limit && result.residual > opts.epsilon * 0.25) {
            detail::StepChoice step =
                detail::best_step(G, table, perms, result.endpoint.vec(), g_sorted);
            if (step.dist >= result.residual - 1e-13) break;  // stalled
            apply_step(perms[static_cast<std::size_t>(step.perm_index)], step.tau);
        }
    };

    // rotate the endpoint into the target's ordering and report the true
    // 1-norm residual
    auto finalize = [&]() {
        const Permutation align =
            detail::aligning_permutation(result.endpoint.vec(), target.vec());
        if (!align.is_identity()) apply_step(align, 0.0);
        result.residual = l1_distance(result.endpoint.vec(), target.vec());
    };

    greedy_until_stall(std::max(1, opts.budget - opts.beam_depth - 2));
    if (result.residual <= opts.epsilon) {
        finalize();
        return result;
    }

    const int depth = std::min(opts.beam_depth, std::max(1, opts.budget - 3));
    std::vector<detail::BeamNode> seeds =
        detail::beam_search(x0.vec(), table, perms, g_sorted, depth, opts.beam_width,
                            opts.beam_spacing, opts.epsilon * 0.1);

    auto perm_index = [&](const Permutation& p) {
        for (std::size_t i = 0; i < perms.size(); ++i) {
            if (perms[i] == p) return static_cast<int>(i);
        }
        throw invalid_input_error("reach_target: permutation lookup failed");
    };

    detail::BeamNode chosen = seeds.front();
    double chosen_dist = std::numeric_limits<double>::infinity();
    const std::size_t polish_candidates =
        std::min(seeds.size(), static_cast<std::size_t>(opts.polish_seeds));
    for (std::size_t s = 0; s < polish_candidates && chosen_dist > opts.epsilon * 0.05; ++s) {
        detail::BeamNode candidate = seeds[s];
        // align the candidate endpoint to the target, then refine the dwells
        candidate.steps.emplace_back(
            perm_index(detail::aligning_permutation(candidate.state, target.vec())), 0.0);
        const double dist =
            detail::gauss_newton_dwells(G, x0.vec(), perms, target.vec(), candidate.steps);
        if (dist < chosen_dist) {
            chosen = std::move(candidate);
            chosen_dist = dist;
        }
    }

    const TargetSearchResult greedy_only = result;
    result = TargetSearchResult{};
    result.endpoint = x0;
    result.residual = detail::sorted_l1(x0.vec(), g_sorted);
    for (const auto& [p, tau] : chosen.steps) apply_step(perms[static_cast<std::size_t>(p)], tau);
    greedy_until_stall(opts.budget);

    if (greedy_only.residual < result.residual) {
        result = greedy_only;
        finalize();
        return result;
    }
    finalize();
    return result;
}

// Reachable-set sampling along the deterministic search toward a target: the
// trajectory of the found control sequence, intermediate samples included.
inline PointCloud sample_reachable_greedy(const ProbVector& x0, const GeneratorMatrix& G,
                                          const ProbVector& target, const CoverageOptions& opts,
                                          int samples_per_dwell = 4) {
    TargetSearchResult found = reach_target(x0, G, target, opts);
    Trajectory traj = simulate(x0, G, found.controls, samples_per_dwell);
    PointCloud cloud;
    cloud.points.reserve(traj.samples.size());
    for (auto& s : traj.samples) cloud.points.push_back(std::move(s.state));
    return cloud;
}

// ------------------------------ coverage report ------------------------------

struct CoverageFailure {
    Vector target;
    double residual = 0.0;
    int steps_used = 0;
};

struct CoverageReport {
    int grid_points = 0;
    int reached = 0;
    double epsilon = 0.0;
    double spacing = 0.0;
    double max_residual = 0.0;
    int max_steps_used = 0;
    std::vector<CoverageFailure> failures;

    bool full_coverage() const { return reached == grid_points; }
};

// All grid points of the simplex with the given spacing (1/spacing integral).
inline std::vector<ProbVector> simplex_grid(int n, double spacing) {
    const int steps = static_cast<int>(std::llround(1.0 / spacing));
    if (steps < 1 || std::abs(steps * spacing - 1.0) > 1e-9) {
        throw invalid_input_error("simplex_grid: spacing must divide 1");
    }
    std::vector<ProbVector> grid;
    std::vector<int> counts(static_cast<std::size_t>(n), 0);
    std::function<void(int, int)> rec = [&](int coord, int remaining) {
        if (coord == n - 1) {
            counts[static_cast<std::size_t>(coord)] = remaining;
            Vector v(n);
            for (int i = 0; i < n; ++i) v[i] = static_cast<double>(counts[static_cast<std::size_t>(i)]) / steps;
            grid.emplace_back(ProbVector(std::move(v)));
            return;
        }
        for (int k = 0; k <= remaining; ++k) {
            counts[static_cast<std::size_t>(coord)] = k;
            rec(coord + 1, remaining - k);
        }
    };
    rec(0, steps);
    return grid;
}

// For every grid point, searches for a control sequence landing within
// epsilon. Failures are data, not errors.
inline CoverageReport grid_coverage_check(const ProbVector& x0, const GeneratorMatrix& G,
                                          double spacing, const CoverageOptions& opts,
                                          int threads = 1) {
    const std::vector<ProbVector> grid = simplex_grid(G.dim(), spacing);
    CoverageReport report;
    report.grid_points = static_cast<int>(grid.size());
    report.epsilon = opts.epsilon;
    report.spacing = spacing;

    auto run_one = [&](int i) {
        TargetSearchResult r = reach_target(x0, G, grid[static_cast<std::size_t>(i)], opts);
        CoverageFailure summary;
        summary.target = grid[static_cast<std::size_t>(i)].vec();
        summary.residual = r.residual;
        summary.steps_used = r.steps_used;
        return summary;
    };
    std::vector<CoverageFailure> outcomes =
        parallel_indexed<CoverageFailure>(report.grid_points, threads, run_one);
    for (const CoverageFailure& o : outcomes) {
        report.max_residual = std::max(report.max_residual, o.residual);
        report.max_steps_used = std::max(report.max_steps_used, o.steps_used);
        if (o.residual <= opts.epsilon) {
            ++report.reached;
        } else {
            report.failures.push_back(o);
        }
    }
    return report;
}

// --------------------------- containment harnesses ---------------------------

struct ContainmentViolation {
    int run = 0;
    int sample = 0;
    double margin = 0.0;  // positive = outside
};

struct ContainmentReport {
    int runs = 0;
    int samples = 0;
    double max_margin = -std::numeric_limits<double>::infinity();
    std::vector<ContainmentViolation> violations;

    bool clean() const { return violations.empty(); }
};

// Worst partial-sum excess of x over the majorisation constraints of z;
// <= 0 means x lies in the permutation hull of z.
inline double majorisation_margin(const Vector& z, const Vector& x) {
    Vector zs = z, xs = x;
    std::sort(zs.data(), zs.data() + zs.size(), std::greater<double>());
    std::sort(xs.data(), xs.data() + xs.size(), std::greater<double>());
    double margin = std::abs(xs.sum() - zs.sum());
    double pz = 0.0, px = 0.0;
    for (Eigen::Index k = 0; k < zs.size() - 1; ++k) {
        pz += zs[k];
        px += xs[k];
        margin = std::max(margin, px - pz);
    }
    return margin;
}

// States starting classically below d stay classically below d under random
// hybrid controls (mixes of d as initial states, tolerance 1e-10).
inline ContainmentReport containment_below_d_check(const ProbVector& d, const GeneratorMatrix& G,
                                                   int trials, int steps, std::uint64_t seed,
                                                   int threads = 1, int samples_per_dwell = 4,
                                                   double tolerance = 1e-10) {
    auto run_one = [&](int run) {
        Rng rng = Rng::for_run(seed, static_cast<std::uint64_t>(run));
        ProbVector start = doubly_stochastic_mix(d, rng, 2 * d.size());
        ControlSequence c = random_control_sequence(G, steps, rng);
        Trajectory traj = simulate(start, G, c, samples_per_dwell);
        ContainmentReport local;
        local.samples = static_cast<int>(traj.samples.size());
        for (std::size_t s = 0; s < traj.samples.size(); ++s) {
            const double m = majorisation_margin(d.vec(), traj.samples[s].state.vec());
            local.max_margin = std::max(local.max_margin, m);
            if (m > tolerance) local.violations.push_back({run, static_cast<int>(s), m});
        }
        return local;
    };
    std::vector<ContainmentReport> locals = parallel_indexed<ContainmentReport>(trials, threads, run_one);
    ContainmentReport report;
    report.runs = trials;
    for (const ContainmentReport& l : locals) {
        report.samples += l.samples;
        report.max_margin = std::max(report.max_margin, l.max_margin);
        for (const auto& v : l.violations) report.violations.push_back(v);
    }
    return report;
}

struct HullContainmentReport {
    ProbVector dominating;  // z, the sorted dominating vertex
    ContainmentReport containment;
    double hull_coverage_fraction = 0.0;  // measured, never asserted
};

// Fraction of the permutation hull of z whose grid cells lie within `radius`
// of some sampled point. The inclusion theorems say nothing about equality;
// this measures how much of the bound the samples actually fill.
inline double hull_coverage_fraction(const ProbVector& z, const std::vector<ProbVector>& samples,
                                     double spacing = 0.05, double radius = 0.1) {
    int hull_cells = 0, covered = 0;
    for (const ProbVector& g : simplex_grid(z.size(), spacing)) {
        if (majorisation_margin(z.vec(), g.vec()) > 1e-9) continue;
        ++hull_cells;
        for (const ProbVector& s : samples) {
            if (l1_distance(g.vec(), s.vec()) <= radius) {
                ++covered;
                break;
            }
        }
    }
    return hull_cells == 0 ? 1.0 : static_cast<double>(covered) / hull_cells;
}

// Sampled reachable points from x0 must lie in the permutation hull of the
// dominating vertex z of the polytope of states d-majorised by sorted x0.
// The coverage fraction of the hull is measured and reported, not asserted.
inline HullContainmentReport hull_containment_check(const ProbVector& d, const ProbVector& x0,
                                                    const GeneratorMatrix& G, const SamplePlan& plan,
                                                    double tolerance = 1e-10) {
    MajorisationPolytope P = build_polytope(d, x0.sorted_descending());
    enumerate_vertices(P);
    HullContainmentReport report;
    report.dominating = dominating_vertex(P);

    struct RunOutcome {
        ContainmentReport report;
        std::vector<ProbVector> points;
    };
    auto run_one = [&](int run) {
        Rng rng = Rng::for_run(plan.seed, static_cast<std::uint64_t>(run));
        ControlSequence c = random_control_sequence(G, plan.steps, rng);
        Trajectory traj = simulate(x0, G, c, plan.samples_per_dwell);
        RunOutcome local;
        local.report.samples = static_cast<int>(traj.samples.size());
        local.points.reserve(traj.samples.size());
        for (std::size_t s = 0; s < traj.samples.size(); ++s) {
            const double m = majorisation_margin(report.dominating.vec(), traj.samples[s].state.vec());
            local.report.max_margin = std::max(local.report.max_margin, m);
            if (m > tolerance) local.report.violations.push_back({run, static_cast<int>(s), m});
            local.points.push_back(std::move(traj.samples[s].state));
        }
        return local;
    };
    std::vector<RunOutcome> locals = parallel_indexed<RunOutcome>(plan.runs, plan.threads, run_one);
    report.containment.runs = plan.runs;
    std::vector<ProbVector> all_points;
    for (RunOutcome& l : locals) {
        report.containment.samples += l.report.samples;
        report.containment.max_margin = std::max(report.containment.max_margin, l.report.max_margin);
        for (const auto& v : l.report.violations) report.containment.violations.push_back(v);
        for (auto& pt : l.points) all_points.push_back(std::move(pt));
    }
    if (d.size() <= 4) {
        report.hull_coverage_fraction = hull_coverage_fraction(
            report.dominating, all_points, d.size() == 3 ? 0.05 : 0.1);
    }
    return report;
}

// ------------------------- inward vector-field check -------------------------

struct InwardCheckVertex {
    Vector vertex;
    double worst_inner = -std::numeric_limits<double>::infinity();  // max a·(-B0 v) over active facets
    int active_facets = 0;
};

struct InwardCheckReport {
    std::vector<InwardCheckVertex> vertices;
    double worst_inner = -std::numeric_limits<double>::infinity();
    bool inward = true;
};

// At every extreme point π(z) of the permutation hull of z, the flow must not
// leave through any facet active there. Facets of the hull are the subset-sum
// constraints sum_{i in S} x_i <= (|S| largest entries of z).
inline InwardCheckReport inward_check(const GeneratorMatrix& G, const ProbVector& z,
                                      double tolerance = 1e-10, double active_tol = 1e-9) {
    const int n = z.size();
    if (G.dim() != n) throw invalid_input_error("inward_check: dimension mismatch");
    Vector z_sorted = z.sorted_descending().vec();
    Vector top_sums(n);
    {
        double acc = 0.0;
        for (int k = 0; k < n; ++k) {
            acc += z_sorted[k];
            top_sums[k] = acc;
        }
    }

    InwardCheckReport report;
    std::vector<Vector> seen;
    for (const Permutation& pi : all_permutations(n)) {
        Vector v = pi.apply(z_sorted);
        bool duplicate = false;
        for (const Vector& w : seen) {
            if ((w - v).cwiseAbs().sum() < 1e-12) {
                duplicate = true;
                break;
            }
        }
        if (duplicate) continue;  // ties in z collapse extreme points
        seen.push_back(v);

        InwardCheckVertex entry;
        entry.vertex = v;
        const Vector field = vector_field(G, v);
        for (int mask = 1; mask < (1 << n) - 1; ++mask) {
            double subset_sum = 0.0, subset_field = 0.0;
            int size = 0;
            for (int i = 0; i < n; ++i) {
                if ((mask >> i) & 1) {
                    subset_sum += v[i];
                    subset_field += field[i];
                    ++size;
                }
            }
            if (subset_sum >= top_sums[size - 1] - active_tol) {
                ++entry.active_facets;
                entry.worst_inner = std::max(entry.worst_inner, subset_field);
            }
        }
        report.worst_inner = std::max(report.worst_inner, entry.worst_inner);
        report.vertices.push_back(std::move(entry));
    }
    report.inward = report.worst_inner <= tolerance;
    return report;
}

}  // namespace simplexreach
