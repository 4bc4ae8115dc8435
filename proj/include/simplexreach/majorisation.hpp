// majorisation.hpp — Classical and d-majorisation decisions, LP witnesses,
// the polytope of states d-majorised by a point, and its dominating vertex.
//
// Two independent routes decide x ≺_d y: the 1-norm characterisation
// (d_majorises) and stochastic-witness feasibility (witness_matrix). Tests
// hold them against each other; neither calls the other.

#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <map>
#include <optional>
#include <sstream>
#include <vector>

#include "simplexreach/common.hpp"
#include "simplexreach/lp.hpp"
#include "simplexreach/prob_vector.hpp"

namespace simplexreach {

// ---------------------------- order decisions --------------------------------

// True iff x is classically majorised by y: equal totals and every descending
// partial sum of x bounded by the corresponding one of y.
inline bool classical_majorises(const Vector& y, const Vector& x, double tolerance = tol::entry) {
    if (y.size() != x.size()) throw invalid_input_error("classical_majorises: length mismatch");
    if (std::abs(x.sum() - y.sum()) > tolerance) return false;
    Vector xs = x, ys = y;
    std::sort(xs.data(), xs.data() + xs.size(), std::greater<double>());
    std::sort(ys.data(), ys.data() + ys.size(), std::greater<double>());
    double px = 0.0, py = 0.0;
    for (Eigen::Index k = 0; k < xs.size(); ++k) {
        px += xs[k];
        py += ys[k];
        if (px > py + tolerance) return false;
    }
    return true;
}

inline bool classical_majorises(const ProbVector& y, const ProbVector& x,
                                double tolerance = tol::entry) {
    return classical_majorises(y.vec(), x.vec(), tolerance);
}

// True iff x ≺_d y, via the 1-norm characterisation: equal totals and
// ‖d_i x − y_i d‖₁ ≤ ‖d_i y − y_i d‖₁ for every i.
inline bool d_majorises(const ProbVector& d, const Vector& y, const Vector& x,
                        double tolerance = tol::entry) {
    const int n = d.size();
    if (y.size() != n || x.size() != n) throw invalid_input_error("d_majorises: length mismatch");
    if (!d.strictly_positive()) throw invalid_input_error("d_majorises: d must be strictly positive");
    if (std::abs(x.sum() - y.sum()) > tolerance) return false;
    for (int i = 0; i < n; ++i) {
        const double lhs = (d[i] * x - y[i] * d.vec()).cwiseAbs().sum();
        const double rhs = (d[i] * y - y[i] * d.vec()).cwiseAbs().sum();
        if (lhs > rhs + tolerance) return false;
    }
    return true;
}

// ---------------------------- witness matrices -------------------------------

// A column-stochastic matrix fixing d with A y = x; the certificate form of
// x ≺_d y.
struct StochasticWitness {
    Matrix A;

    double max_residual(const ProbVector& d, const Vector& y, const Vector& x) const {
        const int n = static_cast<int>(A.rows());
        double r = std::max(0.0, -A.minCoeff());
        for (int j = 0; j < n; ++j) r = std::max(r, std::abs(A.col(j).sum() - 1.0));
        r = std::max(r, (A * d.vec() - d.vec()).cwiseAbs().maxCoeff());
        r = std::max(r, (A * y - x).cwiseAbs().maxCoeff());
        return r;
    }
};

// LP feasibility for the witness; nullopt when no witness exists.
inline std::optional<StochasticWitness> witness_matrix(const ProbVector& d, const Vector& y,
                                                       const Vector& x) {
    const int n = d.size();
    if (y.size() != n || x.size() != n) throw invalid_input_error("witness_matrix: length mismatch");
    if (!d.strictly_positive()) throw invalid_input_error("witness_matrix: d must be strictly positive");

    // variables: A(i,j) stacked column-major; rows: column sums, A d = d, A y = x
    const int vars = n * n;
    Matrix M = Matrix::Zero(3 * n, vars);
    Vector rhs(3 * n);
    auto vid = [n](int i, int j) { return j * n + i; };
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) M(j, vid(i, j)) = 1.0;
        rhs[j] = 1.0;
    }
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) M(n + i, vid(i, j)) = d[j];
        rhs[n + i] = d[i];
    }
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) M(2 * n + i, vid(i, j)) = y[j];
        rhs[2 * n + i] = x[i];
    }

    lp::Result res = lp::feasible_point(M, rhs);
    if (res.status != lp::Status::optimal) return std::nullopt;

    StochasticWitness w;
    w.A = Matrix::Zero(n, n);
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) w.A(i, j) = res.x[vid(i, j)];
    const double residual = w.max_residual(d, y, x);
    if (residual > tol::witness) {
        std::ostringstream msg;
        msg << "witness_matrix: LP returned a witness with residual " << residual
            << " (> " << tol::witness << "); infeasibility " << res.infeasibility;
        throw solver_error(msg.str());
    }
    return w;
}

// ------------------------------- the polytope --------------------------------

struct Halfspace {
    Vector a;
    double b = 0.0;
};

// H- and (optionally) V-representation of the set of states d-majorised by y.
struct MajorisationPolytope {
    ProbVector d;
    ProbVector y;
    std::vector<Halfspace> halfspaces;
    std::vector<ProbVector> vertices;
    bool vertices_enumerated = false;

    bool member(const Vector& x, double tolerance = tol::entry) const {
        return d_majorises(d, y.vec(), x, tolerance);
    }
};

namespace detail {

// Canonical key of a halfspace restricted to the sum-1 hyperplane, for
// duplicate removal.
inline std::vector<long long> projected_key(const Vector& a, double b) {
    const Eigen::Index n = a.size();
    const double mean = a.sum() / static_cast<double>(n);
    Vector proj = a.array() - mean;
    const double offset = b - mean;  // total mass is 1
    const double scale = proj.cwiseAbs().maxCoeff();
    std::vector<long long> key;
    key.reserve(static_cast<std::size_t>(n) + 1);
    if (scale < 1e-12) return key;  // constant on the hyperplane; caller drops it
    for (Eigen::Index i = 0; i < n; ++i)
        key.push_back(static_cast<long long>(std::llround(proj[i] / scale * 1e9)));
    key.push_back(static_cast<long long>(std::llround(offset / scale * 1e9)));
    return key;
}

// max a·x over {x >= 0, sum x = 1, rows} via the LP; used for redundancy.
inline double max_over(const std::vector<Halfspace>& rows, const Vector& a) {
    const int n = static_cast<int>(a.size());
    const int m = static_cast<int>(rows.size());
    Matrix M = Matrix::Zero(1 + m, n + m);
    Vector rhs(1 + m);
    M.block(0, 0, 1, n).setOnes();
    rhs[0] = 1.0;
    for (int r = 0; r < m; ++r) {
        M.block(1 + r, 0, 1, n) = rows[static_cast<std::size_t>(r)].a.transpose();
        M(1 + r, n + r) = 1.0;  // slack
        rhs[1 + r] = rows[static_cast<std::size_t>(r)].b;
    }
    Vector cost = Vector::Zero(n + m);
    cost.head(n) = -a;
    lp::Result res = lp::solve(M, rhs, cost);
    if (res.status != lp::Status::optimal) {
        throw solver_error("polytope redundancy LP did not reach an optimum");
    }
    return -res.objective;
}

inline void for_each_subset(int total, int pick, const std::function<void(const std::vector<int>&)>& fn) {
    std::vector<int> idx(static_cast<std::size_t>(pick));
    std::function<void(int, int)> rec = [&](int start, int depth) {
        if (depth == pick) {
            fn(idx);
            return;
        }
        for (int i = start; i <= total - (pick - depth); ++i) {
            idx[static_cast<std::size_t>(depth)] = i;
            rec(i + 1, depth + 1);
        }
    };
    if (pick >= 0 && pick <= total) rec(0, 0);
}

}  // namespace detail

// Builds the H-representation: simplex constraints plus, for each i, the 2^n
// sign-pattern expansions of ‖d_i x − y_i d‖₁ ≤ ‖d_i y − y_i d‖₁. Duplicates
// are merged and redundant sign rows removed by LP tests.
inline MajorisationPolytope build_polytope(const ProbVector& d, const ProbVector& y,
                                           int size_cap = 5) {
    const int n = d.size();
    if (y.size() != n) throw invalid_input_error("build_polytope: dimension mismatch");
    if (!d.strictly_positive()) throw invalid_input_error("build_polytope: d must be strictly positive");
    if (n > size_cap) {
        throw size_error("build_polytope: n = " + std::to_string(n) + " exceeds cap " +
                         std::to_string(size_cap));
    }

    MajorisationPolytope P;
    P.d = d;
    P.y = y;

    Vector ones = Vector::Ones(n);
    P.halfspaces.push_back({ones, 1.0});
    P.halfspaces.push_back({-ones, -1.0});
    for (int i = 0; i < n; ++i) {
        Vector a = Vector::Zero(n);
        a[i] = -1.0;
        P.halfspaces.push_back({std::move(a), 0.0});
    }

    // sign-pattern rows, deduplicated on their restriction to the hyperplane
    std::vector<Halfspace> sign_rows;
    std::map<std::vector<long long>, bool> seen;
    for (int i = 0; i < n; ++i) {
        const double c_i = (d[i] * y.vec() - y[i] * d.vec()).cwiseAbs().sum();
        for (int bits = 0; bits < (1 << n); ++bits) {
            Vector sigma(n);
            for (int k = 0; k < n; ++k) sigma[k] = (bits >> k) & 1 ? 1.0 : -1.0;
            Vector a = d[i] * sigma;
            const double b = c_i + y[i] * sigma.dot(d.vec());
            auto key = detail::projected_key(a, b);
            if (key.empty()) continue;  // parallel to the hyperplane
            if (seen.emplace(std::move(key), true).second) sign_rows.push_back({std::move(a), b});
        }
    }

    // LP redundancy pruning of the sign rows (nonnegativity and the total-mass
    // equality stay as stated)
    std::vector<char> keep(sign_rows.size(), 1);
    for (std::size_t k = 0; k < sign_rows.size(); ++k) {
        std::vector<Halfspace> others;
        for (std::size_t r = 0; r < sign_rows.size(); ++r) {
            if (r != k && keep[r]) others.push_back(sign_rows[r]);
        }
        const double reach = detail::max_over(others, sign_rows[k].a);
        if (reach <= sign_rows[k].b + tol::vertex_merge) keep[k] = 0;
    }
    for (std::size_t k = 0; k < sign_rows.size(); ++k) {
        if (keep[k]) P.halfspaces.push_back(sign_rows[k]);
    }
    return P;
}

// V-representation by basis enumeration over active-constraint subsets.
// Deterministic: subsets in lexicographic order, vertices sorted and merged
// at the 1e-9 radius.
inline void enumerate_vertices(MajorisationPolytope& P) {
    if (P.vertices_enumerated) return;
    const int n = P.d.size();

    // candidate rows: everything except the two total-mass rows, which enter
    // as the fixed equality
    std::vector<const Halfspace*> rows;
    for (std::size_t k = 2; k < P.halfspaces.size(); ++k) rows.push_back(&P.halfspaces[k]);

    std::vector<Vector> found;
    detail::for_each_subset(static_cast<int>(rows.size()), n - 1, [&](const std::vector<int>& idx) {
        Matrix M(n, n);
        Vector rhs(n);
        M.row(0).setOnes();
        rhs[0] = 1.0;
        for (int r = 0; r < n - 1; ++r) {
            M.row(1 + r) = rows[static_cast<std::size_t>(idx[static_cast<std::size_t>(r)])]->a.transpose();
            rhs[1 + r] = rows[static_cast<std::size_t>(idx[static_cast<std::size_t>(r)])]->b;
        }
        Eigen::FullPivLU<Matrix> lu(M);
        lu.setThreshold(1e-9);
        if (lu.rank() < n) return;
        Vector x = lu.solve(rhs);
        if ((M * x - rhs).cwiseAbs().maxCoeff() > 1e-9) return;
        for (const Halfspace& h : P.halfspaces) {
            if (h.a.dot(x) > h.b + tol::vertex_merge) return;
        }
        for (const Vector& v : found) {
            if ((v - x).cwiseAbs().sum() < tol::vertex_merge) return;
        }
        found.push_back(std::move(x));
    });

    std::sort(found.begin(), found.end(), [](const Vector& a, const Vector& b) {
        for (Eigen::Index i = 0; i < a.size(); ++i) {
            if (a[i] != b[i]) return a[i] < b[i];
        }
        return false;
    });
    P.vertices.clear();
    for (Vector& v : found) P.vertices.push_back(ProbVector::clamped(std::move(v), 1e-9));
    P.vertices_enumerated = true;
}

// The vertex that classically majorises every other vertex (and hence, by
// convexity, the whole polytope). Returned as its descending-sorted
// representative. Absence is a checkable-claim failure and throws.
inline ProbVector dominating_vertex(const MajorisationPolytope& P) {
    if (!P.vertices_enumerated) {
        throw invalid_input_error("dominating_vertex: vertices not enumerated");
    }
    if (P.vertices.empty()) throw violation_error("dominating_vertex: polytope has no vertices");
    const double scan_tol = 1e-9;  // vertex coordinates carry enumeration noise
    for (const ProbVector& z : P.vertices) {
        bool dominates = true;
        for (const ProbVector& v : P.vertices) {
            if (!classical_majorises(z.vec(), v.vec(), scan_tol)) {
                dominates = false;
                break;
            }
        }
        if (dominates) return z.sorted_descending();
    }
    throw violation_error(
        "dominating_vertex: no vertex classically majorises all others at tolerance");
}

// The polytope for permuted data; its vertex set is the permuted vertex set.
inline MajorisationPolytope permute_region(const MajorisationPolytope& P, const Permutation& pi) {
    MajorisationPolytope Q = build_polytope(P.d.permuted(pi), P.y.permuted(pi),
                                            std::max(P.d.size(), 5));
    if (P.vertices_enumerated) enumerate_vertices(Q);
    return Q;
}

}  // namespace simplexreach
