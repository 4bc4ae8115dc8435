// lp.hpp — Dense two-phase tableau simplex for the small linear programs used
// by the majorisation oracles (witness feasibility, halfspace redundancy).
// Bland's rule throughout, so runs are deterministic and cycling-free.

#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <sstream>
#include <string>
#include <vector>

#include "simplexreach/common.hpp"

namespace simplexreach::lp {

enum class Status { optimal, infeasible, unbounded };

struct Result {
    Status status = Status::infeasible;
    Vector x;                      // primal solution (original variables)
    double objective = 0.0;        // c·x at termination (phase 2)
    double infeasibility = 0.0;    // phase-1 objective (sum of artificials)
};

namespace detail {

inline constexpr double kPivotTol = 1e-9;

class Tableau {
  public:
    // rows: A z = b with z >= 0; artificial columns are appended internally.
    Tableau(const Matrix& A, const Vector& b) : m_(static_cast<int>(A.rows())), n_(static_cast<int>(A.cols())) {
        T_.resize(m_, n_ + m_ + 1);
        T_.setZero();
        T_.leftCols(n_) = A;
        T_.col(n_ + m_) = b;
        for (int i = 0; i < m_; ++i) {
            if (T_(i, n_ + m_) < 0.0) T_.row(i) = -T_.row(i);
            T_(i, n_ + i) = 1.0;
        }
        basis_.resize(static_cast<std::size_t>(m_));
        for (int i = 0; i < m_; ++i) basis_[static_cast<std::size_t>(i)] = n_ + i;
    }

    // Minimise the given per-column costs over the current feasible basis.
    // Returns false when unbounded. `allowed` masks columns that may enter.
    bool minimise(const Vector& cost, const std::vector<char>& allowed, int max_iters) {
        Vector reduced = cost;
        Vector y = Vector::Zero(m_);  // simplex multipliers via basic costs
        for (int i = 0; i < m_; ++i) y[i] = cost[basis_[static_cast<std::size_t>(i)]];
        reduced -= T_.leftCols(n_ + m_).transpose() * y;

        for (int iter = 0; iter < max_iters; ++iter) {
            int entering = -1;
            for (int j = 0; j < n_ + m_; ++j) {
                if (allowed[static_cast<std::size_t>(j)] && reduced[j] < -kPivotTol) {
                    entering = j;
                    break;  // Bland: smallest eligible index
                }
            }
            if (entering < 0) return true;

            int leaving = -1;
            double best_ratio = 0.0;
            for (int i = 0; i < m_; ++i) {
                const double a = T_(i, entering);
                if (a > kPivotTol) {
                    const double ratio = T_(i, n_ + m_) / a;
                    if (leaving < 0 || ratio < best_ratio - kPivotTol ||
                        (std::abs(ratio - best_ratio) <= kPivotTol &&
                         basis_[static_cast<std::size_t>(i)] < basis_[static_cast<std::size_t>(leaving)])) {
                        leaving = i;
                        best_ratio = ratio;
                    }
                }
            }
            if (leaving < 0) return false;

            pivot(leaving, entering);
            // refresh reduced costs from scratch; cheap at these sizes and
            // immune to drift
            for (int i = 0; i < m_; ++i) y[i] = cost[basis_[static_cast<std::size_t>(i)]];
            reduced = cost - T_.leftCols(n_ + m_).transpose() * y;
        }
        throw solver_error("lp: iteration limit reached");
    }

    // Pivot basic artificials out where possible; rows that cannot pivot are
    // redundant equalities and get neutralised.
    void expel_artificials() {
        for (int i = 0; i < m_; ++i) {
            if (basis_[static_cast<std::size_t>(i)] < n_) continue;
            int col = -1;
            for (int j = 0; j < n_; ++j) {
                if (std::abs(T_(i, j)) > kPivotTol) {
                    col = j;
                    break;
                }
            }
            if (col >= 0) pivot(i, col);
        }
    }

    double rhs_for_basic(int var) const {
        for (int i = 0; i < m_; ++i) {
            if (basis_[static_cast<std::size_t>(i)] == var) return T_(i, n_ + m_);
        }
        return 0.0;
    }

    Vector primal() const {
        Vector x = Vector::Zero(n_);
        for (int i = 0; i < m_; ++i) {
            const int var = basis_[static_cast<std::size_t>(i)];
            if (var < n_) x[var] = T_(i, n_ + m_);
        }
        return x;
    }

    int original_vars() const { return n_; }
    int artificial_offset() const { return n_; }
    int rows() const { return m_; }
    const std::vector<int>& basis() const { return basis_; }

  private:
    void pivot(int row, int col) {
        T_.row(row) /= T_(row, col);
        for (int i = 0; i < m_; ++i) {
            if (i != row && std::abs(T_(i, col)) > 0.0) T_.row(i) -= T_(i, col) * T_.row(row);
        }
        basis_[static_cast<std::size_t>(row)] = col;
    }

    int m_, n_;
    Matrix T_;
    std::vector<int> basis_;
};

}  // namespace detail

namespace detail {

// Re-solves the final basis against the ORIGINAL system. Tableau pivots on
// near-tolerance elements can drift badly when rows are almost dependent;
// the basis itself stays trustworthy, its values do not.
inline Vector refine_basic_solution(const Matrix& A, const Vector& b, const Tableau& tab) {
    std::vector<int> cols;
    for (int var : tab.basis()) {
        if (var < tab.original_vars()) cols.push_back(var);
    }
    Matrix Ab(A.rows(), static_cast<Eigen::Index>(cols.size()));
    for (std::size_t k = 0; k < cols.size(); ++k) Ab.col(static_cast<Eigen::Index>(k)) = A.col(cols[k]);
    Vector zb = Ab.colPivHouseholderQr().solve(b);
    Vector z = Vector::Zero(A.cols());
    for (std::size_t k = 0; k < cols.size(); ++k) z[cols[k]] = zb[static_cast<Eigen::Index>(k)];
    return z;
}

}  // namespace detail

namespace detail {

// Row-reduces [A | b] with full pivoting. Row operations leave the solution
// set untouched; rows that reduce to ~0 are dropped after a consistency
// check on b, and surviving rows are rescaled to unit infinity-norm. Nearly
// dependent equality rows otherwise force the simplex onto tiny pivots and
// the tableau drifts. Returns false when a reduced row reads 0 = nonzero.
inline bool presolve_rows(Matrix& A, Vector& b, double& worst_inconsistency) {
    const int m = static_cast<int>(A.rows());
    const int n = static_cast<int>(A.cols());
    Matrix R(m, n + 1);
    R.leftCols(n) = A;
    R.col(n) = b;
    const double scale = std::max(1.0, R.cwiseAbs().maxCoeff());

    int rank = 0;
    std::vector<char> col_used(static_cast<std::size_t>(n), 0);
    for (int step = 0; step < m; ++step) {
        int pi = -1, pj = -1;
        double best = 1e-12 * scale;
        for (int i = rank; i < m; ++i) {
            for (int j = 0; j < n; ++j) {
                if (!col_used[static_cast<std::size_t>(j)] && std::abs(R(i, j)) > best) {
                    best = std::abs(R(i, j));
                    pi = i;
                    pj = j;
                }
            }
        }
        if (pi < 0) break;
        R.row(pi).swap(R.row(rank));
        for (int i = 0; i < m; ++i) {
            if (i != rank && std::abs(R(i, pj)) > 0.0) {
                R.row(i) -= (R(i, pj) / R(rank, pj)) * R.row(rank);
            }
        }
        col_used[static_cast<std::size_t>(pj)] = 1;
        ++rank;
    }

    worst_inconsistency = 0.0;
    for (int i = rank; i < m; ++i) {
        worst_inconsistency = std::max(worst_inconsistency, std::abs(R(i, n)));
    }
    if (worst_inconsistency > tol::lp_feasible * scale) return false;

    A.resize(rank, n);
    b.resize(rank);
    for (int i = 0; i < rank; ++i) {
        const double row_scale = R.row(i).head(n).cwiseAbs().maxCoeff();
        A.row(i) = R.row(i).head(n) / row_scale;
        b[i] = R(i, n) / row_scale;
    }
    return true;
}

}  // namespace detail

// Solves  min c·z  subject to  A z = b, z >= 0.
inline Result solve(const Matrix& A_in, const Vector& b_in, const Vector& c, int max_iters = 50000) {
    if (A_in.rows() != b_in.size() || A_in.cols() != c.size()) {
        throw invalid_input_error("lp::solve: inconsistent dimensions");
    }
    Matrix A = A_in;
    Vector b = b_in;
    double inconsistency = 0.0;
    if (!detail::presolve_rows(A, b, inconsistency)) {
        Result result;
        result.status = Status::infeasible;
        result.infeasibility = inconsistency;
        return result;
    }
    const int n = static_cast<int>(A.cols());
    const int m = static_cast<int>(A.rows());
    detail::Tableau tab(A, b);

    // phase 1: minimise the sum of artificials
    Vector phase1_cost = Vector::Zero(n + m);
    phase1_cost.tail(m).setConstant(1.0);
    std::vector<char> allow_all(static_cast<std::size_t>(n + m), 1);
    if (!tab.minimise(phase1_cost, allow_all, max_iters)) {
        throw solver_error("lp: phase 1 unbounded (should be impossible)");
    }
    double infeas = 0.0;
    for (int i = 0; i < m; ++i) {
        const int var = tab.basis()[static_cast<std::size_t>(i)];
        if (var >= n) infeas += tab.rhs_for_basic(var);
    }
    Result result;
    result.infeasibility = infeas;
    if (infeas > tol::lp_feasible) {
        result.status = Status::infeasible;
        return result;
    }
    tab.expel_artificials();

    // phase 2: artificials may no longer enter
    Vector phase2_cost = Vector::Zero(n + m);
    phase2_cost.head(n) = c;
    std::vector<char> allowed(static_cast<std::size_t>(n + m), 0);
    for (int j = 0; j < n; ++j) allowed[static_cast<std::size_t>(j)] = 1;
    if (!tab.minimise(phase2_cost, allowed, max_iters)) {
        result.status = Status::unbounded;
        result.x = tab.primal();
        return result;
    }

    // accept whichever of tableau values / refit against the original data
    // actually satisfies the system
    const Vector z_tab = tab.primal();
    const Vector z_ref = detail::refine_basic_solution(A, b, tab);
    const double scale = std::max(1.0, b_in.cwiseAbs().maxCoeff());
    auto valid = [&](const Vector& z) {
        return (A_in * z - b_in).cwiseAbs().maxCoeff() <= tol::lp_feasible * scale &&
               z.minCoeff() >= -tol::lp_feasible;
    };
    Vector chosen;
    if (valid(z_ref)) {
        chosen = z_ref;
    } else if (valid(z_tab)) {
        chosen = z_tab;
    } else {
        std::ostringstream msg;
        msg << "lp: basic solution failed validation; residuals "
            << (A_in * z_ref - b_in).cwiseAbs().maxCoeff() << " (refined), "
            << (A_in * z_tab - b_in).cwiseAbs().maxCoeff() << " (tableau)";
        throw solver_error(msg.str());
    }
    chosen = chosen.cwiseMax(0.0);
    result.status = Status::optimal;
    result.x = chosen;
    result.objective = c.dot(chosen);
    return result;
}

// Feasibility of A z = b, z >= 0.
inline Result feasible_point(const Matrix& A, const Vector& b) {
    return solve(A, b, Vector::Zero(A.cols()));
}

}  // namespace simplexreach::lp
