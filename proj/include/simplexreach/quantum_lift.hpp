// quantum_lift.hpp — Full density-matrix dynamics behind the simplex model:
// the dissipator applied to states, its matrix in the vectorised picture,
// Choi-matrix positivity checks, and diagonal-invariance verification.
//
// Vectorisation is column-stacking throughout: vec(A X B) = (B^T ⊗ A) vec(X).

#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <complex>
#include <vector>

#include "simplexreach/common.hpp"
#include "simplexreach/expm.hpp"
#include "simplexreach/prob_vector.hpp"

namespace simplexreach {

// ------------------------------ density matrices -----------------------------

// Hermitian, unit-trace, positive semidefinite within tolerances.
class DensityMatrix {
  public:
    explicit DensityMatrix(ComplexMatrix rho) : rho_(std::move(rho)) {
        if (rho_.rows() != rho_.cols() || rho_.rows() < 1) {
            throw invalid_input_error("DensityMatrix: must be square");
        }
        if ((rho_ - rho_.adjoint()).cwiseAbs().maxCoeff() > tol::entry) {
            throw invalid_input_error("DensityMatrix: not Hermitian within 1e-12");
        }
        if (std::abs(rho_.trace() - std::complex<double>(1.0, 0.0)) > tol::entry) {
            throw invalid_input_error("DensityMatrix: trace differs from 1");
        }
        Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(rho_, Eigen::EigenvaluesOnly);
        if (es.eigenvalues().minCoeff() < -1e-10) {
            throw invalid_input_error("DensityMatrix: negative eigenvalue beyond tolerance");
        }
    }

    static DensityMatrix diagonal(const ProbVector& x) {
        ComplexMatrix rho = ComplexMatrix::Zero(x.size(), x.size());
        for (int i = 0; i < x.size(); ++i) rho(i, i) = x[i];
        return DensityMatrix(std::move(rho));
    }

    int dim() const { return static_cast<int>(rho_.rows()); }
    const ComplexMatrix& matrix() const { return rho_; }

  private:
    ComplexMatrix rho_;
};

// ------------------------------ the dissipator -------------------------------

// Γ(ρ) = Σ_k ( (V_k†V_k ρ + ρ V_k†V_k)/2 − V_k ρ V_k† ); traceless output.
inline ComplexMatrix gksl_apply(const std::vector<ComplexMatrix>& V_list, const ComplexMatrix& rho) {
    if (rho.rows() != rho.cols()) throw invalid_input_error("gksl_apply: rho must be square");
    const Eigen::Index n = rho.rows();
    ComplexMatrix out = ComplexMatrix::Zero(n, n);
    for (const ComplexMatrix& V : V_list) {
        if (V.rows() != n || V.cols() != n) {
            throw invalid_input_error("gksl_apply: jump operator dimension mismatch");
        }
        const ComplexMatrix VdV = V.adjoint() * V;
        out += 0.5 * (VdV * rho + rho * VdV) - V * rho * V.adjoint();
    }
    return out;
}

inline std::vector<ComplexMatrix> to_complex(const std::vector<Matrix>& V_list) {
    std::vector<ComplexMatrix> out;
    out.reserve(V_list.size());
    for (const Matrix& V : V_list) out.emplace_back(V.cast<std::complex<double>>());
    return out;
}

// ----------------------------- vectorised picture ----------------------------

struct SuperOperator {
    ComplexMatrix matrix;  // n^2 x n^2, acting on column-stacked matrices
    int dim = 0;           // n

    ComplexMatrix apply(const ComplexMatrix& rho) const {
        ComplexVector v = Eigen::Map<const ComplexVector>(rho.data(), rho.size());
        ComplexVector w = matrix * v;
        return Eigen::Map<const ComplexMatrix>(w.data(), dim, dim);
    }
};

inline ComplexMatrix kron(const ComplexMatrix& A, const ComplexMatrix& B) {
    ComplexMatrix K(A.rows() * B.rows(), A.cols() * B.cols());
    for (Eigen::Index i = 0; i < A.rows(); ++i)
        for (Eigen::Index j = 0; j < A.cols(); ++j)
            K.block(i * B.rows(), j * B.cols(), B.rows(), B.cols()) = A(i, j) * B;
    return K;
}

// Matrix of Γ in the column-stacking convention.
inline ComplexMatrix gksl_superoperator(const std::vector<ComplexMatrix>& V_list, int n) {
    const ComplexMatrix id = ComplexMatrix::Identity(n, n);
    ComplexMatrix G = ComplexMatrix::Zero(n * n, n * n);
    for (const ComplexMatrix& V : V_list) {
        if (V.rows() != n || V.cols() != n) {
            throw invalid_input_error("gksl_superoperator: dimension mismatch");
        }
        const ComplexMatrix VdV = V.adjoint() * V;
        G += 0.5 * (kron(id, VdV) + kron(VdV.transpose(), id)) - kron(V.conjugate(), V);
    }
    return G;
}

// e^{-t Γ} as a superoperator matrix.
inline SuperOperator lift_semigroup(const std::vector<ComplexMatrix>& V_list, int n, double t) {
    if (t < 0.0) throw invalid_input_error("lift_semigroup: negative duration");
    SuperOperator S;
    S.dim = n;
    S.matrix = expm(((-t) * gksl_superoperator(V_list, n)).eval());
    return S;
}

// tr(S(X)) - tr(X) residual of the trace functional, measured as a left
// fixed-point defect of vec(I).
inline double trace_preservation_defect(const SuperOperator& S) {
    const int n = S.dim;
    ComplexVector vec_id = ComplexVector::Zero(n * n);
    for (int i = 0; i < n; ++i) vec_id[i * n + i] = 1.0;
    return (S.matrix.transpose() * vec_id - vec_id).cwiseAbs().maxCoeff();
}

// ------------------------------- Choi matrix ---------------------------------

// C = Σ_ij E_ij ⊗ S(E_ij); complete positivity of S is positivity of C.
inline ComplexMatrix choi_matrix(const SuperOperator& S) {
    const int n = S.dim;
    if (S.matrix.rows() != n * n || S.matrix.cols() != n * n) {
        throw invalid_input_error("choi_matrix: superoperator dimension mismatch");
    }
    ComplexMatrix C(n * n, n * n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            ComplexVector vec_Eij = ComplexVector::Zero(n * n);
            vec_Eij[j * n + i] = 1.0;
            ComplexVector w = S.matrix * vec_Eij;
            C.block(i * n, j * n, n, n) = Eigen::Map<const ComplexMatrix>(w.data(), n, n);
        }
    }
    return C;
}

inline double choi_min_eigenvalue(const SuperOperator& S) {
    ComplexMatrix C = choi_matrix(S);
    const double herm_defect = (C - C.adjoint()).cwiseAbs().maxCoeff();
    if (herm_defect > 1e-9) {
        throw numerical_failure_error("choi_min_eigenvalue: Choi matrix not Hermitian");
    }
    ComplexMatrix H = 0.5 * (C + C.adjoint());
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(H, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

// --------------------------- diagonal invariance -----------------------------

struct DiagonalInvarianceReport {
    bool invariant = true;
    double max_offdiagonal = 0.0;  // worst off-diagonal mass produced from a diagonal input
};

// Γ maps every diagonal basis matrix to a diagonal matrix?
inline DiagonalInvarianceReport diagonal_invariance_check(const std::vector<ComplexMatrix>& V_list,
                                                          int n) {
    DiagonalInvarianceReport report;
    for (int j = 0; j < n; ++j) {
        ComplexMatrix Ejj = ComplexMatrix::Zero(n, n);
        Ejj(j, j) = 1.0;
        ComplexMatrix out = gksl_apply(V_list, Ejj);
        for (int a = 0; a < n; ++a) {
            for (int b = 0; b < n; ++b) {
                if (a != b) report.max_offdiagonal = std::max(report.max_offdiagonal, std::abs(out(a, b)));
            }
        }
    }
    report.invariant = report.max_offdiagonal < tol::entry;
    return report;
}

// Restriction of a superoperator to the diagonal subspace: the n x n matrix
// with column j equal to diag(S(E_jj)). For the thermal jump pair this must
// reproduce e^{-t B0} from the simplex model.
inline Matrix diagonal_restriction_matrix(const SuperOperator& S) {
    const int n = S.dim;
    Matrix R(n, n);
    for (int j = 0; j < n; ++j) {
        ComplexMatrix Ejj = ComplexMatrix::Zero(n, n);
        Ejj(j, j) = 1.0;
        ComplexMatrix out = S.apply(Ejj);
        for (int i = 0; i < n; ++i) R(i, j) = out(i, i).real();
    }
    return R;
}

}  // namespace simplexreach
