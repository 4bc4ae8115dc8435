// generator.hpp — Thermal fixed point, bidiagonal jump operators, the reduced
// simplex generator B0 and its semigroup.
//
// Conventions, pinned once and validated by tests rather than trusted:
//   * V_minus sits on the subdiagonal (entries at (k+1, k)) and transfers
//     population toward HIGHER index, so the theta = pi/2 limit has the last
//     basis vector as its absorbing state.
//   * The angles satisfy detailed balance tan^2(theta_k) = d_{k+1}/d_k,
//     equivalently theta_k = arccos sqrt(d_k / (d_k + d_{k+1})); the
//     requirement B0 d = 0 is what downstream checks rely on.

#pragma once

#include <Eigen/Dense>
#include <Eigen/SVD>

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "simplexreach/common.hpp"
#include "simplexreach/expm.hpp"
#include "simplexreach/prob_vector.hpp"

namespace simplexreach {

// ------------------------------- EnergySpec ---------------------------------

// Energy levels plus a bath temperature; temperature may be +infinity.
struct EnergySpec {
    Vector energies;
    double temperature = std::numeric_limits<double>::infinity();

    EnergySpec() = default;
    EnergySpec(Vector e, double T) : energies(std::move(e)), temperature(T) {
        if (energies.size() < 2) throw invalid_input_error("EnergySpec: need n >= 2 levels");
        for (Eigen::Index i = 0; i < energies.size(); ++i) {
            if (!std::isfinite(energies[i])) throw invalid_input_error("EnergySpec: non-finite energy");
        }
        if (std::isnan(temperature) || temperature < 0.0) {
            throw invalid_input_error("EnergySpec: temperature must be >= 0 or infinite");
        }
    }

    // Consecutive level spacings all equal within tol.
    bool equidistant(double tolerance = tol::entry) const {
        if (energies.size() < 3) return true;
        const double step = energies[1] - energies[0];
        for (Eigen::Index i = 2; i < energies.size(); ++i) {
            if (std::abs((energies[i] - energies[i - 1]) - step) > tolerance) return false;
        }
        return true;
    }
};

// Equilibrium distribution d_k ∝ exp(-e_k / T). T = inf gives the uniform
// vector; T = 0 concentrates on the minimal energy, uniformly over ties.
inline ProbVector gibbs_vector(const EnergySpec& spec) {
    const Eigen::Index n = spec.energies.size();
    Vector d(n);
    if (std::isinf(spec.temperature)) {
        d.setConstant(1.0 / static_cast<double>(n));
        return ProbVector(std::move(d));
    }
    const double e_min = spec.energies.minCoeff();
    if (spec.temperature == 0.0) {
        int ties = 0;
        for (Eigen::Index k = 0; k < n; ++k) ties += (spec.energies[k] == e_min) ? 1 : 0;
        for (Eigen::Index k = 0; k < n; ++k) d[k] = (spec.energies[k] == e_min) ? 1.0 / ties : 0.0;
        return ProbVector(std::move(d));
    }
    for (Eigen::Index k = 0; k < n; ++k) d[k] = std::exp(-(spec.energies[k] - e_min) / spec.temperature);
    d /= d.sum();
    return ProbVector(std::move(d));
}

// ----------------------------- thermal angles --------------------------------

// Detailed-balance angles for a strictly positive target distribution d.
inline Vector thermal_angles(const ProbVector& d) {
    const int n = d.size();
    if (n < 2) throw invalid_input_error("thermal_angles: need n >= 2");
    if (!d.strictly_positive()) {
        throw regime_error(
            "thermal_angles: nonpositive entry; use the zero-temperature construction "
            "(theta = pi/2) instead");
    }
    Vector theta(n - 1);
    for (int k = 0; k < n - 1; ++k) {
        theta[k] = std::acos(std::sqrt(d[k] / (d[k] + d[k + 1])));
    }
    return theta;
}

// ------------------------------ LindbladPair ---------------------------------

// The raising/lowering pair: V_plus strictly upper-bidiagonal with entries
// sqrt(k(n-k)) cos(theta_k) at (k, k+1), V_minus strictly lower-bidiagonal
// with sqrt(k(n-k)) sin(theta_k) at (k+1, k); k = 1..n-1 in 1-based terms.
struct LindbladPair {
    int n = 0;
    Vector theta;
    Matrix V_plus;
    Matrix V_minus;
};

inline LindbladPair build_lindblad_pair(int n, const Vector& theta) {
    if (n < 2) throw invalid_input_error("build_lindblad_pair: need n >= 2");
    if (theta.size() != n - 1) throw invalid_input_error("build_lindblad_pair: need n-1 angles");
    for (Eigen::Index k = 0; k < theta.size(); ++k) {
        if (!(theta[k] >= 0.0 && theta[k] <= M_PI / 2.0)) {
            throw invalid_input_error("build_lindblad_pair: angle outside [0, pi/2]");
        }
    }
    LindbladPair pair;
    pair.n = n;
    pair.theta = theta;
    pair.V_plus = Matrix::Zero(n, n);
    pair.V_minus = Matrix::Zero(n, n);
    for (int k = 1; k <= n - 1; ++k) {
        const double coeff = std::sqrt(static_cast<double>(k) * (n - k));
        pair.V_plus(k - 1, k) = coeff * std::cos(theta[k - 1]);
        pair.V_minus(k, k - 1) = coeff * std::sin(theta[k - 1]);
    }
    return pair;
}

// Angles for the T = 0 construction: a single lowering operator, absorbing
// state at the last basis vector.
inline Vector zero_temperature_angles(int n) {
    return Vector::Constant(n - 1, M_PI / 2.0);
}

// ----------------------------- GeneratorMatrix -------------------------------

// The generator of the simplex semigroup e^{-t B0}. Columns of -B0 sum to
// zero and its off-diagonal entries are >= 0, so the semigroup is
// column-stochastic. `blocks` > 1 records a block-diagonal Kronecker
// structure (identity on leading tensor factors) that the semigroup
// evaluation exploits.
struct GeneratorMatrix {
    Matrix B0;
    ProbVector fixed_point;
    int kernel_dim = 1;
    Matrix local_B0;  // empty unless blocks > 1
    int blocks = 1;

    int dim() const { return static_cast<int>(B0.rows()); }
    double norm1() const { return matrix_norm1(B0); }
};

namespace detail {

// Diagonal restriction of the dissipator: for jump operators {V},
// B0(i,j) = delta_ij * sum_V (V^T V)(j,j) - sum_V V(i,j)^2.
inline Matrix diagonal_restriction(const std::vector<Matrix>& V_list, int n) {
    Matrix B0 = Matrix::Zero(n, n);
    for (const Matrix& V : V_list) {
        if (V.rows() != n || V.cols() != n) {
            throw invalid_input_error("diagonal_restriction: dimension mismatch");
        }
        for (int j = 0; j < n; ++j) {
            const double col_sq = V.col(j).squaredNorm();
            B0(j, j) += col_sq - V(j, j) * V(j, j);
            for (int i = 0; i < n; ++i) {
                if (i != j) B0(i, j) -= V(i, j) * V(i, j);
            }
        }
    }
    return B0;
}

// Kernel basis of B0 at the rank tolerance, via SVD.
inline std::pair<int, Matrix> kernel_of(const Matrix& B0) {
    Eigen::JacobiSVD<Matrix> svd(B0, Eigen::ComputeFullV);
    const Vector& sigma = svd.singularValues();
    const double cutoff = tol::kernel_rank * std::max(1.0, sigma.size() > 0 ? sigma[0] : 0.0);
    int kdim = 0;
    for (Eigen::Index i = 0; i < sigma.size(); ++i) {
        if (sigma[i] <= cutoff) ++kdim;
    }
    Matrix basis = svd.matrixV().rightCols(kdim);
    return {kdim, basis};
}

inline ProbVector kernel_fixed_point(const Matrix& B0) {
    auto [kdim, basis] = kernel_of(B0);
    if (kdim != 1) {
        throw degenerate_generator_error(
            "generator kernel dimension " + std::to_string(kdim) + ", expected 1");
    }
    Vector v = basis.col(0);
    const double sum = v.sum();
    if (std::abs(sum) < 1e-8) {
        throw degenerate_generator_error("generator kernel vector has vanishing total mass");
    }
    v /= sum;
    return ProbVector::clamped(std::move(v), 1e-10);
}

}  // namespace detail

// Builds B0 by restricting the dissipator of the pair to diagonal matrices.
// The result is a birth–death chain with rate(k -> k+1) = k(n-k) sin^2 theta_k
// and rate(k+1 -> k) = k(n-k) cos^2 theta_k. The fixed point is recovered
// from the kernel, not assumed.
inline GeneratorMatrix build_B0(const LindbladPair& pair) {
    GeneratorMatrix gen;
    gen.B0 = detail::diagonal_restriction({pair.V_plus, pair.V_minus}, pair.n);
    gen.fixed_point = detail::kernel_fixed_point(gen.B0);
    gen.kernel_dim = 1;
    return gen;
}

inline GeneratorMatrix thermal_generator(const ProbVector& d) {
    return build_B0(build_lindblad_pair(d.size(), thermal_angles(d)));
}

inline GeneratorMatrix zero_temperature_generator(int n) {
    return build_B0(build_lindblad_pair(n, zero_temperature_angles(n)));
}

// The m-qudit generator for a bath coupled to the last factor only:
// B0 = I_{n^{m-1}} ⊗ B0_local, block-diagonal with n^{m-1} identical blocks.
inline GeneratorMatrix build_tensor_B0(int n, int m, const Vector& theta, int size_cap = 4096) {
    if (n < 2 || m < 1) throw invalid_input_error("build_tensor_B0: need n >= 2, m >= 1");
    double total = 1.0;
    for (int i = 0; i < m; ++i) total *= n;
    if (total > static_cast<double>(size_cap)) {
        throw size_error("build_tensor_B0: dimension " + std::to_string(total) +
                         " exceeds cap " + std::to_string(size_cap));
    }
    GeneratorMatrix local = build_B0(build_lindblad_pair(n, theta));
    if (m == 1) return local;

    const int N = static_cast<int>(total);
    const int blocks = N / n;
    GeneratorMatrix gen;
    gen.B0 = Matrix::Zero(N, N);
    for (int b = 0; b < blocks; ++b) gen.B0.block(b * n, b * n, n, n) = local.B0;
    gen.local_B0 = local.B0;
    gen.blocks = blocks;
    gen.kernel_dim = blocks;  // uniform over leading factors times the local kernel

    Vector fp(N);
    for (int b = 0; b < blocks; ++b) {
        fp.segment(b * n, n) = local.fixed_point.vec() / static_cast<double>(blocks);
    }
    gen.fixed_point = ProbVector(std::move(fp));
    if ((gen.B0 * gen.fixed_point.vec()).cwiseAbs().sum() > 1e-10) {
        throw degenerate_generator_error("build_tensor_B0: fixed point residual too large");
    }
    return gen;
}

// ------------------------------- semigroup ----------------------------------

// The stochastic map e^{-t B0}. Block structure is applied per block so the
// local exponential is computed once.
inline Matrix semigroup_matrix(const GeneratorMatrix& G, double t) {
    if (t < 0.0) throw invalid_input_error("semigroup_matrix: negative duration");
    if (G.blocks > 1) {
        const int n = static_cast<int>(G.local_B0.rows());
        const Matrix E_local = expm((-t * G.local_B0).eval());
        Matrix E = Matrix::Zero(G.dim(), G.dim());
        for (int b = 0; b < G.blocks; ++b) E.block(b * n, b * n, n, n) = E_local;
        return E;
    }
    return expm((-t * G.B0).eval());
}

inline ProbVector semigroup_step(const GeneratorMatrix& G, double t, const ProbVector& x) {
    if (t < 0.0) throw invalid_input_error("semigroup_step: negative duration");
    if (x.size() != G.dim()) throw invalid_input_error("semigroup_step: dimension mismatch");
    if (t == 0.0) return x;
    if (G.blocks > 1) {
        const int n = static_cast<int>(G.local_B0.rows());
        const Matrix E_local = expm((-t * G.local_B0).eval());
        Vector y(x.size());
        for (int b = 0; b < G.blocks; ++b) y.segment(b * n, n) = E_local * x.vec().segment(b * n, n);
        return ProbVector::clamped(std::move(y));
    }
    return ProbVector::clamped(expm((-t * G.B0).eval()) * x.vec());
}

}  // namespace simplexreach
