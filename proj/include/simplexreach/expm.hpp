// expm.hpp — Dense matrix exponential by scaling and squaring with a
// truncated Taylor series. Adequate and robust at the matrix sizes this
// library works with (n ≲ 64 dense, block-diagonal beyond).

#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>

#include "simplexreach/common.hpp"

namespace simplexreach {

// exp(A) for square A, real or complex. Scales A by 2^-s until its 1-norm is
// at most 0.5, sums the Taylor series to a term of relative size ≤ 1e-16
// (local error well below 1e-14), then squares s times.
template <typename Derived>
typename Derived::PlainObject expm(const Eigen::MatrixBase<Derived>& A_in) {
    using Mat = typename Derived::PlainObject;
    if (A_in.rows() != A_in.cols()) throw invalid_input_error("expm: matrix must be square");
    const Eigen::Index n = A_in.rows();
    Mat A = A_in;

    const double norm1 = A.cwiseAbs().colwise().sum().maxCoeff();
    int squarings = 0;
    if (norm1 > 0.5) {
        squarings = static_cast<int>(std::ceil(std::log2(norm1 / 0.5)));
        A /= std::pow(2.0, squarings);
    }

    Mat result = Mat::Identity(n, n);
    Mat term = Mat::Identity(n, n);
    for (int k = 1; k <= 64; ++k) {
        term = (term * A / static_cast<double>(k)).eval();
        result += term;
        const double term_norm = term.cwiseAbs().colwise().sum().maxCoeff();
        if (term_norm <= 1e-16 * result.cwiseAbs().colwise().sum().maxCoeff()) break;
    }
    for (int k = 0; k < squarings; ++k) result = (result * result).eval();
    return result;
}

inline double matrix_norm1(const Matrix& A) {
    return A.size() == 0 ? 0.0 : A.cwiseAbs().colwise().sum().maxCoeff();
}

}  // namespace simplexreach
