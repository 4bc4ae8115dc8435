// prob_vector.hpp — Points of the standard simplex.

#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <string>

#include "simplexreach/common.hpp"

namespace simplexreach {

// A probability vector: entries ≥ 0, summing to 1 within 1e-12. Exact
// construction rejects any negative entry; the `clamped` path accepts
// roundoff-scale negatives (≥ -1e-12) from numerical flows and zeros them.
class ProbVector {
  public:
    ProbVector() = default;

    explicit ProbVector(Vector v) : v_(std::move(v)) { validate(0.0); }

    // For vectors produced by numerical flows: entries in [-neg_tol, 0) are
    // clamped to 0; anything more negative is an error, never clamped.
    static ProbVector clamped(Vector v, double neg_tol = tol::entry) {
        ProbVector p;
        p.v_ = std::move(v);
        p.validate(neg_tol);
        return p;
    }

    static ProbVector uniform(int n) {
        if (n < 1) throw invalid_input_error("ProbVector::uniform: n must be >= 1");
        return ProbVector(Vector::Constant(n, 1.0 / n));
    }

    static ProbVector basis(int n, int k) {
        if (k < 0 || k >= n) throw invalid_input_error("ProbVector::basis: index out of range");
        Vector v = Vector::Zero(n);
        v[k] = 1.0;
        return ProbVector(std::move(v));
    }

    int size() const { return static_cast<int>(v_.size()); }
    double operator[](int i) const { return v_[i]; }
    const Vector& vec() const { return v_; }

    ProbVector permuted(const Permutation& p) const { return ProbVector(p.apply(v_)); }

    ProbVector sorted_descending() const {
        Vector s = v_;
        std::sort(s.data(), s.data() + s.size(), std::greater<double>());
        return ProbVector(std::move(s));
    }

    bool strictly_positive() const { return v_.size() > 0 && v_.minCoeff() > 0.0; }

  private:
    void validate(double neg_tol) {
        if (v_.size() < 1) throw invalid_input_error("ProbVector: empty vector");
        double sum = 0.0;
        for (Eigen::Index i = 0; i < v_.size(); ++i) {
            double& x = v_[i];
            if (!std::isfinite(x)) throw invalid_input_error("ProbVector: non-finite entry");
            if (x < 0.0) {
                if (x < -neg_tol) {
                    throw numerical_failure_error(
                        "ProbVector: entry " + std::to_string(x) + " below -" +
                        std::to_string(neg_tol));
                }
                x = 0.0;
            }
            sum += x;
        }
        if (std::abs(sum - 1.0) > tol::entry + neg_tol * static_cast<double>(v_.size())) {
            throw numerical_failure_error("ProbVector: entries sum to " + std::to_string(sum));
        }
    }

    Vector v_;
};

inline double l1_distance(const Vector& a, const Vector& b) {
    return (a - b).cwiseAbs().sum();
}

}  // namespace simplexreach
