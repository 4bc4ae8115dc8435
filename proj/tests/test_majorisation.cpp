#include <catch2/catch.hpp>

#include "simplexreach/generator.hpp"
#include "simplexreach/majorisation.hpp"

#include "test_support.hpp"

using namespace simplexreach;
using testsupport::random_majorised_below;
using testsupport::random_positive_simplex;
using testsupport::random_simplex;

namespace {

// Mixed instance generator for the two majorisation oracles: constructed
// members (products of maps that are column stochastic and fix d), exact
// boundary cases, and unconstrained random points.
ProbVector make_candidate(Rng& rng, const ProbVector& d, const ProbVector& y, int kind) {
    const int n = d.size();
    switch (kind % 4) {
        case 0: {  // flow + full contraction toward d, then flow again
            GeneratorMatrix gen = thermal_generator(d);
            const double lambda = rng.uniform01();
            Matrix mix = (1.0 - lambda) * Matrix::Identity(n, n) +
                         lambda * d.vec() * Vector::Ones(n).transpose();
            Matrix A = semigroup_matrix(gen, rng.log_uniform(-2.0, 1.0)) * mix *
                       semigroup_matrix(gen, rng.log_uniform(-2.0, 1.0));
            return ProbVector::clamped(A * y.vec());
        }
        case 1:
            return y;  // identity witness
        case 2:
            return d;  // witness A = d * ones^T
        default:
            return random_simplex(rng, n);
    }
}

}  // namespace

// --------------------------- classical majorisation --------------------------

TEST_CASE("every distribution is classically majorised by a vertex") {
    Vector y(3), x(3);
    y << 1.0, 0.0, 0.0;
    x << 1.0 / 3, 1.0 / 3, 1.0 / 3;
    CHECK(classical_majorises(y, x));
    CHECK_FALSE(classical_majorises(x, y));
}

TEST_CASE("permutations are majorisation-equivalent") {
    Rng rng(3);
    for (int trial = 0; trial < 20; ++trial) {
        ProbVector y = random_simplex(rng, 4);
        for (const Permutation& pi : all_permutations(4)) {
            CHECK(classical_majorises(y.vec(), pi.apply(y.vec())));
            CHECK(classical_majorises(pi.apply(y.vec()), y.vec()));
        }
    }
}

TEST_CASE("a larger leading partial sum defeats majorisation") {
    Vector y(3), x(3);
    y << 0.5, 0.3, 0.2;
    x << 0.6, 0.2, 0.2;
    CHECK_FALSE(classical_majorises(y, x));
    CHECK(classical_majorises(x, y));
}

TEST_CASE("classical majorisation rejects length mismatch") {
    Vector y(3), x(2);
    y.setZero();
    x.setZero();
    CHECK_THROWS_AS(classical_majorises(y, x), invalid_input_error);
}

// ------------------------------ d-majorisation -------------------------------

TEST_CASE("uniform reference weight reduces to classical majorisation") {
    Rng rng(5);
    const ProbVector u = ProbVector::uniform(3);
    for (int trial = 0; trial < 1000; ++trial) {
        ProbVector y = random_simplex(rng, 3);
        ProbVector x = (trial % 2 == 0) ? random_simplex(rng, 3)
                                        : random_majorised_below(rng, y);
        CHECK(d_majorises(u, y.vec(), x.vec()) == classical_majorises(y.vec(), x.vec()));
    }
}

TEST_CASE("d-majorisation is reflexive") {
    Rng rng(7);
    for (int trial = 0; trial < 50; ++trial) {
        const int n = 2 + static_cast<int>(rng.below(3));
        ProbVector d = random_positive_simplex(rng, n);
        ProbVector x = random_simplex(rng, n);
        CHECK(d_majorises(d, x.vec(), x.vec()));
    }
}

TEST_CASE("the reference weight is d-majorised by everything") {
    Rng rng(9);
    for (int trial = 0; trial < 50; ++trial) {
        const int n = 2 + static_cast<int>(rng.below(3));
        ProbVector d = random_positive_simplex(rng, n);
        ProbVector y = random_simplex(rng, n);
        CHECK(d_majorises(d, y.vec(), d.vec()));
    }
}

TEST_CASE("d-majorisation requires a strictly positive reference") {
    Vector y(2), x(2);
    y << 0.5, 0.5;
    x << 0.5, 0.5;
    CHECK_THROWS_AS(d_majorises(ProbVector::basis(2, 0), y, x), invalid_input_error);
}

// ---------------------------- witness equivalence ----------------------------

TEST_CASE("identity witness for x = y") {
    Rng rng(11);
    ProbVector d = random_positive_simplex(rng, 3);
    ProbVector y = random_simplex(rng, 3);
    auto w = witness_matrix(d, y.vec(), y.vec());
    REQUIRE(w.has_value());
    CHECK(w->max_residual(d, y.vec(), y.vec()) < tol::witness);
}

TEST_CASE("oracle equivalence: 1-norm conditions vs LP witness") {
    Rng rng(13);
    for (int n = 2; n <= 4; ++n) {
        for (int trial = 0; trial < 200; ++trial) {
            ProbVector d = random_positive_simplex(rng, n);
            ProbVector y = random_simplex(rng, n);
            ProbVector x = make_candidate(rng, d, y, trial);
            const bool by_conditions = d_majorises(d, y.vec(), x.vec());
            auto w = witness_matrix(d, y.vec(), x.vec());
            CHECK(by_conditions == w.has_value());
            if (w.has_value()) CHECK(w->max_residual(d, y.vec(), x.vec()) < tol::witness);
        }
    }
}

TEST_CASE("witness composition gives transitivity") {
    Rng rng(17);
    for (int trial = 0; trial < 50; ++trial) {
        const int n = 2 + static_cast<int>(rng.below(3));
        ProbVector d = random_positive_simplex(rng, n);
        ProbVector w0 = random_simplex(rng, n);
        ProbVector y = make_candidate(rng, d, w0, 0);   // y ≺_d w0
        ProbVector x = make_candidate(rng, d, y, 0);    // x ≺_d y
        CHECK(d_majorises(d, w0.vec(), y.vec()));
        CHECK(d_majorises(d, y.vec(), x.vec()));
        CHECK(d_majorises(d, w0.vec(), x.vec()));
        auto wa = witness_matrix(d, y.vec(), x.vec());
        auto wb = witness_matrix(d, w0.vec(), y.vec());
        REQUIRE(wa.has_value());
        REQUIRE(wb.has_value());
        StochasticWitness composed{wa->A * wb->A};
        CHECK(composed.max_residual(d, w0.vec(), x.vec()) < 10 * tol::witness);
    }
}
