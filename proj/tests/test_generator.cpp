#include <catch2/catch.hpp>

#include <cmath>
#include <limits>

#include "simplexreach/generator.hpp"

#include "test_support.hpp"

using namespace simplexreach;
using testsupport::expm_eigen_oracle;
using testsupport::random_positive_simplex;

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

// ----------------------------- gibbs_vector ---------------------------------

TEST_CASE("gibbs vector at infinite temperature is uniform") {
    Vector e(3);
    e << 0.0, 1.0, 2.0;
    ProbVector d = gibbs_vector(EnergySpec(e, kInf));
    for (int k = 0; k < 3; ++k) CHECK(d[k] == Approx(1.0 / 3.0).margin(1e-15));
}

TEST_CASE("gibbs vector at zero temperature concentrates on the ground state") {
    Vector e(3);
    e << 0.0, 1.0, 2.0;
    ProbVector d = gibbs_vector(EnergySpec(e, 0.0));
    CHECK(d[0] == 1.0);
    CHECK(d[1] == 0.0);
    CHECK(d[2] == 0.0);
}

TEST_CASE("gibbs vector splits zero-temperature ties uniformly") {
    Vector e(4);
    e << 0.5, 0.5, 1.0, 2.0;
    ProbVector d = gibbs_vector(EnergySpec(e, 0.0));
    CHECK(d[0] == 0.5);
    CHECK(d[1] == 0.5);
    CHECK(d[2] == 0.0);
}

TEST_CASE("gibbs vector with ratio 1/3 per level") {
    // equally spaced levels with T = 1/ln 3 give ratios of one third
    Vector e(3);
    e << 0.0, 1.0, 2.0;
    ProbVector d = gibbs_vector(EnergySpec(e, 1.0 / std::log(3.0)));
    CHECK(d[0] == Approx(9.0 / 13.0).margin(1e-14));
    CHECK(d[1] == Approx(3.0 / 13.0).margin(1e-14));
    CHECK(d[2] == Approx(1.0 / 13.0).margin(1e-14));
}

TEST_CASE("energy spec rejects bad input") {
    Vector e(3);
    e << 0.0, std::numeric_limits<double>::quiet_NaN(), 2.0;
    CHECK_THROWS_AS(EnergySpec(e, 1.0), invalid_input_error);
    Vector ok(2);
    ok << 0.0, 1.0;
    CHECK_THROWS_AS(EnergySpec(ok, -1.0), invalid_input_error);
    CHECK_THROWS_AS(EnergySpec(ok, std::numeric_limits<double>::quiet_NaN()), invalid_input_error);
}

TEST_CASE("equidistance detection") {
    Vector e(4);
    e << 0.0, 1.0, 2.0, 3.0;
    CHECK(EnergySpec(e, 1.0).equidistant());
    e[3] = 3.5;
    CHECK_FALSE(EnergySpec(e, 1.0).equidistant());
}

// ---------------------------- thermal_angles --------------------------------

TEST_CASE("thermal angles for the ratio-1/3 profile are pi/6") {
    Vector dv(3);
    dv << 9.0 / 13.0, 3.0 / 13.0, 1.0 / 13.0;
    Vector theta = thermal_angles(ProbVector(dv));
    CHECK(theta[0] == Approx(M_PI / 6.0).margin(1e-14));
    CHECK(theta[1] == Approx(M_PI / 6.0).margin(1e-14));
}

TEST_CASE("thermal angles of the uniform vector are pi/4") {
    Vector theta = thermal_angles(ProbVector::uniform(4));
    for (int k = 0; k < 3; ++k) CHECK(theta[k] == Approx(M_PI / 4.0).margin(1e-14));
}

TEST_CASE("thermal angle vanishes as the upper level empties") {
    for (double delta : {1e-3, 1e-6, 1e-9}) {
        Vector dv(2);
        dv << 1.0 - delta, delta;
        Vector theta = thermal_angles(ProbVector(dv));
        CHECK(theta[0] == Approx(std::atan(std::sqrt(delta / (1.0 - delta)))).margin(1e-12));
        CHECK(theta[0] < 1e-1);
    }
}

TEST_CASE("thermal angles require a strictly positive distribution") {
    CHECK_THROWS_AS(thermal_angles(ProbVector::basis(3, 0)), regime_error);
}

// -------------------------- build_lindblad_pair ------------------------------

TEST_CASE("two-level pair at theta = pi/4") {
    Vector theta(1);
    theta << M_PI / 4.0;
    LindbladPair pair = build_lindblad_pair(2, theta);
    const double r = std::sqrt(0.5);
    CHECK(pair.V_plus(0, 1) == Approx(r).margin(1e-15));
    CHECK(pair.V_plus(0, 0) == 0.0);
    CHECK(pair.V_plus(1, 0) == 0.0);
    CHECK(pair.V_plus(1, 1) == 0.0);
    CHECK(pair.V_minus(1, 0) == Approx(r).margin(1e-15));
    CHECK(pair.V_minus.cwiseAbs().sum() == Approx(r).margin(1e-15));
}

TEST_CASE("two-level pair at theta = pi/2 degenerates to a single lowering operator") {
    Vector theta(1);
    theta << M_PI / 2.0;
    LindbladPair pair = build_lindblad_pair(2, theta);
    CHECK(pair.V_plus.cwiseAbs().maxCoeff() < 1e-15);
    CHECK(pair.V_minus(1, 0) == Approx(1.0).margin(1e-15));
}

TEST_CASE("three-level superdiagonal coefficients") {
    Vector theta(2);
    theta << M_PI / 6.0, M_PI / 6.0;
    LindbladPair pair = build_lindblad_pair(3, theta);
    const double expected = std::sqrt(2.0) * std::cos(M_PI / 6.0);
    CHECK(pair.V_plus(0, 1) == Approx(expected).margin(1e-14));
    CHECK(pair.V_plus(1, 2) == Approx(expected).margin(1e-14));
}

TEST_CASE("angles outside [0, pi/2] are rejected") {
    Vector theta(1);
    theta << 1.7;
    CHECK_THROWS_AS(build_lindblad_pair(2, theta), invalid_input_error);
    theta << -0.1;
    CHECK_THROWS_AS(build_lindblad_pair(2, theta), invalid_input_error);
    Vector wrong_len(2);
    wrong_len << 0.3, 0.4;
    CHECK_THROWS_AS(build_lindblad_pair(2, wrong_len), invalid_input_error);
}

// -------------------------------- build_B0 ----------------------------------

TEST_CASE("two-level generator at theta = pi/4 is the symmetric mixer") {
    Vector theta(1);
    theta << M_PI / 4.0;
    GeneratorMatrix gen = build_B0(build_lindblad_pair(2, theta));
    Matrix minus_B0_expected(2, 2);
    minus_B0_expected << -0.5, 0.5, 0.5, -0.5;
    CHECK(((-gen.B0) - minus_B0_expected).cwiseAbs().maxCoeff() < 1e-15);
    CHECK(gen.fixed_point[0] == Approx(0.5).margin(1e-12));
    CHECK(gen.fixed_point[1] == Approx(0.5).margin(1e-12));
}

TEST_CASE("two-level generator at theta = pi/2 has an absorbing last state") {
    Vector theta(1);
    theta << M_PI / 2.0;
    GeneratorMatrix gen = build_B0(build_lindblad_pair(2, theta));
    Matrix minus_B0_expected(2, 2);
    minus_B0_expected << -1.0, 0.0, 1.0, 0.0;
    CHECK(((-gen.B0) - minus_B0_expected).cwiseAbs().maxCoeff() < 1e-15);
    CHECK(gen.fixed_point[0] == Approx(0.0).margin(1e-12));
    CHECK(gen.fixed_point[1] == Approx(1.0).margin(1e-12));
}

TEST_CASE("detailed balance: the generator annihilates its thermal profile") {
    Rng rng(2024);
    for (int trial = 0; trial < 50; ++trial) {
        const int n = 2 + static_cast<int>(rng.below(4));
        ProbVector d = random_positive_simplex(rng, n);
        GeneratorMatrix gen = thermal_generator(d);
        CHECK((gen.B0 * d.vec()).cwiseAbs().sum() < 1e-12);
    }
}

TEST_CASE("generator structure: Metzler with zero column sums") {
    Rng rng(55);
    for (int trial = 0; trial < 20; ++trial) {
        const int n = 2 + static_cast<int>(rng.below(4));
        Vector theta(n - 1);
        for (int k = 0; k < n - 1; ++k) theta[k] = rng.uniform(0.05, M_PI / 2.0 - 0.05);
        GeneratorMatrix gen = build_B0(build_lindblad_pair(n, theta));
        Matrix minus_B0 = -gen.B0;
        for (int j = 0; j < n; ++j) {
            CHECK(std::abs(minus_B0.col(j).sum()) < 1e-12);
            for (int i = 0; i < n; ++i) {
                if (i != j) CHECK(minus_B0(i, j) >= 0.0);
            }
        }
    }
}

TEST_CASE("disconnected rate chain trips the kernel check") {
    // theta = (0, pi/2) sends no population into level 2 and none out of
    // levels 1 and 3, leaving a two-dimensional kernel.
    Vector theta(2);
    theta << 0.0, M_PI / 2.0;
    CHECK_THROWS_AS(build_B0(build_lindblad_pair(3, theta)), degenerate_generator_error);
}

TEST_CASE("round trip: fixed point of the generator built from d recovers d") {
    Rng rng(7);
    for (int n = 2; n <= 5; ++n) {
        for (int trial = 0; trial < 50; ++trial) {
            ProbVector d = random_positive_simplex(rng, n);
            GeneratorMatrix gen = thermal_generator(d);
            CHECK(l1_distance(gen.fixed_point.vec(), d.vec()) < 1e-10);
        }
    }
}

// ----------------------------- semigroup_step -------------------------------

TEST_CASE("zero dwell returns the state unchanged") {
    Vector dv(3);
    dv << 0.5, 0.3, 0.2;
    ProbVector x(dv);
    GeneratorMatrix gen = thermal_generator(ProbVector::uniform(3));
    ProbVector y = semigroup_step(gen, 0.0, x);
    CHECK(l1_distance(x.vec(), y.vec()) == 0.0);
}

TEST_CASE("long flows land on the fixed point") {
    Rng rng(11);
    for (int trial = 0; trial < 10; ++trial) {
        const int n = 2 + static_cast<int>(rng.below(4));
        ProbVector d = random_positive_simplex(rng, n, /*spread=*/1.0);
        GeneratorMatrix gen = thermal_generator(d);
        ProbVector x = random_positive_simplex(rng, n);
        const double t = 1e3 / gen.norm1();
        ProbVector y = semigroup_step(gen, t, x);
        CHECK(l1_distance(y.vec(), gen.fixed_point.vec()) < 1e-8);
    }
}

TEST_CASE("the fixed point is stationary") {
    GeneratorMatrix gen = thermal_generator(ProbVector::uniform(4));
    for (double t : {0.0, 0.3, 2.0, 50.0}) {
        ProbVector y = semigroup_step(gen, t, gen.fixed_point);
        CHECK(l1_distance(y.vec(), gen.fixed_point.vec()) < 1e-12);
    }
}

TEST_CASE("negative dwell is rejected") {
    GeneratorMatrix gen = thermal_generator(ProbVector::uniform(2));
    CHECK_THROWS_AS(semigroup_step(gen, -0.1, gen.fixed_point), invalid_input_error);
}

TEST_CASE("semigroup matrix matches the eigendecomposition oracle") {
    Rng rng(13);
    for (int trial = 0; trial < 20; ++trial) {
        const int n = 2 + static_cast<int>(rng.below(4));
        ProbVector d = random_positive_simplex(rng, n);
        GeneratorMatrix gen = thermal_generator(d);
        const double t = rng.log_uniform(-2.0, 2.0);
        Matrix E = semigroup_matrix(gen, t);
        Matrix E_oracle = expm_eigen_oracle(-t * gen.B0);
        CHECK((E - E_oracle).cwiseAbs().maxCoeff() < 1e-9);
    }
}

TEST_CASE("semigroup is column-stochastic for random angles and durations") {
    Rng rng(17);
    for (int trial = 0; trial < 60; ++trial) {
        const int n = 2 + static_cast<int>(rng.below(5));
        Vector theta(n - 1);
        for (int k = 0; k < n - 1; ++k) theta[k] = rng.uniform(0.01, M_PI / 2.0 - 0.01);
        GeneratorMatrix gen = build_B0(build_lindblad_pair(n, theta));
        const double t = rng.log_uniform(-3.0, 3.0) / gen.norm1();
        Matrix E = semigroup_matrix(gen, t);
        for (int j = 0; j < n; ++j) CHECK(std::abs(E.col(j).sum() - 1.0) < 1e-12);
        CHECK(E.minCoeff() >= -1e-12);
    }
}

TEST_CASE("semigroup law") {
    Rng rng(19);
    for (int trial = 0; trial < 20; ++trial) {
        const int n = 2 + static_cast<int>(rng.below(4));
        ProbVector d = random_positive_simplex(rng, n);
        GeneratorMatrix gen = thermal_generator(d);
        ProbVector x = random_positive_simplex(rng, n);
        const double s = rng.log_uniform(-2.0, 1.0);
        const double t = rng.log_uniform(-2.0, 1.0);
        ProbVector two_step = semigroup_step(gen, s, semigroup_step(gen, t, x));
        ProbVector one_step = semigroup_step(gen, s + t, x);
        CHECK(l1_distance(two_step.vec(), one_step.vec()) < 1e-10);
    }
}

TEST_CASE("distance to the fixed point is non-increasing along the flow") {
    Rng rng(23);
    for (int trial = 0; trial < 10; ++trial) {
        const int n = 2 + static_cast<int>(rng.below(4));
        ProbVector d = random_positive_simplex(rng, n);
        GeneratorMatrix gen = thermal_generator(d);
        ProbVector x = random_positive_simplex(rng, n);
        double previous = l1_distance(x.vec(), d.vec());
        for (double t : {0.01, 0.05, 0.2, 0.5, 1.0, 2.0, 5.0, 20.0}) {
            const double now = l1_distance(semigroup_step(gen, t, x).vec(), d.vec());
            CHECK(now <= previous * (1.0 + 1e-10) + 1e-15);
            previous = now;
        }
    }
}

// ---------------------------- build_tensor_B0 -------------------------------

TEST_CASE("single-factor tensor generator equals the plain generator") {
    Vector theta(2);
    theta << 0.4, 0.9;
    GeneratorMatrix plain = build_B0(build_lindblad_pair(3, theta));
    GeneratorMatrix tensor = build_tensor_B0(3, 1, theta);
    CHECK((plain.B0 - tensor.B0).cwiseAbs().maxCoeff() == 0.0);
    CHECK(tensor.blocks == 1);
}

TEST_CASE("two-qubit tensor generator relaxes the last factor only") {
    Vector theta(1);
    theta << M_PI / 2.0;
    GeneratorMatrix gen = build_tensor_B0(2, 2, theta);
    CHECK(gen.dim() == 4);
    CHECK(gen.kernel_dim == 2);
    // kernel basis: first qubit arbitrary, last qubit relaxed to its absorbing state
    for (int a = 0; a < 2; ++a) {
        Vector v = Vector::Zero(4);
        v[a * 2 + 1] = 1.0;
        CHECK((gen.B0 * v).cwiseAbs().sum() < 1e-14);
    }
    for (int j = 0; j < 4; ++j) CHECK(std::abs(gen.B0.col(j).sum()) < 1e-14);
}

TEST_CASE("tensor semigroup uses the block structure consistently") {
    Vector theta(1);
    theta << 0.7;
    GeneratorMatrix gen = build_tensor_B0(2, 3, theta);
    Rng rng(29);
    ProbVector x = testsupport::random_simplex(rng, 8);
    Matrix E_dense = expm((-0.8 * gen.B0).eval());
    ProbVector via_blocks = semigroup_step(gen, 0.8, x);
    CHECK(l1_distance(via_blocks.vec(), E_dense * x.vec()) < 1e-13);
}

TEST_CASE("tensor generator size cap") {
    Vector theta(1);
    theta << 0.7;
    CHECK_THROWS_AS(build_tensor_B0(2, 13, theta), size_error);
}
