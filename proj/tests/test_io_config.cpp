#include <catch2/catch.hpp>

#include <cctype>
#include <fstream>
#include <sstream>

#include "simplexreach/config.hpp"
#include "simplexreach/io.hpp"

#include "test_support.hpp"

using namespace simplexreach;
using testsupport::random_positive_simplex;
using testsupport::random_simplex;

namespace {

std::string strip_ws(const std::string& s) {
    std::string out;
    for (char c : s) {
        if (!std::isspace(static_cast<unsigned char>(c))) out += c;
    }
    return out;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("shipped schema file matches the embedded schema") {
    const std::string shipped = slurp(std::string(SOURCE_DIR) + "/schema/run_config.schema.json");
    CHECK(strip_ws(shipped) == strip_ws(kRunConfigSchema));
}

TEST_CASE("config validation rejects unknown keys") {
    ordered_json cfg = {{"x0", {0.5, 0.5}}, {"out_csv", "x.csv"}, {"bogus", 1}};
    CHECK_THROWS_AS(validate_config("simulate", cfg), config_error);
}

TEST_CASE("config validation rejects wrong types") {
    ordered_json cfg = {{"x0", "not-an-array"}, {"out_csv", "x.csv"}};
    CHECK_THROWS_AS(validate_config("simulate", cfg), config_error);
    ordered_json cfg2 = {{"x0", {0.5, 0.5}}, {"out_csv", 7}};
    CHECK_THROWS_AS(validate_config("simulate", cfg2), config_error);
}

TEST_CASE("config validation enforces required keys") {
    ordered_json cfg = {{"x0", {0.5, 0.5}}};
    CHECK_THROWS_AS(validate_config("simulate", cfg), config_error);
    CHECK_THROWS_AS(validate_config("verify", ordered_json::object()), config_error);
}

TEST_CASE("malformed JSON reports line and column") {
    const std::string broken = "{\n  \"x0\": [0.5, 0.5],\n  oops\n}";
    try {
        parse_config_text(broken, "test.json");
        FAIL("expected config_error");
    } catch (const config_error& e) {
        const std::string msg = e.what();
        CHECK(msg.find("test.json:3") != std::string::npos);
    }
}

TEST_CASE("control sequences are validated") {
    ordered_json controls = ordered_json::array();
    controls.push_back({{"perm", {1, 0, 2}}, {"dwell", 0.5}});
    CHECK(parse_controls(controls, 3).steps.size() == 1);

    ordered_json bad_perm = ordered_json::array();
    bad_perm.push_back({{"perm", {1, 1, 2}}, {"dwell", 0.5}});
    CHECK_THROWS_AS(parse_controls(bad_perm, 3), config_error);

    ordered_json bad_dwell = ordered_json::array();
    bad_dwell.push_back({{"perm", {0, 1, 2}}, {"dwell", -1.0}});
    CHECK_THROWS_AS(parse_controls(bad_dwell, 3), config_error);
}

TEST_CASE("polytope JSON round trip") {
    Rng rng(211);
    ProbVector d = random_positive_simplex(rng, 3);
    ProbVector y = random_simplex(rng, 3);
    MajorisationPolytope P = build_polytope(d, y);
    enumerate_vertices(P);
    ordered_json j = polytope_to_json(P);
    MajorisationPolytope Q = polytope_from_json(j);
    REQUIRE(Q.halfspaces.size() == P.halfspaces.size());
    REQUIRE(Q.vertices.size() == P.vertices.size());
    CHECK(l1_distance(Q.d.vec(), P.d.vec()) == 0.0);
    for (std::size_t k = 0; k < P.vertices.size(); ++k) {
        CHECK(l1_distance(Q.vertices[k].vec(), P.vertices[k].vec()) < 1e-15);
    }
}

TEST_CASE("trajectory CSV is round-trip safe at 17 significant digits") {
    GeneratorMatrix gen = thermal_generator(ProbVector::uniform(3));
    Rng rng(223);
    ControlSequence c = random_control_sequence(gen, 3, rng);
    Trajectory traj = simulate(ProbVector::uniform(3), gen, c, 2);
    const std::string csv = trajectory_csv(traj);

    std::stringstream in(csv);
    std::string header;
    std::getline(in, header);
    CHECK(header == "t,x_1,x_2,x_3");
    std::size_t row = 0;
    std::string line;
    while (std::getline(in, line)) {
        std::stringstream fields(line);
        std::string field;
        std::getline(fields, field, ',');
        CHECK(std::stod(field) == traj.samples[row].time);
        for (int i = 0; i < 3; ++i) {
            std::getline(fields, field, ',');
            CHECK(std::stod(field) == traj.samples[row].state[i]);
        }
        ++row;
    }
    CHECK(row == traj.samples.size());
}

TEST_CASE("verify params pick suite-specific defaults") {
    ordered_json cfg = {{"suite", "thm2"}};
    VerifyParams p = parse_verify_params(cfg);
    CHECK(p.n == 2);
    CHECK(p.m == 2);
    CHECK(p.spacing == 0.1);
    CHECK(p.epsilon == 0.03);

    ordered_json cfg2 = {{"suite", "thm2"}, {"epsilon", 0.05}};
    CHECK(parse_verify_params(cfg2).epsilon == 0.05);
}

TEST_CASE("unknown suite is a config error") {
    CHECK_THROWS_AS(run_suite("thm3", VerifyParams{}), config_error);
}
