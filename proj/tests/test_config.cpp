#include "conefrac/config.hpp"
#include "conefrac/error.hpp"

#include "doctest.h"

#include <cmath>
#include <numbers>
#include <string>

using namespace conefrac;

namespace {

std::string error_of(const std::string& text, const std::string& task = "eig") {
    try {
        parse_config(text, task);
    } catch (const ConfigError& e) {
        return e.what();
    }
    return "";
}

bool contains(const std::string& hay, const std::string& needle) { return hay.find(needle) != std::string::npos; }

}  // namespace

TEST_CASE("minimal half-circle eig config") {
    const RunConfig c = parse_config("[params]\ns = 0.5\n[cone]\npreset = half\n", "eig");
    CHECK(c.task == "eig");
    CHECK(c.N == 2);
    CHECK(c.s == 0.5);
    CHECK(c.lambda == 0.0);
    CHECK(c.nt == 32);
    CHECK(c.ntheta == 64);
    CHECK(c.nr == 48);
    CHECK(c.k == 8);
    CHECK(c.cap().length() == doctest::Approx(std::numbers::pi));
    CHECK(c.cone().has_value());
    CHECK(c.h_text == "0");
    CHECK(c.perturbation().is_zero);
    CHECK_FALSE(c.lid.has_value());
    CHECK(c.arcs.size() == 4);
    CHECK(c.params().p() == doctest::Approx(10.0 * 2 / (2 * 0.5)));
}

TEST_CASE("values may be constant expressions and lists") {
    const RunConfig c = parse_config(
        "[params]\ns = 1/4\nlambda = 0\n[cone]\npreset = full\n[task]\narcs = pi/2, pi, 2*pi\nmodes = 1:1, 3:0.2\n"
        "[expressions]\nh = 0.1*x1\nlid = cos(t)\n",
        "scan");
    CHECK(c.s == 0.25);
    CHECK(c.arcs.size() == 3);
    CHECK(c.arcs[2] == doctest::Approx(2 * std::numbers::pi));
    REQUIRE(c.modes.size() == 2);
    CHECK(c.modes[1].first == 3);
    CHECK(c.modes[1].second == 0.2);
    CHECK_FALSE(c.cone().has_value());
    CHECK(c.cap().is_full());
    CHECK(c.lid.has_value());
    CHECK(c.perturbation()(1.0, 0.0) == doctest::Approx(0.1));
}

TEST_CASE("custom cones from g values") {
    const RunConfig c = parse_config("[cone]\ng_plus = 1\ng_minus = 0.5\n", "smooth-cone");
    CHECK(c.preset == "custom");
    REQUIRE(c.cone().has_value());
    CHECK(c.cone()->g_plus() == 1.0);
    CHECK(c.cone()->g_minus() == 0.5);
}

TEST_CASE("lambda above the Hardy constant is rejected with its value") {
    const std::string m = error_of("[params]\ns = 0.5\nlambda = 2\n[cone]\npreset = half\n");
    CHECK(contains(m, "Lambda"));
    CHECK(contains(m, "0."));
    // the same value passes when explicitly allowed, and admissible values pass
    CHECK_NOTHROW(parse_config("[params]\ns = 0.5\nlambda = 2\nallow_inadmissible = true\n[cone]\npreset = half\n", "eig"));
    CHECK_NOTHROW(parse_config("[params]\ns = 0.5\nlambda = 0.1\n[cone]\npreset = half\n", "eig"));
}

TEST_CASE("malformed expressions report the position") {
    const std::string m = error_of("[expressions]\nh = sin(\n");
    CHECK(contains(m, "position 4"));
    CHECK(contains(m, "expressions.h"));
    CHECK(contains(error_of("[expressions]\nh = t\n", "frequency"), "t"));
}

TEST_CASE("unknown keys and sections get suggestions") {
    CHECK(contains(error_of("[mesh]\nnthtea = 12\n"), "did you mean 'ntheta'"));
    CHECK(contains(error_of("[parmas]\ns = 0.5\n"), "did you mean 'params'"));
    CHECK(contains(error_of("[mesh]\nzzzzzzz = 1\n"), "unknown key 'zzzzzzz'"));
    CHECK_FALSE(contains(error_of("[mesh]\nzzzzzzz = 1\n"), "did you mean"));
}

TEST_CASE("range checks") {
    CHECK(contains(error_of("[params]\ns = 1.2\n"), "s"));
    CHECK_FALSE(error_of("[params]\ns = 0\n").empty());
    CHECK_FALSE(error_of("[params]\nN = 3\n").empty());
    CHECK_FALSE(error_of("[mesh]\nnt = 2\n").empty());
    CHECK_FALSE(error_of("[mesh]\nrmin = 1.5\n").empty());
    CHECK_FALSE(error_of("[mesh]\nnt = 3.5\n").empty());
    CHECK_FALSE(error_of("[cone]\npreset = wedge\n").empty());
    CHECK_FALSE(error_of("[task]\narcs = 2, 1\n", "scan").empty());
    CHECK_FALSE(error_of("[task]\nmodes = 0:1\n", "frequency").empty());
    CHECK_FALSE(error_of("[task]\nfield = guess\n", "frequency").empty());
}

TEST_CASE("all violations are reported together") {
    const std::string m = error_of("[params]\ns = 1.5\n[mesh]\nnt = 1\nnthtea = 3\n[expressions]\nh = (\n");
    CHECK(contains(m, "4 problems"));
}

TEST_CASE("canonical form and hash") {
    const RunConfig a = parse_config("[params]\ns = 0.5\n[mesh]\nnt = 16\n", "eig");
    const RunConfig b = parse_config("; comment\n[mesh]\nnt = 16\n\n[params]\ns = 1/2\n", "eig");
    const RunConfig c = parse_config("[params]\ns = 0.5\n[mesh]\nnt = 17\n", "eig");
    CHECK(a.canonical() == b.canonical());
    CHECK(a.hash() == b.hash());
    CHECK(a.hash() != c.hash());
    CHECK(contains(a.canonical(), "mesh.nt = 16"));
}

TEST_CASE("edit distance and file loading") {
    CHECK(edit_distance("kitten", "sitting") == 3);
    CHECK(edit_distance("", "abc") == 3);
    CHECK(edit_distance("same", "same") == 0);
    CHECK_THROWS_AS(load_config("/nonexistent/conefrac.ini", "eig"), ConfigError);
}
