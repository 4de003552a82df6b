#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include "doctest.h"

#include "hillwalsh/error.hpp"
#include "hillwalsh/io.hpp"
#include "hillwalsh/oracles.hpp"

using namespace hillwalsh;

namespace {

StabilityGrid small_grid() {
    StabilityGrid g;
    g.alpha_axis = Axis{0.0, 1.0, 3};
    g.beta_axis = Axis{0.0, 0.5, 2};
    g.deltas = {2.0, 0.5, -3.0, 1.0 / 3.0, std::nan(""), 4.0};
    for (double d : g.deltas) g.classes.push_back(classify(d));
    return g;
}

}  // namespace

TEST_CASE("grid csv") {
    std::ostringstream out;
    io::write_grid_csv(out, small_grid());
    CHECK(out.str() ==
          "alpha,beta,delta,class\n"
          "0,0,2,transition\n"
          "0.5,0,0.5,stable\n"
          "1,0,-3,unstable\n"
          "0,0.5,0.333333333333,stable\n"
          "0.5,0.5,nan,singular\n"
          "1,0.5,4,unstable\n");
}

TEST_CASE("pgm") {
    std::ostringstream out;
    io::write_pgm(out, small_grid());
    std::istringstream in(out.str());
    std::string magic, comment;
    std::getline(in, magic);
    std::getline(in, comment);
    CHECK(magic == "P2");
    CHECK(comment.front() == '#');
    int w = 0, h = 0, maxv = 0;
    in >> w >> h >> maxv;
    CHECK(w == 3);
    CHECK(h == 2);
    CHECK(maxv == 255);
    std::vector<int> px(6);
    for (int& p : px) in >> p;
    CHECK(px == std::vector<int>{128, 255, 0, 255, 64, 0});
}

TEST_CASE("curves csv repeats the first point of closed curves") {
    TransitionCurves c;
    c.plus_level.push_back(Polyline{{{0.0, 0.0}, {1.0, 0.0}, {1.0, 1.0}}, true});
    c.minus_level.push_back(Polyline{{{2.0, 0.5}, {2.5, 0.25}}, false});
    std::ostringstream out;
    io::write_curves_csv(out, c);
    CHECK(out.str() ==
          "curve_id,level,alpha,beta\n"
          "0,+2,0,0\n0,+2,1,0\n0,+2,1,1\n0,+2,0,0\n"
          "1,-2,2,0.5\n1,-2,2.5,0.25\n");
}

TEST_CASE("interlacing json") {
    InterlacingReport r;
    r.beta = 0.5;
    r.lambdas = {-0.11376114790123};
    r.lambda_primes = {0.1, 0.2};
    r.ordering_ok = true;
    r.intervals = {{-1.0, -0.11376114790123, "unstable"}};
    const auto j = io::interlacing_json(r);
    CHECK(j["beta"] == 0.5);
    CHECK(j["lambdas"][0].get<double>() == -0.113761147901);
    CHECK(j["lambda_primes"].size() == 2);
    CHECK(j["ordering_ok"] == true);
    CHECK(j["intervals"][0]["label"] == "unstable");
    CHECK(j["coincident"].empty());
    CHECK(io::rounded(1.0 / 3.0) == 0.333333333333);
}

TEST_CASE("fixture round trip") {
    const auto dir = std::filesystem::temp_directory_path() / "hillwalsh_io_test";
    std::filesystem::remove_all(dir);
    std::vector<io::Fixture> fx{
        {"a", HillProblem{1.0, 0.5, 2.0, Excitation::cosine_sum({{1.0, 1}, {1.0, 2}})}, "recursive", 10, 1.25},
        {"b", HillProblem{-1.0, 0.0, 1.0, Excitation::table({1, 2, 3, 4})}, "monodromy", 4096, -0.5},
        {"c", HillProblem{0.3, 2.0, 3.0, Excitation::square(1, -1, 0.25)}, "piecewise-constant", 2, 0.125}};
    const auto path = dir / "nested" / "f.json";
    io::write_fixtures(path, fx);
    const auto back = io::read_fixtures(path);
    REQUIRE(back.size() == 3);
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(back[i].name == fx[i].name);
        CHECK(back[i].method == fx[i].method);
        CHECK(back[i].order == fx[i].order);
        CHECK(back[i].delta == fx[i].delta);
        CHECK(back[i].problem.alpha == fx[i].problem.alpha);
        CHECK(back[i].problem.excitation.describe() == fx[i].problem.excitation.describe());
    }
    CHECK(back[1].problem.excitation.at_phase(0.6) == 3.0);

    {
        std::ofstream bad(dir / "bad.json");
        bad << "{\"fixtures\": [{\"name\": 1}]}";
    }
    CHECK_THROWS_AS(io::read_fixtures(dir / "bad.json"), IoError);
    CHECK_THROWS_AS(io::read_fixtures(dir / "missing.json"), IoError);
    std::filesystem::remove_all(dir);
}

TEST_CASE("committed fixtures are reproduced") {
    const auto fixtures = io::read_fixtures(std::filesystem::path(HILLWALSH_FIXTURE_DIR) / "oracles.json");
    REQUIRE(fixtures.size() >= 8);
    for (const auto& f : fixtures) {
        CAPTURE(f.name);
        double now = 0.0;
        if (f.method == "closed-form") {
            now = constant_coeff_delta(f.problem.alpha, f.problem.tau);
        } else if (f.method == "monodromy") {
            now = monodromy(f.problem, f.order).trace;
        } else if (f.method == "piecewise-constant") {
            now = piecewise_constant_delta(constant_levels(f.problem));
        } else if (f.method == "recursive") {
            now = discriminant_recursive(f.problem, static_cast<int>(f.order)).delta;
        } else if (f.method == "lyapunov") {
            now = lyapunov_terms(f.problem, 3, static_cast<int>(f.order)).delta();
        } else {
            FAIL("unknown fixture method " << f.method);
        }
        CHECK(std::abs(now - f.delta) < 1e-10);
    }
}
