#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>

#include "doctest.h"

#include "hillwalsh/error.hpp"
#include "hillwalsh/excitation.hpp"

using namespace hillwalsh;

TEST_CASE("built-in excitations") {
    const auto c = Excitation::cosine();
    CHECK(c.at_phase(0.0) == 1.0);
    CHECK(c.at_phase(0.5) == doctest::Approx(-1.0));
    CHECK(c.at_phase(0.25) == doctest::Approx(0.0).epsilon(1e-15));

    const auto l = Excitation::cosine_sum({{1.0, 1}, {1.0, 2}});
    CHECK(l.at_phase(0.0) == 2.0);
    CHECK(l.at_phase(0.5) == doctest::Approx(0.0));

    const auto sq = Excitation::square(2.0, -1.0, 0.25);
    CHECK(sq.at_phase(0.1) == 2.0);
    CHECK(sq.at_phase(0.25) == -1.0);
    CHECK(sq.at_phase_left(0.25) == 2.0);
    CHECK(sq.at_phase_left(1.0) == -1.0);
    CHECK(sq.breakpoints() == std::vector<double>{0.0, 0.25});
    CHECK(sq.is_piecewise_constant());
    CHECK_FALSE(c.is_piecewise_constant());
}

TEST_CASE("periodic extension") {
    const HillProblem p{1.0, 0.5, 2.0, Excitation::cosine_sum({{0.7, 1}, {-0.2, 3}})};
    for (double t : {0.0, 0.3, 1.1, 1.9}) {
        for (int m : {-3, 1, 7}) {
            CHECK(eval_p(p, t + m * p.tau) == doctest::Approx(eval_p(p, t)).epsilon(1e-12));
        }
    }
    CHECK(p.q(0.3) == doctest::Approx(1.0 + 0.5 * p.p(0.3)));
}

TEST_CASE("sampled table is a zero-order hold") {
    const auto t = Excitation::table({1.0, 2.0, 3.0, 4.0});
    CHECK(t.at_phase(0.0) == 1.0);
    CHECK(t.at_phase(0.24) == 1.0);
    CHECK(t.at_phase(0.25) == 2.0);
    CHECK(t.at_phase(0.99) == 4.0);
    CHECK(t.at_phase_left(0.25) == 1.0);
    CHECK(t.at_phase_left(1.0) == 4.0);
    CHECK_THROWS_AS(Excitation::table({1.0, 2.0, 3.0}), DomainError);
    CHECK_THROWS_AS(Excitation::table({}), DomainError);
}

TEST_CASE("validation") {
    CHECK_THROWS_AS(Excitation::square(1, -1, 0.0), DomainError);
    CHECK_THROWS_AS(Excitation::square(1, -1, 1.0), DomainError);
    CHECK_THROWS_AS(Excitation::cosine_sum({}), DomainError);
    CHECK_THROWS_AS(Excitation::cosine_sum({{1.0, -1}}), DomainError);
    HillProblem p;
    p.tau = 0.0;
    CHECK_THROWS_AS(p.validate(), DomainError);
    p.tau = 1.0;
    p.alpha = std::nan("");
    CHECK_THROWS_AS(p.validate(), DomainError);
}

TEST_CASE("sample_p uses right endpoints; the last sample is p(0)") {
    const HillProblem p{0.0, 1.0, 2.0 * std::numbers::pi, Excitation::cosine()};
    const auto s = sample_p(p, 3);
    REQUIRE(s.size() == 8);
    for (int n = 1; n <= 8; ++n) {
        CHECK(s[n - 1] == doctest::Approx(std::cos(2.0 * std::numbers::pi * n / 8.0)).epsilon(1e-15));
    }
    CHECK(s.back() == 1.0);
    CHECK_THROWS_AS(sample_p(p, 0), SizeError);
    CHECK_THROWS_AS(sample_p(p, 21), SizeError);

    // table samples come out rotated by one cell
    const auto tab = sample_p(Excitation::table({10, 20, 30, 40}), 2);
    CHECK(tab == std::vector<double>{20, 30, 40, 10});
}

TEST_CASE("excitation mini-language") {
    CHECK(parse_excitation("cos").describe() == "cos");
    CHECK(parse_excitation("cossum:1x1,1x2").describe() == "cossum:1x1,1x2");
    CHECK(parse_excitation(" square:1,-1,0.5 ").describe() == "square:1,-1,0.5");
    CHECK(parse_excitation("cossum:0.5x3").at_phase(0.0) == 0.5);
    CHECK_THROWS_AS(parse_excitation("sin"), DomainError);
    CHECK_THROWS_AS(parse_excitation("cossum:1y1"), DomainError);
    CHECK_THROWS_AS(parse_excitation("cossum:1x1.5"), DomainError);
    CHECK_THROWS_AS(parse_excitation("square:1,2"), DomainError);
    CHECK_THROWS_AS(parse_excitation("table:/nonexistent/file"), IoError);

    const auto path = std::filesystem::temp_directory_path() / "hillwalsh_table_test.txt";
    {
        std::ofstream out(path);
        out << "# comment\n1\n\n-1\n  0.5 \n2\n";
    }
    const auto t = parse_excitation("table:" + path.string());
    CHECK(t.at_phase(0.3) == -1.0);
    CHECK(t.describe() == "table[4]");
    {
        std::ofstream out(path);
        out << "1\n2\n3\n";
    }
    CHECK_THROWS_AS(load_table(path), DomainError);
    {
        std::ofstream out(path);
        out << "1\nabc\n";
    }
    CHECK_THROWS_AS(load_table(path), DomainError);
    std::filesystem::remove(path);
}
