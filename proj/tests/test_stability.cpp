#include <cmath>
#include <numbers>

#include "doctest.h"

#include "hillwalsh/error.hpp"
#include "hillwalsh/oracles.hpp"
#include "hillwalsh/stability.hpp"

using namespace hillwalsh;

namespace {

const double kTwoPi = 2.0 * std::numbers::pi;

}  // namespace

TEST_CASE("classification") {
    CHECK(classify(0.0) == StabilityClass::Stable);
    CHECK(classify(3.0) == StabilityClass::Unstable);
    CHECK(classify(-3.0) == StabilityClass::Unstable);
    CHECK(classify(2.0) == StabilityClass::Transition);
    CHECK(classify(-2.0 - 5e-7) == StabilityClass::Transition);
    CHECK(classify(1.99, 0.1) == StabilityClass::Transition);
    CHECK(classify(std::nan("")) == StabilityClass::Singular);
    CHECK(classify(INFINITY) == StabilityClass::Singular);
    CHECK(class_name(StabilityClass::Transition) == "transition");
}

TEST_CASE("axis") {
    const Axis a{0.0, 4.0, 5};
    CHECK(a.at(0) == 0.0);
    CHECK(a.at(3) == 3.0);
    CHECK(a.at(4) == 4.0);
    CHECK(a.spacing() == 1.0);
    const Axis one{2.5, 2.5, 1};
    CHECK(one.at(0) == 2.5);
    CHECK(one.spacing() == 0.0);
    CHECK_THROWS_AS((Axis{0, 1, 0}.validate("alpha")), DomainError);
    CHECK_THROWS_AS((Axis{1, 0, 3}.validate("alpha")), DomainError);
    CHECK_THROWS_AS((Axis{0, 1, 1}.validate("alpha")), DomainError);
    CHECK_THROWS_AS((Axis{0, INFINITY, 3}.validate("alpha")), DomainError);
}

TEST_CASE("unexcited row changes class at n^2/4") {
    const Axis alpha{0.0, 4.5, 451};
    const Axis beta{0.0, 0.0, 1};
    ScanOptions opt;
    opt.k = 12;
    opt.tol = 1e-3;
    const auto g = grid_scan(Excitation::cosine(), kTwoPi, alpha, beta, opt);
    // away from the touching points every cell is stable
    for (long j = 0; j < alpha.count; ++j) {
        const double a = alpha.at(j);
        double nearest = 1e9;
        for (double r : {0.0, 0.25, 1.0, 2.25, 4.0}) nearest = std::min(nearest, std::abs(a - r));
        if (nearest > 6 * alpha.spacing()) {
            CHECK(g.cls(0, j) == StabilityClass::Stable);
        }
    }
    for (double r : {0.25, 1.0, 2.25, 4.0}) {
        const long j = std::lround(r / alpha.spacing());
        CHECK(std::abs(g.delta(0, j)) == doctest::Approx(2.0).epsilon(1e-2));
    }
}

TEST_CASE("negative alpha without excitation is unstable") {
    const auto g = grid_scan(Excitation::cosine(), kTwoPi, Axis{-2.0, -0.1, 20}, Axis{0.0, 0.0, 1}, ScanOptions{});
    for (auto c : g.classes) CHECK(c == StabilityClass::Unstable);
    CHECK(g.singular_count == 0);
}

TEST_CASE("single cell grid and method checks") {
    ScanOptions opt;
    opt.k = 10;
    const auto g = grid_scan(Excitation::cosine(), kTwoPi, Axis{1.0, 1.0, 1}, Axis{0.5, 0.5, 1}, opt);
    REQUIRE(g.deltas.size() == 1);
    CHECK(g.deltas[0] == recursive_delta(sample_p(Excitation::cosine(), 10), 1.0, 0.5, kTwoPi));
    opt.method = Method::DirectInversion;
    CHECK_THROWS_AS(grid_scan(Excitation::cosine(), kTwoPi, Axis{1, 1, 1}, Axis{0, 0, 1}, opt), DomainError);
    opt.method = Method::Recursive;
    opt.k = 1;
    CHECK_THROWS_AS(grid_scan(Excitation::cosine(), kTwoPi, Axis{1, 1, 1}, Axis{0, 0, 1}, opt), SizeError);
}

TEST_CASE("grid is independent of the worker count") {
    const Axis alpha{-0.5, 3.0, 37};
    const Axis beta{0.0, 2.0, 23};
    ScanOptions opt;
    opt.k = 9;
    const auto e = Excitation::cosine_sum({{1.0, 1}, {1.0, 2}});
    opt.workers = 1;
    const auto g1 = grid_scan(e, kTwoPi, alpha, beta, opt);
    for (unsigned w : {2u, 8u, 64u}) {
        opt.workers = w;
        const auto gw = grid_scan(e, kTwoPi, alpha, beta, opt);
        CHECK(gw.deltas == g1.deltas);
        CHECK(gw.classes == g1.classes);
    }
    for (std::size_t i = 0; i < g1.deltas.size(); ++i) {
        REQUIRE(g1.classes[i] == classify(g1.deltas[i], opt.tol));
    }
}

TEST_CASE("singular cells are recorded and the scan continues") {
    const int k = 4;
    const double pole = -std::ldexp(1.0, 2 * k + 2) / (kTwoPi * kTwoPi);
    ScanOptions opt;
    opt.k = k;
    const auto g = grid_scan(Excitation::cosine(), kTwoPi, Axis{pole, pole + 1.0, 2}, Axis{0, 0, 1}, opt);
    CHECK(g.cls(0, 0) == StabilityClass::Singular);
    CHECK(std::isnan(g.delta(0, 0)));
    CHECK(g.cls(0, 1) != StabilityClass::Singular);
    CHECK(g.singular_count == 1);
}

TEST_CASE("monodromy grid agrees with the recursion") {
    const Axis alpha{0.1, 3.9, 9};
    const Axis beta{0.2, 1.8, 5};
    ScanOptions opt;
    opt.k = 14;
    const auto rec = grid_scan(Excitation::cosine(), kTwoPi, alpha, beta, opt);
    opt.method = Method::Monodromy;
    opt.monodromy_steps = 2048;
    const auto mono = grid_scan(Excitation::cosine(), kTwoPi, alpha, beta, opt);
    for (std::size_t i = 0; i < rec.deltas.size(); ++i) {
        CHECK(rec.deltas[i] == doctest::Approx(mono.deltas[i]).epsilon(1e-2));
    }
}

TEST_CASE("Mathieu discriminant is even in beta") {
    const auto s = sample_p(Excitation::cosine(), 12);
    for (double a : {0.3, 1.1, 2.7}) {
        for (double b : {0.4, 1.5}) {
            CHECK(recursive_delta(s, a, b, kTwoPi) == doctest::Approx(recursive_delta(s, a, -b, kTwoPi)).epsilon(5e-3));
        }
    }
}

TEST_CASE("contours of synthetic fields") {
    const Axis x{-1.0, 1.0, 41};
    const Axis y{-1.0, 1.0, 41};
    std::vector<double> flat(41 * 41, 1.0);
    CHECK(contour_level(flat, x, y, 2.0).empty());

    std::vector<double> bowl(41 * 41);
    for (long i = 0; i < 41; ++i) {
        for (long j = 0; j < 41; ++j) {
            bowl[static_cast<std::size_t>(i * 41 + j)] = x.at(j) * x.at(j) + y.at(i) * y.at(i);
        }
    }
    const auto circle = contour_level(bowl, x, y, 0.25);
    REQUIRE(circle.size() == 1);
    CHECK(circle[0].closed);
    for (const auto& [px, py] : circle[0].points) {
        CHECK(std::hypot(px, py) == doctest::Approx(0.5).epsilon(0.02));
    }

    // a level line crossing the window is open with endpoints on the boundary
    std::vector<double> ramp(41 * 41);
    for (long i = 0; i < 41; ++i) {
        for (long j = 0; j < 41; ++j) ramp[static_cast<std::size_t>(i * 41 + j)] = x.at(j) + 0.5 * y.at(i);
    }
    const auto line = contour_level(ramp, x, y, 0.1);
    REQUIRE(line.size() == 1);
    CHECK_FALSE(line[0].closed);
    for (const auto& [px, py] : line[0].points) CHECK(px + 0.5 * py == doctest::Approx(0.1));

    std::vector<double> holed = bowl;
    holed[20 * 41 + 30] = std::nan("");
    std::size_t skipped = 0;
    (void)contour_level(holed, x, y, 0.25, &skipped);
    CHECK(skipped == 4);
    CHECK_THROWS_AS(contour_level(std::vector<double>(5), x, y, 0.0), SizeError);
}

TEST_CASE("saddle cells yield two separate segments") {
    const Axis x{0.0, 1.0, 2};
    const Axis y{0.0, 1.0, 2};
    // corners (0,0) and (1,1) high, centre low: the high corners stay apart
    const std::vector<double> f{1.0, -1.0, -1.0, 0.9};
    const auto lines = contour_level(f, x, y, 0.0);
    REQUIRE(lines.size() == 2);
    CHECK(lines[0].points.size() == 2);
    CHECK(lines[1].points.size() == 2);
}

TEST_CASE("transition curves meet the unexcited axis at n^2/4") {
    const Axis alpha{0.0, 2.6, 131};
    const Axis beta{0.0, 1.0, 26};
    ScanOptions opt;
    opt.k = 11;
    const auto g = grid_scan(Excitation::cosine(), kTwoPi, alpha, beta, opt);
    const auto curves = transition_contours(g);
    CHECK_FALSE(curves.plus_level.empty());
    CHECK_FALSE(curves.minus_level.empty());
    CHECK(curves.skipped_cells == 0);
    // the lowest point of each -2 curve sits near 0.25 or 2.25
    for (const auto& line : curves.minus_level) {
        auto low = *std::min_element(line.points.begin(), line.points.end(),
                                     [](const Point& a, const Point& b) { return a.second < b.second; });
        const double d = std::min(std::abs(low.first - 0.25), std::abs(low.first - 2.25));
        CHECK(d < 3 * alpha.spacing());
    }
}

TEST_CASE("root ordering rule") {
    // unstable at the left end: +, then pairs
    CHECK(interlacing_order_ok({0.0, 1.0, 1.1}, {0.25, 0.3}, 5.0, 0.0));
    CHECK_FALSE(interlacing_order_ok({0.0, 1.0}, {0.25, 0.3}, 5.0, 0.0));
    CHECK_FALSE(interlacing_order_ok({0.0, 0.1, 1.0, 1.1}, {0.25, 0.3}, 5.0, 0.0));
    // starting inside a stable band the first run is a pair
    CHECK(interlacing_order_ok({1.0, 1.1}, {0.25, 0.3}, 0.0, 0.0));
    CHECK_FALSE(interlacing_order_ok({1.0, 1.1}, {0.25}, 0.0, 0.0));
    // window ending inside a -2 gap
    CHECK(interlacing_order_ok({0.0}, {0.25}, 5.0, -3.0));
    CHECK_FALSE(interlacing_order_ok({0.0}, {0.25}, 5.0, 3.0));
    CHECK(interlacing_order_ok({}, {}, 0.0, 1.0));
    CHECK_FALSE(interlacing_order_ok({}, {}, 0.0, 3.0));
}

TEST_CASE("interlacing without excitation finds the double roots") {
    const double lo = -0.9;
    const double hi = 4.6;
    const auto r = interlacing_scan([](double a) { return constant_coeff_delta(a, kTwoPi); }, 0.0, lo, hi);
    REQUIRE(r.lambdas.size() == 5);
    REQUIRE(r.lambda_primes.size() == 4);
    CHECK(r.lambdas[0] == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(r.lambdas[1] == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(r.lambdas[2] == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(r.lambdas[4] == doctest::Approx(4.0).epsilon(1e-6));
    CHECK(r.lambda_primes[0] == doctest::Approx(0.25).epsilon(1e-6));
    CHECK(r.lambda_primes[3] == doctest::Approx(2.25).epsilon(1e-6));
    CHECK(r.ordering_ok);
    CHECK(r.coincident.size() == 4);
    REQUIRE_FALSE(r.intervals.empty());
    CHECK(r.intervals.front().label == "unstable");
    CHECK(r.intervals.front().hi == doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("Mathieu interlacing with the recursion") {
    const auto r = interlacing_scan(Excitation::cosine(), kTwoPi, 0.5, {-1.0, 5.0}, 11);
    CHECK(r.ordering_ok);
    CHECK(r.lambdas.size() == 3);
    CHECK(r.lambda_primes.size() == 4);
    CHECK(r.coincident.empty());
    const MonodromyIntegrator integ(Excitation::cosine(), kTwoPi, 1024);
    for (double root : r.lambdas) CHECK(integ.delta(root, 0.5) == doctest::Approx(2.0).epsilon(0.05));
    for (double root : r.lambda_primes) CHECK(integ.delta(root, 0.5) == doctest::Approx(-2.0).epsilon(0.05));
    for (const auto& iv : r.intervals) {
        const double mid = 0.5 * (iv.lo + iv.hi);
        const double d = integ.delta(mid, 0.5);
        if (iv.hi - iv.lo > 0.05) CHECK(iv.label == (std::abs(d) > 2 ? "unstable" : "stable"));
    }
    CHECK_THROWS_AS(interlacing_scan(Excitation::cosine(), kTwoPi, 0.5, {1.0, 1.0}, 11), DomainError);
}
