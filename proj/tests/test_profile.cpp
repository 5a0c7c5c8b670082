#include <catch_amalgamated.hpp>

#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include "tvflow/tvflow.hpp"

using namespace tvflow;
using Catch::Approx;

namespace {

PiecewiseProfile parabola() { return PiecewiseProfile::single(-1.0, 1.0, Polynomial{0.0, 0.0, 1.0}); }

PiecewiseProfile w_profile() {
    return PiecewiseProfile::from_pieces({{-1.0, 0.0, Polynomial{0.25, 1.0, 1.0}}, {0.0, 1.0, Polynomial{0.25, -1.0, 1.0}}});
}

nlohmann::json scenario_file(const std::string& name) {
    std::ifstream f(std::string(TVFLOW_SCENARIO_DIR) + "/" + name);
    std::stringstream ss;
    ss << f.rdbuf();
    return nlohmann::json::parse(ss.str());
}

}  // namespace

TEST_CASE("polynomial arithmetic and roots") {
    const Polynomial p{-2.0, 0.0, 1.0};
    CHECK(p.degree() == 2);
    CHECK(p(3.0) == 7.0);
    CHECK(p.derivative() == Polynomial{0.0, 2.0});
    CHECK(p.integrate(0.0, 3.0) == Approx(3.0));
    const auto roots = real_roots(p, -5.0, 5.0);
    REQUIRE(roots.size() == 2);
    CHECK(roots[0] == Approx(-std::sqrt(2.0)).epsilon(1e-15));
    CHECK(roots[1] == Approx(std::sqrt(2.0)).epsilon(1e-15));
    CHECK(real_roots(Polynomial{0.0, 0.0, 0.0, 1.0}, -1.0, 1.0).size() == 1);
    CHECK((Polynomial{1.0, 1.0} * Polynomial{-1.0, 1.0}) == Polynomial{-1.0, 0.0, 1.0});
    CHECK(Polynomial{1.0, 2.0, 0.0}.degree() == 1);
}

TEST_CASE("eval") {
    CHECK(eval(parabola(), 0.5) == 0.25);
    CHECK(eval(parabola(), -1.0) == 1.0);
    CHECK(eval(w_profile(), 0.0) == 0.25);
    CHECK_THROWS_MATCHES(eval(parabola(), 1.5), Error, Catch::Matchers::Predicate<Error>([](const Error& e) {
                             return e.code() == ErrorCode::OutOfDomain;
                         }));
}

TEST_CASE("integrate") {
    CHECK(integrate(parabola(), -1.0, 1.0) == Approx(2.0 / 3.0).epsilon(1e-15));
    CHECK(integrate(parabola(), 0.3, 0.3) == 0.0);
    CHECK(integrate(w_profile(), -1.0, 1.0) == Approx(1.0 / 6.0).epsilon(1e-15));
    CHECK_THROWS_AS(integrate(parabola(), -2.0, 0.0), Error);
}

TEST_CASE("integration is additive") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int k = 0; k < 200; ++k) {
        const auto p = random_profile(rng);
        double xs[3] = {p.a() + unit(rng) * (p.b() - p.a()), p.a() + unit(rng) * (p.b() - p.a()),
                        p.a() + unit(rng) * (p.b() - p.a())};
        std::sort(xs, xs + 3);
        const double whole = integrate(p, xs[0], xs[2]);
        const double parts = integrate(p, xs[0], xs[1]) + integrate(p, xs[1], xs[2]);
        CHECK(std::abs(whole - parts) <= 1e-12 * std::max(1.0, std::abs(whole)) * p.scale());
    }
}

TEST_CASE("monotone arcs") {
    const auto a = monotone_arcs(parabola());
    REQUIRE(a.size() == 2);
    CHECK(a[0].dir == Direction::Decreasing);
    CHECK(a[0].x1 == Approx(0.0).margin(1e-14));
    CHECK(a[1].dir == Direction::Increasing);

    const auto w = monotone_arcs(w_profile());
    REQUIRE(w.size() == 4);
    const Direction dirs[] = {Direction::Decreasing, Direction::Increasing, Direction::Decreasing, Direction::Increasing};
    const double ends[] = {-0.5, 0.0, 0.5, 1.0};
    for (int k = 0; k < 4; ++k) {
        CHECK(w[k].dir == dirs[k]);
        CHECK(w[k].x1 == Approx(ends[k]).margin(1e-13));
    }

    const auto cubic = monotone_arcs(PiecewiseProfile::single(-1.0, 1.0, Polynomial{0.0, 0.0, 0.0, 1.0}));
    REQUIRE(cubic.size() == 1);
    CHECK(cubic[0].dir == Direction::Increasing);
}

TEST_CASE("adjacent arcs never share a direction") {
    std::mt19937_64 rng(5);
    for (int k = 0; k < 300; ++k) {
        const auto arcs = monotone_arcs(random_profile(rng));
        for (std::size_t j = 1; j < arcs.size(); ++j) CHECK(arcs[j].dir != arcs[j - 1].dir);
    }
}

TEST_CASE("clarke interval") {
    auto [lo, hi] = clarke_interval(w_profile(), 0.0);
    CHECK(lo == Approx(-1.0));
    CHECK(hi == Approx(1.0));
    std::tie(lo, hi) = clarke_interval(parabola(), 0.5);
    CHECK(lo == 1.0);
    CHECK(hi == 1.0);
    std::tie(lo, hi) = clarke_interval(parabola(), -1.0);
    CHECK(lo == -2.0);
    CHECK(hi == -2.0);
}

TEST_CASE("clarke interval collapses at smooth points") {
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> unit(0.05, 0.95);
    for (int k = 0; k < 200; ++k) {
        const auto p = random_profile(rng);
        const Piece& pc = p.pieces()[rng() % p.pieces().size()];
        const double x = pc.x0 + unit(rng) * (pc.x1 - pc.x0);
        const auto [lo, hi] = clarke_interval(p, x);
        CHECK(lo == hi);
        CHECK(lo == Approx(pc.poly.derivative()(x)));
    }
}

TEST_CASE("solve level") {
    const auto p = parabola();
    CHECK(solve_level(p, {0.0, 1.0, Direction::Increasing}, 0.25, LevelSide::FirstFromLeft) == Approx(0.5).epsilon(1e-15));
    const auto shifted = PiecewiseProfile::single(-0.5, 0.0, Polynomial{0.25, 1.0, 1.0});
    CHECK(solve_level(shifted, {-0.5, 0.0, Direction::Increasing}, 1.0 / 12.0, LevelSide::FirstFromLeft) ==
          Approx(-0.5 + 1.0 / std::sqrt(12.0)).epsilon(1e-14));
    // x on [0,1], flat at 1 on [1,2], x - 1 on [2,3]
    const auto stair = PiecewiseProfile::from_pieces(
        {{0.0, 1.0, Polynomial{0.0, 1.0}}, {1.0, 2.0, Polynomial{1.0}}, {2.0, 3.0, Polynomial{-1.0, 1.0}}});
    const MonotoneArc arc{0.0, 3.0, Direction::Increasing};
    CHECK(solve_level(stair, arc, 1.0, LevelSide::FirstFromLeft) == Approx(1.0));
    CHECK(solve_level(stair, arc, 1.0, LevelSide::LastFromRight) == Approx(2.0));
    CHECK_THROWS_MATCHES(solve_level(p, {0.0, 1.0, Direction::Increasing}, 2.0, LevelSide::FirstFromLeft), Error,
                         Catch::Matchers::Predicate<Error>([](const Error& e) {
                             return e.code() == ErrorCode::LevelOutOfRange;
                         }));
}

TEST_CASE("solve level inverts eval") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    int done = 0;
    while (done < 1000) {
        const auto p = random_profile(rng);
        const auto arcs = monotone_arcs(p);
        const MonotoneArc& arc = arcs[rng() % arcs.size()];
        if (arc.dir == Direction::Flat) continue;
        const double y0 = p(arc.x0);
        const double y1 = p(arc.x1);
        const double y = y0 + unit(rng) * (y1 - y0);
        const auto side = rng() % 2 ? LevelSide::FirstFromLeft : LevelSide::LastFromRight;
        const double x = solve_level(p, arc, y, side);
        CHECK(std::abs(p(x) - y) <= 1e-10 * p.scale());
        ++done;
    }
}

TEST_CASE("profile validation") {
    CHECK_THROWS_MATCHES(PiecewiseProfile::from_pieces({{0.0, 1.0, Polynomial{0.0, 1.0}}, {1.0, 2.0, Polynomial{5.0}}}),
                         Error, Catch::Matchers::Predicate<Error>([](const Error& e) {
                             return e.code() == ErrorCode::ContinuityViolation;
                         }));
    CHECK_THROWS_MATCHES(PiecewiseProfile::from_pieces({{0.0, 1.0, Polynomial{0.0, 1.0}}}, 0.5), Error,
                         Catch::Matchers::Predicate<Error>([](const Error& e) {
                             return e.code() == ErrorCode::BoundaryMismatch;
                         }));
    CHECK_THROWS_AS(PiecewiseProfile::from_pieces({}), Error);
}

TEST_CASE("scenario loading") {
    const auto p = load_scenario(std::string(R"({"domain":[-1,1],"pieces":[{"interval":[-1,1],"coeffs":[0,0,1]}]})"));
    CHECK(p.left_value() == 1.0);
    CHECK(p.right_value() == 1.0);

    auto v1 = scenario_file("table1_v1.json");
    const auto shifted = load_scenario(v1);
    CHECK(shifted.a() == -1.5);
    CHECK(shifted.b() == 5.5);
    CHECK(shifted.min_value() == Approx(1.0).epsilon(1e-14));

    v1["options"]["auto_shift"] = false;
    v1["options"].erase("normalize_min");
    CHECK_THROWS_MATCHES(load_scenario(v1), Error, Catch::Matchers::Predicate<Error>([](const Error& e) {
                             return e.code() == ErrorCode::ContinuityViolation;
                         }));

    CHECK_THROWS_MATCHES(load_scenario(std::string("{ nope")), Error, Catch::Matchers::Predicate<Error>([](const Error& e) {
                             return e.code() == ErrorCode::SchemaError;
                         }));
    CHECK_THROWS_MATCHES(load_scenario(std::string(R"({"domain":[1,1],"pieces":[]})")), Error,
                         Catch::Matchers::Predicate<Error>([](const Error& e) { return e.code() == ErrorCode::EmptyDomain; }));
    CHECK_THROWS_MATCHES(
        load_scenario(std::string(R"({"domain":[0,1],"pieces":[{"interval":[0,1],"coeffs":[0,0,0,0,0,0,0,0,0,1]}]})")),
        Error, Catch::Matchers::Predicate<Error>([](const Error& e) { return e.code() == ErrorCode::DegreeOverflow; }));
}

TEST_CASE("auto shift anchors the first piece") {
    const auto p = load_scenario(std::string(
        R"({"domain":[0,2],"pieces":[{"interval":[0,1],"coeffs":[0,1]},{"interval":[1,2],"coeffs":[10,1]}],"options":{"auto_shift":true}})"));
    CHECK(p(0.0) == 0.0);
    CHECK(p(2.0) == Approx(2.0));
}

TEST_CASE("scenario round trip") {
    const auto p = w_profile();
    const auto q = load_scenario(to_scenario_json(p));
    CHECK(sup_distance(p, q) == 0.0);
}

TEST_CASE("exact distances and derivative norms") {
    const auto p = parabola();
    const auto q = translated(p, 0.5);
    CHECK(sup_distance(p, q) == Approx(0.5));
    CHECK(l2_distance(p, q) == Approx(std::sqrt(0.5)));
    CHECK(derivative_norm(p, 1) == Approx(2.0));
    CHECK(derivative_norm(p, 2) == Approx(std::sqrt(8.0 / 3.0)));
    CHECK(derivative_norm(p, 0) == Approx(2.0));
    CHECK(bv_seminorm_derivative(p) == Approx(4.0));
    CHECK(bv_seminorm_derivative(w_profile()) == Approx(6.0));
}
