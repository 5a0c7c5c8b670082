#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "tvflow/tvflow.hpp"

using namespace tvflow;
using Catch::Approx;

namespace {

PiecewiseProfile parabola() { return PiecewiseProfile::single(-1.0, 1.0, Polynomial{0.0, 0.0, 1.0}); }

GridFunction random_grid(std::mt19937_64& rng, std::size_t n) {
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    GridFunction g{0.0, 0.05 + 0.5 * (unit(rng) + 1.0), std::vector<double>(n)};
    for (double& v : g.values) v = unit(rng);
    return g;
}

}  // namespace

TEST_CASE("grid sampling") {
    auto g = grid_sample(parabola(), 3);
    CHECK(g.values == std::vector<double>{1.0, 0.0, 1.0});
    g = grid_sample(parabola(), 2);
    CHECK(g.values == std::vector<double>{1.0, 1.0});
    const auto w = PiecewiseProfile::from_pieces({{-1.0, 0.0, Polynomial{0.25, 1.0, 1.0}}, {0.0, 1.0, Polynomial{0.25, -1.0, 1.0}}});
    g = grid_sample(w, 5);
    const std::vector<double> expect{0.25, 0.0, 0.25, 0.0, 0.25};
    for (std::size_t j = 0; j < 5; ++j) CHECK(g.values[j] == Approx(expect[j]).margin(1e-15));
    CHECK_THROWS_AS(grid_sample(parabola(), 1), Error);
}

TEST_CASE("grid norms") {
    CHECK(norms(GridFunction{0.0, 0.1, {2.0, 2.0, 2.0}}).tv == 0.0);
    CHECK(norms(GridFunction{0.0, 1.0, {0.0, 1.0, 0.0}}).tv == 2.0);
    CHECK(norms(grid_sample(parabola(), 1001)).l1 == Approx(2.0 / 3.0).margin(1e-5));
    CHECK(norms(grid_sample(parabola(), 1001)).sup == 1.0);
}

TEST_CASE("monotone data is a fixed point") {
    GridFunction g{0.0, 0.1, {0.0, 0.1, 0.5, 0.5, 0.9, 2.0}};
    CHECK(grid_sup_distance(discrete_tv_prox(g, 0.7), g) <= 1e-15);
    CHECK(grid_sup_distance(brute_force_tv_prox(g, 0.7), g) <= 1e-15);
}

TEST_CASE("small instance against brute force") {
    GridFunction g{-1.0, 1.0, {1.0, 0.0, 1.0}};
    const double h = 0.1;
    const auto a = discrete_tv_prox(g, h);
    const auto b = brute_force_tv_prox(g, h);
    CHECK(a.values[1] == Approx(2.0 * h / g.dx).epsilon(1e-14));
    CHECK(std::abs(a.values[1] - b.values[1]) <= 1e-12);
}

TEST_CASE("brute force agrees with the DP solver") {
    std::mt19937_64 rng(97);
    double worst = 0.0;
    for (int k = 0; k < 1000; ++k) {
        const std::size_t n = 3 + rng() % 6;
        const auto g = random_grid(rng, n);
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        const double h = 0.001 + 0.6 * unit(rng);
        worst = std::max(worst, grid_sup_distance(discrete_tv_prox(g, h), brute_force_tv_prox(g, h)));
    }
    CHECK(worst <= 1e-10);
}

TEST_CASE("large step interpolates the pins") {
    GridFunction same{0.0, 0.25, {1.0, 3.0, -2.0, 0.5, 1.0}};
    auto u = brute_force_tv_prox(same, 1e6);
    for (double v : u.values) CHECK(v == Approx(1.0));
    u = discrete_tv_prox(same, 1e6);
    for (double v : u.values) CHECK(v == Approx(1.0));
    GridFunction ramp{0.0, 0.25, {0.0, 3.0, -2.0, 0.5, 1.0}};
    u = discrete_tv_prox(ramp, 1e6);
    for (std::size_t j = 1; j + 1 < u.size(); ++j) CHECK(u.values[j] >= u.values[j - 1] - 1e-12);
    CHECK(u.values.front() == 0.0);
    CHECK(u.values.back() == 1.0);
}

TEST_CASE("discrete prox is an L2 contraction") {
    std::mt19937_64 rng(101);
    for (int k = 0; k < 200; ++k) {
        const std::size_t n = 3 + rng() % 60;
        auto a = random_grid(rng, n);
        auto b = random_grid(rng, n);
        b.dx = a.dx;
        b.values.front() = a.values.front();
        b.values.back() = a.values.back();
        const double h = 0.02 + 0.3 * std::abs(a.values[1]);
        CHECK(grid_l2_distance(discrete_tv_prox(a, h), discrete_tv_prox(b, h)) <= grid_l2_distance(a, b) + 1e-12);
    }
}

TEST_CASE("discrete semigroup") {
    std::mt19937_64 rng(103);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int k = 0; k < 200; ++k) {
        const auto v = random_grid(rng, 3 + rng() % 100);
        const double h1 = 0.3 * unit(rng);
        const double h2 = 0.3 * unit(rng) + 1e-3;
        const auto split = discrete_tv_prox(discrete_tv_prox(v, h1 + 1e-3), h2);
        const auto whole = discrete_tv_prox(v, h1 + 1e-3 + h2);
        CHECK(grid_sup_distance(split, whole) <= 1e-9);
    }
}

TEST_CASE("oracle matches the analytic resolvent on the parabola") {
    const std::size_t n = 4097;
    const auto v = grid_sample(parabola(), n);
    const auto u = discrete_tv_prox(v, 1.0 / 12.0);
    CHECK(u.values[n / 2] == Approx(0.25).margin(5 * v.dx));
    const auto exact = grid_sample(resolve(parabola(), 1.0 / 12.0).u, n);
    CHECK(grid_sup_distance(u, exact) <= 5 * v.dx);
}

TEST_CASE("oracle rejects tiny grids") {
    CHECK_THROWS_AS(discrete_tv_prox(GridFunction{0.0, 1.0, {0.0, 1.0}}, 1.0), Error);
    CHECK_THROWS_AS(brute_force_tv_prox(GridFunction{0.0, 1.0, std::vector<double>(9, 0.0)}, 1.0), Error);
}
