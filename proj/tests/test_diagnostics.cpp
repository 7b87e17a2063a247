#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "schoenberg/copper.hpp"
#include "schoenberg/diagnostics.hpp"
#include "support.hpp"

using namespace schoenberg;
using doctest::Approx;

namespace {

const TieAggregation& copper() {
    static const TieAggregation agg = aggregate_ties(copper_configuration(), Weights::uniform(kCopper.size()));
    return agg;
}

std::size_t index_of_value(const TieAggregation& agg, double v) {
    for (std::size_t i = 0; i < agg.configuration.size(); ++i)
        if (std::abs(agg.configuration.coords(Eigen::Index(i), 0) - v) < 1e-12) return i;
    throw std::logic_error("value not found");
}

}  // namespace

TEST_CASE("entropy") {
    CHECK(entropy(Profile::vertex(5, 2)) == 0.0);
    for (std::size_t n : {1u, 2u, 7u, 40u}) CHECK(entropy(Profile::normalized(Vector::Ones(Eigen::Index(n)))) == Approx(std::log(double(n))));
    CHECK(entropy(Profile(Vector{{0.5, 0.5, 0.0, 0.0}})) == Approx(std::log(2.0)));
}

TEST_CASE("strain") {
    const auto& c = copper();
    CHECK(strain(inertia(c.distances, c.weights), c.distances, c.weights, Transform::identity()) == Approx(1.0).epsilon(1e-14));

    const auto t = Transform::power(0.01);
    const auto minima = multi_start(c.distances, c.weights, t);
    const auto& best = minima.front();
    REQUIRE(best.regime == Regime::concentrated);
    CHECK(*best.concentrated_at == index_of_value(c, 3.70));
    const double limit = limit_strain_concentrated(c.weights, *best.concentrated_at);
    CHECK(std::abs(*best.strain - limit) / limit < 0.02);
    for (const auto& r : minima) CHECK(*r.strain >= 1.0 - 1e-9);

    const DistanceMatrix one(Matrix::Zero(1, 1));
    CHECK_THROWS_AS(strain(0.0, one, Weights::uniform(1), t), std::domain_error);
}

TEST_CASE("limit strain closed form") {
    const auto& c = copper();
    CHECK(limit_strain_concentrated(c.weights, index_of_value(c, 3.70)) == Approx(60.0 / 33.0).epsilon(1e-14));
    CHECK(limit_strain_concentrated(c.weights, index_of_value(c, 5.28)) == Approx(23.0 / 11.0).epsilon(1e-14));
    CHECK(limit_strain_concentrated(Weights::uniform(2), 0) == Approx(2.0).epsilon(1e-15));
}

TEST_CASE("transformed distances") {
    const auto& c = copper();
    const auto t = Transform::logarithmic(0.3);
    const auto td = apply_transform(c.distances, t);
    for (std::size_t i = 0; i < td.size(); ++i)
        for (std::size_t j = 0; j < td.size(); ++j) CHECK(td(i, j) == phi(t, c.distances(i, j)));
    CHECK(transformed_inertia(c.distances, c.weights, t) == Approx(inertia(td, c.weights)).epsilon(1e-14));
}

TEST_CASE("grids") {
    CHECK(linear_grid(0.1, 0.5, 0.1).size() == 5);
    CHECK(linear_grid(0.95, 0.1, -0.05).size() == 18);
    CHECK_THROWS_AS(linear_grid(0.1, 0.5, -0.1), std::invalid_argument);
    const auto g = log_grid(1e-3, 1e4, 50);
    CHECK(g.size() == 50);
    CHECK(g.front() == 1e-3);
    CHECK(g.back() == 1e4);
    for (std::size_t k = 1; k < g.size(); ++k) CHECK(g[k] / g[k - 1] == Approx(g[1] / g[0]).epsilon(1e-12));
}

TEST_CASE("transform for a sweep parameter") {
    CHECK(transform_at(Family::power, SweepParameter::q, 0.3) == Transform::power(0.3));
    CHECK(transform_at(Family::exponential, SweepParameter::lambda, 4.0) == Transform::exponential_rate(4.0));
    CHECK(transform_at(Family::huber, SweepParameter::delta, 2.0) == Transform::huber(2.0));
    CHECK_THROWS_AS(transform_at(Family::power, SweepParameter::delta, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(transform_at(Family::tukey, SweepParameter::q, 0.5), std::invalid_argument);
}

TEST_CASE("power sweep shows the phase transition") {
    const auto& c = copper();
    const auto up = sweep(c.distances, c.weights, Family::power, SweepParameter::q, linear_grid(0.55, 0.9, 0.05), {},
                          &c.configuration);
    REQUIRE(up.size() == 8);
    for (const auto& r : up) {
        CHECK(r.error.empty());
        CHECK(r.regime == Regime::distributed);
        CHECK(r.entropy > 0.0);
        CHECK(r.projection.size() == 1);
    }
    const auto down = sweep(c.distances, c.weights, Family::power, SweepParameter::q, linear_grid(0.45, 0.1, -0.05));
    REQUIRE(down.size() == 8);
    for (const auto& r : down) {
        CHECK(r.regime == Regime::concentrated);
        CHECK(r.entropy == 0.0);
    }
}

TEST_CASE("exponential delta sweep moves from the mean to an observation") {
    const auto& c = copper();
    const auto grid = log_grid(1e6, 1e-3, 40);
    const auto path = sweep(c.distances, c.weights, Family::exponential, SweepParameter::delta, grid, {}, &c.configuration);
    REQUIRE(path.size() == grid.size());
    CHECK(path.front().projection(0) == Approx(4.2804).epsilon(1e-3));

    const Vector xs = c.configuration.coords.col(0);
    const std::vector<double> x(xs.data(), xs.data() + xs.size());
    for (const auto& r : path) {
        REQUIRE(r.error.empty());
        CHECK(r.converged);
        // the projection is a local minimum of the one-dimensional objective
        const double a = r.projection(0);
        const double h = 1e-4;
        const std::vector<double> probe{a - h, a, a + h};
        const auto g = grid_scan_1d(x, c.weights, transform_at(Family::exponential, SweepParameter::delta, r.param), probe);
        CHECK(g[1] <= g[0] + 1e-12);
        CHECK(g[1] <= g[2] + 1e-12);
    }
    double nearest = 1e300;
    for (double xi : x) nearest = std::min(nearest, std::abs(xi - path.back().projection(0)));
    CHECK(nearest < 1e-3);
}

TEST_CASE("warm and cold starts agree where the minimum is unique") {
    const auto& c = copper();
    const auto grid = log_grid(1e4, 1e2, 8);
    const auto path = sweep(c.distances, c.weights, Family::exponential, SweepParameter::delta, grid);
    for (std::size_t k = 0; k < grid.size(); ++k) {
        const auto cold = estimate(c.distances, c.weights, Transform::exponential(grid[k]));
        CHECK(std::abs(cold.gamma - path[k].gamma) <= 1e-10 * std::max(1.0, std::abs(cold.gamma)));
    }
}

TEST_CASE("sweep contract") {
    const auto& c = copper();
    CHECK_THROWS_AS(sweep(c.distances, c.weights, Family::power, SweepParameter::q, {}), std::invalid_argument);
    CHECK_THROWS_AS(sweep(c.distances, c.weights, Family::power, SweepParameter::q, {0.2, 0.4, 0.3}), std::invalid_argument);

    SweepOptions opts;
    opts.multi_start = true;
    const auto a = sweep(c.distances, c.weights, Family::exponential, SweepParameter::lambda, {0.1, 1000.0}, opts);
    CHECK(a[0].minima >= 1);
    CHECK(a[1].minima >= 14);
    const auto b = sweep(c.distances, c.weights, Family::exponential, SweepParameter::lambda, {0.1, 1000.0}, opts);
    for (std::size_t k = 0; k < a.size(); ++k) {
        CHECK(a[k].gamma == b[k].gamma);
        CHECK(a[k].alpha == b[k].alpha);
    }
}
