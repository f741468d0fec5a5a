#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "treepark/analytics.hpp"
#include "treepark/rde.hpp"

using namespace treepark;

// closed-form references, subcritical regime
namespace {
double mean_closed(double a) { return (1 + a - std::sqrt(1 - 2 * a - a * a)) / 2; }
}  // namespace

TEST_CASE("subcritical fixed point reproduces the closed forms") {
    const double a = 0.3;
    const auto fp = rde_fixed_point(PoissonArrivals{a}, GeometricHalfOffspring{}, 300, 1e-13);
    REQUIRE(fp.converged);
    REQUIRE(fp.pmf.mass[0] == Catch::Approx(1.0 - a).margin(1e-8));
    REQUIRE(pmf_mean(fp.pmf).mean_lower == Catch::Approx(mean_closed(a)).margin(1e-5));

    // the pgf of the iterate sits on the closed-form branch
    for (double s : {0.1, 0.3, 0.5, 0.7, 0.9}) {
        const auto g = pmf_pgf_eval(fp.pmf, s);
        REQUIRE(std::fabs(g.value - gen_fn(s, a)) < 1e-6 + g.tail_bound);
    }
}

TEST_CASE("truncation error marches in from the cut one slot per step") {
    // the pushdown shift needs mu(K+1) to fill slot K, so each iteration
    // pollutes one more coordinate from the top; the polluted band shrinks
    // multiplicatively as it travels, so low coordinates stay exact
    const PoissonArrivals arr{0.35};
    const GeometricHalfOffspring off{};
    Pmf small = Pmf::point(40, 0);
    Pmf big = Pmf::point(120, 0);
    const int t = 30;
    for (int it = 0; it < t; ++it) {
        small = rde_step(small, arr, off);
        big = rde_step(big, arr, off);
    }
    for (std::size_t k = 0; k + std::size_t(t) < 40; ++k)
        REQUIRE(small.mass[k] == big.mass[k]);  // bitwise, ahead of the front
    for (std::size_t k = 0; k <= 39; ++k)
        REQUIRE(std::fabs(small.mass[k] - big.mass[k]) < 1e-12);
}

TEST_CASE("every iterate stays a probability vector") {
    Pmf mu = Pmf::point(100, 0);
    const PoissonArrivals arr{0.4};
    for (int it = 0; it < 50; ++it) {
        mu = rde_step(mu, arr, GeometricHalfOffspring{});
        REQUIRE_NOTHROW(mu.validate("iterate"));
        REQUIRE(mu.sum() + mu.tail == Catch::Approx(1.0).margin(1e-9));
    }
}

TEST_CASE("supercritical zero mass drifts to the implicit value") {
    // convergence is only ~1/t here, so expectations are budgeted accordingly
    const auto fp =
        rde_fixed_point(PoissonArrivals{0.5}, GeometricHalfOffspring{}, 400, 1e-8, 3000);
    REQUIRE(std::fabs(fp.pmf.mass[0] - 0.5084446504991087) < 2e-3);
    REQUIRE(fp.pmf.mass[0] > 0.5);
}

TEST_CASE("limit-tree root load built from the solved law") {
    const double a = 0.3;
    const auto fp = rde_fixed_point(PoissonArrivals{a}, GeometricHalfOffspring{}, 300, 1e-13);
    const Pmf y = y_pmf(fp.pmf, a);
    REQUIRE(y.mass[0] == Catch::Approx(0.6614308157122415).margin(1e-8));
    REQUIRE(y.sum() + y.tail == Catch::Approx(1.0).margin(1e-9));
    // E[Y] = 1 - sqrt(1 - 2a - a^2)
    REQUIRE(pmf_mean(y).mean_lower == Catch::Approx(0.4432235637169978).margin(1e-4));
}

TEST_CASE("unit poisson offspring family also reaches a fixed point") {
    const auto fp = rde_fixed_point(PoissonArrivals{0.3}, PoissonOneOffspring{}, 200, 1e-12);
    REQUIRE(fp.converged);
    REQUIRE(fp.pmf.mass[0] > 0.0);
    REQUIRE(pmf_mean(fp.pmf).mean_lower == Catch::Approx(0.3675444679663241).margin(1e-3));
}

TEST_CASE("explicit offspring laws are validated and usable") {
    REQUIRE_THROWS_AS(validate_offspring(ExplicitOffspring{{0.5, 0.25}}),
                      std::invalid_argument);
    const ExplicitOffspring crit{{0.25, 0.5, 0.25}};
    REQUIRE_NOTHROW(validate_offspring(crit));
    REQUIRE(offspring_mean(crit) == Catch::Approx(1.0));
    REQUIRE(offspring_variance(crit) == Catch::Approx(0.5));

    const auto fp = rde_fixed_point(PoissonArrivals{0.2}, crit, 150, 1e-12);
    REQUIRE(fp.converged);
    REQUIRE(fp.pmf.sum() + fp.pmf.tail == Catch::Approx(1.0).margin(1e-9));
}

TEST_CASE("arrival descriptors expose mean and factorial moment") {
    REQUIRE(arrival_mean(PoissonArrivals{0.3}) == Catch::Approx(0.3));
    REQUIRE(arrival_nu(PoissonArrivals{0.3}) == Catch::Approx(0.09));
    const ExplicitArrivals two{{0.85, 0.0, 0.15}};
    REQUIRE(arrival_mean(two) == Catch::Approx(0.3));
    REQUIRE(arrival_nu(two) == Catch::Approx(0.3));  // E[P(P-1)] = 2 * 0.15
}
