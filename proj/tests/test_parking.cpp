#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <numeric>
#include <vector>

#include "treepark/alpha.hpp"
#include "treepark/parking.hpp"
#include "treepark/sample_trees.hpp"

using namespace treepark;

TEST_CASE("hand-checked flows on tiny trees") {
    const PlaneTree single = PlaneTree::from_code({0});
    auto r = park_flow(single, arrivals_from_counts({2}));
    REQUIRE(r.visits == std::vector<std::uint64_t>{2});
    REQUIRE(r.root_visits == 2);
    REQUIRE(r.overflow == 1);
    REQUIRE_FALSE(r.all_parked);

    const PlaneTree path3 = PlaneTree::from_code({1, 1, 0});
    r = park_flow(path3, arrivals_from_counts({0, 0, 3}));
    REQUIRE(r.visits == std::vector<std::uint64_t>({1, 2, 3}));
    REQUIRE(r.overflow == 0);
    REQUIRE(r.all_parked);

    r = park_flow(path3, arrivals_from_counts({0, 0, 4}));
    REQUIRE(r.visits == std::vector<std::uint64_t>({2, 3, 4}));
    REQUIRE(r.overflow == 1);

    // cherry: both leaves push their excess into the root
    const PlaneTree cherry = PlaneTree::from_code({2, 0, 0});
    r = park_flow(cherry, arrivals_from_counts({0, 2, 2}));
    REQUIRE(r.root_visits == 2);
    REQUIRE(r.overflow == 1);

    REQUIRE_THROWS_AS(park_flow(cherry, arrivals_from_counts({1, 2})),
                      std::invalid_argument);
}

TEST_CASE("driving cars one by one matches the flow recursion") {
    Rng rng(2024);
    for (int rep = 0; rep < 300; ++rep) {
        const std::uint32_t n = 1 + std::uint32_t(rng.next_below(40));
        const PlaneTree t = sample_uniform_plane_tree(rng, n);
        const std::uint64_t m = rng.next_below(2 * n + 1);
        std::vector<std::uint32_t> dests(m);
        std::vector<std::uint32_t> counts(n, 0);
        for (auto& d : dests) {
            d = std::uint32_t(rng.next_below(n));
            counts[d]++;
        }
        const auto flow = park_flow(t, arrivals_from_counts(counts));
        const auto seq = park_sequential(t, dests);
        REQUIRE(seq.parked + seq.failed == m);
        REQUIRE(flow.overflow == seq.failed);
        // one car per occupied vertex, and v is occupied iff someone visits it
        std::uint64_t occupied = 0;
        for (auto x : flow.visits) occupied += (x > 0);
        REQUIRE(occupied == seq.parked);
    }
}

TEST_CASE("the outcome ignores the arrival order") {
    Rng rng(555);
    const PlaneTree t = sample_uniform_plane_tree(rng, 12);
    std::vector<std::uint32_t> dests;
    for (int i = 0; i < 9; ++i) dests.push_back(std::uint32_t(rng.next_below(12)));
    const auto base = park_sequential(t, dests);
    for (int rep = 0; rep < 20; ++rep) {
        for (std::size_t i = dests.size(); i > 1; --i)
            std::swap(dests[i - 1], dests[rng.next_below(i)]);
        const auto r = park_sequential(t, dests);
        REQUIRE(r.failed == base.failed);
        REQUIRE(r.parked == base.parked);
    }
}

TEST_CASE("two cars on the two-vertex tree: exactly 3 of 4 placements fit") {
    const PlaneTree t = PlaneTree::from_code({1, 0});
    int good = 0;
    for (std::uint32_t a = 0; a < 2; ++a)
        for (std::uint32_t b = 0; b < 2; ++b)
            good += (park_sequential(t, {a, b}).failed == 0);
    REQUIRE(good == 3);
}

TEST_CASE("finite-tree estimator is reproducible and thread-count blind") {
    const Alpha a = parse_alpha("0.3");
    const auto one = estimate_finite_parking_prob(100, a, 2000, 42, 1);
    const auto again = estimate_finite_parking_prob(100, a, 2000, 42, 1);
    const auto three = estimate_finite_parking_prob(100, a, 2000, 42, 3);
    REQUIRE(one.cars == 30);
    REQUIRE(one.trials == 2000);
    REQUIRE(one.successes == again.successes);
    REQUIRE(one.successes == three.successes);
    REQUIRE(one.estimate == three.estimate);

    const auto other = estimate_finite_parking_prob(100, a, 2000, 43, 1);
    REQUIRE(one.successes != other.successes);  // seed actually matters
}

TEST_CASE("finite estimates straddle the transition") {
    const auto low = estimate_finite_parking_prob(3000, parse_alpha("0.2"), 3000, 7, 1);
    REQUIRE(std::fabs(low.estimate - 0.9573156156353821) < 3 * low.std_error + 0.02);

    const auto high = estimate_finite_parking_prob(3000, parse_alpha("0.5"), 1500, 7, 1);
    REQUIRE(high.estimate < 0.05);
}

TEST_CASE("poisson arrival sampling hits the density") {
    Rng rng(31337);
    PoissonSampler po(0.7);
    const auto a = sample_arrivals_poisson(rng, 20000, po);
    REQUIRE(a.counts.size() == 20000);
    REQUIRE(a.total == std::accumulate(a.counts.begin(), a.counts.end(), std::uint64_t(0)));
    // total ~ Poisson(14000), sd ~ 118
    REQUIRE(std::fabs(double(a.total) - 14000.0) < 600.0);

    const auto f = sample_arrivals_fixed(rng, 50, 30);
    REQUIRE(f.total == 30);
}

TEST_CASE("estimator input validation") {
    REQUIRE_THROWS_AS(estimate_finite_parking_prob(0, parse_alpha("0.3"), 10, 1, 1),
                      std::invalid_argument);
}
