#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <numeric>

#include "support.hpp"
#include "t20/batting_opt.hpp"
#include "t20/error.hpp"
#include "t20/exact.hpp"
#include "t20/scenario.hpp"

using namespace t20;

TEST_CASE("orders are enumerated lexicographically") {
    const auto orders = enumerate_orders(3);
    REQUIRE(orders.size() == 6);
    CHECK(orders.front() == BattingOrder{0, 1, 2});
    CHECK(orders[1] == BattingOrder{0, 2, 1});
    CHECK(orders.back() == BattingOrder{2, 1, 0});
    CHECK(std::is_sorted(orders.begin(), orders.end()));
    CHECK(enumerate_orders(8).size() == 40320);
    CHECK_THROWS_AS(enumerate_orders(9), CapacityError);
    CHECK_THROWS_AS(enumerate_orders(0), DomainError);
}

TEST_CASE("permutation rank inverts the enumeration") {
    const auto orders = enumerate_orders(5);
    for (std::size_t i = 0; i < orders.size(); ++i) CHECK(permutation_rank(orders[i]) == i);
}

TEST_CASE("delta runs") {
    CHECK(std::abs(delta_runs(5.0, 203.9, 185.5) - 0.92) < 1e-12);
    CHECK(delta_runs(0.0, 150.0, 120.0) == 0.0);
    CHECK(delta_runs(6.0, 100.0, 150.0) == doctest::Approx(-3.0));
    CHECK_THROWS_AS(delta_runs(-1.0, 150.0, 120.0), DomainError);
}

TEST_CASE("config validation") {
    BattingSearchConfig c;
    CHECK_NOTHROW(c.validate());
    c.n2 = c.n1 - 1;
    CHECK_THROWS_AS(c.validate(), ValidationError);
    c = {};
    c.k = 0;
    CHECK_THROWS_AS(c.validate(), ValidationError);
}

TEST_CASE("search accounting and ranking structure") {
    std::mt19937_64 rng(3);
    auto s = testing::random_batting(rng);
    s.pool.clear();
    for (int i = 0; i < 4; ++i) s.pool.push_back({"p" + std::to_string(i), testing::random_phases(rng)});
    BattingSearchConfig c;
    c.n1 = 500;
    c.n2 = 2000;
    c.k = 5;
    c.seed = 9;
    std::size_t calls = 0, last = 0;
    const auto r = optimize_batting(s, c, [&](const BattingSearchProgress& p) {
        ++calls;
        CHECK(p.evaluated >= last);
        last = p.evaluated;
        CHECK(p.total == 24 + 5);
    });
    CHECK(calls > 0);
    CHECK(r.total_simulations == 24 * 500 + 5 * 2000);
    REQUIRE(r.ranked.size() == 24);
    for (std::size_t i = 0; i < 24; ++i) CHECK(r.ranked[i].pass2.has_value() == (i < 5));
    for (std::size_t i = 1; i < 5; ++i) CHECK(r.ranked[i - 1].pass2->v_hat >= r.ranked[i].pass2->v_hat);
    for (std::size_t i = 6; i < 24; ++i) CHECK(r.ranked[i - 1].pass1.v_hat >= r.ranked[i].pass1.v_hat);
    for (const auto& cand : r.ranked) CHECK(permutation_rank(cand.order) == cand.permutation_index);

    // Same seed, same result; thread count does not matter.
    c.sim.threads = 3;
    const auto again = optimize_batting(s, c);
    for (std::size_t i = 0; i < 24; ++i) {
        CHECK(again.ranked[i].order == r.ranked[i].order);
        CHECK(again.ranked[i].pass1.successes == r.ranked[i].pass1.successes);
    }
}

TEST_CASE("actual order is re-evaluated on its own stream") {
    std::mt19937_64 rng(4);
    const auto s = testing::random_batting(rng);
    BattingSearchConfig c;
    c.seed = 5;
    std::vector<int> order(s.pool.size());
    std::iota(order.begin(), order.end(), 0);
    const auto a = evaluate_actual_order(s, order, c);
    CHECK(a.n_sims == c.n2);
    CHECK(evaluate_actual_order(s, order, c).successes == a.successes);
}

TEST_CASE("screening keeps the exact optimum in the refined set") {
    const auto sc = load_scenario_file(testing::fixture("scenarios/kkr_mi_over12.json"));
    const auto& s = sc.bat();
    const auto orders = enumerate_orders(s.pool.size());
    std::vector<double> exact;
    for (const auto& o : orders) exact.push_back(exact_batting_value(s, o));
    const auto best = orders[static_cast<std::size_t>(std::max_element(exact.begin(), exact.end()) - exact.begin())];

    BattingSearchConfig c;
    c.n1 = 3000;
    c.n2 = 3000;
    c.k = 10;
    int hits = 0;
    for (std::uint64_t seed = 1; seed <= 100; ++seed) {
        c.seed = seed;
        const auto r = optimize_batting(s, c);
        for (std::size_t i = 0; i < c.k; ++i) hits += r.ranked[i].order == best ? 1 : 0;
    }
    CHECK(hits >= 99);
}
