#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <sstream>

#include "support.hpp"
#include "t20/error.hpp"
#include "t20/profile_store.hpp"
#include "t20/profiles.hpp"

using namespace t20;

TEST_CASE("laplace smoothing") {
    const auto u = laplace_smooth(OutcomeCounts{});
    for (double p : u.values()) CHECK(p == doctest::Approx(1.0 / 7.0).epsilon(1e-15));
    const auto v = laplace_smooth(OutcomeCounts{1, 10, 5, 0, 0, 3, 1});  // n = 20
    CHECK(v[Outcome::Wicket] == doctest::Approx(2.0 / 27.0));
    CHECK(v[Outcome::Dot] == doctest::Approx(11.0 / 27.0));
    CHECK(v[Outcome::Three] == doctest::Approx(1.0 / 27.0));
}

TEST_CASE("outcome vector validation") {
    CHECK_THROWS_AS(OutcomeVector::from_probabilities({0.5, 0.5, 0.1, 0, 0, 0, 0}), DomainError);
    CHECK_THROWS_AS(OutcomeVector::from_probabilities({-0.1, 0.6, 0.5, 0, 0, 0, 0}), DomainError);
    CHECK(OutcomeVector::point_mass(Outcome::Six).expected_runs() == 6.0);
    CHECK(OutcomeVector().expected_runs() == doctest::Approx(16.0 / 7.0));
}

TEST_CASE("blend weight and blend") {
    CHECK(blend_weight(0) == 0.0);
    CHECK(blend_weight(50) == 0.5);
    CHECK(blend_weight(150) == 0.75);
    CHECK(blend_weight(10, 10.0) == 0.5);
    const auto a = OutcomeVector::point_mass(Outcome::Four);
    const auto b = OutcomeVector::point_mass(Outcome::Dot);
    CHECK(blend(a, b, 1.0) == a);
    CHECK(blend(a, b, 0.0) == b);
    CHECK(blend(a, b, 0.25)[Outcome::Four] == doctest::Approx(0.25));
    CHECK_THROWS_AS(blend(a, b, 1.5), DomainError);
    CHECK_THROWS_AS(blend(a, b, -0.1), DomainError);
}

TEST_CASE("population average pools smoothed counts by phase") {
    CountTable t(Role::Batsman);
    t.add("A", Phase::Middle, Outcome::Four, 3);
    t.add("B", Phase::Middle, Outcome::Dot, 3);
    const auto pop = population_average(t, Phase::Middle);
    // Smoothed counts: A has 4 in Four, 1 elsewhere; B has 4 in Dot, 1 elsewhere.
    CHECK(pop[Outcome::Four] == doctest::Approx(5.0 / 20.0));
    CHECK(pop[Outcome::Dot] == doctest::Approx(5.0 / 20.0));
    CHECK(pop[Outcome::Six] == doctest::Approx(2.0 / 20.0));
    CHECK_THROWS_AS(population_average(t, Phase::Death), DomainError);
}

TEST_CASE("derived stats") {
    const auto v = OutcomeVector::from_probabilities({0.05, 0.35, 0.35, 0.08, 0.01, 0.1, 0.06});
    const auto s = derive_stats(v);
    CHECK(s.sr == doctest::Approx(100.0 * (0.35 + 0.16 + 0.03 + 0.4 + 0.36)));
    CHECK(s.er == 0.06 * s.sr);
    CHECK(s.p_w == doctest::Approx(0.05));
    CHECK(s.p_dot == doctest::Approx(0.35));
}

TEST_CASE("fit_profile_from_summary") {
    const auto shape = OutcomeVector::from_probabilities({0.05, 0.33, 0.40, 0.07, 0.005, 0.095, 0.05});

    SUBCASE("own targets return the shape") {
        const auto s = derive_stats(shape);
        const auto v = fit_profile_from_summary(s.sr, s.p_w, shape);
        for (std::size_t k = 0; k < kOutcomeCount; ++k) CHECK(v.values()[k] == doctest::Approx(shape.values()[k]).epsilon(1e-12));
    }
    SUBCASE("bowler economy row reproduces its ER") {
        const auto v = fit_profile_from_summary(sr_from_er(8.40), 0.075, shape);
        CHECK(std::abs(derive_stats(v).er - 8.40) < 1e-9);
        CHECK(std::abs(derive_stats(v).sr - 140.0) < 1e-9);
        CHECK(v[Outcome::Wicket] == 0.075);
    }
    SUBCASE("scoring ratios are preserved") {
        const auto v = fit_profile_from_summary(180.0, 0.07, shape);
        CHECK(v[Outcome::Four] / v[Outcome::One] == doctest::Approx(shape[Outcome::Four] / shape[Outcome::One]));
        CHECK(v[Outcome::Six] / v[Outcome::Two] == doctest::Approx(shape[Outcome::Six] / shape[Outcome::Two]));
    }
    SUBCASE("violated bounds are named") {
        auto bound_of = [&](double sr, double pw) {
            try {
                (void)fit_profile_from_summary(sr, pw, shape);
            } catch (const FitError& e) {
                return e.bound();
            }
            return std::string("none");
        };
        CHECK(bound_of(140.0, 1.0) == "p_w");
        CHECK(bound_of(140.0, -0.1) == "p_w");
        CHECK(bound_of(-5.0, 0.05) == "scoring_mass");
        CHECK(bound_of(600.0, 0.05) == "dot_mass");
        CHECK(bound_of(140.0, 0.05) == "none");
    }
}

TEST_CASE("build_profiles shrinks sparse players toward the population") {
    CountTable t(Role::Bowler);
    t.add("busy", Phase::Death, Outcome::Dot, 150);
    t.add("rare", Phase::Death, Outcome::Six, 2);
    t.add("rare", Phase::Middle, Outcome::Dot, 10);
    const auto set = build_profiles(t);
    const auto* busy = set.find("busy", Phase::Death);
    REQUIRE(busy);
    CHECK(busy->lambda == doctest::Approx(0.75));
    const auto* absent = set.find("busy", Phase::Middle);
    REQUIRE(absent);
    CHECK(absent->lambda == 0.0);
    CHECK(absent->vector == *set.population(Phase::Middle));
    CHECK_FALSE(set.population(Phase::Powerplay));
    CHECK(set.find("busy", Phase::Powerplay) == nullptr);
}

TEST_CASE("sha256") {
    CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    CHECK(sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
}

TEST_CASE("profile store round trip") {
    const auto build = build_store_from_corpus(testing::fixture("corpus/deliveries.csv"), {"m-holdout"});
    CHECK(build.store.excluded_matches == std::vector<std::string>{"m-holdout"});
    CHECK(build.store.corpus_hash.size() == 64);
    const auto dir = std::filesystem::temp_directory_path() / "t20_store_roundtrip";
    std::filesystem::remove_all(dir);
    save_store(dir, build.store);
    const auto loaded = load_store(dir);
    CHECK(loaded.corpus_hash == build.store.corpus_hash);
    for (Role role : {Role::Batsman, Role::Bowler}) {
        const auto& a = build.store.for_role(role);
        const auto& b = loaded.for_role(role);
        REQUIRE(a.profiles().size() == b.profiles().size());
        for (const auto& [key, prof] : a.profiles()) {
            const auto* other = b.find(key.player, key.phase);
            REQUIRE(other);
            CHECK(other->n == prof.n);
            for (std::size_t k = 0; k < kOutcomeCount; ++k)
                CHECK(std::abs(other->vector.values()[k] - prof.vector.values()[k]) < 1e-11);
        }
        for (Phase p : kPhases) CHECK(a.population(p).has_value() == b.population(p).has_value());
    }
    std::filesystem::remove_all(dir);
    CHECK_THROWS_AS(load_store(dir), SchemaError);
}

TEST_CASE("exclusion changes the corpus statistics but not the hash input") {
    const auto with = build_store_from_corpus(testing::fixture("corpus/deliveries.csv"), {});
    const auto without = build_store_from_corpus(testing::fixture("corpus/deliveries.csv"), {"m-holdout"});
    CHECK(with.legal_deliveries > without.legal_deliveries);
    CHECK(with.store.corpus_hash == without.store.corpus_hash);
}

TEST_CASE("profile table rejects malformed rows") {
    std::istringstream bad("player,phase,n,lambda,pW,p0,p1,p2,p3,p4,p6\nA,XX,1,0.5,0.1,0.1,0.1,0.1,0.1,0.1,0.4\n");
    CHECK_THROWS_AS(read_profile_table(bad, Role::Batsman, 50.0), SchemaError);
    std::istringstream sum("player,phase,n,lambda,pW,p0,p1,p2,p3,p4,p6\nA,MI,1,0.5,0.5,0.5,0.5,0,0,0,0\n");
    CHECK_THROWS_AS(read_profile_table(sum, Role::Batsman, 50.0), SchemaError);
}
