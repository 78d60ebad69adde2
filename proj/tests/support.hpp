#pragma once

// Test-only helpers: random scenario generators and independent reference
// evaluators. The reference evaluators are deliberately written top-down
// with memoized recursion so they share no code with the library's layered
// backward induction.

#include <algorithm>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "t20/bowling_opt.hpp"
#include "t20/engine.hpp"
#include "t20/profiles.hpp"

#ifndef T20_FIXTURE_DIR
#define T20_FIXTURE_DIR "fixtures"
#endif

namespace t20::testing {

inline std::string fixture(const std::string& rel) { return std::string(T20_FIXTURE_DIR) + "/" + rel; }

/// Random distribution with every outcome at least `floor`.
inline OutcomeVector random_vector(std::mt19937_64& rng, double floor = 0.01) {
    std::exponential_distribution<double> e(1.0);
    OutcomeVector::Array p{};
    double sum = 0.0;
    for (auto& x : p) sum += (x = e(rng));
    const double free = 1.0 - floor * static_cast<double>(kOutcomeCount);
    for (auto& x : p) x = floor + free * x / sum;
    double total = 0.0;
    for (double x : p) total += x;
    for (auto& x : p) x /= total;
    return OutcomeVector::from_probabilities(p);
}

/// Scoring-heavy distribution so chases of a few runs stay undecided.
inline OutcomeVector random_batting_vector(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    OutcomeVector::Array p{0.03 + 0.12 * u(rng), 0.2 + 0.3 * u(rng), 0.2 + 0.3 * u(rng), 0.05 + 0.1 * u(rng),
                           0.01 * u(rng),        0.05 + 0.15 * u(rng), 0.02 + 0.1 * u(rng)};
    double total = 0.0;
    for (double x : p) total += x;
    for (auto& x : p) x /= total;
    return OutcomeVector::from_probabilities(p);
}

inline PhaseProfiles random_phases(std::mt19937_64& rng) {
    return {random_batting_vector(rng), random_batting_vector(rng), random_batting_vector(rng)};
}

/// Small batting instance: <= 12 balls, <= 3 pool batsmen.
inline BattingScenario random_batting(std::mt19937_64& rng) {
    std::uniform_int_distribution<int> balls(1, 12), pool(1, 3), wk(1, 3), striker(0, 1);
    BattingScenario s;
    s.balls = balls(rng);
    std::uniform_int_distribution<int> runs(1, 2 * s.balls + 2);
    s.runs = runs(rng);
    s.wickets = wk(rng);
    s.fixed_non_striker = {"ns", random_phases(rng)};
    const int n = pool(rng);
    for (int i = 0; i < n; ++i) s.pool.push_back({"p" + std::to_string(i), random_phases(rng)});
    s.initial_striker = striker(rng) ? InitialStriker::FixedNonStriker : InitialStriker::NewBatsman;
    return s;
}

/// Small bowling instance: <= 12 balls (two overs) and <= 3 bowlers, with a
/// random feasible plan.
inline std::pair<BowlingScenario, BowlingPlan> random_bowling(std::mt19937_64& rng) {
    std::uniform_int_distribution<int> balls(1, 12), bowlers(2, 3), wmax(1, 4);
    BowlingScenario s;
    s.balls = balls(rng);
    std::uniform_int_distribution<int> runs(1, 2 * s.balls + 2);
    s.runs = runs(rng);
    s.w_max = wmax(rng);
    for (int o = (kInningsBalls - s.balls) / kBallsPerOver; o < kOversPerInnings; ++o) s.slots.push_back(o);
    const int nb = bowlers(rng);
    for (int i = 0; i < nb; ++i) s.bowlers.push_back({"b" + std::to_string(i), 2, random_phases(rng)});
    BowlingPlan plan;
    for (std::size_t k = 0; k < s.slots.size(); ++k) plan.bowlers.push_back(static_cast<int>(k % 2));
    std::shuffle(s.bowlers.begin(), s.bowlers.end(), rng);
    return {s, plan};
}

/// Reference batting value by memoized recursion over
/// (runs needed, balls left, wickets lost, striker slot, partner slot).
/// Slot 0 is the fixed non-striker, slot 1 + i is order[i].
inline double reference_batting_value(const BattingScenario& s, const std::vector<int>& order) {
    const int usable = std::min<int>(s.wickets, static_cast<int>(s.pool.size()));
    auto profile = [&](int slot, int over) -> const OutcomeVector& {
        const Batsman& b = slot == 0 ? s.fixed_non_striker : s.pool[static_cast<std::size_t>(order[static_cast<std::size_t>(slot - 1)])];
        const int ph = over < 6 ? 0 : (over < 15 ? 1 : 2);
        return b.profiles[static_cast<std::size_t>(ph)];
    };
    std::map<std::tuple<int, int, int, int, int>, double> memo;
    std::function<double(int, int, int, int, int)> value = [&](int r, int b, int lost, int st, int pt) -> double {
        if (r <= 0) return 1.0;
        if (b == 0 || lost >= usable) return 0.0;
        const auto key = std::make_tuple(r, b, lost, st, pt);
        if (auto it = memo.find(key); it != memo.end()) return it->second;
        const int bowled = kInningsBalls - b;
        const int over = bowled / 6;
        const bool last_of_over = bowled % 6 == 5;
        const OutcomeVector& v = profile(st, over);
        double total = v[Outcome::Wicket] *
                       (lost + 1 >= usable ? 0.0
                                           : (last_of_over ? value(r, b - 1, lost + 1, pt, 2 + lost)
                                                           : value(r, b - 1, lost + 1, 2 + lost, pt)));
        for (Outcome o : {Outcome::Dot, Outcome::One, Outcome::Two, Outcome::Three, Outcome::Four, Outcome::Six}) {
            const int runs = runs_of(o);
            const bool swap = (runs % 2 == 1) != last_of_over;
            total += v[o] * (swap ? value(r - runs, b - 1, lost, pt, st) : value(r - runs, b - 1, lost, st, pt));
        }
        memo.emplace(key, total);
        return total;
    };
    const bool new_on_strike = s.initial_striker == InitialStriker::NewBatsman;
    return value(s.runs, s.balls, 0, new_on_strike ? 1 : 0, new_on_strike ? 0 : 1);
}

/// Reference defend probability by memoized recursion over
/// (runs to defend, balls left, wickets taken).
inline double reference_bowling_value(const BowlingScenario& s, const BowlingPlan& plan, bool use_proxy = false) {
    std::map<std::tuple<int, int, int>, double> memo;
    std::function<double(int, int, int)> value = [&](int d, int b, int w) -> double {
        if (d <= 0) return 0.0;
        if (b == 0 || w >= s.w_max) return 1.0;
        const auto key = std::make_tuple(d, b, w);
        if (auto it = memo.find(key); it != memo.end()) return it->second;
        const int over = (kInningsBalls - b) / 6;
        std::size_t slot = 0;
        while (s.slots[slot] != over) ++slot;
        const int ph = over < 6 ? 0 : (over < 15 ? 1 : 2);
        const OutcomeVector& v =
            use_proxy ? (*s.batting_proxy)[static_cast<std::size_t>(ph)]
                      : s.bowlers[static_cast<std::size_t>(plan.bowlers[slot])].profiles[static_cast<std::size_t>(ph)];
        double total = v[Outcome::Wicket] * value(d, b - 1, w + 1);
        for (Outcome o : {Outcome::Dot, Outcome::One, Outcome::Two, Outcome::Three, Outcome::Four, Outcome::Six})
            total += v[o] * value(d - runs_of(o), b - 1, w);
        memo.emplace(key, total);
        return total;
    };
    return value(s.runs, s.balls, 0);
}

/// Feasibility written from the rules alone.
inline bool reference_feasible(const std::vector<int>& plan, const BowlingScenario& s) {
    if (plan.size() != s.slots.size()) return false;
    std::vector<int> used(s.bowlers.size(), 0);
    for (std::size_t k = 0; k < plan.size(); ++k) {
        const int j = plan[k];
        if (j < 0 || j >= static_cast<int>(s.bowlers.size())) return false;
        if (++used[static_cast<std::size_t>(j)] > s.bowlers[static_cast<std::size_t>(j)].quota) return false;
        if (k > 0 && plan[k - 1] == j) return false;
        if (k == 0 && s.prev_bowler && s.bowlers[static_cast<std::size_t>(j)].id == *s.prev_bowler) return false;
    }
    return true;
}

/// Every bowler sequence of the scenario's length, feasible or not.
inline std::vector<std::vector<int>> all_sequences(const BowlingScenario& s) {
    std::vector<std::vector<int>> out;
    std::vector<int> cur(s.slots.size(), 0);
    const int m = static_cast<int>(s.bowlers.size());
    for (;;) {
        out.push_back(cur);
        std::size_t i = 0;
        while (i < cur.size() && ++cur[i] == m) cur[i++] = 0;
        if (i == cur.size()) break;
    }
    return out;
}

}  // namespace t20::testing
