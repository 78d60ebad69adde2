#include "t20/exact.hpp"

#include <vector>

#include "t20/error.hpp"

namespace t20 {

namespace {

void check_budget(std::uint64_t states, const ExactLimits& limits) {
    if (states > limits.max_states)
        throw CapacityError("exact solve needs " + std::to_string(states) + " states, budget is " +
                            std::to_string(limits.max_states));
}

}  // namespace

double exact_batting_value(const BattingScenario& scenario, std::span<const int> order,
                           const ExactLimits& limits) {
    if (scenario.runs <= 0) return 1.0;
    if (scenario.balls <= 0) return 0.0;
    scenario.validate();
    check_order(scenario, order);

    const int r0 = scenario.runs;
    const int usable = scenario.usable_wickets();
    const int slots = static_cast<int>(scenario.pool.size()) + 1;  // lineup size
    const std::uint64_t layer = static_cast<std::uint64_t>(r0 + 1) * static_cast<std::uint64_t>(usable) *
                                static_cast<std::uint64_t>(slots) * static_cast<std::uint64_t>(slots);
    check_budget(layer * static_cast<std::uint64_t>(scenario.balls + 1), limits);

    std::vector<const PhaseProfiles*> lineup{&scenario.fixed_non_striker.profiles};
    for (int idx : order) lineup.push_back(&scenario.pool[static_cast<std::size_t>(idx)].profiles);

    // value[r][lost][striker][partner] for the current number of balls left;
    // runs <= 0 is a win and is handled inline.
    auto at = [&](int r, int lost, int s, int p) {
        return ((static_cast<std::size_t>(r) * static_cast<std::size_t>(usable) + static_cast<std::size_t>(lost)) *
                    static_cast<std::size_t>(slots) +
                static_cast<std::size_t>(s)) *
                   static_cast<std::size_t>(slots) +
               static_cast<std::size_t>(p);
    };
    std::vector<double> prev(static_cast<std::size_t>(layer), 0.0);  // b = 0: loss for r > 0
    std::vector<double> cur(prev.size(), 0.0);

    for (int b = 1; b <= scenario.balls; ++b) {
        const int bowled = kInningsBalls - b;
        const bool end_of_over = bowled % kBallsPerOver == kBallsPerOver - 1;
        const std::size_t phase = index_of(phase_of_over(bowled / kBallsPerOver));
        for (int r = 1; r <= r0; ++r) {
            for (int lost = 0; lost < usable; ++lost) {
                for (int s = 0; s < slots; ++s) {
                    const auto& p = (*lineup[static_cast<std::size_t>(s)])[phase].values();
                    for (int q = 0; q < slots; ++q) {
                        double v = 0.0;
                        // Wicket: next batsman in takes strike, ends change at the over's end.
                        if (lost + 1 < usable) {
                            int ns = 1 + (lost + 1);
                            int nq = q;
                            if (end_of_over) std::swap(ns, nq);
                            v += p[index_of(Outcome::Wicket)] * prev[at(r, lost + 1, ns, nq)];
                        }
                        for (std::size_t k = index_of(Outcome::Dot); k < kOutcomeCount; ++k) {
                            const int runs = kOutcomeRuns[k];
                            if (runs >= r) {
                                v += p[k];
                                continue;
                            }
                            const bool swap = ((runs & 1) == 1) != end_of_over;
                            v += p[k] * (swap ? prev[at(r - runs, lost, q, s)] : prev[at(r - runs, lost, s, q)]);
                        }
                        cur[at(r, lost, s, q)] = v;
                    }
                }
            }
        }
        std::swap(prev, cur);
    }
    const bool new_on_strike = scenario.initial_striker == InitialStriker::NewBatsman;
    return new_on_strike ? prev[at(r0, 0, 1, 0)] : prev[at(r0, 0, 0, 1)];
}

double exact_bowling_value(const BowlingScenario& scenario, const BowlingPlan& plan, ProfileSource source,
                           const ExactLimits& limits) {
    if (scenario.runs <= 0) return 0.0;
    if (scenario.balls <= 0) return 1.0;
    scenario.validate();
    if (auto violated = violated_constraint(plan, scenario))
        throw InfeasibleError(*violated, "bowling plan violates the " + *violated + " constraint");
    if (source == ProfileSource::BattingProxy && !scenario.batting_proxy)
        throw ValidationError("batting_proxy", "required for proxy evaluation");

    const int d0 = scenario.runs;
    const int w_max = scenario.w_max;
    const std::uint64_t layer = static_cast<std::uint64_t>(d0 + 1) * static_cast<std::uint64_t>(w_max);
    check_budget(layer * static_cast<std::uint64_t>(scenario.balls + 1), limits);

    auto at = [&](int d, int w) { return static_cast<std::size_t>(d) * static_cast<std::size_t>(w_max) + static_cast<std::size_t>(w); };
    std::vector<double> prev(static_cast<std::size_t>(layer), 1.0);  // b = 0: defended for d > 0
    std::vector<double> cur(prev.size(), 0.0);

    const int first_over = scenario.slots.front();
    for (int b = 1; b <= scenario.balls; ++b) {
        const int over = (kInningsBalls - b) / kBallsPerOver;
        const std::size_t phase = index_of(phase_of_over(over));
        const PhaseProfiles& profiles =
            source == ProfileSource::Bowlers
                ? scenario.bowlers[static_cast<std::size_t>(plan.bowlers[static_cast<std::size_t>(over - first_over)])]
                      .profiles
                : *scenario.batting_proxy;
        const auto& p = profiles[phase].values();
        for (int d = 1; d <= d0; ++d) {
            for (int w = 0; w < w_max; ++w) {
                double v = p[index_of(Outcome::Wicket)] * (w + 1 == w_max ? 1.0 : prev[at(d, w + 1)]);
                for (std::size_t k = index_of(Outcome::Dot); k < kOutcomeCount; ++k) {
                    const int runs = kOutcomeRuns[k];
                    if (runs < d) v += p[k] * prev[at(d - runs, w)];
                }
                cur[at(d, w)] = v;
            }
        }
        std::swap(prev, cur);
    }
    return prev[at(d0, 0)];
}

}  // namespace t20
