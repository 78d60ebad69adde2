#pragma once

// Exact backward induction over the finite-horizon state table. Used as an
// oracle for the Monte Carlo evaluators on small instances.

#include <cstdint>
#include <span>

#include "t20/engine.hpp"

namespace t20 {

struct ExactLimits {
    /// Upper bound on tabulated states per solve.
    std::uint64_t max_states = 50'000'000;
};

/// Exact win probability of a fixed batting order. The table is indexed by
/// (runs remaining, balls remaining, wickets lost, striker slot, partner
/// slot) and filled from b = 0 upwards. Returns 1 when r0 <= 0. Throws
/// CapacityError when the table would exceed `limits.max_states`.
double exact_batting_value(const BattingScenario& scenario, std::span<const int> order,
                           const ExactLimits& limits = {});

/// Exact defend probability of a fixed bowling plan over (runs to defend,
/// balls remaining, wickets taken). Returns 0 when d0 <= 0 and 1 when b0 = 0.
double exact_bowling_value(const BowlingScenario& scenario, const BowlingPlan& plan,
                           ProfileSource source = ProfileSource::Bowlers, const ExactLimits& limits = {});

}  // namespace t20
