#pragma once

// Bowling-plan search: simulated annealing over the feasible plan set with
// Metropolis acceptance and linear cooling, followed by high-precision
// refinement of the best unique plans seen.

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "t20/engine.hpp"
#include "t20/rng.hpp"

namespace t20 {

struct SAConfig {
    double t0 = 0.05;
    double eps = 1e-6;
    std::uint64_t steps = 8'000;
    std::uint64_t n_fast = 5'000;
    std::uint64_t n_refine = 30'000;
    std::size_t top_k = 10;
    std::uint64_t seed = 0;
    SimOptions sim;

    /// Throws ValidationError.
    void validate() const;
};

struct PlanCandidate {
    BowlingPlan plan;
    EvalResult fast;
    std::optional<EvalResult> refined;
    bool is_initial = false;
};

struct BowlingSearchProgress {
    std::uint64_t step = 0;
    std::uint64_t total = 0;
    double best_v_hat = 0.0;  // best fast estimate so far
    std::size_t unique_plans = 0;
};

using BowlingProgressFn = std::function<void(const BowlingSearchProgress&)>;

struct BowlingSearchResult {
    /// Refined plans by refined value, ties resolved lexicographically on the
    /// bowler-id sequence.
    std::vector<PlanCandidate> ranked;
    BowlingPlan initial_plan;
    std::size_t unique_plans = 0;
    std::uint64_t fast_simulations = 0;
    std::uint64_t refine_simulations = 0;
    std::uint64_t accepted_moves = 0;
    std::uint64_t empty_draws = 0;
    std::uint64_t swap_moves = 0;
};

/// Bowlers that may replace plan[slot] (0-based): a different bowler with
/// quota to spare who differs from both neighbouring slots (the previous
/// over's bowler stands in for slot -1). May be empty.
std::vector<int> candidate_set(const BowlingPlan& plan, std::size_t slot, const BowlingScenario& scenario);

/// Replaces a uniformly drawn slot with a uniform draw from its candidate
/// set. Returns nullopt when that slot's candidate set is empty.
std::optional<BowlingPlan> single_slot_move(const BowlingPlan& plan, const BowlingScenario& scenario,
                                            Xoshiro256& rng);

/// Exchanges the bowlers of two slots, drawn uniformly among the exchanges
/// that keep the plan feasible. Returns nullopt when none does.
std::optional<BowlingPlan> swap_move(const BowlingPlan& plan, const BowlingScenario& scenario, Xoshiro256& rng);

/// T0 (1 - step / steps) + eps. Throws DomainError outside 0 <= step <= steps.
double sa_temperature(std::uint64_t step, const SAConfig& config);

/// Metropolis criterion: improvements always pass; otherwise accept iff
/// uniform_draw < exp(delta_v / temperature).
bool sa_accept(double delta_v, double temperature, double uniform_draw);

/// Greedy construction (cheapest phase economy with spare quota that keeps
/// adjacency), completed by backtracking when the greedy pass dead-ends.
/// Throws InfeasibleError naming the binding constraint.
BowlingPlan initial_plan(const BowlingScenario& scenario);

BowlingSearchResult optimize_bowling(const BowlingScenario& scenario, const SAConfig& config,
                                     const BowlingProgressFn& progress = {});

/// Evaluates a plan at n_refine on the refinement substream, giving the same
/// result the search reports for that plan.
EvalResult evaluate_refined_plan(const BowlingScenario& scenario, const BowlingPlan& plan, const SAConfig& config);

/// Re-evaluates a plan at n_refine on a substream no search pass uses.
EvalResult evaluate_actual_plan(const BowlingScenario& scenario, const BowlingPlan& plan, const SAConfig& config);

/// gap / (sqrt(2) * se). Throws DomainError unless se > 0.
double audit_z_score(double gap, double se);

struct PlanCounts {
    std::uint64_t quota_valid = 0;  // plans respecting quotas only
    std::uint64_t feasible = 0;     // plus no-consecutive and previous-over rules
};

/// Counts plans by dynamic programming over (slot, last bowler, usage).
PlanCounts count_plans(const BowlingScenario& scenario);

/// Bowler ids of a plan, in slot order.
std::vector<std::string> plan_ids(const BowlingPlan& plan, const BowlingScenario& scenario);

/// Parses bowler ids into a plan. Throws ValidationError on unknown ids.
BowlingPlan plan_from_ids(const std::vector<std::string>& ids, const BowlingScenario& scenario);

/// Stable 64-bit identity of a plan derived from its bowler ids.
std::uint64_t plan_key(const BowlingPlan& plan, const BowlingScenario& scenario);

}  // namespace t20
