#pragma once

// Match state, per-ball transitions and the Monte Carlo evaluators for fixed
// batting orders and bowling plans.

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "t20/profiles.hpp"
#include "t20/types.hpp"

namespace t20 {

/// (runs remaining, legal balls remaining, wickets). In the batting view
/// `wickets` counts wickets in hand; in the bowling view it counts wickets
/// taken since the intervention point.
struct MatchState {
    int runs = 0;
    int balls = 0;
    int wickets = 0;

    /// Position of the next ball within its over, 0-5.
    int over_ball() const noexcept { return (kInningsBalls - balls) % kBallsPerOver; }
    /// 0-indexed over of the next ball.
    int absolute_over() const noexcept { return (kInningsBalls - balls) / kBallsPerOver; }
    Phase phase() const { return phase_of_over(absolute_over()); }

    friend bool operator==(const MatchState&, const MatchState&) = default;
};

enum class Perspective : std::uint8_t { Batting, Bowling };

/// Terminal when the target is reached, the balls run out, or the wicket
/// resource is spent (batting: none in hand; bowling: `wicket_limit` taken).
bool is_terminal(const MatchState& s, Perspective view, int wicket_limit = kMaxWickets) noexcept;

/// Advances one legal ball. Throws ContractViolation on a terminal state.
MatchState transition(const MatchState& s, Outcome o, Perspective view, int wicket_limit = kMaxWickets);

/// Swaps the pair iff the runs are odd XOR the ball ends the over (the
/// batsmen cross, then ends change). Throws DomainError unless over_ball is
/// in 0-5.
template <typename T>
std::pair<T, T> rotate_strike(T striker, T non_striker, Outcome o, int over_ball);

bool strike_changes(Outcome o, int over_ball);

/// One outcome vector per phase, indexed by Phase.
using PhaseProfiles = std::array<OutcomeVector, kPhaseCount>;

/// Same vector in every phase.
PhaseProfiles uniform_phases(const OutcomeVector& v);

struct Batsman {
    std::string id;
    PhaseProfiles profiles;
};

enum class InitialStriker : std::uint8_t { NewBatsman, FixedNonStriker };

/// Batting decision at a wicket fall. The lineup is the fixed crease survivor
/// plus the pool in the evaluated order; the innings ends when the wicket
/// allowance is spent or the pool is exhausted, whichever comes first.
struct BattingScenario {
    int runs = 0;     // r0
    int balls = 0;    // b0
    int wickets = 0;  // w0 as reported by the match state
    std::vector<Batsman> pool;
    Batsman fixed_non_striker;
    InitialStriker initial_striker = InitialStriker::NewBatsman;

    /// Wickets the innings can actually lose: min(w0, |pool|).
    int usable_wickets() const noexcept;
    MatchState initial_state() const noexcept { return {runs, balls, usable_wickets()}; }
    /// Throws ValidationError.
    void validate() const;
};

struct Bowler {
    std::string id;
    int quota = 0;  // 4 - overs already bowled
    PhaseProfiles profiles;
};

/// Bowling decision: assign one bowler to every remaining over slot.
struct BowlingScenario {
    int runs = 0;   // d0, runs to defend
    int balls = 0;  // b0
    int w_max = 0;  // batting wickets in hand at the intervention
    std::vector<int> slots;  // 0-indexed overs covering the remaining balls
    std::vector<Bowler> bowlers;
    std::optional<std::string> prev_bowler;
    /// Opposition distribution used only for duality checks and sensitivity
    /// runs; the default evaluation is batsman-agnostic.
    std::optional<PhaseProfiles> batting_proxy;

    /// Index of the bowler with this id, or -1.
    int bowler_index(const std::string& id) const noexcept;
    int prev_bowler_index() const noexcept;
    int total_quota() const noexcept;
    MatchState initial_state() const noexcept { return {runs, balls, 0}; }
    /// Throws ValidationError (structure) or InfeasibleError (sum of quotas
    /// below the slot count).
    void validate() const;
};

/// One bowler index (into BowlingScenario::bowlers) per slot.
struct BowlingPlan {
    std::vector<int> bowlers;
    friend auto operator<=>(const BowlingPlan&, const BowlingPlan&) = default;
};

/// Permutation of pool indices; order[0] is the next batsman in.
using BattingOrder = std::vector<int>;

enum class ProfileSource : std::uint8_t { Bowlers, BattingProxy };

struct EvalResult {
    double v_hat = 0.0;
    std::uint64_t n_sims = 0;
    double se = 0.0;
    std::uint64_t seed = 0;
    std::uint64_t successes = 0;
};

/// sqrt(v (1 - v) / n). Throws DomainError outside 0 <= v <= 1, n >= 1.
double standard_error(double v_hat, std::uint64_t n_sims);

EvalResult make_eval_result(std::uint64_t successes, std::uint64_t n_sims, std::uint64_t seed);

struct SimOptions {
    /// Worker threads; 0 picks the hardware concurrency.
    unsigned threads = 0;
    /// Trajectories advanced together ball by ball.
    std::size_t batch_size = 4096;
};

/// Estimated probability the batting side reaches the target.
EvalResult simulate_batting(const BattingScenario& scenario, std::span<const int> order,
                            std::uint64_t n_sims, std::uint64_t seed, const SimOptions& options = {});

/// Estimated probability the bowling side defends. Infeasible plans throw
/// InfeasibleError before any simulation.
EvalResult simulate_bowling(const BowlingScenario& scenario, const BowlingPlan& plan,
                            std::uint64_t n_sims, std::uint64_t seed, const SimOptions& options = {},
                            ProfileSource source = ProfileSource::Bowlers);

/// Throws ValidationError unless `order` is a permutation of the pool indices.
void check_order(const BattingScenario& scenario, std::span<const int> order);

/// Quota, no-consecutive and previous-over constraints. A plan of the wrong
/// length or with an unknown bowler index is infeasible.
bool is_feasible(const BowlingPlan& plan, const BowlingScenario& scenario) noexcept;

/// Name of the first violated constraint ("length", "bowler", "quota",
/// "no-consecutive", "prev_bowler"), or nullopt for a feasible plan.
std::optional<std::string> violated_constraint(const BowlingPlan& plan, const BowlingScenario& scenario);

// -- template implementation ------------------------------------------------

template <typename T>
std::pair<T, T> rotate_strike(T striker, T non_striker, Outcome o, int over_ball) {
    if (strike_changes(o, over_ball)) return {non_striker, striker};
    return {striker, non_striker};
}

}  // namespace t20
