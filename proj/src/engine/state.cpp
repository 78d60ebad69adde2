#include <algorithm>
#include <cmath>
#include <set>

#include "t20/engine.hpp"
#include "t20/error.hpp"

namespace t20 {

bool is_terminal(const MatchState& s, Perspective view, int wicket_limit) noexcept {
    if (s.runs <= 0 || s.balls <= 0) return true;
    return view == Perspective::Batting ? s.wickets <= 0 : s.wickets >= wicket_limit;
}

MatchState transition(const MatchState& s, Outcome o, Perspective view, int wicket_limit) {
    if (is_terminal(s, view, wicket_limit))
        throw ContractViolation("transition called on a terminal state");
    MatchState next = s;
    next.balls -= 1;
    if (o == Outcome::Wicket) {
        next.wickets += view == Perspective::Batting ? -1 : 1;
    } else {
        next.runs -= runs_of(o);
    }
    return next;
}

bool strike_changes(Outcome o, int over_ball) {
    if (over_ball < 0 || over_ball >= kBallsPerOver)
        throw DomainError("over_ball " + std::to_string(over_ball) + " outside 0-5");
    const bool odd = (runs_of(o) % 2) == 1;
    const bool end_of_over = over_ball == kBallsPerOver - 1;
    return odd != end_of_over;
}

PhaseProfiles uniform_phases(const OutcomeVector& v) { return {v, v, v}; }

double standard_error(double v_hat, std::uint64_t n_sims) {
    if (!(v_hat >= 0.0 && v_hat <= 1.0)) throw DomainError("standard_error: v_hat outside [0, 1]");
    if (n_sims == 0) throw DomainError("standard_error: n_sims must be >= 1");
    return std::sqrt(v_hat * (1.0 - v_hat) / static_cast<double>(n_sims));
}

EvalResult make_eval_result(std::uint64_t successes, std::uint64_t n_sims, std::uint64_t seed) {
    EvalResult r;
    r.n_sims = n_sims;
    r.successes = successes;
    r.seed = seed;
    r.v_hat = static_cast<double>(successes) / static_cast<double>(n_sims);
    r.se = standard_error(r.v_hat, n_sims);
    return r;
}

// -- batting ----------------------------------------------------------------

int BattingScenario::usable_wickets() const noexcept {
    return std::min(wickets, static_cast<int>(pool.size()));
}

void BattingScenario::validate() const {
    std::vector<FieldIssue> issues;
    if (runs < 1) issues.push_back({"runs", "must be >= 1"});
    if (balls < 1 || balls > kInningsBalls) issues.push_back({"balls", "must be in 1-120"});
    if (wickets < 1 || wickets > kMaxWickets) issues.push_back({"wickets", "must be in 1-10"});
    if (pool.empty()) issues.push_back({"pool", "must not be empty"});
    std::set<std::string> ids{fixed_non_striker.id};
    if (fixed_non_striker.id.empty()) issues.push_back({"fixed_non_striker.id", "must not be empty"});
    for (std::size_t i = 0; i < pool.size(); ++i) {
        const std::string field = "pool[" + std::to_string(i) + "].id";
        if (pool[i].id.empty()) issues.push_back({field, "must not be empty"});
        else if (!ids.insert(pool[i].id).second) issues.push_back({field, "duplicate player '" + pool[i].id + "'"});
    }
    if (!issues.empty()) throw ValidationError(std::move(issues));
}

void check_order(const BattingScenario& scenario, std::span<const int> order) {
    const int n = static_cast<int>(scenario.pool.size());
    if (static_cast<int>(order.size()) != n)
        throw ValidationError("order", "must list every pool batsman exactly once (expected " +
                                           std::to_string(n) + " entries)");
    std::vector<bool> seen(static_cast<std::size_t>(n), false);
    for (int idx : order) {
        if (idx < 0 || idx >= n || seen[static_cast<std::size_t>(idx)])
            throw ValidationError("order", "is not a permutation of the pool");
        seen[static_cast<std::size_t>(idx)] = true;
    }
}

// -- bowling ----------------------------------------------------------------

int BowlingScenario::bowler_index(const std::string& id) const noexcept {
    for (std::size_t i = 0; i < bowlers.size(); ++i)
        if (bowlers[i].id == id) return static_cast<int>(i);
    return -1;
}

int BowlingScenario::prev_bowler_index() const noexcept {
    return prev_bowler ? bowler_index(*prev_bowler) : -1;
}

int BowlingScenario::total_quota() const noexcept {
    int q = 0;
    for (const auto& b : bowlers) q += b.quota;
    return q;
}

void BowlingScenario::validate() const {
    std::vector<FieldIssue> issues;
    if (runs < 1) issues.push_back({"runs", "must be >= 1"});
    if (balls < 1 || balls > kInningsBalls) issues.push_back({"balls", "must be in 1-120"});
    if (w_max < 1 || w_max > kMaxWickets) issues.push_back({"w_max", "must be in 1-10"});
    if (bowlers.empty()) issues.push_back({"bowlers", "must not be empty"});
    std::set<std::string> ids;
    for (std::size_t i = 0; i < bowlers.size(); ++i) {
        const std::string field = "bowlers[" + std::to_string(i) + "]";
        if (bowlers[i].id.empty()) issues.push_back({field + ".id", "must not be empty"});
        else if (!ids.insert(bowlers[i].id).second)
            issues.push_back({field + ".id", "duplicate bowler '" + bowlers[i].id + "'"});
        if (bowlers[i].quota < 0 || bowlers[i].quota > 4) issues.push_back({field + ".quota", "must be in 0-4"});
    }
    if (balls >= 1 && balls <= kInningsBalls) {
        const int first = (kInningsBalls - balls) / kBallsPerOver;
        std::vector<int> expected;
        for (int over = first; over < kOversPerInnings; ++over) expected.push_back(over);
        if (slots != expected)
            issues.push_back({"slots", "must list every remaining over in order (" + std::to_string(first) +
                                           " through 19 for " + std::to_string(balls) + " balls)"});
    }
    if (!issues.empty()) throw ValidationError(std::move(issues));
    if (total_quota() < static_cast<int>(slots.size()))
        throw InfeasibleError("quota", "total remaining quota " + std::to_string(total_quota()) +
                                           " is below the " + std::to_string(slots.size()) + " overs to bowl");
}

std::optional<std::string> violated_constraint(const BowlingPlan& plan, const BowlingScenario& scenario) {
    if (plan.bowlers.size() != scenario.slots.size()) return "length";
    const int n = static_cast<int>(scenario.bowlers.size());
    std::vector<int> used(static_cast<std::size_t>(n), 0);
    for (int b : plan.bowlers) {
        if (b < 0 || b >= n) return "bowler";
        ++used[static_cast<std::size_t>(b)];
    }
    for (int j = 0; j < n; ++j)
        if (used[static_cast<std::size_t>(j)] > scenario.bowlers[static_cast<std::size_t>(j)].quota) return "quota";
    for (std::size_t k = 1; k < plan.bowlers.size(); ++k)
        if (plan.bowlers[k] == plan.bowlers[k - 1]) return "no-consecutive";
    if (!plan.bowlers.empty() && plan.bowlers.front() == scenario.prev_bowler_index()) return "prev_bowler";
    return std::nullopt;
}

bool is_feasible(const BowlingPlan& plan, const BowlingScenario& scenario) noexcept {
    try {
        return !violated_constraint(plan, scenario).has_value();
    } catch (...) {
        return false;
    }
}

}  // namespace t20
