#include "t20/bowling_opt.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>

#include "t20/error.hpp"

namespace t20 {

namespace {

constexpr std::uint64_t kChainStream = 0xC4A1;
constexpr std::uint64_t kFastStream = 0xFA57;
constexpr std::uint64_t kRefineStream = 0x4EF1;
constexpr std::uint64_t kActualStream = 0xAC7A;

std::vector<int> usage(const BowlingPlan& plan, std::size_t bowlers) {
    std::vector<int> used(bowlers, 0);
    for (int b : plan.bowlers) ++used[static_cast<std::size_t>(b)];
    return used;
}

bool ids_less(const BowlingPlan& a, const BowlingPlan& b, const BowlingScenario& scenario) {
    return plan_ids(a, scenario) < plan_ids(b, scenario);
}

/// Economy of every bowler in the phase of every slot.
std::vector<std::vector<double>> slot_economy(const BowlingScenario& scenario) {
    std::vector<std::vector<double>> er(scenario.slots.size());
    for (std::size_t k = 0; k < scenario.slots.size(); ++k) {
        const Phase phase = phase_of_over(scenario.slots[k]);
        for (const auto& b : scenario.bowlers) er[k].push_back(derive_stats(b.profiles[index_of(phase)]).er);
    }
    return er;
}

struct Backtracker {
    const BowlingScenario& scenario;
    const std::vector<std::vector<double>>& er;
    std::vector<int> used;
    std::vector<int> plan;
    std::set<std::pair<std::size_t, std::vector<int>>> dead;  // (slot, usage + last) known to fail

    bool solve(std::size_t slot, int last) {
        if (slot == scenario.slots.size()) return true;
        std::vector<int> key = used;
        key.push_back(last);
        if (dead.contains({slot, key})) return false;
        std::vector<int> choices;
        for (int j = 0; j < static_cast<int>(scenario.bowlers.size()); ++j)
            if (j != last && used[static_cast<std::size_t>(j)] < scenario.bowlers[static_cast<std::size_t>(j)].quota)
                choices.push_back(j);
        std::stable_sort(choices.begin(), choices.end(),
                         [&](int a, int b) { return er[slot][static_cast<std::size_t>(a)] < er[slot][static_cast<std::size_t>(b)]; });
        for (int j : choices) {
            ++used[static_cast<std::size_t>(j)];
            plan[slot] = j;
            if (solve(slot + 1, j)) return true;
            --used[static_cast<std::size_t>(j)];
        }
        dead.insert({slot, std::move(key)});
        return false;
    }
};

}  // namespace

void SAConfig::validate() const {
    std::vector<FieldIssue> issues;
    if (!(eps > 0.0)) issues.push_back({"eps", "must be > 0"});
    if (!(t0 > eps)) issues.push_back({"t0", "must exceed eps"});
    if (steps < 1) issues.push_back({"steps", "must be >= 1"});
    if (n_fast < 1) issues.push_back({"n_fast", "must be >= 1"});
    if (n_refine < 1) issues.push_back({"n_refine", "must be >= 1"});
    if (top_k < 1) issues.push_back({"top_k", "must be >= 1"});
    if (!issues.empty()) throw ValidationError(std::move(issues));
}

std::vector<std::string> plan_ids(const BowlingPlan& plan, const BowlingScenario& scenario) {
    std::vector<std::string> ids;
    ids.reserve(plan.bowlers.size());
    for (int b : plan.bowlers) {
        if (b < 0 || b >= static_cast<int>(scenario.bowlers.size()))
            throw ValidationError("plan", "bowler index " + std::to_string(b) + " out of range");
        ids.push_back(scenario.bowlers[static_cast<std::size_t>(b)].id);
    }
    return ids;
}

BowlingPlan plan_from_ids(const std::vector<std::string>& ids, const BowlingScenario& scenario) {
    BowlingPlan plan;
    std::vector<FieldIssue> issues;
    for (std::size_t k = 0; k < ids.size(); ++k) {
        const int idx = scenario.bowler_index(ids[k]);
        if (idx < 0) issues.push_back({"plan[" + std::to_string(k) + "]", "unknown bowler '" + ids[k] + "'"});
        plan.bowlers.push_back(idx);
    }
    if (!issues.empty()) throw ValidationError(std::move(issues));
    return plan;
}

std::uint64_t plan_key(const BowlingPlan& plan, const BowlingScenario& scenario) {
    // FNV-1a over the ids with a separator, then mixed.
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (const auto& id : plan_ids(plan, scenario)) {
        for (unsigned char c : id) h = (h ^ c) * 0x100000001B3ULL;
        h = (h ^ 0x1F) * 0x100000001B3ULL;
    }
    return mix64(h);
}

std::vector<int> candidate_set(const BowlingPlan& plan, std::size_t slot, const BowlingScenario& scenario) {
    if (slot >= plan.bowlers.size()) throw DomainError("candidate_set: slot out of range");
    const auto used = usage(plan, scenario.bowlers.size());
    const int current = plan.bowlers[slot];
    const int before = slot == 0 ? scenario.prev_bowler_index() : plan.bowlers[slot - 1];
    const int after = slot + 1 < plan.bowlers.size() ? plan.bowlers[slot + 1] : -1;
    std::vector<int> out;
    for (int j = 0; j < static_cast<int>(scenario.bowlers.size()); ++j) {
        if (j == current || j == before || j == after) continue;
        // j != current, so releasing slot `slot` does not change j's usage.
        if (used[static_cast<std::size_t>(j)] < scenario.bowlers[static_cast<std::size_t>(j)].quota) out.push_back(j);
    }
    return out;
}

std::optional<BowlingPlan> single_slot_move(const BowlingPlan& plan, const BowlingScenario& scenario,
                                            Xoshiro256& rng) {
    const std::size_t slot = static_cast<std::size_t>(rng.below(plan.bowlers.size()));
    const auto candidates = candidate_set(plan, slot, scenario);
    if (candidates.empty()) return std::nullopt;
    BowlingPlan next = plan;
    next.bowlers[slot] = candidates[static_cast<std::size_t>(rng.below(candidates.size()))];
    return next;
}

std::optional<BowlingPlan> swap_move(const BowlingPlan& plan, const BowlingScenario& scenario, Xoshiro256& rng) {
    std::vector<std::pair<std::size_t, std::size_t>> options;
    const std::size_t m = plan.bowlers.size();
    BowlingPlan trial = plan;
    for (std::size_t a = 0; a < m; ++a) {
        for (std::size_t b = a + 1; b < m; ++b) {
            if (plan.bowlers[a] == plan.bowlers[b]) continue;
            std::swap(trial.bowlers[a], trial.bowlers[b]);
            if (is_feasible(trial, scenario)) options.emplace_back(a, b);
            std::swap(trial.bowlers[a], trial.bowlers[b]);
        }
    }
    if (options.empty()) return std::nullopt;
    const auto [a, b] = options[static_cast<std::size_t>(rng.below(options.size()))];
    std::swap(trial.bowlers[a], trial.bowlers[b]);
    return trial;
}

double sa_temperature(std::uint64_t step, const SAConfig& config) {
    if (step > config.steps) throw DomainError("sa_temperature: step beyond the schedule");
    return config.t0 * (1.0 - static_cast<double>(step) / static_cast<double>(config.steps)) + config.eps;
}

bool sa_accept(double delta_v, double temperature, double uniform_draw) {
    if (!(temperature > 0.0)) throw DomainError("sa_accept: temperature must be > 0");
    if (delta_v > 0.0) return true;
    return uniform_draw < std::exp(delta_v / temperature);
}

BowlingPlan initial_plan(const BowlingScenario& scenario) {
    scenario.validate();
    const auto er = slot_economy(scenario);
    const std::size_t m = scenario.slots.size();

    // Greedy pass.
    BowlingPlan plan;
    std::vector<int> used(scenario.bowlers.size(), 0);
    int last = scenario.prev_bowler_index();
    for (std::size_t k = 0; k < m; ++k) {
        int pick = -1;
        for (int j = 0; j < static_cast<int>(scenario.bowlers.size()); ++j) {
            if (j == last || used[static_cast<std::size_t>(j)] >= scenario.bowlers[static_cast<std::size_t>(j)].quota)
                continue;
            if (pick < 0 || er[k][static_cast<std::size_t>(j)] < er[k][static_cast<std::size_t>(pick)]) pick = j;
        }
        if (pick < 0) break;
        plan.bowlers.push_back(pick);
        ++used[static_cast<std::size_t>(pick)];
        last = pick;
    }
    if (plan.bowlers.size() == m && is_feasible(plan, scenario)) return plan;

    // The greedy pass dead-ended: complete search with the same preference.
    Backtracker bt{scenario, er, std::vector<int>(scenario.bowlers.size(), 0), std::vector<int>(m, -1), {}};
    if (bt.solve(0, scenario.prev_bowler_index())) return BowlingPlan{bt.plan};

    if (scenario.prev_bowler_index() >= 0) {
        Backtracker relaxed{scenario, er, std::vector<int>(scenario.bowlers.size(), 0), std::vector<int>(m, -1), {}};
        if (relaxed.solve(0, -1))
            throw InfeasibleError("prev_bowler", "every plan must open with " + *scenario.prev_bowler +
                                                     ", who bowled the previous over");
    }
    throw InfeasibleError("no-consecutive",
                          "remaining quotas cannot cover the overs without a bowler bowling consecutive overs");
}

BowlingSearchResult optimize_bowling(const BowlingScenario& scenario, const SAConfig& config,
                                     const BowlingProgressFn& progress) {
    scenario.validate();
    config.validate();

    BowlingSearchResult result;
    result.initial_plan = initial_plan(scenario);

    std::map<BowlingPlan, EvalResult> cache;
    auto evaluate_fast = [&](const BowlingPlan& plan) -> const EvalResult& {
        auto it = cache.find(plan);
        if (it != cache.end()) return it->second;
        const auto seed = derive_seed(config.seed, {kFastStream, plan_key(plan, scenario)});
        result.fast_simulations += config.n_fast;
        return cache.emplace(plan, simulate_bowling(scenario, plan, config.n_fast, seed, config.sim)).first->second;
    };

    Xoshiro256 rng(derive_seed(config.seed, {kChainStream}));
    BowlingPlan current = result.initial_plan;
    double current_v = evaluate_fast(current).v_hat;
    BowlingSearchProgress state{0, config.steps, current_v, cache.size()};
    const std::size_t m = current.bowlers.size();
    std::size_t consecutive_empty = 0;

    for (std::uint64_t step = 0; step < config.steps; ++step) {
        const double temperature = sa_temperature(step, config);
        std::optional<BowlingPlan> proposal;
        if (consecutive_empty >= m) {
            consecutive_empty = 0;
            proposal = swap_move(current, scenario, rng);
            ++result.swap_moves;
        } else {
            proposal = single_slot_move(current, scenario, rng);
            if (!proposal) {
                ++consecutive_empty;
                ++result.empty_draws;
            } else {
                consecutive_empty = 0;
            }
        }
        if (proposal) {
            const double v = evaluate_fast(*proposal).v_hat;
            if (sa_accept(v - current_v, temperature, rng.uniform())) {
                current = std::move(*proposal);
                current_v = v;
                ++result.accepted_moves;
            }
            state.best_v_hat = std::max(state.best_v_hat, v);
        }
        state.step = step + 1;
        state.unique_plans = cache.size();
        if (progress) progress(state);
    }
    result.unique_plans = cache.size();

    // Refine the top unique plans plus the starting plan.
    std::vector<PlanCandidate> pool;
    pool.reserve(cache.size());
    for (const auto& [plan, fast] : cache) pool.push_back({plan, fast, std::nullopt, plan == result.initial_plan});
    std::sort(pool.begin(), pool.end(), [&](const PlanCandidate& a, const PlanCandidate& b) {
        if (a.fast.v_hat != b.fast.v_hat) return a.fast.v_hat > b.fast.v_hat;
        return ids_less(a.plan, b.plan, scenario);
    });
    std::vector<PlanCandidate> refined;
    for (std::size_t i = 0; i < pool.size(); ++i) {
        if (i >= config.top_k && !pool[i].is_initial) continue;
        auto c = pool[i];
        c.refined = evaluate_refined_plan(scenario, c.plan, config);
        result.refine_simulations += config.n_refine;
        refined.push_back(std::move(c));
    }
    std::sort(refined.begin(), refined.end(), [&](const PlanCandidate& a, const PlanCandidate& b) {
        if (a.refined->v_hat != b.refined->v_hat) return a.refined->v_hat > b.refined->v_hat;
        return ids_less(a.plan, b.plan, scenario);
    });
    result.ranked = std::move(refined);
    return result;
}

EvalResult evaluate_refined_plan(const BowlingScenario& scenario, const BowlingPlan& plan, const SAConfig& config) {
    const auto seed = derive_seed(config.seed, {kRefineStream, plan_key(plan, scenario)});
    return simulate_bowling(scenario, plan, config.n_refine, seed, config.sim);
}

EvalResult evaluate_actual_plan(const BowlingScenario& scenario, const BowlingPlan& plan, const SAConfig& config) {
    const auto seed = derive_seed(config.seed, {kActualStream, plan_key(plan, scenario)});
    return simulate_bowling(scenario, plan, config.n_refine, seed, config.sim);
}

double audit_z_score(double gap, double se) {
    if (!(se > 0.0)) throw DomainError("audit_z_score: se must be > 0");
    return gap / (std::sqrt(2.0) * se);
}

PlanCounts count_plans(const BowlingScenario& scenario) {
    const std::size_t n = scenario.bowlers.size();
    // State: usage vector plus last bowler (n = none yet / unconstrained).
    using Key = std::pair<std::vector<int>, int>;
    std::map<Key, std::uint64_t> feasible{{{std::vector<int>(n, 0), scenario.prev_bowler_index()}, 1}};
    std::map<std::vector<int>, std::uint64_t> quota_only{{std::vector<int>(n, 0), 1}};
    for (std::size_t k = 0; k < scenario.slots.size(); ++k) {
        std::map<Key, std::uint64_t> next_feasible;
        for (const auto& [key, count] : feasible) {
            for (int j = 0; j < static_cast<int>(n); ++j) {
                if (j == key.second || key.first[static_cast<std::size_t>(j)] >= scenario.bowlers[static_cast<std::size_t>(j)].quota)
                    continue;
                auto used = key.first;
                ++used[static_cast<std::size_t>(j)];
                next_feasible[{std::move(used), j}] += count;
            }
        }
        feasible = std::move(next_feasible);
        std::map<std::vector<int>, std::uint64_t> next_quota;
        for (const auto& [used0, count] : quota_only) {
            for (std::size_t j = 0; j < n; ++j) {
                if (used0[j] >= scenario.bowlers[j].quota) continue;
                auto used = used0;
                ++used[j];
                next_quota[std::move(used)] += count;
            }
        }
        quota_only = std::move(next_quota);
    }
    PlanCounts counts;
    for (const auto& [_, c] : feasible) counts.feasible += c;
    for (const auto& [_, c] : quota_only) counts.quota_valid += c;
    return counts;
}

}  // namespace t20
