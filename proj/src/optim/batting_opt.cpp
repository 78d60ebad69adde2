#include "t20/batting_opt.hpp"

#include <algorithm>
#include <numeric>

#include "t20/error.hpp"
#include "t20/rng.hpp"

namespace t20 {

namespace {

constexpr std::uint64_t kScreenPass = 1;
constexpr std::uint64_t kRefinePass = 2;
constexpr std::uint64_t kActualPass = 3;

bool ranks_before(double va, const BattingOrder& a, double vb, const BattingOrder& b) {
    if (va != vb) return va > vb;
    return a < b;
}

}  // namespace

void BattingSearchConfig::validate() const {
    std::vector<FieldIssue> issues;
    if (n1 < 1) issues.push_back({"n1", "must be >= 1"});
    if (n2 < n1) issues.push_back({"n2", "must be >= n1"});
    if (k < 1) issues.push_back({"k", "must be >= 1"});
    if (!issues.empty()) throw ValidationError(std::move(issues));
}

std::vector<BattingOrder> enumerate_orders(std::size_t pool_size) {
    if (pool_size == 0) throw DomainError("enumerate_orders: pool must not be empty");
    if (pool_size > kMaxEnumeratedPool)
        throw CapacityError("pool of " + std::to_string(pool_size) + " exceeds the enumeration limit of " +
                            std::to_string(kMaxEnumeratedPool) + "; use a heuristic search instead");
    BattingOrder order(pool_size);
    std::iota(order.begin(), order.end(), 0);
    std::vector<BattingOrder> out;
    do {
        out.push_back(order);
    } while (std::next_permutation(order.begin(), order.end()));
    return out;
}

std::size_t permutation_rank(std::span<const int> order) {
    // Lehmer code.
    const std::size_t n = order.size();
    std::size_t rank = 0;
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t smaller = 0;
        for (std::size_t j = i + 1; j < n; ++j)
            if (order[j] < order[i]) ++smaller;
        std::size_t fact = 1;
        for (std::size_t f = 2; f < n - i; ++f) fact *= f;
        rank += smaller * fact;
    }
    return rank;
}

BattingSearchResult optimize_batting(const BattingScenario& scenario, const BattingSearchConfig& config,
                                     const BattingProgressFn& progress) {
    scenario.validate();
    config.validate();
    const auto orders = enumerate_orders(scenario.pool.size());

    BattingSearchResult result;
    std::vector<OrderCandidate> candidates;
    candidates.reserve(orders.size());
    BattingSearchProgress state{0, orders.size() + std::min(config.k, orders.size()), 0.0};

    for (std::size_t i = 0; i < orders.size(); ++i) {
        const auto seed = derive_seed(config.seed, {kScreenPass, i});
        OrderCandidate c{orders[i], i, simulate_batting(scenario, orders[i], config.n1, seed, config.sim), std::nullopt};
        result.total_simulations += config.n1;
        state.best_v_hat = std::max(state.best_v_hat, c.pass1.v_hat);
        ++state.evaluated;
        if (progress) progress(state);
        candidates.push_back(std::move(c));
    }

    std::sort(candidates.begin(), candidates.end(), [](const OrderCandidate& a, const OrderCandidate& b) {
        return ranks_before(a.pass1.v_hat, a.order, b.pass1.v_hat, b.order);
    });

    const std::size_t keep = std::min(config.k, candidates.size());
    for (std::size_t i = 0; i < keep; ++i) {
        auto& c = candidates[i];
        const auto seed = derive_seed(config.seed, {kRefinePass, c.permutation_index});
        c.pass2 = simulate_batting(scenario, c.order, config.n2, seed, config.sim);
        result.total_simulations += config.n2;
        state.best_v_hat = std::max(state.best_v_hat, c.pass2->v_hat);
        ++state.evaluated;
        if (progress) progress(state);
    }

    std::sort(candidates.begin(), candidates.begin() + static_cast<std::ptrdiff_t>(keep),
              [](const OrderCandidate& a, const OrderCandidate& b) {
                  return ranks_before(a.pass2->v_hat, a.order, b.pass2->v_hat, b.order);
              });
    result.ranked = std::move(candidates);
    return result;
}

EvalResult evaluate_actual_order(const BattingScenario& scenario, std::span<const int> order,
                                 const BattingSearchConfig& config) {
    check_order(scenario, order);
    const auto seed = derive_seed(config.seed, {kActualPass, permutation_rank(order)});
    return simulate_batting(scenario, order, config.n2, seed, config.sim);
}

double delta_runs(double delta_balls, double sr_a, double sr_b) {
    if (delta_balls < 0.0) throw DomainError("delta_runs: delta_balls must be >= 0");
    return delta_balls * (sr_a - sr_b) / 100.0;
}

}  // namespace t20
