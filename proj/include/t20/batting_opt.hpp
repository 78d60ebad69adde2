#pragma once

// Exhaustive batting-order search with a cheap screening pass followed by a
// high-precision refinement of the best candidates.

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "t20/engine.hpp"

namespace t20 {

inline constexpr std::size_t kMaxEnumeratedPool = 8;

struct BattingSearchConfig {
    std::uint64_t n1 = 3'000;   // screening simulations per order
    std::size_t k = 10;         // orders retained for refinement
    std::uint64_t n2 = 20'000;  // refinement simulations per retained order
    std::uint64_t seed = 0;
    SimOptions sim;

    /// Throws ValidationError.
    void validate() const;
};

struct OrderCandidate {
    BattingOrder order;
    std::size_t permutation_index = 0;  // position in the lexicographic enumeration
    EvalResult pass1;
    std::optional<EvalResult> pass2;
};

struct BattingSearchProgress {
    std::size_t evaluated = 0;
    std::size_t total = 0;
    double best_v_hat = 0.0;
};

using BattingProgressFn = std::function<void(const BattingSearchProgress&)>;

struct BattingSearchResult {
    /// Refined candidates by pass-2 value, then the rest by pass-1 value;
    /// ties resolved lexicographically on the order.
    std::vector<OrderCandidate> ranked;
    std::uint64_t total_simulations = 0;
};

/// All |pool|! permutations of 0..n-1 in lexicographic order. Throws
/// CapacityError above kMaxEnumeratedPool and DomainError for an empty pool.
std::vector<BattingOrder> enumerate_orders(std::size_t pool_size);

BattingSearchResult optimize_batting(const BattingScenario& scenario, const BattingSearchConfig& config,
                                     const BattingProgressFn& progress = {});

/// Re-evaluates `order` at n2 on a substream no search pass uses.
EvalResult evaluate_actual_order(const BattingScenario& scenario, std::span<const int> order,
                                 const BattingSearchConfig& config);

/// Expected extra runs from `delta_balls` more balls at rate `sr_a` instead
/// of `sr_b` (strike rates per 100 balls).
double delta_runs(double delta_balls, double sr_a, double sr_b);

/// Lexicographic index of a permutation among all permutations of its size.
std::size_t permutation_rank(std::span<const int> order);

}  // namespace t20
