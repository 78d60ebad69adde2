#pragma once

// Phase-specific per-ball outcome distributions: add-one smoothing, shrinkage
// toward the phase population average, and derived SR/ER statistics.

#include <array>
#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "t20/ingest.hpp"
#include "t20/types.hpp"

namespace t20 {

/// Default shrinkage threshold: a player with this many phase deliveries
/// receives equal weight to the population average.
inline constexpr double kDefaultMinDeliveries = 50.0;

/// Probability distribution over the seven outcomes. Always normalized.
class OutcomeVector {
public:
    using Array = std::array<double, kOutcomeCount>;

    /// Uniform distribution.
    OutcomeVector();

    /// Validates non-negativity and that `p` sums to 1 within `tolerance`,
    /// then renormalizes so the stored sum is 1 to rounding.
    static OutcomeVector from_probabilities(const Array& p, double tolerance = 1e-9);

    /// Point mass on a single outcome.
    static OutcomeVector point_mass(Outcome o);

    double operator[](Outcome o) const noexcept { return p_[index_of(o)]; }
    const Array& values() const noexcept { return p_; }

    /// Expected runs per ball.
    double expected_runs() const noexcept;

    friend bool operator==(const OutcomeVector&, const OutcomeVector&) = default;

private:
    explicit OutcomeVector(const Array& p) : p_(p) {}
    Array p_;
};

using OutcomeCounts = std::array<std::uint64_t, kOutcomeCount>;

struct PlayerPhaseKey {
    std::string player;
    Phase phase = Phase::Powerplay;
    friend auto operator<=>(const PlayerPhaseKey&, const PlayerPhaseKey&) = default;
};

/// Raw outcome counts per (player, phase) for one role.
class CountTable {
public:
    explicit CountTable(Role role = Role::Batsman) : role_(role) {}

    Role role() const noexcept { return role_; }
    void add(const std::string& player, Phase phase, Outcome o, std::uint64_t times = 1);

    const std::map<PlayerPhaseKey, OutcomeCounts>& cells() const noexcept { return cells_; }
    /// Counts for a cell; all zeros when absent.
    OutcomeCounts counts(const std::string& player, Phase phase) const;
    /// Total legal deliveries in a cell.
    std::uint64_t n(const std::string& player, Phase phase) const;
    std::vector<std::string> players() const;
    bool empty() const noexcept { return cells_.empty(); }

private:
    Role role_;
    std::map<PlayerPhaseKey, OutcomeCounts> cells_;
};

/// Folds attributed outcomes into a count table. Throws ContractViolation if
/// an outcome carries a different role.
CountTable accumulate(std::span<const AttributedOutcome> outcomes, Role role);

/// p(o) = (c(o) + 1) / (sum c + 7).
OutcomeVector laplace_smooth(const OutcomeCounts& counts);

/// Ratio of the summed smoothed counts over every player with data in the
/// phase. Throws DomainError when no player has data in the phase.
OutcomeVector population_average(const CountTable& table, Phase phase);

/// n / (n + n_min).
double blend_weight(std::uint64_t n, double n_min = kDefaultMinDeliveries);

/// lambda * individual + (1 - lambda) * population. Throws DomainError if
/// lambda is outside [0, 1].
OutcomeVector blend(const OutcomeVector& individual, const OutcomeVector& population, double lambda);

struct SummaryStats {
    double sr = 0.0;     // runs per 100 balls
    double er = 0.0;     // runs per over, always 0.06 * sr
    double p_w = 0.0;    // dismissal probability per ball
    double p_dot = 0.0;  // dot-ball probability per ball
};

SummaryStats derive_stats(const OutcomeVector& v);

/// Completes a published (SR, p_W) summary into a full vector: p(W) is pinned
/// to `p_w_target`, the scoring outcomes {1,2,3,4,6} keep the ratios of
/// `population_shape` and are scaled to hit `sr_target`, and the dot outcome
/// absorbs the remainder. Throws FitError naming the violated bound.
OutcomeVector fit_profile_from_summary(double sr_target, double p_w_target,
                                       const OutcomeVector& population_shape);

/// Economy rate (runs per over) to strike rate (runs per 100 balls).
constexpr double sr_from_er(double er) noexcept { return er / 0.06; }

struct PlayerPhaseProfile {
    std::string player;
    Phase phase = Phase::Powerplay;
    std::uint64_t n = 0;
    double lambda = 0.0;
    OutcomeVector vector;
    double sr = 0.0;
    double er = 0.0;
    double p_w = 0.0;
    double p_dot = 0.0;
};

PlayerPhaseProfile make_profile(std::string player, Phase phase, std::uint64_t n, double lambda,
                                const OutcomeVector& v);

/// Immutable set of blended profiles for one role, keyed by (player, phase).
class ProfileSet {
public:
    ProfileSet() = default;
    ProfileSet(Role role, double n_min, std::map<PlayerPhaseKey, PlayerPhaseProfile> profiles,
               std::array<std::optional<OutcomeVector>, kPhaseCount> population);

    Role role() const noexcept { return role_; }
    double n_min() const noexcept { return n_min_; }
    const std::map<PlayerPhaseKey, PlayerPhaseProfile>& profiles() const noexcept { return profiles_; }
    const std::optional<OutcomeVector>& population(Phase p) const noexcept {
        return population_[index_of(p)];
    }

    const PlayerPhaseProfile* find(const std::string& player, Phase phase) const;
    bool contains(const std::string& player) const;
    std::vector<std::string> players() const;

private:
    Role role_ = Role::Batsman;
    double n_min_ = kDefaultMinDeliveries;
    std::map<PlayerPhaseKey, PlayerPhaseProfile> profiles_;
    std::array<std::optional<OutcomeVector>, kPhaseCount> population_;
};

/// Builds blended profiles for every player in the table. Each player gets a
/// profile for every phase that has population data; phases in which the
/// player never appeared collapse to the population average (lambda = 0).
ProfileSet build_profiles(const CountTable& table, double n_min = kDefaultMinDeliveries);

}  // namespace t20
