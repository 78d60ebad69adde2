#include "t20/profiles.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

#include "t20/error.hpp"

namespace t20 {

OutcomeVector::OutcomeVector() { p_.fill(1.0 / static_cast<double>(kOutcomeCount)); }

OutcomeVector OutcomeVector::from_probabilities(const Array& p, double tolerance) {
    double sum = 0.0;
    for (double x : p) {
        if (!(x >= 0.0) || !std::isfinite(x)) throw DomainError("outcome probabilities must be finite and >= 0");
        sum += x;
    }
    if (std::abs(sum - 1.0) > tolerance) {
        std::ostringstream msg;
        msg.precision(17);
        msg << "outcome probabilities sum to " << sum << ", not 1";
        throw DomainError(msg.str());
    }
    Array q = p;
    for (double& x : q) x /= sum;
    return OutcomeVector(q);
}

OutcomeVector OutcomeVector::point_mass(Outcome o) {
    Array p{};
    p[index_of(o)] = 1.0;
    return OutcomeVector(p);
}

double OutcomeVector::expected_runs() const noexcept {
    double m = 0.0;
    for (std::size_t k = 0; k < kOutcomeCount; ++k) m += kOutcomeRuns[k] * p_[k];
    return m;
}

void CountTable::add(const std::string& player, Phase phase, Outcome o, std::uint64_t times) {
    cells_[PlayerPhaseKey{player, phase}][index_of(o)] += times;
}

OutcomeCounts CountTable::counts(const std::string& player, Phase phase) const {
    auto it = cells_.find(PlayerPhaseKey{player, phase});
    return it == cells_.end() ? OutcomeCounts{} : it->second;
}

std::uint64_t CountTable::n(const std::string& player, Phase phase) const {
    const auto c = counts(player, phase);
    return std::accumulate(c.begin(), c.end(), std::uint64_t{0});
}

std::vector<std::string> CountTable::players() const {
    std::vector<std::string> out;
    for (const auto& [key, _] : cells_)
        if (out.empty() || out.back() != key.player) out.push_back(key.player);
    return out;
}

CountTable accumulate(std::span<const AttributedOutcome> outcomes, Role role) {
    CountTable table(role);
    for (const auto& a : outcomes) {
        if (a.role != role)
            throw ContractViolation("accumulate: outcome for " + a.player + " has role " +
                                    std::string(role_name(a.role)) + ", expected " +
                                    std::string(role_name(role)));
        table.add(a.player, a.phase, a.outcome);
    }
    return table;
}

OutcomeVector laplace_smooth(const OutcomeCounts& counts) {
    const double total =
        static_cast<double>(std::accumulate(counts.begin(), counts.end(), std::uint64_t{0})) +
        static_cast<double>(kOutcomeCount);
    OutcomeVector::Array p{};
    for (std::size_t k = 0; k < kOutcomeCount; ++k) p[k] = (static_cast<double>(counts[k]) + 1.0) / total;
    return OutcomeVector::from_probabilities(p);
}

OutcomeVector population_average(const CountTable& table, Phase phase) {
    OutcomeVector::Array smoothed{};
    double total = 0.0;
    bool any = false;
    for (const auto& [key, counts] : table.cells()) {
        if (key.phase != phase) continue;
        any = true;
        for (std::size_t k = 0; k < kOutcomeCount; ++k) {
            const double c = static_cast<double>(counts[k]) + 1.0;
            smoothed[k] += c;
            total += c;
        }
    }
    if (!any)
        throw DomainError("population_average: no " + std::string(role_name(table.role())) +
                          " data in phase " + std::string(phase_code(phase)));
    for (double& x : smoothed) x /= total;
    return OutcomeVector::from_probabilities(smoothed);
}

double blend_weight(std::uint64_t n, double n_min) {
    const double nd = static_cast<double>(n);
    return nd / (nd + n_min);
}

OutcomeVector blend(const OutcomeVector& individual, const OutcomeVector& population, double lambda) {
    if (!(lambda >= 0.0 && lambda <= 1.0)) throw DomainError("blend weight must lie in [0, 1]");
    OutcomeVector::Array p{};
    for (std::size_t k = 0; k < kOutcomeCount; ++k)
        p[k] = lambda * individual.values()[k] + (1.0 - lambda) * population.values()[k];
    return OutcomeVector::from_probabilities(p);
}

SummaryStats derive_stats(const OutcomeVector& v) {
    SummaryStats s;
    s.sr = 100.0 * v.expected_runs();
    s.er = 0.06 * s.sr;
    s.p_w = v[Outcome::Wicket];
    s.p_dot = v[Outcome::Dot];
    return s;
}

OutcomeVector fit_profile_from_summary(double sr_target, double p_w_target,
                                       const OutcomeVector& population_shape) {
    if (!(p_w_target >= 0.0 && p_w_target < 1.0))
        throw FitError("p_w", "fit: p_w target must lie in [0, 1)");
    if (!(sr_target >= 0.0) || !std::isfinite(sr_target))
        throw FitError("scoring_mass", "fit: sr target must be >= 0 (scoring mass would be negative)");

    const auto& shape = population_shape.values();
    double scoring_mass = 0.0;
    double scoring_runs = 0.0;
    for (std::size_t k = index_of(Outcome::One); k < kOutcomeCount; ++k) {
        scoring_mass += shape[k];
        scoring_runs += kOutcomeRuns[k] * shape[k];
    }

    OutcomeVector::Array p{};
    p[index_of(Outcome::Wicket)] = p_w_target;
    const double mean_runs = sr_target / 100.0;
    double scale = 0.0;
    if (mean_runs > 0.0) {
        if (scoring_runs <= 0.0)
            throw FitError("scoring_mass", "fit: population shape has no scoring outcomes");
        scale = mean_runs / scoring_runs;
    }
    for (std::size_t k = index_of(Outcome::One); k < kOutcomeCount; ++k) p[k] = scale * shape[k];
    const double dot = 1.0 - p_w_target - scale * scoring_mass;
    if (dot < 0.0) {
        std::ostringstream msg;
        msg << "fit: dot mass would be " << dot << " (sr " << sr_target << " with p_w " << p_w_target
            << " needs more scoring mass than is available)";
        throw FitError("dot_mass", msg.str());
    }
    p[index_of(Outcome::Dot)] = dot;
    return OutcomeVector::from_probabilities(p);
}

PlayerPhaseProfile make_profile(std::string player, Phase phase, std::uint64_t n, double lambda,
                                const OutcomeVector& v) {
    const SummaryStats s = derive_stats(v);
    return PlayerPhaseProfile{std::move(player), phase, n, lambda, v, s.sr, s.er, s.p_w, s.p_dot};
}

ProfileSet::ProfileSet(Role role, double n_min, std::map<PlayerPhaseKey, PlayerPhaseProfile> profiles,
                       std::array<std::optional<OutcomeVector>, kPhaseCount> population)
    : role_(role), n_min_(n_min), profiles_(std::move(profiles)), population_(std::move(population)) {}

const PlayerPhaseProfile* ProfileSet::find(const std::string& player, Phase phase) const {
    auto it = profiles_.find(PlayerPhaseKey{player, phase});
    return it == profiles_.end() ? nullptr : &it->second;
}

bool ProfileSet::contains(const std::string& player) const {
    auto it = profiles_.lower_bound(PlayerPhaseKey{player, Phase::Powerplay});
    return it != profiles_.end() && it->first.player == player;
}

std::vector<std::string> ProfileSet::players() const {
    std::vector<std::string> out;
    for (const auto& [key, _] : profiles_)
        if (out.empty() || out.back() != key.player) out.push_back(key.player);
    return out;
}

ProfileSet build_profiles(const CountTable& table, double n_min) {
    std::array<std::optional<OutcomeVector>, kPhaseCount> population;
    for (Phase phase : kPhases) {
        try {
            population[index_of(phase)] = population_average(table, phase);
        } catch (const DomainError&) {
            // No data in this phase for anyone; the phase stays unprofiled.
        }
    }
    std::map<PlayerPhaseKey, PlayerPhaseProfile> profiles;
    for (const auto& player : table.players()) {
        for (Phase phase : kPhases) {
            const auto& pop = population[index_of(phase)];
            if (!pop) continue;
            const std::uint64_t n = table.n(player, phase);
            const double lambda = blend_weight(n, n_min);
            const OutcomeVector v = blend(laplace_smooth(table.counts(player, phase)), *pop, lambda);
            profiles.emplace(PlayerPhaseKey{player, phase}, make_profile(player, phase, n, lambda, v));
        }
    }
    return ProfileSet(table.role(), n_min, std::move(profiles), population);
}

}  // namespace t20
