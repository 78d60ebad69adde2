#pragma once

// Scenario files: a JSON description of one intervention point, either a
// batting decision (who comes in next) or a bowling decision (who bowls the
// remaining overs). Player phases are given as published summaries
// ({"sr"|"er", "p_w"}), as full outcome vectors, as references into a
// profile store, or omitted (population shape for that phase).

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "t20/engine.hpp"
#include "t20/profile_store.hpp"

namespace t20 {

enum class ScenarioKind : std::uint8_t { Batting, Bowling };

std::string_view scenario_kind_name(ScenarioKind k) noexcept;

/// Per-role, per-phase shapes used to complete summary rows.
struct PopulationShapes {
    std::array<OutcomeVector, kPhaseCount> batsman;
    std::array<OutcomeVector, kPhaseCount> bowler;

    const std::array<OutcomeVector, kPhaseCount>& for_role(Role r) const noexcept {
        return r == Role::Batsman ? batsman : bowler;
    }
};

/// {"batsman": {"PP": {"W": .., "0": .., ...}, ...}, "bowler": {...}}
PopulationShapes parse_population_shapes(const nlohmann::json& j);

/// How one player-phase vector was obtained and how closely it matches the
/// published summary it came from.
struct FitRecord {
    std::string player;
    Role role = Role::Batsman;
    Phase phase = Phase::Powerplay;
    std::string source;  // "summary", "vector", "store", "population"
    std::optional<double> sr_target;
    std::optional<double> p_w_target;
    SummaryStats fitted;
    double sr_residual = 0.0;
    double p_w_residual = 0.0;
};

struct Scenario {
    std::string name;
    ScenarioKind kind = ScenarioKind::Batting;
    std::optional<BattingScenario> batting;
    std::optional<BowlingScenario> bowling;
    std::optional<BattingOrder> actual_order;
    std::optional<BowlingPlan> actual_plan;
    std::vector<FitRecord> fit_log;
    /// SHA-256 over the resolved vectors, so reports pin the exact inputs.
    std::string profile_hash;
    /// Hash of the corpus behind any store references, empty otherwise.
    std::string corpus_hash;

    const BattingScenario& bat() const;
    const BowlingScenario& bowl() const;
};

struct ScenarioContext {
    const ProfileStore* store = nullptr;
    /// Directory relative paths (population_shapes) resolve against.
    std::filesystem::path base_dir;
};

/// Throws ValidationError listing every offending field, FitError wrapped as
/// a field issue, or InfeasibleError for a structurally valid bowling
/// scenario whose quotas cannot cover the slots.
Scenario load_scenario(const nlohmann::json& doc, const ScenarioContext& ctx = {});

Scenario load_scenario_file(const std::filesystem::path& path, const ProfileStore* store = nullptr);

/// Pool ids in batting order; throws ValidationError on unknown or repeated ids.
BattingOrder order_from_ids(const std::vector<std::string>& ids, const BattingScenario& scenario);
std::vector<std::string> order_ids(std::span<const int> order, const BattingScenario& scenario);

/// Writes the resolved profiles of every scenario player as flat tables
/// (batting_profiles.csv / bowling_profiles.csv) plus the fit log.
void write_fitted_profiles(const Scenario& scenario, const std::filesystem::path& out_dir);

nlohmann::json fit_log_json(const std::vector<FitRecord>& log);

}  // namespace t20
