#pragma once

// JSON result builders shared by the CLI and the HTTP service, so identical
// inputs and seeds give byte-identical documents from either entry point.
// Every document carries the seed, the config echo and the profile/corpus
// hashes needed to reproduce it; nothing time-dependent is emitted.

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "t20/batting_opt.hpp"
#include "t20/bowling_opt.hpp"
#include "t20/scenario.hpp"

namespace t20 {

inline constexpr std::uint64_t kDefaultEvalSims = 50'000;

/// Uniform progress signal for long-running jobs.
struct JobProgress {
    std::uint64_t step = 0;
    std::uint64_t total = 0;
    double best_v_hat = 0.0;
};

using JobProgressFn = std::function<void(const JobProgress&)>;

/// Probability rounded to one decimal of a percentage point.
double pct1(double v) noexcept;

nlohmann::json eval_json(const EvalResult& r);

struct EvaluateRequest {
    /// Pool ids (batting) or one bowler id per slot (bowling); defaults to the
    /// scenario's actual decision.
    std::optional<std::vector<std::string>> decision;
    std::uint64_t sims = kDefaultEvalSims;
    std::uint64_t seed = 0;
    SimOptions sim;
};

nlohmann::json evaluate_report(const Scenario& scenario, const EvaluateRequest& req);

nlohmann::json optimize_batting_report(const Scenario& scenario, const BattingSearchConfig& config,
                                       const JobProgressFn& progress = {});

nlohmann::json optimize_bowling_report(const Scenario& scenario, const SAConfig& config,
                                       const JobProgressFn& progress = {});

/// Optimizes, re-evaluates the actual decision on a fresh substream, and
/// reports the gap in percentage points with its z-score.
nlohmann::json audit_report(const Scenario& scenario, const BattingSearchConfig& batting, const SAConfig& bowling,
                            const JobProgressFn& progress = {});

nlohmann::json batting_config_json(const BattingSearchConfig& c);
nlohmann::json sa_config_json(const SAConfig& c);

/// Standard error used for the audit z-score: the two arms pooled,
/// sqrt((se_a^2 + se_o^2) / 2).
double pooled_se(const EvalResult& a, const EvalResult& b);

/// Serialization used for every emitted document (2-space indent, trailing
/// newline).
std::string dump_report(const nlohmann::json& j);

}  // namespace t20
