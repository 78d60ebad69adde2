#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>

namespace t20 {

inline constexpr int kInningsBalls = 120;
inline constexpr int kBallsPerOver = 6;
inline constexpr int kOversPerInnings = 20;
inline constexpr int kMaxWickets = 10;

/// Per-ball outcome set. The enumerator order is the canonical index order
/// used by every probability array in the library.
enum class Outcome : std::uint8_t { Wicket, Dot, One, Two, Three, Four, Six };

inline constexpr std::size_t kOutcomeCount = 7;

inline constexpr std::array<Outcome, kOutcomeCount> kOutcomes{
    Outcome::Wicket, Outcome::Dot, Outcome::One, Outcome::Two,
    Outcome::Three,  Outcome::Four, Outcome::Six};

inline constexpr std::array<int, kOutcomeCount> kOutcomeRuns{0, 0, 1, 2, 3, 4, 6};

constexpr std::size_t index_of(Outcome o) noexcept { return static_cast<std::size_t>(o); }

/// Runs credited to the batting side (0 for a wicket).
constexpr int runs_of(Outcome o) noexcept { return kOutcomeRuns[index_of(o)]; }

constexpr std::string_view outcome_code(Outcome o) noexcept {
    constexpr std::array<std::string_view, kOutcomeCount> codes{"W", "0", "1", "2", "3", "4", "6"};
    return codes[index_of(o)];
}

/// Maps bat-credited runs to an outcome; 5 (and anything outside 0..6) has none.
constexpr std::optional<Outcome> outcome_from_runs(int runs) noexcept {
    switch (runs) {
        case 0: return Outcome::Dot;
        case 1: return Outcome::One;
        case 2: return Outcome::Two;
        case 3: return Outcome::Three;
        case 4: return Outcome::Four;
        case 6: return Outcome::Six;
        default: return std::nullopt;
    }
}

enum class Phase : std::uint8_t { Powerplay, Middle, Death };

inline constexpr std::size_t kPhaseCount = 3;
inline constexpr std::array<Phase, kPhaseCount> kPhases{Phase::Powerplay, Phase::Middle, Phase::Death};

constexpr std::size_t index_of(Phase p) noexcept { return static_cast<std::size_t>(p); }

constexpr std::string_view phase_code(Phase p) noexcept {
    constexpr std::array<std::string_view, kPhaseCount> codes{"PP", "MI", "DE"};
    return codes[index_of(p)];
}

/// Parses "PP" / "MI" / "DE". Throws DomainError otherwise.
Phase parse_phase(std::string_view code);

/// Phase of a 0-indexed over: PP 0-5, MI 6-14, DE 15-19. Throws DomainError
/// outside 0-19.
Phase phase_of_over(int over_idx);

}  // namespace t20
