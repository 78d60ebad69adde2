#pragma once

// Ball-by-ball CSV ingestion and per-role outcome attribution.
//
// Required header columns (case-sensitive, any order, extra columns ignored):
//   match_id, innings, over, ball, batsman, non_striker, bowler,
//   runs_batsman, extras, extra_kind, wicket_player_out, dismissal_type
// An empty field means "absent" for the optional columns.

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "t20/types.hpp"

namespace t20 {

enum class ExtraKind : std::uint8_t { None, Wide, NoBall, Bye, LegBye };
enum class Dismissal : std::uint8_t { Bowled, Caught, Lbw, Stumped, RunOut, Other };
enum class Role : std::uint8_t { Batsman, Bowler };

std::string_view role_name(Role r) noexcept;

struct Delivery {
    std::string match_id;
    int innings = 1;
    int over_idx = 0;      // 0-indexed
    int ball_in_over = 0;  // 0-5 among legal balls
    std::string batsman;
    std::string non_striker;
    std::string bowler;
    int runs_batsman = 0;
    int extras = 0;
    ExtraKind extra_kind = ExtraKind::None;
    std::optional<std::string> wicket_player_out;
    std::optional<Dismissal> dismissal_type;
};

struct AttributedOutcome {
    std::string player;
    Role role = Role::Batsman;
    Phase phase = Phase::Powerplay;
    Outcome outcome = Outcome::Dot;
};

struct RowError {
    std::size_t line = 0;  // 1-based line number in the source, header is line 1
    std::string message;
};

struct ParseResult {
    std::vector<Delivery> deliveries;
    std::vector<RowError> errors;
};

/// Parses the whole stream. Missing required columns throw SchemaError;
/// malformed rows are collected in `errors` with their line numbers. Rows
/// whose match_id is in `excluded_matches` are skipped.
ParseResult parse_deliveries(std::istream& source,
                             const std::unordered_set<std::string>& excluded_matches = {});

ExtraKind parse_extra_kind(std::string_view text);
std::optional<Dismissal> parse_dismissal(std::string_view text);

/// Wides and no-balls are not legal deliveries.
bool is_legal(const Delivery& d) noexcept;

/// Striker's outcome: W only when the striker is the player out; otherwise the
/// bat-credited runs. Returns nullopt for illegal deliveries and for 5-run
/// rows (5 is not a modelled outcome).
std::optional<AttributedOutcome> attribute_batsman(const Delivery& d);

/// Bowler's outcome: W when a wicket fell by any mode other than run out;
/// otherwise the bat-credited runs. Same nullopt cases as attribute_batsman.
std::optional<AttributedOutcome> attribute_bowler(const Delivery& d);

/// Attributes every legal delivery for one role, preserving input order.
std::vector<AttributedOutcome> attribute_all(std::span<const Delivery> deliveries, Role role);

}  // namespace t20
