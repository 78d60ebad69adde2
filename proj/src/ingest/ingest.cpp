#include "t20/ingest.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <istream>
#include <unordered_map>

#include "t20/csv.hpp"
#include "t20/error.hpp"

namespace t20 {

namespace {

constexpr std::array<std::string_view, 12> kRequiredColumns{
    "match_id", "innings", "over", "ball", "batsman", "non_striker", "bowler",
    "runs_batsman", "extras", "extra_kind", "wicket_player_out", "dismissal_type"};

enum Column : std::size_t {
    kMatch, kInnings, kOver, kBall, kBatsman, kNonStriker, kBowler,
    kRunsBatsman, kExtras, kExtraKind, kWicketOut, kDismissal
};

std::string lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

bool parse_int(std::string_view text, int& out) {
    text = trim(text);
    if (text.empty()) return false;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
    return ec == std::errc{} && ptr == text.data() + text.size();
}

struct RowFailure {
    std::string message;
};

Delivery parse_row(const std::vector<std::string>& fields, const std::array<std::size_t, 12>& col) {
    auto get = [&](Column c) -> std::string_view {
        const std::size_t i = col[c];
        return i < fields.size() ? std::string_view(fields[i]) : std::string_view{};
    };
    auto get_int = [&](Column c, std::string_view name) {
        int v = 0;
        if (!parse_int(get(c), v)) throw RowFailure{std::string(name) + " is not an integer"};
        return v;
    };

    Delivery d;
    d.match_id = std::string(trim(get(kMatch)));
    if (d.match_id.empty()) throw RowFailure{"match_id is empty"};
    d.innings = get_int(kInnings, "innings");
    if (d.innings != 1 && d.innings != 2) throw RowFailure{"innings must be 1 or 2"};
    d.over_idx = get_int(kOver, "over");
    if (d.over_idx < 0 || d.over_idx >= kOversPerInnings) throw RowFailure{"over must be in 0-19"};
    d.ball_in_over = get_int(kBall, "ball");
    if (d.ball_in_over < 0 || d.ball_in_over >= kBallsPerOver) throw RowFailure{"ball must be in 0-5"};
    d.batsman = std::string(trim(get(kBatsman)));
    d.non_striker = std::string(trim(get(kNonStriker)));
    d.bowler = std::string(trim(get(kBowler)));
    if (d.batsman.empty() || d.non_striker.empty() || d.bowler.empty())
        throw RowFailure{"batsman, non_striker and bowler are required"};
    if (d.batsman == d.non_striker) throw RowFailure{"batsman equals non_striker"};
    d.runs_batsman = get_int(kRunsBatsman, "runs_batsman");
    if (d.runs_batsman < 0 || d.runs_batsman > 6) throw RowFailure{"runs_batsman must be in 0-6"};
    d.extras = get_int(kExtras, "extras");
    if (d.extras < 0) throw RowFailure{"extras must be >= 0"};
    try {
        d.extra_kind = parse_extra_kind(get(kExtraKind));
        d.dismissal_type = parse_dismissal(get(kDismissal));
    } catch (const DomainError& e) {
        throw RowFailure{e.what()};
    }
    if (auto out = trim(get(kWicketOut)); !out.empty()) d.wicket_player_out = std::string(out);
    if (d.wicket_player_out.has_value() != d.dismissal_type.has_value())
        throw RowFailure{"wicket_player_out and dismissal_type must be both present or both empty"};
    return d;
}

std::optional<AttributedOutcome> runs_outcome(const Delivery& d, const std::string& player, Role role) {
    auto o = outcome_from_runs(d.runs_batsman);
    if (!o) return std::nullopt;
    return AttributedOutcome{player, role, phase_of_over(d.over_idx), *o};
}

}  // namespace

std::string_view role_name(Role r) noexcept { return r == Role::Batsman ? "batsman" : "bowler"; }

ExtraKind parse_extra_kind(std::string_view text) {
    const std::string t = lower(trim(text));
    if (t.empty() || t == "none") return ExtraKind::None;
    if (t == "wide" || t == "wides") return ExtraKind::Wide;
    if (t == "no-ball" || t == "noball" || t == "noballs" || t == "no ball") return ExtraKind::NoBall;
    if (t == "bye" || t == "byes") return ExtraKind::Bye;
    if (t == "leg-bye" || t == "legbye" || t == "legbyes" || t == "leg bye") return ExtraKind::LegBye;
    throw DomainError("unknown extra_kind '" + std::string(text) + "'");
}

std::optional<Dismissal> parse_dismissal(std::string_view text) {
    const std::string t = lower(trim(text));
    if (t.empty()) return std::nullopt;
    if (t == "bowled") return Dismissal::Bowled;
    if (t == "caught" || t == "caught and bowled") return Dismissal::Caught;
    if (t == "lbw") return Dismissal::Lbw;
    if (t == "stumped") return Dismissal::Stumped;
    if (t == "run out" || t == "runout" || t == "run-out") return Dismissal::RunOut;
    return Dismissal::Other;
}

ParseResult parse_deliveries(std::istream& source,
                             const std::unordered_set<std::string>& excluded_matches) {
    csv::Reader reader(source);
    std::vector<std::string> fields;
    ParseResult result;
    if (!reader.next(fields)) throw SchemaError("empty input: header row required");

    std::unordered_map<std::string, std::size_t> header;
    for (std::size_t i = 0; i < fields.size(); ++i) {
        std::string name(trim(fields[i]));
        if (i == 0 && name.rfind("\xEF\xBB\xBF", 0) == 0) name.erase(0, 3);  // UTF-8 BOM
        header.emplace(std::move(name), i);
    }
    std::array<std::size_t, 12> col{};
    std::string missing;
    for (std::size_t c = 0; c < kRequiredColumns.size(); ++c) {
        auto it = header.find(std::string(kRequiredColumns[c]));
        if (it == header.end()) {
            missing += (missing.empty() ? "" : ", ") + std::string(kRequiredColumns[c]);
        } else {
            col[c] = it->second;
        }
    }
    if (!missing.empty()) throw SchemaError("missing required column(s): " + missing);

    while (reader.next(fields)) {
        if (fields.size() == 1 && trim(fields[0]).empty()) continue;  // blank line
        if (reader.last_unterminated()) {
            result.errors.push_back({reader.record_line(), "unterminated quoted field"});
            continue;
        }
        try {
            Delivery d = parse_row(fields, col);
            if (excluded_matches.contains(d.match_id)) continue;
            result.deliveries.push_back(std::move(d));
        } catch (const RowFailure& f) {
            result.errors.push_back({reader.record_line(), f.message});
        }
    }
    return result;
}

bool is_legal(const Delivery& d) noexcept {
    return d.extra_kind != ExtraKind::Wide && d.extra_kind != ExtraKind::NoBall;
}

std::optional<AttributedOutcome> attribute_batsman(const Delivery& d) {
    if (!is_legal(d)) return std::nullopt;
    if (d.wicket_player_out && *d.wicket_player_out == d.batsman)
        return AttributedOutcome{d.batsman, Role::Batsman, phase_of_over(d.over_idx), Outcome::Wicket};
    return runs_outcome(d, d.batsman, Role::Batsman);
}

std::optional<AttributedOutcome> attribute_bowler(const Delivery& d) {
    if (!is_legal(d)) return std::nullopt;
    if (d.wicket_player_out && d.dismissal_type != Dismissal::RunOut)
        return AttributedOutcome{d.bowler, Role::Bowler, phase_of_over(d.over_idx), Outcome::Wicket};
    return runs_outcome(d, d.bowler, Role::Bowler);
}

std::vector<AttributedOutcome> attribute_all(std::span<const Delivery> deliveries, Role role) {
    std::vector<AttributedOutcome> out;
    out.reserve(deliveries.size());
    for (const auto& d : deliveries) {
        auto a = role == Role::Batsman ? attribute_batsman(d) : attribute_bowler(d);
        if (a) out.push_back(std::move(*a));
    }
    return out;
}

}  // namespace t20
