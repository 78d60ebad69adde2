#include "t20/types.hpp"

#include <string>

#include "t20/error.hpp"

namespace t20 {

Phase parse_phase(std::string_view code) {
    for (Phase p : kPhases)
        if (phase_code(p) == code) return p;
    throw DomainError("unknown phase '" + std::string(code) + "' (expected PP, MI or DE)");
}

Phase phase_of_over(int over_idx) {
    if (over_idx < 0 || over_idx >= kOversPerInnings)
        throw DomainError("over index " + std::to_string(over_idx) + " outside 0-19");
    if (over_idx <= 5) return Phase::Powerplay;
    if (over_idx <= 14) return Phase::Middle;
    return Phase::Death;
}

}  // namespace t20
