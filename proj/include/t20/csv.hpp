#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace t20::csv {

/// Minimal RFC 4180 reader: comma separated, double-quoted fields may contain
/// commas, doubled quotes and line breaks. A trailing '\r' is stripped.
class Reader {
public:
    explicit Reader(std::istream& in) : in_(in) {}

    /// Reads the next record. Returns false at end of input.
    bool next(std::vector<std::string>& fields);

    /// Line on which the most recently returned record started (1-based).
    std::size_t record_line() const noexcept { return record_line_; }

    /// Set when the last record ended inside an unterminated quote.
    bool last_unterminated() const noexcept { return unterminated_; }

private:
    std::istream& in_;
    std::size_t line_ = 0;
    std::size_t record_line_ = 0;
    bool unterminated_ = false;
};

/// Quotes a field when it contains a comma, quote or line break.
std::string escape(std::string_view field);

}  // namespace t20::csv
