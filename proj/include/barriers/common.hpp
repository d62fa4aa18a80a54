#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace barriers {

// A rejected input line: where it was and why it was refused.
struct Rejection {
    std::size_t line_no = 0;
    std::string reason;
};

// Unreadable or unwritable files.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Input that violates a documented invariant (duplicate keys, bad config).
class ValidationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A caller broke an operation's precondition.
class ContractViolation : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

std::string trim(std::string_view s);
std::string to_lower(std::string_view s);

// Normalized registry key: trimmed and case-folded.
std::string fold_key(std::string_view s);

// Splits on `sep`, keeping empty fields.
std::vector<std::string> split(std::string_view s, char sep);

bool starts_with(std::string_view s, std::string_view prefix);

// Seconds since the Unix epoch for an ISO-8601 UTC timestamp such as
// "2016-07-18T19:48:00Z". Fractional seconds are accepted and truncated;
// the zone designator must be Z or +00:00/-00:00.
std::optional<std::int64_t> parse_iso8601_utc(std::string_view s);

std::uint64_t fnv1a64(std::string_view s);

// Locale-independent formatting for artifact files.
std::string format_double(double v);            // shortest exact-ish (%.17g)
std::string format_fixed(double v, int places); // %.Nf

std::vector<std::string> read_lines(const std::string& path);

} // namespace barriers
