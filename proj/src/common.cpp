#include "barriers/common.hpp"

#include <cctype>
#include <cstdio>
#include <fstream>

namespace barriers {

namespace {

bool is_space(char c) {
    return std::isspace(static_cast<unsigned char>(c)) != 0;
}

bool is_digit(char c) {
    return c >= '0' && c <= '9';
}

// Days since 1970-01-01 for a civil date (Howard Hinnant's algorithm).
std::int64_t days_from_civil(std::int64_t y, unsigned m, unsigned d) {
    y -= m <= 2;
    const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

unsigned days_in_month(std::int64_t y, unsigned m) {
    static const unsigned table[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
    if (m == 2) {
        const bool leap = (y % 4 == 0 && y % 100 != 0) || y % 400 == 0;
        return leap ? 29 : 28;
    }
    return table[m - 1];
}

} // namespace

std::string trim(std::string_view s) {
    std::size_t b = 0;
    std::size_t e = s.size();
    while (b < e && is_space(s[b])) ++b;
    while (e > b && is_space(s[e - 1])) --e;
    return std::string(s.substr(b, e - b));
}

std::string to_lower(std::string_view s) {
    std::string out(s);
    for (char& c : out)
        c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

std::string fold_key(std::string_view s) {
    return to_lower(trim(s));
}

std::vector<std::string> split(std::string_view s, char sep) {
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = s.find(sep, start);
        if (pos == std::string_view::npos) {
            fields.emplace_back(s.substr(start));
            break;
        }
        fields.emplace_back(s.substr(start, pos - start));
        start = pos + 1;
    }
    return fields;
}

bool starts_with(std::string_view s, std::string_view prefix) {
    return s.size() >= prefix.size() && s.substr(0, prefix.size()) == prefix;
}

std::optional<std::int64_t> parse_iso8601_utc(std::string_view s) {
    // YYYY-MM-DDTHH:MM:SS[.frac](Z|+00:00|-00:00)
    auto num = [&](std::size_t pos, std::size_t len, std::int64_t& out) {
        if (pos + len > s.size()) return false;
        std::int64_t v = 0;
        for (std::size_t i = 0; i < len; ++i) {
            if (!is_digit(s[pos + i])) return false;
            v = v * 10 + (s[pos + i] - '0');
        }
        out = v;
        return true;
    };

    std::int64_t year, month, day, hour, minute, second;
    if (!num(0, 4, year) || !num(5, 2, month) || !num(8, 2, day) ||
        !num(11, 2, hour) || !num(14, 2, minute) || !num(17, 2, second))
        return std::nullopt;
    if (s.size() < 20 || s[4] != '-' || s[7] != '-' || (s[10] != 'T' && s[10] != 't') ||
        s[13] != ':' || s[16] != ':')
        return std::nullopt;

    std::size_t pos = 19;
    if (pos < s.size() && s[pos] == '.') {
        ++pos;
        std::size_t digits = 0;
        while (pos < s.size() && is_digit(s[pos])) {
            ++pos;
            ++digits;
        }
        if (digits == 0) return std::nullopt;
    }
    if (pos >= s.size()) return std::nullopt;
    if (s[pos] == 'Z' || s[pos] == 'z') {
        ++pos;
    } else if (s[pos] == '+' || s[pos] == '-') {
        // UTC only: a zero offset is the only accepted numeric zone.
        if (s.substr(pos + 1) != "00:00" && s.substr(pos + 1) != "0000" && s.substr(pos + 1) != "00")
            return std::nullopt;
        pos = s.size();
    } else {
        return std::nullopt;
    }
    if (pos != s.size()) return std::nullopt;

    if (month < 1 || month > 12 || day < 1 ||
        day > days_in_month(year, static_cast<unsigned>(month)))
        return std::nullopt;
    if (hour > 23 || minute > 59 || second > 60) return std::nullopt;

    const std::int64_t days =
        days_from_civil(year, static_cast<unsigned>(month), static_cast<unsigned>(day));
    return days * 86400 + hour * 3600 + minute * 60 + second;
}

std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string format_fixed(double v, int places) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*f", places, v);
    return buf;
}

std::vector<std::string> read_lines(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open file: " + path);
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        lines.push_back(line);
    }
    return lines;
}

} // namespace barriers
