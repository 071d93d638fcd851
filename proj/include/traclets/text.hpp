#pragma once

#include "traclets/error.hpp"

#include <cctype>
#include <charconv>
#include <chrono>
#include <cstdint>
#include <ctime>
#include <iomanip>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

namespace traclets::text {

inline std::string_view trim(std::string_view s) noexcept {
    constexpr std::string_view ws = " \t\r\n";
    const auto begin = s.find_first_not_of(ws);
    if (begin == std::string_view::npos) return {};
    const auto end = s.find_last_not_of(ws);
    return s.substr(begin, end - begin + 1);
}

/// Splits one delimited line. Double-quoted fields may contain the delimiter;
/// a doubled quote inside quotes is a literal quote. Fields are trimmed.
inline std::vector<std::string> split_fields(std::string_view line, char delim) {
    std::vector<std::string> out;
    std::string field;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                field.push_back('"');
                ++i;
            } else if (c == '"') {
                quoted = false;
            } else {
                field.push_back(c);
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == delim) {
            out.emplace_back(trim(field));
            field.clear();
        } else {
            field.push_back(c);
        }
    }
    out.emplace_back(trim(field));
    return out;
}

inline std::optional<double> parse_double(std::string_view s) noexcept {
    s = trim(s);
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty()) return std::nullopt;
    return value;
}

inline std::optional<long long> parse_int(std::string_view s) noexcept {
    s = trim(s);
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    long long value = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty()) return std::nullopt;
    return value;
}

/// Shortest decimal form that parses back to the identical double.
inline std::string format_double(double v) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    if (ec != std::errc{}) throw InvariantError("to_chars failed");
    return std::string(buf, ptr);
}

/// UTC epoch seconds for a proleptic Gregorian civil time; nullopt if the
/// fields do not name a real calendar instant.
inline std::optional<double> epoch_from_civil(int year, int month, int day, int hour, int minute,
                                              double second) {
    using namespace std::chrono;
    const year_month_day ymd{std::chrono::year{year}, std::chrono::month{static_cast<unsigned>(month)},
                             std::chrono::day{static_cast<unsigned>(day)}};
    if (!ymd.ok() || hour < 0 || hour > 23 || minute < 0 || minute > 59 || second < 0.0 ||
        second >= 61.0)
        return std::nullopt;
    const auto days = sys_days{ymd}.time_since_epoch().count();
    return static_cast<double>(days) * 86400.0 + hour * 3600.0 + minute * 60.0 + second;
}

/// Parses `s` with a strptime-style format (%Y %m %d %H %M %S and literals),
/// interpreted as UTC. The special format "epoch" reads plain seconds.
inline std::optional<double> parse_time(std::string_view s, const std::string& format) {
    s = trim(s);
    if (format == "epoch") return parse_double(s);
    std::tm tm{};
    std::istringstream in{std::string(s)};
    in >> std::get_time(&tm, format.c_str());
    if (in.fail()) return std::nullopt;
    // Allow trailing fractional seconds, nothing else.
    double frac = 0.0;
    std::string rest;
    std::getline(in, rest);
    if (!rest.empty()) {
        if (rest.front() != '.') return std::nullopt;
        auto f = parse_double("0" + rest);
        if (!f) return std::nullopt;
        frac = *f;
    }
    return epoch_from_civil(tm.tm_year + 1900, tm.tm_mon + 1, tm.tm_mday, tm.tm_hour, tm.tm_min,
                            tm.tm_sec + frac);
}

inline std::string lower(std::string_view s) {
    std::string out(s);
    for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

} // namespace traclets::text
