#pragma once

#include <rmkt/error.hpp>

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <string>
#include <string_view>

namespace rmkt {

/// Milliseconds since the Unix epoch, UTC.
struct Timestamp {
    std::int64_t ms = 0;

    friend constexpr auto operator<=>(Timestamp, Timestamp) = default;
};

constexpr double hours_between(Timestamp from, Timestamp to) noexcept {
    return static_cast<double>(to.ms - from.ms) / 3'600'000.0;
}

namespace detail {

inline bool read_digits(std::string_view& s, std::size_t n, int& out) {
    if (s.size() < n) return false;
    int v = 0;
    for (std::size_t i = 0; i < n; ++i) {
        char const c = s[i];
        if (c < '0' || c > '9') return false;
        v = v * 10 + (c - '0');
    }
    out = v;
    s.remove_prefix(n);
    return true;
}

inline bool eat(std::string_view& s, char c) {
    if (s.empty() || s.front() != c) return false;
    s.remove_prefix(1);
    return true;
}

}  // namespace detail

/// Accepts `YYYY-MM-DD`, optionally followed by `T` or a space and
/// `HH:MM[:SS[.fff...]]`, optionally followed by `Z` or a `±HH:MM` offset.
/// Times without an offset are taken as UTC.
inline std::optional<Timestamp> parse_timestamp(std::string_view s) {
    using namespace std::chrono;
    int y = 0, mo = 0, d = 0, h = 0, mi = 0, sec = 0;
    std::int64_t frac_ms = 0;
    if (!detail::read_digits(s, 4, y) || !detail::eat(s, '-') || !detail::read_digits(s, 2, mo) ||
        !detail::eat(s, '-') || !detail::read_digits(s, 2, d))
        return std::nullopt;
    year_month_day const ymd{year{y}, month{static_cast<unsigned>(mo)}, day{static_cast<unsigned>(d)}};
    if (!ymd.ok()) return std::nullopt;

    std::int64_t offset_minutes = 0;
    if (!s.empty()) {
        if (!detail::eat(s, 'T') && !detail::eat(s, ' ')) return std::nullopt;
        if (!detail::read_digits(s, 2, h) || !detail::eat(s, ':') || !detail::read_digits(s, 2, mi))
            return std::nullopt;
        if (detail::eat(s, ':')) {
            if (!detail::read_digits(s, 2, sec)) return std::nullopt;
            if (detail::eat(s, '.')) {
                int scale = 100;
                bool any = false;
                while (!s.empty() && s.front() >= '0' && s.front() <= '9') {
                    frac_ms += (s.front() - '0') * scale;
                    scale /= 10;
                    s.remove_prefix(1);
                    any = true;
                }
                if (!any) return std::nullopt;
            }
        }
        if (h > 23 || mi > 59 || sec > 60) return std::nullopt;
        if (detail::eat(s, 'Z')) {
        } else if (!s.empty() && (s.front() == '+' || s.front() == '-')) {
            int const sign = s.front() == '-' ? -1 : 1;
            s.remove_prefix(1);
            int oh = 0, om = 0;
            if (!detail::read_digits(s, 2, oh)) return std::nullopt;
            detail::eat(s, ':');
            if (!detail::read_digits(s, 2, om)) return std::nullopt;
            offset_minutes = sign * (oh * 60 + om);
        }
        if (!s.empty()) return std::nullopt;
    }

    std::int64_t const days = sys_days{ymd}.time_since_epoch().count();
    std::int64_t const ms = (((days * 24 + h) * 60 + mi - offset_minutes) * 60 + sec) * 1000 + frac_ms;
    return Timestamp{ms};
}

/// Canonical form: `YYYY-MM-DDTHH:MM:SSZ`, with `.mmm` only when nonzero.
inline std::string format_timestamp(Timestamp t) {
    using namespace std::chrono;
    std::int64_t ms = t.ms;
    std::int64_t days = ms / 86'400'000;
    std::int64_t rem = ms % 86'400'000;
    if (rem < 0) {
        rem += 86'400'000;
        --days;
    }
    year_month_day const ymd{sys_days{std::chrono::days{days}}};
    int const h = static_cast<int>(rem / 3'600'000);
    int const mi = static_cast<int>(rem / 60'000 % 60);
    int const sec = static_cast<int>(rem / 1000 % 60);
    int const milli = static_cast<int>(rem % 1000);
    char buf[40];
    if (milli == 0)
        std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:%02dZ", static_cast<int>(ymd.year()),
                      static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()), h, mi, sec);
    else
        std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:%02d.%03dZ", static_cast<int>(ymd.year()),
                      static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()), h, mi, sec, milli);
    return buf;
}

}  // namespace rmkt
