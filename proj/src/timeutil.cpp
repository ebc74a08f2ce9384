#include "adlr/timeutil.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <mutex>

#include "adlr/errors.hpp"

namespace adlr {

namespace {

// Days-from-civil / civil-from-days (Howard Hinnant's algorithms).
long long days_from_civil(int y, int m, int d) {
    y -= m <= 2;
    const long long era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);             // [0, 399]
    const unsigned doy = (153u * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;  // [0, 365]
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;            // [0, 146096]
    return era * 146097 + static_cast<long long>(doe) - 719468;
}

void civil_from_days(long long z, int& y, int& m, int& d) {
    z += 719468;
    const long long era = (z >= 0 ? z : z - 146096) / 146097;
    const unsigned doe = static_cast<unsigned>(z - era * 146097);                 // [0, 146096]
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;   // [0, 399]
    const long long yr = static_cast<long long>(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);                 // [0, 365]
    const unsigned mp = (5 * doy + 2) / 153;                                      // [0, 11]
    d = static_cast<int>(doy - (153 * mp + 2) / 5 + 1);
    m = static_cast<int>(mp + (mp < 10 ? 3 : -9));
    y = static_cast<int>(yr + (m <= 2));
}

bool read_fixed_digits(const std::string& s, std::size_t& pos, int count, int& out) {
    int value = 0;
    for (int i = 0; i < count; ++i) {
        if (pos >= s.size() || !std::isdigit(static_cast<unsigned char>(s[pos]))) return false;
        value = value * 10 + (s[pos] - '0');
        ++pos;
    }
    out = value;
    return true;
}

bool consume(const std::string& s, std::size_t& pos, char c) {
    if (pos < s.size() && s[pos] == c) {
        ++pos;
        return true;
    }
    return false;
}

std::mutex& tz_mutex() {
    static std::mutex m;
    return m;
}

// Points the process TZ at the given zone. Caller holds tz_mutex().
void activate_zone_locked(const std::string& iana_zone) {
    static std::string active;
    if (active == iana_zone) return;
    ::setenv("TZ", iana_zone.c_str(), 1);
    ::tzset();
    active = iana_zone;
}

}  // namespace

EpochSeconds parse_iso8601(const std::string& text) {
    std::size_t pos = 0;
    CivilTime c;
    int value = 0;

    if (!read_fixed_digits(text, pos, 4, c.year) || !consume(text, pos, '-') ||
        !read_fixed_digits(text, pos, 2, c.month) || !consume(text, pos, '-') ||
        !read_fixed_digits(text, pos, 2, c.day)) {
        throw ParseError("bad ISO-8601 date in '" + text + "'");
    }
    if (!(consume(text, pos, 'T') || consume(text, pos, ' '))) {
        throw ParseError("missing time separator in '" + text + "'");
    }
    if (!read_fixed_digits(text, pos, 2, c.hour) || !consume(text, pos, ':') ||
        !read_fixed_digits(text, pos, 2, c.minute) || !consume(text, pos, ':') ||
        !read_fixed_digits(text, pos, 2, value)) {
        throw ParseError("bad ISO-8601 time in '" + text + "'");
    }
    c.second = value;

    if (consume(text, pos, '.')) {
        double scale = 0.1;
        if (pos >= text.size() || !std::isdigit(static_cast<unsigned char>(text[pos]))) {
            throw ParseError("bad fractional seconds in '" + text + "'");
        }
        while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) {
            c.second += (text[pos] - '0') * scale;
            scale *= 0.1;
            ++pos;
        }
    }

    // Zone designator: 'Z' or +HH:MM / -HH:MM (colon optional).
    long offset_seconds = 0;
    if (consume(text, pos, 'Z')) {
        // UTC
    } else if (pos < text.size() && (text[pos] == '+' || text[pos] == '-')) {
        const int sign = text[pos] == '+' ? 1 : -1;
        ++pos;
        int oh = 0, om = 0;
        if (!read_fixed_digits(text, pos, 2, oh)) throw ParseError("bad zone offset in '" + text + "'");
        consume(text, pos, ':');
        if (pos < text.size()) {
            if (!read_fixed_digits(text, pos, 2, om)) throw ParseError("bad zone offset in '" + text + "'");
        }
        offset_seconds = sign * (oh * 3600L + om * 60L);
    } else {
        throw ParseError("missing zone designator in '" + text + "'");
    }
    if (pos != text.size()) throw ParseError("trailing characters in '" + text + "'");
    if (c.month < 1 || c.month > 12 || c.day < 1 || c.day > 31 || c.hour > 23 || c.minute > 59 ||
        c.second >= 61.0) {
        throw ParseError("out-of-range field in '" + text + "'");
    }

    return epoch_from_utc_civil(c) - static_cast<double>(offset_seconds);
}

EpochSeconds epoch_from_utc_civil(const CivilTime& c) {
    const long long days = days_from_civil(c.year, c.month, c.day);
    return static_cast<double>(days) * 86400.0 + c.hour * 3600.0 + c.minute * 60.0 + c.second;
}

CivilTime utc_civil(EpochSeconds t) {
    double days_f = std::floor(t / 86400.0);
    double rem = t - days_f * 86400.0;
    if (rem >= 86400.0) {  // guard against floor rounding at day boundaries
        days_f += 1.0;
        rem -= 86400.0;
    }
    CivilTime c;
    civil_from_days(static_cast<long long>(days_f), c.year, c.month, c.day);
    const int whole = static_cast<int>(rem);
    c.hour = whole / 3600;
    c.minute = (whole % 3600) / 60;
    c.second = (whole % 60) + (rem - whole);
    return c;
}

std::string format_iso8601_utc(EpochSeconds t) {
    const CivilTime c = utc_civil(t);
    const double sec_whole = std::floor(c.second);
    double frac = c.second - sec_whole;

    char head[32];
    std::snprintf(head, sizeof(head), "%04d-%02d-%02dT%02d:%02d:%02d", c.year, c.month, c.day,
                  c.hour, c.minute, static_cast<int>(sec_whole));
    std::string out = head;

    long micros = std::lround(frac * 1e6);
    if (micros >= 1000000) micros = 999999;  // keep the seconds field untouched
    if (micros > 0) {
        char buf[8];
        std::snprintf(buf, sizeof(buf), ".%06ld", micros);
        std::string f = buf;
        while (f.back() == '0') f.pop_back();
        out += f;
    }
    out += 'Z';
    return out;
}

void require_zone(const std::string& iana_zone) {
    if (iana_zone.empty()) throw ConfigError("timezone name is empty");
    if (iana_zone == "UTC") return;
    namespace fs = std::filesystem;
    const fs::path base("/usr/share/zoneinfo");
    if (!fs::exists(base / iana_zone)) {
        throw ConfigError("unknown IANA timezone '" + iana_zone + "'");
    }
}

CivilTime civil_in_zone(EpochSeconds t, const std::string& iana_zone) {
    require_zone(iana_zone);
    const double frac = t - std::floor(t);
    const std::time_t whole = static_cast<std::time_t>(std::floor(t));

    std::tm tm{};
    {
        std::lock_guard<std::mutex> lock(tz_mutex());
        activate_zone_locked(iana_zone);
        if (::localtime_r(&whole, &tm) == nullptr) {
            throw ConfigError("cannot convert time for zone '" + iana_zone + "'");
        }
    }

    CivilTime c;
    c.year = tm.tm_year + 1900;
    c.month = tm.tm_mon + 1;
    c.day = tm.tm_mday;
    c.hour = tm.tm_hour;
    c.minute = tm.tm_min;
    c.second = tm.tm_sec + frac;
    return c;
}

}  // namespace adlr
