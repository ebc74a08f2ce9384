#pragma once

#include <string>

#include "adlr/types.hpp"

namespace adlr {

// Broken-down civil time in some timezone.
struct CivilTime {
    int year = 1970;
    int month = 1;  // 1..12
    int day = 1;    // 1..31
    int hour = 0;
    int minute = 0;
    double second = 0.0;
};

// Parses an ISO-8601 timestamp with zone designator, e.g.
// "2024-03-01T12:30:00Z", "2024-03-01 12:30:00.250+01:00".
// Throws ParseError on malformed input.
EpochSeconds parse_iso8601(const std::string& text);

// Formats an epoch as ISO-8601 UTC ("2024-03-01T12:30:00.250Z").
// Fractional seconds are printed up to microseconds, trailing zeros trimmed.
std::string format_iso8601_utc(EpochSeconds t);

// Epoch <-> UTC civil conversions (no timezone database involved).
CivilTime utc_civil(EpochSeconds t);
EpochSeconds epoch_from_utc_civil(const CivilTime& c);

// Local civil time for an IANA timezone name. Resolution goes through the
// process TZ setting guarded by a global lock, since the toolchain has no
// C++20 tzdb; concurrent calls are safe but serialized.
// Throws ConfigError if the zone is not present in the system database.
CivilTime civil_in_zone(EpochSeconds t, const std::string& iana_zone);

// Validates that the zone name exists without converting anything.
void require_zone(const std::string& iana_zone);

}  // namespace adlr
