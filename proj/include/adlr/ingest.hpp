#pragma once

#include <iosfwd>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "adlr/types.hpp"

namespace adlr {

// Loads the home description (rooms, sensors, activities, timezone, label
// edits, continuous-sensor config) from its JSON document and validates it.
HomeMetadata parse_home_metadata(std::istream& source);
HomeMetadata load_home_metadata(const std::string& path);

// Parses the canonical event log (header "timestamp,sensor_id,value",
// ISO-8601 timestamps). Binary rows carry ON/OFF; decimal rows are readings
// from continuous sensors and are converted to ON/OFF events through the
// sensor's configured threshold or ranges. The result is the unified binary
// event stream, sorted by time (stable for ties).
std::vector<SensorEvent> parse_event_stream(std::istream& source, const HomeMetadata& meta);

// Writes events back to the canonical format (UTC timestamps). Parsing the
// output yields the same list.
void serialize_event_stream(const std::vector<SensorEvent>& events, std::ostream& out);

// Parses interval logs (header "start,end,sensor_id") that already record
// state spans, bypassing event pairing. Overlapping rows for the same sensor
// are kept and reported through `diag`.
std::vector<SensorState> parse_interval_records(std::istream& source, const HomeMetadata& meta,
                                                Diagnostics* diag = nullptr);

// Writes states in the interval format read back by parse_interval_records.
// Zero-length states (a pairing anomaly) are representable in memory but not
// in this format, which requires start < end.
void serialize_interval_records(const std::vector<SensorState>& states, std::ostream& out);

// Parses ground-truth annotations (header "start,end,label"). The merge map
// renames labels before validation; excluded labels are dropped.
std::vector<ActivityAnnotation> load_annotations(std::istream& source, const HomeMetadata& meta,
                                                 const std::set<std::string>& exclusions,
                                                 const std::map<std::string, std::string>& merges);

// Convenience overload using the exclusions/merges declared in the metadata.
std::vector<ActivityAnnotation> load_annotations(std::istream& source, const HomeMetadata& meta);

}  // namespace adlr
