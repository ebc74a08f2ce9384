#include "adlr/ingest.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "adlr/errors.hpp"
#include "adlr/state_gen.hpp"
#include "adlr/timeutil.hpp"

namespace adlr {

namespace {

using nlohmann::json;

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string::npos) return "";
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

std::vector<std::string> split_fields(const std::string& line, std::size_t expected, int line_no) {
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        if (comma == std::string::npos) {
            fields.push_back(trim(line.substr(start)));
            break;
        }
        fields.push_back(trim(line.substr(start, comma - start)));
        start = comma + 1;
    }
    if (fields.size() != expected) {
        throw ParseError("line " + std::to_string(line_no) + ": expected " +
                         std::to_string(expected) + " fields, got " + std::to_string(fields.size()));
    }
    return fields;
}

SensorKind kind_from_string(const std::string& s) {
    if (s == "magnetic") return SensorKind::magnetic;
    if (s == "motion") return SensorKind::motion;
    if (s == "pressure") return SensorKind::pressure;
    if (s == "plug") return SensorKind::plug;
    if (s == "temperature") return SensorKind::temperature;
    if (s == "phone") return SensorKind::phone;
    if (s == "other") return SensorKind::other;
    throw ConfigError("unknown sensor kind '" + s + "'");
}

// Returns true when the line is blank or a comment.
bool skip_line(const std::string& line) {
    const std::string t = trim(line);
    return t.empty() || t[0] == '#';
}

EpochSeconds parse_timestamp_field(const std::string& field, int line_no) {
    try {
        return parse_iso8601(field);
    } catch (const ParseError& e) {
        throw ParseError("line " + std::to_string(line_no) + ": " + e.what());
    }
}

}  // namespace

HomeMetadata parse_home_metadata(std::istream& source) {
    json doc;
    try {
        doc = json::parse(source);
    } catch (const json::exception& e) {
        throw ParseError(std::string("home metadata is not valid JSON: ") + e.what());
    }

    HomeMetadata meta;
    try {
        meta.home_id = doc.at("home_id").get<std::string>();
        meta.rooms = doc.at("rooms").get<std::vector<std::string>>();
        meta.activities = doc.at("activities").get<std::vector<std::string>>();
        meta.timezone = doc.at("timezone").get<std::string>();

        for (const auto& s : doc.at("sensors")) {
            SensorMeta sm;
            sm.sensor_id = s.at("id").get<std::string>();
            sm.room = s.at("room").get<std::string>();
            sm.kind = kind_from_string(s.at("kind").get<std::string>());
            sm.state_property = s.at("state_property").get<std::string>();
            const auto& ph = s.at("phrases");
            sm.phrases.active = ph.at("active").get<std::string>();
            sm.phrases.begin = ph.at("begin").get<std::string>();
            sm.phrases.end = ph.at("end").get<std::string>();
            meta.sensors.push_back(std::move(sm));

            if (s.contains("plug_threshold_watts")) {
                meta.plug_thresholds.push_back(
                    {meta.sensors.back().sensor_id, s.at("plug_threshold_watts").get<double>()});
            }
            if (s.contains("ranges")) {
                DiscretizationRanges dr;
                dr.sensor_id = meta.sensors.back().sensor_id;
                for (const auto& r : s.at("ranges")) {
                    dr.ranges.push_back({r.at("low").get<double>(), r.at("high").get<double>(),
                                         r.at("label").get<std::string>()});
                }
                meta.discretizations.push_back(std::move(dr));
            }
        }

        if (doc.contains("label_merges")) {
            for (const auto& [from, to] : doc.at("label_merges").items()) {
                meta.label_merges[from] = to.get<std::string>();
            }
        }
        if (doc.contains("label_exclusions")) {
            for (const auto& l : doc.at("label_exclusions")) {
                meta.label_exclusions.insert(l.get<std::string>());
            }
        }
    } catch (const json::exception& e) {
        throw SchemaError(std::string("home metadata is missing required fields: ") + e.what());
    }

    meta.validate();
    return meta;
}

HomeMetadata load_home_metadata(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open home metadata file '" + path + "'");
    return parse_home_metadata(in);
}

std::vector<SensorEvent> parse_event_stream(std::istream& source, const HomeMetadata& meta) {
    std::vector<SensorEvent> events;
    std::map<std::string, std::vector<Sample>> samples;  // continuous readings per sensor

    std::string line;
    int line_no = 0;
    bool header_seen = false;
    while (std::getline(source, line)) {
        ++line_no;
        if (skip_line(line)) continue;
        if (!header_seen) {
            header_seen = true;
            if (trim(line) == "timestamp,sensor_id,value") continue;
            // fall through: headerless files are accepted
        }
        const auto fields = split_fields(line, 3, line_no);
        const EpochSeconds t = parse_timestamp_field(fields[0], line_no);
        const std::string& sensor_id = fields[1];
        const std::string& value = fields[2];

        if (!meta.resolve_event_sensor(sensor_id).sensor) {
            throw SchemaError("line " + std::to_string(line_no) + ": unknown sensor '" + sensor_id +
                              "'");
        }

        if (value == "ON") {
            events.push_back({t, sensor_id, Edge::on});
        } else if (value == "OFF") {
            events.push_back({t, sensor_id, Edge::off});
        } else {
            char* end = nullptr;
            const double v = std::strtod(value.c_str(), &end);
            if (end == value.c_str() || *end != '\0') {
                throw ParseError("line " + std::to_string(line_no) + ": value '" + value +
                                 "' is neither ON/OFF nor a number");
            }
            if (!meta.find_sensor(sensor_id)) {
                throw SchemaError("line " + std::to_string(line_no) +
                                  ": numeric reading for derived sensor id '" + sensor_id + "'");
            }
            samples[sensor_id].push_back({t, v});
        }
    }

    // Continuous readings become ON/OFF events through the configured
    // threshold or ranges.
    for (auto& [sensor_id, series] : samples) {
        std::stable_sort(series.begin(), series.end(),
                         [](const Sample& a, const Sample& b) { return a.t < b.t; });
        if (const PlugThreshold* thr = meta.find_plug_threshold(sensor_id)) {
            auto converted = threshold_continuous(series, *thr);
            events.insert(events.end(), converted.begin(), converted.end());
        } else if (const DiscretizationRanges* dr = meta.find_discretization(sensor_id)) {
            auto converted = discretize_ranges(series, *dr);
            events.insert(events.end(), converted.begin(), converted.end());
        } else {
            throw ConfigError("sensor '" + sensor_id +
                              "' reports numeric values but has no threshold or ranges configured");
        }
    }

    std::stable_sort(events.begin(), events.end(),
                     [](const SensorEvent& a, const SensorEvent& b) { return a.t < b.t; });
    return events;
}

void serialize_event_stream(const std::vector<SensorEvent>& events, std::ostream& out) {
    out << "timestamp,sensor_id,value\n";
    for (const auto& e : events) {
        out << format_iso8601_utc(e.t) << ',' << e.sensor_id << ','
            << (e.edge == Edge::on ? "ON" : "OFF") << '\n';
    }
}

std::vector<SensorState> parse_interval_records(std::istream& source, const HomeMetadata& meta,
                                                Diagnostics* diag) {
    std::vector<SensorState> states;
    std::string line;
    int line_no = 0;
    bool header_seen = false;
    while (std::getline(source, line)) {
        ++line_no;
        if (skip_line(line)) continue;
        if (!header_seen) {
            header_seen = true;
            if (trim(line) == "start,end,sensor_id") continue;
        }
        const auto fields = split_fields(line, 3, line_no);
        const EpochSeconds start = parse_timestamp_field(fields[0], line_no);
        const EpochSeconds end = parse_timestamp_field(fields[1], line_no);
        const std::string& sensor_id = fields[2];

        if (start >= end) {
            throw ParseError("line " + std::to_string(line_no) + ": start is not before end");
        }
        const auto source = meta.resolve_event_sensor(sensor_id);
        if (!source.sensor) {
            throw SchemaError("line " + std::to_string(line_no) + ": unknown sensor '" + sensor_id +
                              "'");
        }
        states.push_back({source.sigma, sensor_id, start, end, false});
    }

    std::stable_sort(states.begin(), states.end(),
                     [](const SensorState& a, const SensorState& b) { return a.t_s < b.t_s; });

    if (diag) {
        // Overlapping records for the same sensor are legal but worth flagging.
        std::map<std::string, const SensorState*> last_by_sensor;
        for (const auto& st : states) {
            auto it = last_by_sensor.find(st.sensor_id);
            if (it != last_by_sensor.end() && st.t_s < it->second->t_e) {
                diag->warn("sensor '" + st.sensor_id + "': interval starting at " +
                           format_iso8601_utc(st.t_s) + " overlaps the previous one");
            }
            if (it == last_by_sensor.end() || st.t_e > it->second->t_e) {
                last_by_sensor[st.sensor_id] = &st;
            }
        }
    }
    return states;
}

void serialize_interval_records(const std::vector<SensorState>& states, std::ostream& out) {
    out << "start,end,sensor_id\n";
    for (const auto& st : states) {
        out << format_iso8601_utc(st.t_s) << ',' << format_iso8601_utc(st.t_e) << ','
            << st.sensor_id << '\n';
    }
}

std::vector<ActivityAnnotation> load_annotations(std::istream& source, const HomeMetadata& meta,
                                                 const std::set<std::string>& exclusions,
                                                 const std::map<std::string, std::string>& merges) {
    std::vector<ActivityAnnotation> annotations;
    std::string line;
    int line_no = 0;
    bool header_seen = false;
    while (std::getline(source, line)) {
        ++line_no;
        if (skip_line(line)) continue;
        if (!header_seen) {
            header_seen = true;
            if (trim(line) == "start,end,label") continue;
        }
        const auto fields = split_fields(line, 3, line_no);
        const EpochSeconds start = parse_timestamp_field(fields[0], line_no);
        const EpochSeconds end = parse_timestamp_field(fields[1], line_no);
        std::string label = fields[2];

        if (start >= end) {
            throw ParseError("line " + std::to_string(line_no) + ": start is not before end");
        }

        // Merge map first, then exclusion, then validation.
        if (auto it = merges.find(label); it != merges.end()) label = it->second;
        if (exclusions.count(label)) continue;
        if (!meta.has_activity(label)) {
            throw SchemaError("line " + std::to_string(line_no) + ": label '" + label +
                              "' is neither a known activity, merged, nor excluded");
        }
        annotations.push_back({std::move(label), start, end});
    }

    std::stable_sort(
        annotations.begin(), annotations.end(),
        [](const ActivityAnnotation& a, const ActivityAnnotation& b) { return a.start < b.start; });
    return annotations;
}

std::vector<ActivityAnnotation> load_annotations(std::istream& source, const HomeMetadata& meta) {
    return load_annotations(source, meta, meta.label_exclusions, meta.label_merges);
}

}  // namespace adlr
