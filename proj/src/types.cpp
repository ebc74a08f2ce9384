#include "adlr/types.hpp"

#include <algorithm>
#include <unordered_set>

#include "adlr/errors.hpp"
#include "adlr/timeutil.hpp"

namespace adlr {

const SensorMeta* HomeMetadata::find_sensor(const std::string& sensor_id) const {
    for (const auto& s : sensors) {
        if (s.sensor_id == sensor_id) return &s;
    }
    return nullptr;
}

const PlugThreshold* HomeMetadata::find_plug_threshold(const std::string& sensor_id) const {
    for (const auto& p : plug_thresholds) {
        if (p.sensor_id == sensor_id) return &p;
    }
    return nullptr;
}

const DiscretizationRanges* HomeMetadata::find_discretization(const std::string& sensor_id) const {
    for (const auto& d : discretizations) {
        if (d.sensor_id == sensor_id) return &d;
    }
    return nullptr;
}

bool HomeMetadata::has_activity(const std::string& label) const {
    return std::find(activities.begin(), activities.end(), label) != activities.end();
}

HomeMetadata::EventSource HomeMetadata::resolve_event_sensor(
    const std::string& event_sensor_id) const {
    if (const SensorMeta* s = find_sensor(event_sensor_id)) {
        return {s, s->state_property};
    }
    // Derived ids "<sensor_id>:<range_label>"; sensor ids themselves may not
    // contain ':', so the first colon is the separator.
    const auto colon = event_sensor_id.find(':');
    if (colon != std::string::npos) {
        const std::string base = event_sensor_id.substr(0, colon);
        const std::string label = event_sensor_id.substr(colon + 1);
        if (const DiscretizationRanges* d = find_discretization(base)) {
            for (const auto& r : d->ranges) {
                if (r.label == label) return {find_sensor(base), label};
            }
        }
    }
    return {nullptr, ""};
}

void HomeMetadata::validate() const {
    if (activities.empty()) throw ConfigError("home '" + home_id + "': activity list is empty");
    {
        std::unordered_set<std::string> seen;
        for (const auto& a : activities) {
            if (a.empty()) throw ConfigError("home '" + home_id + "': empty activity label");
            if (!seen.insert(a).second) {
                throw ConfigError("home '" + home_id + "': duplicate activity '" + a + "'");
            }
        }
    }

    std::unordered_set<std::string> room_set(rooms.begin(), rooms.end());
    std::unordered_set<std::string> ids;
    for (const auto& s : sensors) {
        if (s.sensor_id.empty() || s.sensor_id.find(':') != std::string::npos) {
            throw ConfigError("home '" + home_id + "': sensor id '" + s.sensor_id +
                              "' must be non-empty and must not contain ':'");
        }
        if (!ids.insert(s.sensor_id).second) {
            throw ConfigError("home '" + home_id + "': duplicate sensor id '" + s.sensor_id + "'");
        }
        if (room_set.find(s.room) == room_set.end()) {
            throw ConfigError("sensor '" + s.sensor_id + "': room '" + s.room +
                              "' is not in the home's room list");
        }
        if (s.phrases.active.empty() || s.phrases.begin.empty() || s.phrases.end.empty()) {
            throw ConfigError("sensor '" + s.sensor_id + "': all three phrase templates must be set");
        }
    }

    for (const auto& p : plug_thresholds) {
        if (p.watts <= 0.0) {
            throw ConfigError("plug threshold for '" + p.sensor_id + "' must be positive");
        }
        if (!find_sensor(p.sensor_id)) {
            throw ConfigError("plug threshold references unknown sensor '" + p.sensor_id + "'");
        }
    }

    for (const auto& d : discretizations) {
        if (!find_sensor(d.sensor_id)) {
            throw ConfigError("discretization references unknown sensor '" + d.sensor_id + "'");
        }
        if (d.ranges.empty()) {
            throw ConfigError("discretization for '" + d.sensor_id + "' has no ranges");
        }
        std::unordered_set<std::string> labels;
        for (std::size_t i = 0; i < d.ranges.size(); ++i) {
            const auto& r = d.ranges[i];
            if (r.low >= r.high) {
                throw ConfigError("discretization for '" + d.sensor_id + "': range '" + r.label +
                                  "' has low >= high");
            }
            if (r.label.empty()) {
                throw ConfigError("discretization for '" + d.sensor_id + "' has an empty label");
            }
            if (!labels.insert(r.label).second) {
                throw ConfigError("discretization for '" + d.sensor_id + "': duplicate label '" +
                                  r.label + "'");
            }
            if (i > 0 && d.ranges[i - 1].high != r.low) {
                throw ConfigError("discretization for '" + d.sensor_id +
                                  "': ranges must be contiguous (gap before '" + r.label + "')");
            }
        }
    }

    require_zone(timezone);
}

}  // namespace adlr
