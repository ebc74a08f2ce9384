#include "adlr/state_gen.hpp"

#include <algorithm>
#include <map>
#include <optional>

#include "adlr/errors.hpp"
#include "adlr/timeutil.hpp"

namespace adlr {

std::vector<SensorState> pair_events(const std::vector<SensorEvent>& events,
                                     const HomeMetadata& meta, Diagnostics* diag) {
    std::vector<SensorState> states;
    if (events.empty()) return states;

    const EpochSeconds stream_end = events.back().t;
    std::map<std::string, SensorEvent> open;  // pending ON per event sensor id

    auto sigma_for = [&meta](const std::string& event_sensor_id) {
        const auto source = meta.resolve_event_sensor(event_sensor_id);
        if (!source.sensor) {
            throw SchemaError("event references unknown sensor '" + event_sensor_id + "'");
        }
        return source.sigma;
    };

    for (const auto& e : events) {
        if (e.edge == Edge::on) {
            auto [it, inserted] = open.try_emplace(e.sensor_id, e);
            if (!inserted) {
                // Consecutive ONs: the OFF closes the most recent activation.
                if (diag) {
                    diag->warn("sensor '" + e.sensor_id + "': ON at " + format_iso8601_utc(e.t) +
                               " supersedes unclosed ON at " + format_iso8601_utc(it->second.t));
                }
                it->second = e;
            }
        } else {
            auto it = open.find(e.sensor_id);
            if (it == open.end()) {
                if (diag) {
                    diag->warn("sensor '" + e.sensor_id + "': OFF at " + format_iso8601_utc(e.t) +
                               " without a preceding ON; skipped");
                }
                continue;
            }
            if (e.t == it->second.t && diag) {
                diag->warn("sensor '" + e.sensor_id + "': zero-length state at " +
                           format_iso8601_utc(e.t));
            }
            states.push_back({sigma_for(e.sensor_id), e.sensor_id, it->second.t, e.t, false});
            open.erase(it);
        }
    }

    // Activations still open when the log ends are closed at the stream's
    // last event time so downstream windows can still see them.
    for (const auto& [sensor_id, on] : open) {
        if (diag) {
            diag->warn("sensor '" + sensor_id + "': ON at " + format_iso8601_utc(on.t) +
                       " never closed; truncated at stream end");
        }
        states.push_back({sigma_for(sensor_id), sensor_id, on.t, stream_end, true});
    }

    std::stable_sort(states.begin(), states.end(),
                     [](const SensorState& a, const SensorState& b) { return a.t_s < b.t_s; });
    return states;
}

std::vector<SensorEvent> threshold_continuous(const std::vector<Sample>& samples,
                                              const PlugThreshold& cfg) {
    std::vector<SensorEvent> events;
    bool above = false;  // the appliance is assumed off before the first reading
    for (const auto& s : samples) {
        const bool now = s.value >= cfg.watts;
        if (now != above) {
            events.push_back({s.t, cfg.sensor_id, now ? Edge::on : Edge::off});
            above = now;
        }
    }
    return events;
}

std::vector<SensorEvent> discretize_ranges(const std::vector<Sample>& samples,
                                           const DiscretizationRanges& cfg) {
    auto range_of = [&cfg](const Sample& s) -> std::size_t {
        for (std::size_t i = 0; i < cfg.ranges.size(); ++i) {
            const auto& r = cfg.ranges[i];
            const bool last = i + 1 == cfg.ranges.size();
            if (s.value >= r.low && (s.value < r.high || (last && s.value == r.high))) return i;
        }
        throw ConfigError("sensor '" + cfg.sensor_id + "': reading " + std::to_string(s.value) +
                          " at " + format_iso8601_utc(s.t) + " falls outside the configured ranges");
    };
    auto derived_id = [&cfg](std::size_t i) { return cfg.sensor_id + ":" + cfg.ranges[i].label; };

    std::vector<SensorEvent> events;
    std::optional<std::size_t> current;
    EpochSeconds prev_t = 0.0;
    for (const auto& s : samples) {
        const std::size_t idx = range_of(s);
        if (!current) {
            events.push_back({s.t, derived_id(idx), Edge::on});
        } else if (idx != *current) {
            // The old range is last confirmed at the previous reading; the
            // new one is first confirmed at this reading.
            events.push_back({prev_t, derived_id(*current), Edge::off});
            events.push_back({s.t, derived_id(idx), Edge::on});
        }
        current = idx;
        prev_t = s.t;
    }
    return events;
}

std::vector<SensorEvent> states_to_events(const std::vector<SensorState>& states) {
    std::vector<SensorEvent> events;
    events.reserve(states.size() * 2);
    for (const auto& st : states) {
        events.push_back({st.t_s, st.sensor_id, Edge::on});
        events.push_back({st.t_e, st.sensor_id, Edge::off});
    }
    std::stable_sort(events.begin(), events.end(),
                     [](const SensorEvent& a, const SensorEvent& b) { return a.t < b.t; });
    return events;
}

}  // namespace adlr
