#include "adlr/window2text.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

#include "adlr/errors.hpp"
#include "adlr/timeutil.hpp"

namespace adlr {

namespace {

std::string capitalize(std::string s) {
    if (!s.empty()) s[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(s[0])));
    return s;
}

void replace_all(std::string& text, const std::string& from, const std::string& to) {
    std::size_t pos = 0;
    while ((pos = text.find(from, pos)) != std::string::npos) {
        text.replace(pos, from.size(), to);
        pos += to.size();
    }
}

std::string join(const std::vector<std::string>& parts, const std::string& sep) {
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i > 0) out += sep;
        out += parts[i];
    }
    return out;
}

// Room and phrase lookup for the sensor behind a (possibly derived) id.
const SensorMeta& sensor_of(const SensorState& st, const HomeMetadata& meta) {
    const auto source = meta.resolve_event_sensor(st.sensor_id);
    if (!source.sensor) {
        throw SchemaError("state references unknown sensor '" + st.sensor_id + "'");
    }
    return *source.sensor;
}

}  // namespace

std::string duration_phrase(double seconds) {
    if (seconds >= 120.0) {
        const long long m = std::llround(seconds / 60.0);
        return std::to_string(m) + (m == 1 ? " minute" : " minutes");
    }
    const long long s = std::llround(seconds);
    return std::to_string(s) + (s == 1 ? " second" : " seconds");
}

std::string time_of_day_phrase(int hour) {
    if (hour >= 5 && hour < 8) return "early morning";
    if (hour >= 8 && hour < 11) return "morning";
    if (hour >= 11 && hour < 14) return "noon";
    if (hour >= 14 && hour < 18) return "afternoon";
    if (hour >= 18 && hour < 23) return "evening";
    return "night";
}

std::string humanize_property(const std::string& property) {
    std::string out;
    for (std::size_t i = 0; i < property.size(); ++i) {
        const unsigned char c = static_cast<unsigned char>(property[i]);
        if (std::isupper(c) && i > 0) out.push_back(' ');
        out.push_back(static_cast<char>(std::tolower(c)));
    }
    return out;
}

std::string render_template(const std::string& tpl, double duration_seconds,
                            const std::string& room, const std::string& sigma) {
    std::string out = tpl;
    replace_all(out, "{duration}", duration_phrase(duration_seconds));
    replace_all(out, "{room}", room);
    replace_all(out, "{state}", humanize_property(sigma));
    return out;
}

WindowText render_window(const Window& window, const HomeMetadata& meta) {
    WindowText wt;
    wt.window_start = window.t;

    std::vector<std::string> sentences;
    const CivilTime local = civil_in_zone(window.t, meta.timezone);
    sentences.push_back("The following took place over " + duration_phrase(window.tau) +
                        " in the " + time_of_day_phrase(local.hour) + ".");

    if (window.empty()) {
        sentences.push_back("During these " + duration_phrase(window.tau) +
                            ", no sensor activity was observed.");
        wt.text = join(sentences, " ");
        return wt;
    }

    // Narration order: start time, then sensor id so ties do not depend on
    // how the caller happened to arrange the list.
    std::vector<CategorizedState> ordered(window.states);
    std::stable_sort(ordered.begin(), ordered.end(),
                     [](const CategorizedState& a, const CategorizedState& b) {
                         if (a.state.t_s != b.state.t_s) return a.state.t_s < b.state.t_s;
                         return a.state.sensor_id < b.state.sensor_id;
                     });

    // Where the subject is when the window opens: the room of the earliest
    // state, which is an already-running one whenever any exists.
    const std::string start_room = sensor_of(ordered.front().state, meta).room;
    sentences.push_back("The subject is in the " + start_room + ".");

    for (const auto& cs : ordered) {
        const std::string& room = sensor_of(cs.state, meta).room;
        if (std::find(wt.rooms_visited.begin(), wt.rooms_visited.end(), room) ==
            wt.rooms_visited.end()) {
            wt.rooms_visited.push_back(room);
        }
    }

    // States already running when the window starts, then the ones among
    // them that finish inside it.
    std::vector<std::string> already_clauses;
    for (const auto& cs : ordered) {
        if (cs.category != Category::already_active &&
            cs.category != Category::already_active_and_persistent) {
            continue;
        }
        const SensorMeta& sensor = sensor_of(cs.state, meta);
        already_clauses.push_back(render_template(sensor.phrases.begin, window.t - cs.state.t_s,
                                                  sensor.room, cs.state.sigma));
    }
    if (!already_clauses.empty()) {
        sentences.push_back("Already before this window, " + join(already_clauses, ", and ") + ".");
    }

    std::vector<const CategorizedState*> ending;
    for (const auto& cs : ordered) {
        if (cs.category == Category::already_active) ending.push_back(&cs);
    }
    std::stable_sort(ending.begin(), ending.end(), [](const CategorizedState* a,
                                                      const CategorizedState* b) {
        return a->state.t_e < b->state.t_e;
    });
    for (const CategorizedState* cs : ending) {
        const SensorMeta& sensor = sensor_of(cs->state, meta);
        sentences.push_back(capitalize(render_template(sensor.phrases.end,
                                                       cs->state.t_e - window.t, sensor.room,
                                                       cs->state.sigma)) +
                            ".");
    }

    // The flow of interactions beginning inside the window, room by room.
    std::string current_room = start_room;
    bool entering = true;
    for (const auto& cs : ordered) {
        if (cs.category != Category::inner && cs.category != Category::persistent) continue;
        const SensorMeta& sensor = sensor_of(cs.state, meta);
        if (sensor.room != current_room) {
            sentences.push_back("Then, they move to the " + sensor.room + ".");
            current_room = sensor.room;
            entering = true;
        }
        const bool inner = cs.category == Category::inner;
        const std::string& tpl = inner ? sensor.phrases.active : sensor.phrases.begin;
        const double duration =
            inner ? cs.state.t_e - cs.state.t_s : window.end() - cs.state.t_s;
        const std::string clause =
            render_template(tpl, duration, sensor.room, cs.state.sigma);
        sentences.push_back((entering ? "Here, " : "Then, ") + clause + ".");
        entering = false;
    }

    wt.text = join(sentences, " ");
    return wt;
}

std::vector<WindowText> render_windows(const std::vector<Window>& windows,
                                       const HomeMetadata& meta) {
    std::vector<WindowText> out;
    out.reserve(windows.size());
    for (const auto& w : windows) out.push_back(render_window(w, meta));
    return out;
}

}  // namespace adlr
