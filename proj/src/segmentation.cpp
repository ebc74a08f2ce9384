#include "adlr/segmentation.hpp"

#include <algorithm>

#include "adlr/errors.hpp"

namespace adlr {

namespace {

// Tolerance for the accumulated float error in window start arithmetic.
constexpr double kEps = 1e-9;

}  // namespace

void WindowingConfig::validate() const {
    if (tau <= 0.0) throw ConfigError("window length must be positive");
    if (overlap < 0.0 || overlap >= 1.0) {
        throw ConfigError("window overlap must be in [0, 1)");
    }
}

WindowingConfig WindowingConfig::profile(const std::string& name) {
    if (name == "marble") return {16.0, 0.8};
    if (name == "uci") return {60.0, 0.8};
    throw ConfigError("unknown windowing profile '" + name + "'");
}

TimeSpan span_of_states(const std::vector<SensorState>& states) {
    if (states.empty()) throw ConfigError("cannot derive a time span from an empty state list");
    TimeSpan span{states.front().t_s, states.front().t_e};
    for (const auto& st : states) {
        span.start = std::min(span.start, st.t_s);
        span.end = std::max(span.end, st.t_e);
    }
    return span;
}

bool associates(const SensorState& state, EpochSeconds t, double tau) {
    return state.t_s <= t + tau && state.t_e >= t;
}

Category categorize(const SensorState& state, EpochSeconds t, double tau) {
    const bool from_before = state.t_s < t;
    const bool past_end = state.t_e > t + tau;
    if (from_before && past_end) return Category::already_active_and_persistent;
    if (from_before) return Category::already_active;
    if (past_end) return Category::persistent;
    return Category::inner;
}

std::vector<Window> segment(const std::vector<SensorState>& states, TimeSpan span,
                            const WindowingConfig& config, Diagnostics* diag) {
    config.validate();
    if (span.end < span.start) throw ConfigError("time span ends before it starts");

    // Sorted copy so each window's states come out in a deterministic order
    // even if the caller's list is not sorted. Sensor id breaks start-time
    // ties so downstream narration does not depend on stream insertion order.
    std::vector<SensorState> sorted(states);
    std::stable_sort(sorted.begin(), sorted.end(),
                     [](const SensorState& a, const SensorState& b) {
                         if (a.t_s != b.t_s) return a.t_s < b.t_s;
                         return a.sensor_id < b.sensor_id;
                     });

    std::vector<Window> windows;
    const double stride = config.stride();
    std::size_t empty_count = 0;
    for (std::size_t i = 0;; ++i) {
        // Each start is computed from i directly so float error does not
        // accumulate across thousands of windows.
        const EpochSeconds t = span.start + static_cast<double>(i) * stride;
        if (t + config.tau > span.end + kEps) break;

        Window w;
        w.t = t;
        w.tau = config.tau;
        for (const auto& st : sorted) {
            if (st.t_s > t + config.tau) break;
            if (associates(st, t, config.tau)) {
                w.states.push_back({st, categorize(st, t, config.tau)});
            }
        }
        if (w.empty()) ++empty_count;
        windows.push_back(std::move(w));
    }

    if (windows.empty() && diag) {
        diag->warn("span shorter than one window; no windows produced");
    }
    if (empty_count > 0 && diag) {
        diag->warn(std::to_string(empty_count) + " of " + std::to_string(windows.size()) +
                   " windows contain no sensor activity");
    }
    return windows;
}

void assign_truth(std::vector<Window>& windows,
                  const std::vector<ActivityAnnotation>& annotations) {
    std::vector<ActivityAnnotation> sorted(annotations);
    std::stable_sort(
        sorted.begin(), sorted.end(),
        [](const ActivityAnnotation& a, const ActivityAnnotation& b) { return a.start < b.start; });

    for (auto& w : windows) {
        w.truth.reset();
        double best = 0.0;
        for (const auto& a : sorted) {
            if (a.start > w.end()) break;
            const double overlap = std::min(w.end(), a.end) - std::max(w.t, a.start);
            // Strictly greater keeps the earliest-starting annotation on ties
            // and leaves zero-overlap windows unlabeled.
            if (overlap > best) {
                best = overlap;
                w.truth = a.label;
            }
        }
    }
}

}  // namespace adlr
