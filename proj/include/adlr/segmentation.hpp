#pragma once

#include <string>
#include <vector>

#include "adlr/types.hpp"

namespace adlr {

struct TimeSpan {
    EpochSeconds start = 0.0;
    EpochSeconds end = 0.0;
};

// Sliding-window parameters. Window i covers [start + i*stride, start +
// i*stride + tau]; stride is derived from the overlap fraction.
struct WindowingConfig {
    double tau = 16.0;     // window length in seconds
    double overlap = 0.8;  // fraction of tau shared by consecutive windows

    double stride() const { return tau * (1.0 - overlap); }
    void validate() const;

    // Named presets for the evaluation datasets ("marble": 16 s, "uci": 60 s,
    // both with 0.8 overlap).
    static WindowingConfig profile(const std::string& name);
};

// Smallest span covering all states; throws ConfigError when empty.
TimeSpan span_of_states(const std::vector<SensorState>& states);

// A state belongs to window [t, t+tau] when the two intervals intersect,
// boundaries included.
bool associates(const SensorState& state, EpochSeconds t, double tau);

// How the state's interval sits relative to [t, t+tau]. Total over all
// states, associated or not.
Category categorize(const SensorState& state, EpochSeconds t, double tau);

// Cuts the span into overlapping windows and attaches the associated states
// (in start order) to each. Windows without any state are kept so window
// counts stay aligned with the timeline; `diag` reports how many are empty.
std::vector<Window> segment(const std::vector<SensorState>& states, TimeSpan span,
                            const WindowingConfig& config, Diagnostics* diag = nullptr);

// Labels each window with the annotation sharing the most time with it.
// Ties go to the earliest-starting annotation; windows overlapping no
// annotation keep an absent truth.
void assign_truth(std::vector<Window>& windows,
                  const std::vector<ActivityAnnotation>& annotations);

}  // namespace adlr
