#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace adlr {

// Seconds since the Unix epoch; fractional seconds allowed.
using EpochSeconds = double;

enum class SensorKind { magnetic, motion, pressure, plug, temperature, phone, other };

enum class Edge { on, off };

// Per-sensor phrase templates used by the window renderer. Placeholders
// {duration} and {room} are substituted at render time. All are clauses
// (lowercase, no final period); the renderer handles sentence assembly.
//
//   active  - state fully contained in the window, narrated with its length
//             ("the subject turned on the stove and turned it off after {duration}")
//   begin   - onset of a state; used both for states that persist past the
//             window and for listing states already running when it starts
//             ("the subject turned on the stove", "they sit on the couch")
//   end     - a state begun before the window finishing inside it
//             ("after {duration}, the subject turned off the stove")
struct PhraseTemplates {
    std::string active;
    std::string begin;
    std::string end;
};

struct SensorMeta {
    std::string sensor_id;
    std::string room;
    SensorKind kind = SensorKind::other;
    std::string state_property;  // e.g. "FridgeDoorOpen"
    PhraseTemplates phrases;
};

// Threshold converting a continuous power reading into ON/OFF events.
struct PlugThreshold {
    std::string sensor_id;
    double watts = 0.0;
};

// Contiguous, non-overlapping value ranges for slow continuous sensors
// (temperature and the like). A sample in [low, high) belongs to the range;
// the last range also accepts its upper bound.
struct DiscretizationRanges {
    struct Range {
        double low = 0.0;
        double high = 0.0;
        std::string label;
    };
    std::string sensor_id;
    std::vector<Range> ranges;
};

struct HomeMetadata {
    std::string home_id;
    std::vector<std::string> rooms;
    std::vector<SensorMeta> sensors;
    std::vector<std::string> activities;  // ordered, pairwise distinct
    std::string timezone;                 // IANA zone name, e.g. "Europe/Rome"

    // Dataset-specific label edits applied while loading annotations.
    std::map<std::string, std::string> label_merges;
    std::set<std::string> label_exclusions;

    // Conversion config for continuous sensors.
    std::vector<PlugThreshold> plug_thresholds;
    std::vector<DiscretizationRanges> discretizations;

    const SensorMeta* find_sensor(const std::string& sensor_id) const;
    const PlugThreshold* find_plug_threshold(const std::string& sensor_id) const;
    const DiscretizationRanges* find_discretization(const std::string& sensor_id) const;
    bool has_activity(const std::string& label) const;

    // The sensor behind an event id together with the state property its
    // states carry. Plain ids resolve to their sensor and its configured
    // state property. Range discretization emits events under derived ids of
    // the form "<sensor_id>:<range_label>"; those resolve to the base sensor
    // with the range label as state property. Unknown ids yield a null
    // sensor pointer.
    struct EventSource {
        const SensorMeta* sensor = nullptr;
        std::string sigma;
    };
    EventSource resolve_event_sensor(const std::string& event_sensor_id) const;

    // Enforces the structural invariants (unique sensor ids, known rooms,
    // distinct non-empty activities, non-empty phrase templates).
    void validate() const;
};

// A timestamped activation or deactivation of one sensor.
struct SensorEvent {
    EpochSeconds t = 0.0;
    std::string sensor_id;
    Edge edge = Edge::on;

    bool operator==(const SensorEvent&) const = default;
};

// One continuous-sensor reading.
struct Sample {
    EpochSeconds t = 0.0;
    double value = 0.0;
};

// An interval during which a state property holds.
struct SensorState {
    std::string sigma;  // state property, taken from sensor metadata
    std::string sensor_id;
    EpochSeconds t_s = 0.0;
    EpochSeconds t_e = 0.0;
    bool truncated = false;  // closed artificially at the stream boundary

    bool operator==(const SensorState&) const = default;
};

// Ground-truth activity interval.
struct ActivityAnnotation {
    std::string label;
    EpochSeconds start = 0.0;
    EpochSeconds end = 0.0;
};

// How a state interval relates to a window [t, t+tau].
enum class Category {
    inner,                         // t_s >= t and t_e <= t+tau
    already_active,                // t_s <  t and t_e <= t+tau
    persistent,                    // t_s >= t and t_e >  t+tau
    already_active_and_persistent  // t_s <  t and t_e >  t+tau
};

struct CategorizedState {
    SensorState state;
    Category category = Category::inner;
};

// A [t, t+tau] slice of the state stream with its associated states.
struct Window {
    EpochSeconds t = 0.0;
    double tau = 0.0;
    std::vector<CategorizedState> states;
    std::optional<std::string> truth;

    bool empty() const { return states.empty(); }
    EpochSeconds end() const { return t + tau; }
};

// Natural-language rendering of a window.
struct WindowText {
    std::string text;
    EpochSeconds window_start = 0.0;
    std::vector<std::string> rooms_visited;  // order of first state onset per room
};

// Fixed-dimension vector representation of a text.
struct Embedding {
    std::vector<double> values;

    std::size_t dim() const { return values.size(); }
    bool operator==(const Embedding&) const = default;
};

// A labeled window text, member of the example pool.
struct PoolExample {
    std::string text;
    std::string label;
    Embedding embedding;
};

struct ExamplePool {
    std::vector<PoolExample> examples;
    std::string embed_model_tag;

    bool empty() const { return examples.empty(); }
    std::size_t size() const { return examples.size(); }
};

// One recognized window, persisted for audit and re-scoring.
struct Prediction {
    EpochSeconds window_start = 0.0;
    std::string label;
    std::string raw_output;
    bool via_fallback = false;
    double latency = 0.0;
};

// Collector for non-fatal anomalies found while processing real logs.
struct Diagnostics {
    std::vector<std::string> entries;

    void warn(std::string message) { entries.push_back(std::move(message)); }
    bool empty() const { return entries.empty(); }
    std::size_t size() const { return entries.size(); }
};

}  // namespace adlr
