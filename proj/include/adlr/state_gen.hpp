#pragma once

#include <vector>

#include "adlr/types.hpp"

namespace adlr {

// Converts the sorted binary event stream into sensor states. Each ON is
// matched with the next OFF of the same sensor; an ON still open when the
// stream ends becomes a state truncated at the last event time; orphan OFFs
// and superseded ONs are skipped and reported through `diag`. Output is
// sorted by t_s.
std::vector<SensorState> pair_events(const std::vector<SensorEvent>& events,
                                     const HomeMetadata& meta, Diagnostics* diag = nullptr);

// Turns sorted continuous readings into ON/OFF events around a power
// threshold: ON at the first sample at-or-above after being below, OFF at
// the first sample below after being at-or-above.
std::vector<SensorEvent> threshold_continuous(const std::vector<Sample>& samples,
                                              const PlugThreshold& cfg);

// Turns sorted readings of a slowly varying sensor into ON/OFF events of its
// range labels, one derived binary sensor "<sensor_id>:<label>" per range.
// The first sample activates its range; when consecutive samples land in
// different ranges, the old label deactivates at the earlier sample's time
// and the new one activates at the later sample's time. A reading outside
// every range throws ConfigError.
std::vector<SensorEvent> discretize_ranges(const std::vector<Sample>& samples,
                                           const DiscretizationRanges& cfg);

// Inverse of pair_events for well-formed state lists; used by callers that
// need to re-emit states as a canonical event stream.
std::vector<SensorEvent> states_to_events(const std::vector<SensorState>& states);

}  // namespace adlr
