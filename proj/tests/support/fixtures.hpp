#pragma once

// Shared test fixtures. The home uses UTC so time-of-day wording never
// depends on the machine the tests run on.

#include <string>
#include <utility>
#include <vector>

#include "adlr/types.hpp"

namespace testsupport {

inline adlr::SensorMeta make_sensor(std::string id, std::string room, adlr::SensorKind kind,
                                    std::string property, adlr::PhraseTemplates phrases) {
    adlr::SensorMeta s;
    s.sensor_id = std::move(id);
    s.room = std::move(room);
    s.kind = kind;
    s.state_property = std::move(property);
    s.phrases = std::move(phrases);
    return s;
}

inline adlr::HomeMetadata make_test_home() {
    adlr::HomeMetadata meta;
    meta.home_id = "test-home";
    meta.timezone = "UTC";
    meta.rooms = {"kitchen", "living room", "bathroom"};
    meta.activities = {"cooking", "watching TV", "showering"};
    meta.sensors.push_back(make_sensor(
        "fridge", "kitchen", adlr::SensorKind::magnetic, "FridgeDoorOpen",
        {"they open the fridge door. After {duration}, they close the fridge door",
         "they open the fridge door",
         "after {duration}, they close the fridge door"}));
    meta.sensors.push_back(make_sensor(
        "stove", "kitchen", adlr::SensorKind::plug, "StoveOn",
        {"the subject turned on the stove and turned it off after {duration}",
         "the subject turned on the stove",
         "after {duration} the subject turned off the stove"}));
    meta.sensors.push_back(make_sensor(
        "couch", "living room", adlr::SensorKind::pressure, "SittingOnCouch",
        {"they sit on the couch for {duration}",
         "they sit on the couch",
         "after {duration}, they get up from the couch"}));
    meta.sensors.push_back(make_sensor(
        "shower", "bathroom", adlr::SensorKind::motion, "ShowerRunning",
        {"the shower runs for {duration}",
         "they turn on the shower",
         "after {duration}, the shower stops"}));
    meta.validate();
    return meta;
}

inline adlr::SensorState make_state(std::string sensor_id, std::string sigma, double t_s,
                                    double t_e) {
    adlr::SensorState st;
    st.sensor_id = std::move(sensor_id);
    st.sigma = std::move(sigma);
    st.t_s = t_s;
    st.t_e = t_e;
    return st;
}

// 2024-06-03T09:00:00Z - a weekday morning, hour 9 in UTC.
inline constexpr double kMorningEpoch = 1717405200.0;

}  // namespace testsupport
