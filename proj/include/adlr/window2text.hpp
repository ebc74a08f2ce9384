#pragma once

#include <string>
#include <vector>

#include "adlr/types.hpp"

namespace adlr {

// "16 seconds" below two minutes, "3 minutes" from there on; counts are
// rounded to the nearest integer.
std::string duration_phrase(double seconds);

// Coarse part-of-day name for a local hour: early morning 05-08, morning
// 08-11, noon 11-14, afternoon 14-18, evening 18-23, night otherwise.
std::string time_of_day_phrase(int hour);

// "FridgeDoorOpen" -> "fridge door open".
std::string humanize_property(const std::string& property);

// Substitutes {duration}, {room} and {state} in a phrase template.
std::string render_template(const std::string& tpl, double duration_seconds,
                            const std::string& room, const std::string& sigma);

// Renders one window as the narrative handed to the language model: when and
// how long, where the subject is, what was already going on, then the flow
// of interactions room by room.
WindowText render_window(const Window& window, const HomeMetadata& meta);

std::vector<WindowText> render_windows(const std::vector<Window>& windows,
                                       const HomeMetadata& meta);

}  // namespace adlr
