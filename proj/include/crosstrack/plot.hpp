#pragma once

#include <string>
#include <vector>

#include "crosstrack/digital_map.hpp"
#include "crosstrack/io.hpp"

namespace crosstrack {

// Map overlay: buildings, lane centerlines, intersection outline, the ego
// trajectory in black and one colored polyline per track id.
std::string render_map_svg(const DigitalMap& map, const std::vector<TrackRecord>& tracks,
                           const std::vector<EgoPose>& ego);

// Speed against trajectory age, one polyline per track id.
std::string render_velocity_svg(const std::vector<TrackRecord>& tracks);

void emit_plots(const std::string& out_dir, const DigitalMap& map,
                const std::vector<TrackRecord>& tracks, const std::vector<EgoPose>& ego);

}  // namespace crosstrack
