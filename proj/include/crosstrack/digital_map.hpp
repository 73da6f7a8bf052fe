#pragma once

#include <optional>
#include <string>
#include <vector>

#include "crosstrack/geometry.hpp"

namespace crosstrack {

using Polygon = std::vector<MapPoint>;    // closed, last edge implied
using Polyline = std::vector<MapPoint>;

struct Lane {
    int id = 0;
    Polyline centerline;
    double width = 3.5;
};

struct DigitalMap {
    std::vector<Polygon> buildings;
    std::vector<Lane> lanes;
    Polygon intersection_polygon;
};

// Even-odd point-in-polygon test.
bool point_in_polygon(MapPoint p, const Polygon& poly);

// Closest point on a polyline plus the local travel direction there.
struct PolylineProjection {
    MapPoint closest;
    double distance = 0.0;       // unsigned perpendicular distance
    double signed_right = 0.0;   // offset to the right of travel (signed)
    Heading direction;           // bearing of the containing segment
    double arc_length = 0.0;     // distance along the polyline to the projection
};
PolylineProjection project_to_polyline(MapPoint p, const Polyline& line);

struct LaneQuery {
    int lane_id = 0;
    double distance_to_centerline = 0.0;
    double signed_right = 0.0;   // + toward the right lane line
    Heading direction;
    double width = 3.5;
};

// Nearest lane by perpendicular centerline distance; ties by lower id.
std::optional<LaneQuery> nearest_lane(const DigitalMap& map, MapPoint p);

// Lane corridor membership: within half the lane width of the centerline.
std::optional<LaneQuery> containing_lane(const DigitalMap& map, MapPoint p);

enum class LaneAssignmentKind { kLane, kIntersection, kOffRoad };

struct LaneAssignment {
    LaneAssignmentKind kind = LaneAssignmentKind::kOffRoad;
    int lane_id = 0;  // valid when kind == kLane

    bool operator==(const LaneAssignment&) const = default;
};

std::string to_string(const LaneAssignment& a);
LaneAssignment lane_assignment_from_string(const std::string& s);

// Intersection polygon first, then nearest lane within half its width,
// otherwise off-road. Equidistant lanes resolve to the lower id.
LaneAssignment assign_lane(MapPoint p, const DigitalMap& map);

// Building footprint outlines sampled at a fixed edge spacing; input for
// the NDT grid build.
std::vector<MapPoint> sample_building_points(const DigitalMap& map, double spacing = 0.25);

// Text format with sections "building", "lane <id> <width>" and
// "intersection", each followed by one "north east" vertex per line and a
// closing "end". '#' starts a comment. See docs/formats.md.
DigitalMap parse_map(const std::string& text);
DigitalMap load_map(const std::string& path);
std::string serialize_map(const DigitalMap& map);
void save_map(const std::string& path, const DigitalMap& map);

}  // namespace crosstrack
