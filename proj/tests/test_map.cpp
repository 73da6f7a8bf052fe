#include <doctest.h>

#include "crosstrack/digital_map.hpp"
#include "crosstrack/sim.hpp"

using namespace crosstrack;

namespace {

DigitalMap intersection_map() { return build_intersection(nominal_scenario(1)); }

}  // namespace

TEST_CASE("point in polygon handles interior, exterior and holes-free shapes") {
    const Polygon square = {{0, 0}, {10, 0}, {10, 10}, {0, 10}};
    CHECK(point_in_polygon({5, 5}, square));
    CHECK(point_in_polygon({1, 9}, square));
    CHECK(!point_in_polygon({-1, 5}, square));
    CHECK(!point_in_polygon({5, 11}, square));

    const Polygon triangle = {{0, 0}, {0, 10}, {10, 5}};
    CHECK(point_in_polygon({2, 5}, triangle));
    CHECK(!point_in_polygon({8, 1}, triangle));
}

TEST_CASE("polyline projection returns distance, side and direction") {
    const Polyline north_line = {{-100, 0}, {100, 0}};
    const PolylineProjection p = project_to_polyline({10.0, 3.0}, north_line);
    CHECK(p.distance == doctest::Approx(3.0));
    CHECK(p.signed_right == doctest::Approx(3.0));  // east of a northbound line
    CHECK(p.direction.theta == doctest::Approx(0.0));
    CHECK(p.closest.north == doctest::Approx(10.0));

    const PolylineProjection left = project_to_polyline({10.0, -2.0}, north_line);
    CHECK(left.signed_right == doctest::Approx(-2.0));

    // clamped to the segment end
    const PolylineProjection past = project_to_polyline({150.0, 4.0}, north_line);
    CHECK(past.closest.north == doctest::Approx(100.0));
    CHECK(past.distance == doctest::Approx(std::hypot(50.0, 4.0)));
}

TEST_CASE("intersection construction counts") {
    const DigitalMap map = intersection_map();
    CHECK(map.buildings.size() == 4);
    CHECK(map.lanes.size() == 8);
    CHECK(map.intersection_polygon.size() == 4);
}

TEST_CASE("lane centerlines are parallel to their road axis") {
    const DigitalMap map = intersection_map();
    for (const Lane& lane : map.lanes) {
        REQUIRE(lane.centerline.size() == 2);
        const MapPoint a = lane.centerline.front();
        const MapPoint b = lane.centerline.back();
        const bool north_south = std::abs(a.east - b.east) < 1e-9;
        const bool east_west = std::abs(a.north - b.north) < 1e-9;
        CHECK((north_south || east_west));
    }
}

TEST_CASE("buildings stay clear of every lane corridor") {
    const DigitalMap map = intersection_map();
    for (const Polygon& b : map.buildings) {
        for (const MapPoint& corner : b) {
            const auto lane = containing_lane(map, corner);
            CHECK(!lane.has_value());
        }
        // sampled edge points too
        for (size_t i = 0; i < b.size(); ++i) {
            const MapPoint p0 = b[i];
            const MapPoint p1 = b[(i + 1) % b.size()];
            for (int k = 1; k < 10; ++k) {
                const double t = k / 10.0;
                const MapPoint p{p0.north + t * (p1.north - p0.north),
                                 p0.east + t * (p1.east - p0.east)};
                CHECK(!containing_lane(map, p).has_value());
            }
        }
    }
}

TEST_CASE("lane width below two meters is rejected") {
    ScenarioConfig cfg = nominal_scenario(1);
    cfg.layout.lane_width = 1.5;
    CHECK_THROWS_AS(build_intersection(cfg), InvalidConfig);
}

TEST_CASE("assign_lane: centerline, tie-break, intersection, offroad") {
    const DigitalMap map = intersection_map();

    // on lane 1's centerline, south of the intersection
    const LaneAssignment on_lane = assign_lane({-30.0, 1.75}, map);
    CHECK(on_lane.kind == LaneAssignmentKind::kLane);
    CHECK(on_lane.lane_id == 1);

    // equidistant between lanes 1 and 2 resolves to the lower id
    const LaneAssignment tie = assign_lane({-30.0, 3.5}, map);
    CHECK(tie.kind == LaneAssignmentKind::kLane);
    CHECK(tie.lane_id == 1);

    // inside the intersection polygon
    const LaneAssignment inter = assign_lane({0.0, 0.0}, map);
    CHECK(inter.kind == LaneAssignmentKind::kIntersection);

    // far from any lane
    const LaneAssignment off = assign_lane({-30.0, 60.0}, map);
    CHECK(off.kind == LaneAssignmentKind::kOffRoad);
}

TEST_CASE("building edge sampling respects the spacing") {
    const DigitalMap map = intersection_map();
    const auto pts = sample_building_points(map, 0.25);
    CHECK(pts.size() > 1000);
    // every sample lies on some building edge (distance 0 to the polygon outline)
    for (size_t i = 0; i < pts.size(); i += 97) {
        double best = 1e18;
        for (const Polygon& poly : map.buildings) {
            Polyline closed(poly.begin(), poly.end());
            closed.push_back(poly.front());
            best = std::min(best, project_to_polyline(pts[i], closed).distance);
        }
        CHECK(best < 1e-9);
    }
}

TEST_CASE("map round-trips through its text format") {
    const DigitalMap map = intersection_map();
    const std::string text = serialize_map(map);
    const DigitalMap parsed = parse_map(text);

    REQUIRE(parsed.buildings.size() == map.buildings.size());
    REQUIRE(parsed.lanes.size() == map.lanes.size());
    for (size_t i = 0; i < map.lanes.size(); ++i) {
        CHECK(parsed.lanes[i].id == map.lanes[i].id);
        CHECK(parsed.lanes[i].width == doctest::Approx(map.lanes[i].width));
        REQUIRE(parsed.lanes[i].centerline.size() == map.lanes[i].centerline.size());
        for (size_t k = 0; k < map.lanes[i].centerline.size(); ++k) {
            CHECK(parsed.lanes[i].centerline[k].north ==
                  doctest::Approx(map.lanes[i].centerline[k].north).epsilon(1e-3));
        }
    }
    CHECK(parsed.intersection_polygon.size() == map.intersection_polygon.size());
}

TEST_CASE("map parser rejects malformed input") {
    CHECK_THROWS_AS(parse_map("building\n1 2\n2 3\nend\n"), ParseError);   // <3 vertices
    CHECK_THROWS_AS(parse_map("lane 1\n0 0\n1 1\nend\n"), ParseError);     // missing width
    CHECK_THROWS_AS(parse_map("0 0\n"), ParseError);                       // vertex outside section
    CHECK_THROWS_AS(parse_map("building\n0 0\n1 0\n1 1\n"), ParseError);   // unterminated
    CHECK_THROWS_AS(parse_map("end\n"), ParseError);                       // stray end
}

TEST_CASE("lane assignment strings round-trip") {
    const LaneAssignment lane{LaneAssignmentKind::kLane, 7};
    CHECK(lane_assignment_from_string(to_string(lane)) == lane);
    const LaneAssignment inter{LaneAssignmentKind::kIntersection, 0};
    CHECK(lane_assignment_from_string(to_string(inter)) == inter);
    const LaneAssignment off{LaneAssignmentKind::kOffRoad, 0};
    CHECK(lane_assignment_from_string(to_string(off)) == off);
    CHECK_THROWS_AS(lane_assignment_from_string("sidewalk"), ParseError);
}
