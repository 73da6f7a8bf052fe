#include "crosstrack/digital_map.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "crosstrack/errors.hpp"

namespace crosstrack {

bool point_in_polygon(MapPoint p, const Polygon& poly) {
    const size_t n = poly.size();
    if (n < 3) return false;
    bool inside = false;
    for (size_t i = 0, j = n - 1; i < n; j = i++) {
        const MapPoint& a = poly[i];
        const MapPoint& b = poly[j];
        const bool crosses = (a.east > p.east) != (b.east > p.east);
        if (!crosses) continue;
        const double t = (p.east - a.east) / (b.east - a.east);
        const double north_at = a.north + t * (b.north - a.north);
        if (p.north < north_at) inside = !inside;
    }
    return inside;
}

PolylineProjection project_to_polyline(MapPoint p, const Polyline& line) {
    PolylineProjection best;
    best.distance = std::numeric_limits<double>::infinity();
    double arc_base = 0.0;
    for (size_t i = 0; i + 1 < line.size(); ++i) {
        const MapPoint a = line[i];
        const MapPoint b = line[i + 1];
        const double seg_n = b.north - a.north;
        const double seg_e = b.east - a.east;
        const double len2 = seg_n * seg_n + seg_e * seg_e;
        if (len2 <= 0.0) continue;
        double t = ((p.north - a.north) * seg_n + (p.east - a.east) * seg_e) / len2;
        t = std::clamp(t, 0.0, 1.0);
        const MapPoint q{a.north + t * seg_n, a.east + t * seg_e};
        const double d = distance(p, q);
        if (d < best.distance) {
            best.distance = d;
            best.closest = q;
            best.direction = Heading(std::atan2(seg_e, seg_n));
            const MapPoint right = heading_right(best.direction);
            best.signed_right = (p.north - q.north) * right.north + (p.east - q.east) * right.east;
            best.arc_length = arc_base + t * std::sqrt(len2);
        }
        arc_base += std::sqrt(len2);
    }
    return best;
}

std::optional<LaneQuery> nearest_lane(const DigitalMap& map, MapPoint p) {
    std::optional<LaneQuery> best;
    for (const Lane& lane : map.lanes) {
        if (lane.centerline.size() < 2) continue;
        const PolylineProjection proj = project_to_polyline(p, lane.centerline);
        if (!best || proj.distance < best->distance_to_centerline ||
            (proj.distance == best->distance_to_centerline && lane.id < best->lane_id)) {
            best = LaneQuery{lane.id, proj.distance, proj.signed_right, proj.direction, lane.width};
        }
    }
    return best;
}

std::optional<LaneQuery> containing_lane(const DigitalMap& map, MapPoint p) {
    std::optional<LaneQuery> best;
    for (const Lane& lane : map.lanes) {
        if (lane.centerline.size() < 2) continue;
        const PolylineProjection proj = project_to_polyline(p, lane.centerline);
        if (proj.distance > 0.5 * lane.width) continue;
        if (!best || proj.distance < best->distance_to_centerline ||
            (proj.distance == best->distance_to_centerline && lane.id < best->lane_id)) {
            best = LaneQuery{lane.id, proj.distance, proj.signed_right, proj.direction, lane.width};
        }
    }
    return best;
}

std::string to_string(const LaneAssignment& a) {
    switch (a.kind) {
        case LaneAssignmentKind::kLane: return std::to_string(a.lane_id);
        case LaneAssignmentKind::kIntersection: return "intersection";
        case LaneAssignmentKind::kOffRoad: return "offroad";
    }
    return "offroad";
}

LaneAssignment lane_assignment_from_string(const std::string& s) {
    if (s == "intersection") return {LaneAssignmentKind::kIntersection, 0};
    if (s == "offroad") return {LaneAssignmentKind::kOffRoad, 0};
    try {
        return {LaneAssignmentKind::kLane, std::stoi(s)};
    } catch (const std::exception&) {
        throw ParseError("bad lane assignment: " + s);
    }
}

LaneAssignment assign_lane(MapPoint p, const DigitalMap& map) {
    if (point_in_polygon(p, map.intersection_polygon))
        return {LaneAssignmentKind::kIntersection, 0};
    const auto lane = containing_lane(map, p);
    if (lane) return {LaneAssignmentKind::kLane, lane->lane_id};
    return {LaneAssignmentKind::kOffRoad, 0};
}

std::vector<MapPoint> sample_building_points(const DigitalMap& map, double spacing) {
    std::vector<MapPoint> points;
    for (const Polygon& poly : map.buildings) {
        const size_t n = poly.size();
        for (size_t i = 0; i < n; ++i) {
            const MapPoint a = poly[i];
            const MapPoint b = poly[(i + 1) % n];
            const double len = distance(a, b);
            const int steps = std::max(1, static_cast<int>(std::floor(len / spacing)));
            for (int k = 0; k < steps; ++k) {
                const double t = static_cast<double>(k) / steps;
                points.push_back({a.north + t * (b.north - a.north), a.east + t * (b.east - a.east)});
            }
        }
    }
    return points;
}

namespace {

std::vector<std::string> tokenize(const std::string& line) {
    std::vector<std::string> toks;
    std::istringstream is(line);
    std::string t;
    while (is >> t) toks.push_back(t);
    return toks;
}

}  // namespace

DigitalMap parse_map(const std::string& text) {
    DigitalMap map;
    std::istringstream is(text);
    std::string line;
    enum class Section { kNone, kBuilding, kLane, kIntersection } section = Section::kNone;
    Polygon current_poly;
    Lane current_lane;
    int line_no = 0;

    auto finish = [&](int at_line) {
        switch (section) {
            case Section::kBuilding:
                if (current_poly.size() < 3)
                    throw ParseError("map: building with <3 vertices near line " +
                                     std::to_string(at_line));
                map.buildings.push_back(current_poly);
                break;
            case Section::kLane:
                if (current_poly.size() < 2)
                    throw ParseError("map: lane with <2 vertices near line " +
                                     std::to_string(at_line));
                current_lane.centerline = current_poly;
                map.lanes.push_back(current_lane);
                break;
            case Section::kIntersection:
                if (current_poly.size() < 3)
                    throw ParseError("map: intersection with <3 vertices near line " +
                                     std::to_string(at_line));
                map.intersection_polygon = current_poly;
                break;
            case Section::kNone:
                break;
        }
        current_poly.clear();
        section = Section::kNone;
    };

    while (std::getline(is, line)) {
        ++line_no;
        const size_t hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        const std::vector<std::string> toks = tokenize(line);
        if (toks.empty()) continue;
        if (toks[0] == "building") {
            if (section != Section::kNone) throw ParseError("map: nested section at line " + std::to_string(line_no));
            section = Section::kBuilding;
        } else if (toks[0] == "lane") {
            if (section != Section::kNone) throw ParseError("map: nested section at line " + std::to_string(line_no));
            if (toks.size() != 3) throw ParseError("map: lane needs id and width at line " + std::to_string(line_no));
            section = Section::kLane;
            current_lane = Lane{};
            current_lane.id = std::stoi(toks[1]);
            current_lane.width = std::stod(toks[2]);
        } else if (toks[0] == "intersection") {
            if (section != Section::kNone) throw ParseError("map: nested section at line " + std::to_string(line_no));
            section = Section::kIntersection;
        } else if (toks[0] == "end") {
            if (section == Section::kNone) throw ParseError("map: stray end at line " + std::to_string(line_no));
            finish(line_no);
        } else {
            if (section == Section::kNone)
                throw ParseError("map: vertex outside a section at line " + std::to_string(line_no));
            if (toks.size() != 2)
                throw ParseError("map: expected 'north east' at line " + std::to_string(line_no));
            current_poly.push_back({std::stod(toks[0]), std::stod(toks[1])});
        }
    }
    if (section != Section::kNone) throw ParseError("map: unterminated section at end of file");
    return map;
}

DigitalMap load_map(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw MissingLog("cannot open map file: " + path);
    std::ostringstream buf;
    buf << is.rdbuf();
    return parse_map(buf.str());
}

std::string serialize_map(const DigitalMap& map) {
    std::ostringstream os;
    char buf[80];
    auto put = [&](MapPoint p) {
        std::snprintf(buf, sizeof(buf), "  %.3f %.3f\n", p.north, p.east);
        os << buf;
    };
    os << "# digital map: building footprints, lane centerlines, intersection polygon\n";
    for (const Polygon& b : map.buildings) {
        os << "building\n";
        for (MapPoint p : b) put(p);
        os << "end\n";
    }
    for (const Lane& l : map.lanes) {
        std::snprintf(buf, sizeof(buf), "lane %d %.3f\n", l.id, l.width);
        os << buf;
        for (MapPoint p : l.centerline) put(p);
        os << "end\n";
    }
    if (map.intersection_polygon.size() >= 3) {
        os << "intersection\n";
        for (MapPoint p : map.intersection_polygon) put(p);
        os << "end\n";
    }
    return os.str();
}

void save_map(const std::string& path, const DigitalMap& map) {
    std::ofstream os(path);
    if (!os) throw MissingLog("cannot open map file for write: " + path);
    os << serialize_map(map);
}

}  // namespace crosstrack
