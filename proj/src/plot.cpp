#include "crosstrack/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

#include "crosstrack/errors.hpp"

namespace fs = std::filesystem;

namespace crosstrack {

namespace {

const char* kPalette[] = {"#d62728", "#1f77b4", "#2ca02c", "#ff7f0e", "#9467bd",
                          "#8c564b", "#e377c2", "#17becf", "#bcbd22", "#7f7f7f"};

std::string coord(double x) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", x);
    return buf;
}

struct Bounds {
    double min_x = std::numeric_limits<double>::infinity();
    double max_x = -std::numeric_limits<double>::infinity();
    double min_y = std::numeric_limits<double>::infinity();
    double max_y = -std::numeric_limits<double>::infinity();
    void include(double x, double y) {
        min_x = std::min(min_x, x);
        max_x = std::max(max_x, x);
        min_y = std::min(min_y, y);
        max_y = std::max(max_y, y);
    }
    bool valid() const { return min_x <= max_x && min_y <= max_y; }
};

}  // namespace

std::string render_map_svg(const DigitalMap& map, const std::vector<TrackRecord>& tracks,
                           const std::vector<EgoPose>& ego) {
    // map east -> svg x, map north -> svg -y (north points up)
    Bounds b;
    for (const Polygon& poly : map.buildings)
        for (MapPoint p : poly) b.include(p.east, -p.north);
    for (const Lane& lane : map.lanes)
        for (MapPoint p : lane.centerline) b.include(p.east, -p.north);
    for (const TrackRecord& r : tracks) b.include(r.position.east, -r.position.north);
    for (const EgoPose& p : ego) b.include(p.position.east, -p.position.north);
    if (!b.valid()) b = Bounds{0, 1, 0, 1};

    const double margin = 8.0;
    const double w = b.max_x - b.min_x + 2 * margin;
    const double h = b.max_y - b.min_y + 2 * margin;
    auto sx = [&](double east) { return east - b.min_x + margin; };
    auto sy = [&](double north_neg) { return north_neg - b.min_y + margin; };

    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 " << coord(w) << ' '
       << coord(h) << "\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"#fafafa\"/>\n";

    for (const Polygon& poly : map.buildings) {
        os << "<polygon fill=\"#c8c8c8\" stroke=\"#888\" stroke-width=\"0.3\" points=\"";
        for (MapPoint p : poly) os << coord(sx(p.east)) << ',' << coord(sy(-p.north)) << ' ';
        os << "\"/>\n";
    }
    if (map.intersection_polygon.size() >= 3) {
        os << "<polygon fill=\"none\" stroke=\"#bbbb66\" stroke-width=\"0.4\" "
              "stroke-dasharray=\"2,1.5\" points=\"";
        for (MapPoint p : map.intersection_polygon)
            os << coord(sx(p.east)) << ',' << coord(sy(-p.north)) << ' ';
        os << "\"/>\n";
    }
    for (const Lane& lane : map.lanes) {
        os << "<polyline fill=\"none\" stroke=\"#999\" stroke-width=\"0.25\" "
              "stroke-dasharray=\"3,2\" points=\"";
        for (MapPoint p : lane.centerline)
            os << coord(sx(p.east)) << ',' << coord(sy(-p.north)) << ' ';
        os << "\"/>\n";
    }

    if (!ego.empty()) {
        os << "<polyline fill=\"none\" stroke=\"black\" stroke-width=\"0.8\" points=\"";
        for (const EgoPose& p : ego)
            os << coord(sx(p.position.east)) << ',' << coord(sy(-p.position.north)) << ' ';
        os << "\"/>\n";
    }

    std::map<int, std::vector<const TrackRecord*>> by_id;
    for (const TrackRecord& r : tracks) by_id[r.track_id].push_back(&r);
    int color_idx = 0;
    for (auto& [id, recs] : by_id) {
        std::sort(recs.begin(), recs.end(), [](const TrackRecord* a, const TrackRecord* b) {
            return a->timestamp < b->timestamp;
        });
        const char* color = kPalette[color_idx++ % (sizeof(kPalette) / sizeof(kPalette[0]))];
        os << "<polyline fill=\"none\" stroke=\"" << color
           << "\" stroke-width=\"0.6\" data-track-id=\"" << id << "\" points=\"";
        for (const TrackRecord* r : recs)
            os << coord(sx(r->position.east)) << ',' << coord(sy(-r->position.north)) << ' ';
        os << "\"/>\n";
    }
    os << "</svg>\n";
    return os.str();
}

std::string render_velocity_svg(const std::vector<TrackRecord>& tracks) {
    std::map<int, std::vector<const TrackRecord*>> by_id;
    for (const TrackRecord& r : tracks) by_id[r.track_id].push_back(&r);

    double max_age = 1.0, max_speed = 1.0;
    for (auto& [id, recs] : by_id) {
        std::sort(recs.begin(), recs.end(), [](const TrackRecord* a, const TrackRecord* b) {
            return a->timestamp < b->timestamp;
        });
        const double t0 = recs.front()->timestamp;
        for (const TrackRecord* r : recs) {
            max_age = std::max(max_age, r->timestamp - t0);
            max_speed = std::max(max_speed, r->speed);
        }
    }

    const double w = 420.0, h = 280.0, pad = 40.0;
    auto sx = [&](double age) { return pad + (w - 2 * pad) * age / max_age; };
    auto sy = [&](double speed) { return h - pad - (h - 2 * pad) * speed / max_speed; };

    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 " << coord(w) << ' '
       << coord(h) << "\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    os << "<line x1=\"" << coord(pad) << "\" y1=\"" << coord(h - pad) << "\" x2=\"" << coord(w - pad)
       << "\" y2=\"" << coord(h - pad) << "\" stroke=\"black\" stroke-width=\"1\"/>\n";
    os << "<line x1=\"" << coord(pad) << "\" y1=\"" << coord(pad) << "\" x2=\"" << coord(pad)
       << "\" y2=\"" << coord(h - pad) << "\" stroke=\"black\" stroke-width=\"1\"/>\n";
    os << "<text x=\"" << coord(w / 2) << "\" y=\"" << coord(h - 8)
       << "\" font-size=\"11\" text-anchor=\"middle\">trajectory age [s]</text>\n";
    os << "<text x=\"12\" y=\"" << coord(h / 2)
       << "\" font-size=\"11\" text-anchor=\"middle\" transform=\"rotate(-90 12 "
       << coord(h / 2) << ")\">speed [m/s]</text>\n";

    int color_idx = 0;
    for (const auto& [id, recs] : by_id) {
        const double t0 = recs.front()->timestamp;
        const char* color = kPalette[color_idx++ % (sizeof(kPalette) / sizeof(kPalette[0]))];
        os << "<polyline fill=\"none\" stroke=\"" << color
           << "\" stroke-width=\"1.2\" data-track-id=\"" << id << "\" points=\"";
        for (const TrackRecord* r : recs)
            os << coord(sx(r->timestamp - t0)) << ',' << coord(sy(r->speed)) << ' ';
        os << "\"/>\n";
    }
    os << "</svg>\n";
    return os.str();
}

void emit_plots(const std::string& out_dir, const DigitalMap& map,
                const std::vector<TrackRecord>& tracks, const std::vector<EgoPose>& ego) {
    fs::create_directories(out_dir);
    {
        std::ofstream os((fs::path(out_dir) / "map_trajectories.svg").string());
        if (!os) throw MissingLog("cannot write map plot in " + out_dir);
        os << render_map_svg(map, tracks, ego);
    }
    {
        std::ofstream os((fs::path(out_dir) / "velocity_profiles.svg").string());
        if (!os) throw MissingLog("cannot write velocity plot in " + out_dir);
        os << render_velocity_svg(tracks);
    }
}

}  // namespace crosstrack
