#include "crosstrack/sim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "crosstrack/errors.hpp"

namespace crosstrack {

double PathSpec::speed_at(double t) const {
    for (const SpeedSegment& seg : speed_profile)
        if (t < seg.until_s) return seg.speed;
    return speed_profile.empty() ? 0.0 : speed_profile.back().speed;
}

void PathSpec::pose_at(double t, MapPoint& position, Heading& heading, bool& done) const {
    done = false;
    if (waypoints.size() < 2) {
        position = waypoints.empty() ? MapPoint{} : waypoints.front();
        heading = Heading(0.0);
        done = true;
        return;
    }

    // arc length travelled under the piecewise-constant speed profile
    double arc = 0.0;
    double t_cursor = 0.0;
    for (const SpeedSegment& seg : speed_profile) {
        const double seg_end = std::min(t, seg.until_s);
        if (seg_end > t_cursor) arc += (seg_end - t_cursor) * seg.speed;
        t_cursor = std::max(t_cursor, seg_end);
        if (t_cursor >= t) break;
    }
    if (t_cursor < t && !speed_profile.empty()) arc += (t - t_cursor) * speed_profile.back().speed;

    for (size_t i = 0; i + 1 < waypoints.size(); ++i) {
        const MapPoint a = waypoints[i];
        const MapPoint b = waypoints[i + 1];
        const double len = distance(a, b);
        if (len <= 0.0) continue;
        const Heading bearing(std::atan2(b.east - a.east, b.north - a.north));
        if (arc <= len) {
            const double f = arc / len;
            position = {a.north + f * (b.north - a.north), a.east + f * (b.east - a.east)};
            heading = bearing;
            return;
        }
        arc -= len;
        position = b;
        heading = bearing;
    }
    done = true;  // ran off the end; position/heading hold the final pose
}

DigitalMap build_intersection(const ScenarioConfig& cfg) {
    if (!cfg.valid()) throw InvalidConfig("build_intersection: invalid scenario config");
    const IntersectionLayout& lay = cfg.layout;
    if (!(lay.lane_width > 2.0)) throw InvalidConfig("build_intersection: lane width must exceed 2 m");

    DigitalMap map;
    const double w = lay.lane_width;
    const double ext = lay.road_extent;
    const double half_road = 2.0 * w;               // two lanes per direction
    const double inner = 0.5 * w;                   // inner lane centerline offset
    const double outer = 1.5 * w;                   // outer lane centerline offset

    auto lane = [&](int id, MapPoint a, MapPoint b) {
        map.lanes.push_back({id, {a, b}, w});
    };
    // north-south road: northbound east side, southbound west side
    lane(1, {-ext, inner}, {ext, inner});
    lane(2, {-ext, outer}, {ext, outer});
    lane(3, {ext, -inner}, {-ext, -inner});
    lane(4, {ext, -outer}, {-ext, -outer});
    // east-west road: eastbound south side, westbound north side
    lane(5, {-inner, -ext}, {-inner, ext});
    lane(6, {-outer, -ext}, {-outer, ext});
    lane(7, {inner, ext}, {inner, -ext});
    lane(8, {outer, ext}, {outer, -ext});

    const double b0 = half_road + lay.sidewalk;     // inner building corner
    const double b1 = b0 + lay.block_size;
    auto block = [&](double n_sign, double e_sign) {
        Polygon poly = {{n_sign * b0, e_sign * b0},
                        {n_sign * b1, e_sign * b0},
                        {n_sign * b1, e_sign * b1},
                        {n_sign * b0, e_sign * b1}};
        map.buildings.push_back(poly);
    };
    block(1, 1);
    block(1, -1);
    block(-1, 1);
    block(-1, -1);

    map.intersection_polygon = {{-half_road, -half_road},
                                {half_road, -half_road},
                                {half_road, half_road},
                                {-half_road, half_road}};
    return map;
}

namespace {

struct WallSegment {
    MapPoint a, b;      // map frame
    double height;      // m above ground
    uint8_t label;
    int actor_id;       // -1 for static geometry
};

struct ActorState {
    const ActorSpec* spec;
    MapPoint position;
    Heading heading;
    double speed;
    bool alive;
};

double actor_height(SemanticClass c) { return c == SemanticClass::kPedestrian ? 1.7 : 1.6; }

void footprint_walls(const ActorState& actor, std::vector<WallSegment>& out) {
    const SemanticClass cls = actor.spec->label;
    const double half_len = cls == SemanticClass::kPedestrian ? 0.25 : 2.25;
    const double half_wid = cls == SemanticClass::kPedestrian ? 0.25 : 0.9;
    const MapPoint fwd = heading_forward(actor.heading);
    const MapPoint right = heading_right(actor.heading);
    const auto corner = [&](double l, double r) {
        return MapPoint{actor.position.north + l * fwd.north + r * right.north,
                        actor.position.east + l * fwd.east + r * right.east};
    };
    const MapPoint c0 = corner(half_len, half_wid);
    const MapPoint c1 = corner(half_len, -half_wid);
    const MapPoint c2 = corner(-half_len, -half_wid);
    const MapPoint c3 = corner(-half_len, half_wid);
    const uint8_t label = cls == SemanticClass::kPedestrian ? kLabelPedestrian : kLabelVehicle;
    const double h = actor_height(cls);
    const int id = actor.spec->actor_id;
    out.push_back({c0, c1, h, label, id});
    out.push_back({c1, c2, h, label, id});
    out.push_back({c2, c3, h, label, id});
    out.push_back({c3, c0, h, label, id});
}

}  // namespace

Simulator::Simulator(const ScenarioConfig& cfg, const DigitalMap& map) : cfg_(cfg), map_(map) {
    if (!cfg.valid()) throw InvalidConfig("Simulator: invalid scenario config");
    frame_count_ = static_cast<int>(std::floor(cfg.duration_s * cfg.frame_rate));
    Rng master(cfg.seed);
    rng_gnss_ = master.fork(1);
    rng_disp_ = master.fork(2);
    rng_flow_ = master.fork(3);
    rng_lane_ = master.fork(4);
}

SensorFrame Simulator::next_frame() {
    const double dt = 1.0 / cfg_.frame_rate;
    const double t = frame_index_ * dt;
    const CameraIntrinsics& cam = cfg_.camera;

    SensorFrame frame;
    frame.timestamp = t;

    // ground truth ego pose
    MapPoint ego_pos;
    Heading ego_heading;
    bool ego_done = false;
    cfg_.ego_path.pose_at(t, ego_pos, ego_heading, ego_done);
    const double ego_speed = ego_done ? 0.0 : cfg_.ego_path.speed_at(t);
    frame.truth_ego = {ego_pos, ego_heading, t};

    // actor states
    std::vector<ActorState> actors;
    for (const ActorSpec& spec : cfg_.actors) {
        if (t < spec.spawn_time) continue;
        ActorState st{&spec, {}, Heading(0.0), 0.0, true};
        bool done = false;
        spec.path.pose_at(t - spec.spawn_time, st.position, st.heading, done);
        st.speed = done ? 0.0 : spec.path.speed_at(t - spec.spawn_time);
        st.alive = !done;
        if (st.alive) actors.push_back(st);
    }

    // scene walls in the camera frame
    std::vector<WallSegment> walls;
    for (const Polygon& poly : map_.buildings) {
        for (size_t i = 0; i < poly.size(); ++i)
            walls.push_back({poly[i], poly[(i + 1) % poly.size()], cfg_.layout.building_height,
                             kLabelBuilding, -1});
    }
    for (const ActorState& a : actors) footprint_walls(a, walls);

    const double cos_t = std::cos(ego_heading.theta);
    const double sin_t = std::sin(ego_heading.theta);
    auto to_camera = [&](MapPoint p) {
        const double dn = p.north - ego_pos.north;
        const double de = p.east - ego_pos.east;
        // inverse of the heading rotation
        return CameraPoint{cos_t * dn + sin_t * de, -sin_t * dn + cos_t * de};
    };
    struct CamWall {
        CameraPoint a, b;
        double height;
        uint8_t label;
        int actor_id;
    };
    std::vector<CamWall> cam_walls;
    cam_walls.reserve(walls.size());
    for (const WallSegment& w : walls)
        cam_walls.push_back({to_camera(w.a), to_camera(w.b), w.height, w.label, w.actor_id});

    // column-ray render with a per-pixel depth buffer
    frame.disparity = DisparityRaster(cam.width, cam.height, 0);
    frame.labels = LabelRaster(cam.width, cam.height, kLabelSky);
    std::vector<double> depth(cam.height);
    std::vector<int> owner(cam.height);
    int max_actor_id = 0;
    for (const ActorSpec& spec : cfg_.actors) max_actor_id = std::max(max_actor_id, spec.actor_id);
    std::vector<int> owned_rows(max_actor_id + 1, 0);
    std::vector<int> visible_cols(max_actor_id + 1, 0);
    const double min_depth = 1.0;
    const double max_disparity = 65535.0 / kDisparityScale - 0.01;
    const int min_rows_owned = std::max(4, cam.height / 96);

    for (int u = 0; u < cam.width; ++u) {
        const double ray_right = (u - cam.c_u) / cam.f_u;

        // background: sky above the horizon, ground plane below
        for (int v = 0; v < cam.height; ++v) {
            depth[v] = std::numeric_limits<double>::infinity();
            owner[v] = -1;
            if (v > cam.c_v) {
                const double zg = cam.f_u * cfg_.camera_height / (v - cam.c_v);
                depth[v] = zg;
                frame.labels.at(v, u) = kLabelGround;
                const double dg = std::min(cam.b_prime * cam.f_u / zg, max_disparity);
                frame.disparity.at(v, u) = static_cast<uint16_t>(dg * kDisparityScale + 0.5);
            } else {
                frame.labels.at(v, u) = kLabelSky;
                frame.disparity.at(v, u) = 0;
            }
        }

        for (const CamWall& w : cam_walls) {
            const double dn = w.b.x_north_cam - w.a.x_north_cam;
            const double de = w.b.x_east_cam - w.a.x_east_cam;
            const double denom = dn * ray_right - de;
            if (std::abs(denom) < 1e-12) continue;
            const double s_param = (w.a.x_east_cam - w.a.x_north_cam * ray_right) / denom;
            if (s_param < 0.0 || s_param > 1.0) continue;
            const double z = w.a.x_north_cam + s_param * dn;
            if (z < min_depth) continue;

            const double v_base = cam.c_v + cam.f_u * cfg_.camera_height / z;
            const double v_top = cam.c_v + cam.f_u * (cfg_.camera_height - w.height) / z;
            const int v0 = std::max(0, static_cast<int>(std::ceil(v_top)));
            const int v1 = std::min(cam.height - 1, static_cast<int>(std::floor(v_base)));
            if (v0 > v1) continue;
            const double disp = std::min(cam.b_prime * cam.f_u / z, max_disparity);
            const uint16_t q = static_cast<uint16_t>(disp * kDisparityScale + 0.5);
            for (int v = v0; v <= v1; ++v) {
                if (z >= depth[v]) continue;  // nearer surface wins
                depth[v] = z;
                owner[v] = w.actor_id;
                frame.labels.at(v, u) = w.label;
                frame.disparity.at(v, u) = q;
            }
        }

        // per-actor visibility bookkeeping
        std::fill(owned_rows.begin(), owned_rows.end(), 0);
        for (int v = 0; v < cam.height; ++v)
            if (owner[v] >= 0 && owner[v] < static_cast<int>(owned_rows.size())) owned_rows[owner[v]]++;
        for (size_t k = 0; k < owned_rows.size(); ++k)
            if (owned_rows[k] >= min_rows_owned) visible_cols[k]++;
    }

    // disparity noise on obstacle pixels only (ground and sky feed nothing)
    if (cfg_.noise.disparity_sigma > 0.0) {
        for (int v = 0; v < cam.height; ++v) {
            for (int u = 0; u < cam.width; ++u) {
                const uint8_t l = frame.labels.at(v, u);
                if (l == kLabelSky || l == kLabelGround) continue;
                const double d0 = frame.disparity.at(v, u) / kDisparityScale;
                const double d = std::clamp(d0 + rng_disp_.normal(0.0, cfg_.noise.disparity_sigma),
                                            0.0, max_disparity);
                frame.disparity.at(v, u) = static_cast<uint16_t>(d * kDisparityScale + 0.5);
            }
        }
    }

    // GNSS: truth + white noise + scheduled lateral bias episodes
    MapPoint gnss = ego_pos;
    gnss.north += rng_gnss_.normal(0.0, cfg_.noise.gnss_sigma);
    gnss.east += rng_gnss_.normal(0.0, cfg_.noise.gnss_sigma);
    for (const GnssBiasEpisode& ep : cfg_.noise.gnss_bias_episodes) {
        if (t >= ep.start_s && t < ep.start_s + ep.duration_s) {
            const MapPoint right = heading_right(ego_heading);
            gnss.north += ep.lateral_m * right.north;
            gnss.east += ep.lateral_m * right.east;
        }
    }
    frame.gnss = {gnss, t};

    // INS: true speed, heading with cumulative drift
    frame.ins = {ego_speed, Heading(ego_heading.theta + cfg_.noise.ins_heading_drift * t), t};

    // lane observation: white-line distances of the occupied lane, dropped
    // inside the intersection
    frame.lane_obs = {};
    if (!point_in_polygon(ego_pos, map_.intersection_polygon)) {
        const auto lane = containing_lane(map_, ego_pos);
        if (lane) {
            frame.lane_obs.valid = true;
            frame.lane_obs.dist_left = 0.5 * lane->width + lane->signed_right +
                                       rng_lane_.normal(0.0, cfg_.noise.lane_sigma);
            frame.lane_obs.dist_right = 0.5 * lane->width - lane->signed_right +
                                        rng_lane_.normal(0.0, cfg_.noise.lane_sigma);
            frame.lane_obs.dist_left = std::max(0.0, frame.lane_obs.dist_left);
            frame.lane_obs.dist_right = std::max(0.0, frame.lane_obs.dist_right);
        }
    }

    // optical flow anchored at the previous frame's actor projections
    std::vector<PrevProjection> cur_projections;
    for (const ActorState& a : actors) {
        const CameraPoint rel = to_camera(a.position);
        if (rel.x_north_cam < 2.0) continue;
        const double u = cam.c_u + cam.f_u * rel.x_east_cam / rel.x_north_cam;
        const double v = cam.c_v +
                         cam.f_u * (cfg_.camera_height - actor_height(a.spec->label)) /
                             rel.x_north_cam;
        cur_projections.push_back({a.spec->actor_id, u, v});
    }
    for (const PrevProjection& cur : cur_projections) {
        for (const PrevProjection& prev : prev_projections_) {
            if (prev.actor_id != cur.actor_id) continue;
            FlowVector f;
            f.u = prev.u;
            f.v = prev.v;
            f.du = cur.u - prev.u + rng_flow_.normal(0.0, cfg_.noise.flow_sigma);
            f.dv = cur.v - prev.v + rng_flow_.normal(0.0, cfg_.noise.flow_sigma);
            frame.flow.vectors.push_back(f);
        }
    }
    prev_projections_ = std::move(cur_projections);

    // per-actor ground truth
    for (const ActorState& a : actors) {
        ActorTruth truth;
        truth.actor_id = a.spec->actor_id;
        truth.label = a.spec->label;
        truth.position = a.position;
        truth.speed = a.speed;
        truth.lane = assign_lane(a.position, map_);
        truth.visible_cols = a.spec->actor_id < static_cast<int>(visible_cols.size())
                                 ? visible_cols[a.spec->actor_id]
                                 : 0;

        // truncation and the unoccluded footprint span from the projected
        // corners; part of the body behind the near plane also truncates
        std::vector<WallSegment> corners;
        footprint_walls(a, corners);
        bool any_front = false, clipped = false;
        double min_u = 1e18, max_u = -1e18;
        for (const WallSegment& w : corners) {
            const CameraPoint c = to_camera(w.a);
            if (c.x_north_cam < min_depth) {
                clipped = true;
                continue;
            }
            any_front = true;
            const double u = cam.c_u + cam.f_u * c.x_east_cam / c.x_north_cam;
            if (u < 0.0 || u > cam.width - 1) clipped = true;
            min_u = std::min(min_u, u);
            max_u = std::max(max_u, u);
        }
        truth.truncated = any_front && clipped;
        if (any_front) {
            const double lo = std::clamp(min_u, 0.0, cam.width - 1.0);
            const double hi = std::clamp(max_u, 0.0, cam.width - 1.0);
            truth.expected_cols = static_cast<int>(std::max(0.0, hi - lo));
        }
        frame.truth_actors.push_back(truth);
    }

    ++frame_index_;
    return frame;
}

ScenarioConfig nominal_scenario(uint64_t seed) {
    ScenarioConfig cfg;
    cfg.seed = seed;
    cfg.duration_s = 13.5;
    cfg.frame_rate = 15.0;
    cfg.camera = CameraIntrinsics{};
    cfg.camera_height = 1.5;
    cfg.layout.block_size = 80.0;

    cfg.ego_path.waypoints = {{-65.0, 1.75}, {55.0, 1.75}};
    cfg.ego_path.speed_profile = {{1e18, 8.0}};

    // traffic keeps small in-lane offsets from the centerlines
    ActorSpec lead;
    lead.actor_id = 1;
    lead.label = SemanticClass::kVehicle;
    lead.path.waypoints = {{-40.0, 2.3}, {80.0, 2.3}};
    lead.path.speed_profile = {{1e18, 8.0}};
    cfg.actors.push_back(lead);

    ActorSpec oncoming;
    oncoming.actor_id = 2;
    oncoming.label = SemanticClass::kVehicle;
    oncoming.path.waypoints = {{60.0, -1.2}, {-70.0, -1.2}};
    oncoming.path.speed_profile = {{1e18, 8.0}};
    cfg.actors.push_back(oncoming);

    ActorSpec crossing;
    crossing.actor_id = 3;
    crossing.label = SemanticClass::kVehicle;
    crossing.path.waypoints = {{-1.75, -45.0}, {-1.75, 60.0}};
    crossing.path.speed_profile = {{1e18, 7.0}};
    cfg.actors.push_back(crossing);

    ActorSpec walker;
    walker.actor_id = 4;
    walker.label = SemanticClass::kPedestrian;
    walker.path.waypoints = {{10.0, 8.2}, {60.0, 8.2}};
    walker.path.speed_profile = {{1e18, 1.2}};
    cfg.actors.push_back(walker);

    cfg.noise.gnss_sigma = 1.0;
    cfg.noise.ins_heading_drift = deg2rad(0.7);
    cfg.noise.disparity_sigma = 0.5;
    cfg.noise.flow_sigma = 1.0;
    cfg.noise.lane_sigma = 0.05;
    return cfg;
}

void apply_fast_mode(ScenarioConfig& cfg) {
    const double scale = 256.0 / cfg.camera.width;
    cfg.camera.f_u *= scale;
    cfg.camera.c_u *= scale;
    cfg.camera.c_v *= scale;
    cfg.camera.width = 256;
    cfg.camera.height = 192;
}

}  // namespace crosstrack
