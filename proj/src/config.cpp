#include "crosstrack/config.hpp"

#include <fstream>

#include <json.hpp>

#include "crosstrack/errors.hpp"

using nlohmann::json;

namespace crosstrack {

namespace {

template <typename T>
void maybe(const json& j, const char* key, T& out) {
    if (j.contains(key)) out = j.at(key).get<T>();
}

void maybe_deg(const json& j, const char* key, double& out_rad) {
    if (j.contains(key)) out_rad = deg2rad(j.at(key).get<double>());
}

PathSpec parse_path(const json& j) {
    PathSpec path;
    for (const json& wp : j.at("waypoints"))
        path.waypoints.push_back({wp.at(0).get<double>(), wp.at(1).get<double>()});
    if (j.contains("speed")) {
        path.speed_profile = {{1e18, j.at("speed").get<double>()}};
    } else if (j.contains("speed_profile")) {
        for (const json& seg : j.at("speed_profile"))
            path.speed_profile.push_back(
                {seg.at("until_s").get<double>(), seg.at("speed").get<double>()});
    }
    return path;
}

}  // namespace

RunConfig default_run_config(uint64_t seed) {
    RunConfig cfg;
    cfg.scenario = nominal_scenario(seed);
    cfg.pipeline.seed = seed;
    return cfg;
}

RunConfig parse_run_config(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text, nullptr, true, true);
    } catch (const json::parse_error& e) {
        throw InvalidConfig(std::string("config: ") + e.what());
    }

    uint64_t seed = 1;
    if (j.contains("seed")) seed = j.at("seed").get<uint64_t>();
    RunConfig cfg = default_run_config(seed);
    ScenarioConfig& sc = cfg.scenario;
    PipelineParams& pp = cfg.pipeline;

    try {
        if (j.contains("camera")) {
            const json& cam = j.at("camera");
            maybe(cam, "f_u", sc.camera.f_u);
            maybe(cam, "b_prime", sc.camera.b_prime);
            maybe(cam, "c_u", sc.camera.c_u);
            maybe(cam, "c_v", sc.camera.c_v);
            maybe(cam, "width", sc.camera.width);
            maybe(cam, "height", sc.camera.height);
        }
        if (j.contains("scenario")) {
            const json& s = j.at("scenario");
            maybe(s, "duration_s", sc.duration_s);
            maybe(s, "frame_rate", sc.frame_rate);
            maybe(s, "camera_height", sc.camera_height);
            maybe(s, "lane_width", sc.layout.lane_width);
            maybe(s, "road_extent", sc.layout.road_extent);
            maybe(s, "block_size", sc.layout.block_size);
            maybe(s, "sidewalk", sc.layout.sidewalk);
            maybe(s, "building_height", sc.layout.building_height);
            if (s.contains("ego_path")) sc.ego_path = parse_path(s.at("ego_path"));
            if (s.contains("actors")) {
                sc.actors.clear();
                for (const json& a : s.at("actors")) {
                    ActorSpec spec;
                    spec.actor_id = a.at("id").get<int>();
                    spec.label = semantic_class_from_string(a.at("class").get<std::string>());
                    spec.path = parse_path(a);
                    maybe(a, "spawn_time", spec.spawn_time);
                    sc.actors.push_back(spec);
                }
            }
            if (s.contains("noise")) {
                const json& n = s.at("noise");
                maybe(n, "gnss_sigma", sc.noise.gnss_sigma);
                maybe_deg(n, "ins_heading_drift_deg_per_s", sc.noise.ins_heading_drift);
                maybe(n, "disparity_sigma", sc.noise.disparity_sigma);
                maybe(n, "flow_sigma", sc.noise.flow_sigma);
                maybe(n, "lane_sigma", sc.noise.lane_sigma);
                if (n.contains("gnss_bias_episodes")) {
                    sc.noise.gnss_bias_episodes.clear();
                    for (const json& ep : n.at("gnss_bias_episodes"))
                        sc.noise.gnss_bias_episodes.push_back({ep.at("start_s").get<double>(),
                                                               ep.at("duration_s").get<double>(),
                                                               ep.at("lateral_m").get<double>()});
                }
            }
        }
        if (j.contains("stixel")) {
            const json& s = j.at("stixel");
            maybe(s, "width", pp.stixel.stixel_width);
            maybe(s, "disparity_tolerance", pp.stixel.disparity_tolerance);
            maybe(s, "min_height_px", pp.stixel.min_height_px);
        }
        if (j.contains("dbscan")) {
            const json& d = j.at("dbscan");
            maybe(d, "eps", pp.dbscan_eps);
            maybe(d, "min_pts", pp.dbscan_min_pts);
        }
        if (j.contains("localization")) {
            const json& l = j.at("localization");
            maybe(l, "n_particles", pp.localization.n_particles);
            maybe(l, "sigma_lane", pp.localization.sigma_lane);
            maybe(l, "sigma_gnss", pp.localization.sigma_gnss);
            maybe(l, "gamma", pp.localization.gamma);
            maybe(l, "sigma_along", pp.localization.sigma_along);
            maybe(l, "sigma_cross", pp.localization.sigma_cross);
            maybe(l, "init_sigma", pp.localization.init_sigma);
        }
        if (j.contains("ndt")) {
            const json& n = j.at("ndt");
            maybe(n, "cell_size", pp.ndt.cell_size);
            maybe(n, "window_deg", pp.ndt.window_deg);
            maybe(n, "coarse_step_deg", pp.ndt.coarse_step_deg);
            maybe(n, "resolution_deg", pp.ndt.resolution_deg);
            maybe(n, "score_floor", pp.ndt.score_floor);
            maybe(n, "min_building_stixels", pp.min_building_stixels);
        }
        if (j.contains("tracking")) {
            const json& t = j.at("tracking");
            double q = pp.tracking.model.process_noise(0, 0);
            double r_u = pp.tracking.model.measurement_noise(0, 0);
            double r_d = pp.tracking.model.measurement_noise(1, 1);
            maybe(t, "process_noise", q);
            maybe(t, "measurement_noise_u", r_u);
            maybe(t, "measurement_noise_d", r_d);
            pp.tracking.model.process_noise = Eigen::Matrix2d::Identity() * q;
            pp.tracking.model.measurement_noise << r_u, 0.0, 0.0, r_d;
            maybe(t, "gate_px", pp.tracking.gate_px);
            maybe(t, "confirm_hits", pp.tracking.confirm_hits);
            maybe(t, "max_misses", pp.tracking.max_misses);
            maybe(t, "initial_speed", pp.tracking.initial_speed);
            maybe(t, "max_spawn_range", pp.tracking.max_spawn_range);
        }
        if (j.contains("ablations")) {
            const json& a = j.at("ablations");
            maybe(a, "heading_correction", pp.ablations.heading_correction);
            maybe(a, "lane_weighting", pp.ablations.lane_weighting);
            maybe(a, "semantic_clustering", pp.ablations.semantic_clustering);
        }
        if (j.contains("evaluation")) {
            maybe(j.at("evaluation"), "match_radius", cfg.eval_match_radius);
        }
        if (j.contains("pipeline")) {
            maybe(j.at("pipeline"), "stixels_from_file", pp.stixels_from_file);
        }
        maybe(j, "fast", cfg.fast_mode);
    } catch (const json::exception& e) {
        throw InvalidConfig(std::string("config: ") + e.what());
    }

    pp.tracking.model.dt = 1.0 / sc.frame_rate;
    return cfg;
}

RunConfig load_run_config(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw MissingLog("cannot open config: " + path);
    std::string text((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
    return parse_run_config(text);
}

}  // namespace crosstrack
