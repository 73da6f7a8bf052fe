#include "crosstrack/pipeline.hpp"

#include <algorithm>
#include <cmath>

#include "crosstrack/errors.hpp"

namespace crosstrack {

Pipeline::Pipeline(const PipelineParams& params, const CameraIntrinsics& cam,
                   const DigitalMap& map)
    : params_(params),
      cam_(cam),
      map_(map),
      filter_(params.localization, params.seed),
      tracker_(params.tracking, cam) {
    if (params_.ablations.heading_correction) {
        const std::vector<MapPoint> building_points = sample_building_points(map_);
        building_grid_ = NdtGrid(building_points, params_.ndt);
    }
}

void Pipeline::set_external_stixels(std::vector<StixelSet> sets) {
    external_stixels_ = std::move(sets);
    external_cursor_ = 0;
}

StixelSet Pipeline::obtain_stixels(const SensorFrame& frame) {
    if (!external_stixels_.empty()) {
        while (external_cursor_ < external_stixels_.size() &&
               external_stixels_[external_cursor_].timestamp < frame.timestamp - 1e-6)
            ++external_cursor_;
        if (external_cursor_ < external_stixels_.size() &&
            std::abs(external_stixels_[external_cursor_].timestamp - frame.timestamp) < 1e-6)
            return external_stixels_[external_cursor_];
        StixelSet empty;
        empty.timestamp = frame.timestamp;
        return empty;
    }
    StixelSet s = extract_stixels(frame.disparity, frame.labels, cam_, params_.stixel);
    s.timestamp = frame.timestamp;
    return s;
}

FrameOutput Pipeline::run_frame(const SensorFrame& frame) {
    FrameOutput out;
    out.timestamp = frame.timestamp;

    const double dt = first_frame_ ? 1.0 / 15.0 : std::max(1e-6, frame.timestamp - last_timestamp_);

    // geometric and semantic cues
    const StixelSet stixels = obtain_stixels(frame);
    out.stixel_count = static_cast<int>(stixels.stixels.size());
    const ObstacleSet obstacles =
        cluster_stixels(stixels, cam_, params_.dbscan_eps, params_.dbscan_min_pts,
                        params_.ablations.semantic_clustering);
    out.obstacle_count = obstacles.count();

    // heading prior: previous fused heading advanced by the INS delta
    Heading theta_prior = frame.ins.heading;
    if (last_heading_ && last_ins_heading_) {
        theta_prior =
            Heading(last_heading_->theta + (frame.ins.heading.theta - *last_ins_heading_));
    }

    // ego position by particle filtering
    LaneObservation lane_obs = frame.lane_obs;
    if (!params_.ablations.lane_weighting) lane_obs.valid = false;
    const MapPoint ego_position =
        filter_.step(frame.ins, frame.gnss, lane_obs, theta_prior, map_, dt);

    // heading correction by building matching
    Heading theta = theta_prior;
    bool from_ndt = false;
    if (params_.ablations.heading_correction && !building_grid_.empty()) {
        std::vector<CameraPoint> building_points;
        for (const SemanticStixel& s : stixels.stixels) {
            if (s.label != SemanticClass::kBuilding) continue;
            if (!(s.d > kMinDisparity)) continue;
            building_points.push_back(unproject(s.u, s.d, cam_));
        }
        if (static_cast<int>(building_points.size()) >= params_.min_building_stixels) {
            const auto estimated = estimate_heading(building_points, ego_position,
                                                    building_grid_, theta_prior, params_.ndt);
            if (estimated) {
                theta = *estimated;
                from_ndt = true;
            }
        }
    }
    out.heading_from_ndt = from_ndt;

    const EgoPose ego{ego_position, theta, frame.timestamp};
    out.ego_estimate = ego;

    // track the traffic participants; with semantics off every cluster is a
    // candidate obstacle, mirroring a label-blind detector
    ObstacleSet tracked;
    tracked.timestamp = obstacles.timestamp;
    for (const ObstacleCluster& c : obstacles.obstacles) {
        if (params_.ablations.semantic_clustering &&
            c.label != SemanticClass::kVehicle && c.label != SemanticClass::kPedestrian)
            continue;
        tracked.obstacles.push_back(c);
    }
    tracker_.process(tracked, frame.flow, frame.timestamp);

    // map registration and lane assignment of the matched tracks
    for (Track& t : tracker_.tracks()) {
        if (!t.matched_this_frame) continue;
        const MapPoint map_pos = localize_on_map(t, ego, t.center_correction);
        TrackRecord rec;
        rec.timestamp = frame.timestamp;
        rec.track_id = t.id;
        rec.label = t.label;
        rec.position = map_pos;
        rec.speed = t.velocity.norm();
        rec.lane = assign_lane(map_pos, map_);
        out.track_records.push_back(rec);
    }

    last_heading_ = theta;
    last_ins_heading_ = frame.ins.heading.theta;
    last_timestamp_ = frame.timestamp;
    first_frame_ = false;
    return out;
}

std::vector<TrackRecord> run_pipeline(Pipeline& pipeline, Simulator& sim,
                                      std::vector<EgoPose>* ego_estimates) {
    std::vector<TrackRecord> records;
    while (!sim.done()) {
        const SensorFrame frame = sim.next_frame();
        const FrameOutput out = pipeline.run_frame(frame);
        records.insert(records.end(), out.track_records.begin(), out.track_records.end());
        if (ego_estimates) ego_estimates->push_back(out.ego_estimate);
    }
    return records;
}

}  // namespace crosstrack
