#pragma once

#include <string>
#include <vector>

#include "crosstrack/digital_map.hpp"
#include "crosstrack/geometry.hpp"
#include "crosstrack/image.hpp"
#include "crosstrack/localization.hpp"
#include "crosstrack/random.hpp"
#include "crosstrack/tracking.hpp"

namespace crosstrack {

struct SpeedSegment {
    double until_s = 1e18;  // segment active while t < until_s
    double speed = 0.0;     // m/s
};

struct PathSpec {
    Polyline waypoints;
    std::vector<SpeedSegment> speed_profile;  // piecewise constant

    double speed_at(double t) const;
    // Pose after integrating the speed profile along the waypoints.
    // done is set once the path end is reached.
    void pose_at(double t, MapPoint& position, Heading& heading, bool& done) const;
};

struct ActorSpec {
    int actor_id = 0;
    SemanticClass label = SemanticClass::kVehicle;
    PathSpec path;
    double spawn_time = 0.0;   // actor exists for t >= spawn_time until path end
};

struct GnssBiasEpisode {
    double start_s = 0.0;
    double duration_s = 0.0;
    double lateral_m = 0.0;  // applied to the right of the true heading
};

struct NoiseConfig {
    double gnss_sigma = 1.0;                      // m
    std::vector<GnssBiasEpisode> gnss_bias_episodes;
    double ins_heading_drift = 0.0;               // rad/s, cumulative
    double disparity_sigma = 0.5;                 // px, on rendered disparity
    double flow_sigma = 1.0;                      // px
    double lane_sigma = 0.05;                     // m
};

struct IntersectionLayout {
    double lane_width = 3.5;        // m
    double road_extent = 100.0;     // half-length of each road, m
    double block_size = 50.0;       // building block edge, m
    double sidewalk = 2.0;          // gap between road edge and buildings, m
    double building_height = 20.0;  // m, render only
};

struct ScenarioConfig {
    uint64_t seed = 1;
    double duration_s = 14.0;
    double frame_rate = 15.0;
    CameraIntrinsics camera;
    double camera_height = 1.5;  // m above ground
    IntersectionLayout layout;
    PathSpec ego_path;
    std::vector<ActorSpec> actors;
    NoiseConfig noise;

    bool valid() const { return frame_rate > 0.0 && duration_s > 0.0 && camera.valid(); }
};

struct ActorTruth {
    int actor_id = 0;
    SemanticClass label = SemanticClass::kVehicle;
    MapPoint position;
    double speed = 0.0;
    LaneAssignment lane;
    int visible_cols = 0;    // rendered (post-occlusion) image columns
    int expected_cols = 0;   // projected footprint span, ignoring occlusion
    bool truncated = false;  // footprint clipped by the image border
};

struct SensorFrame {
    double timestamp = 0.0;
    DisparityRaster disparity;
    LabelRaster labels;
    GnssReading gnss;
    InsReading ins;
    LaneObservation lane_obs;
    FlowField flow;
    EgoPose truth_ego;
    std::vector<ActorTruth> truth_actors;
};

// Two perpendicular roads with two lanes per direction, four corner
// building blocks and the shared intersection polygon. Lane ids 1..8.
DigitalMap build_intersection(const ScenarioConfig& cfg);

// Deterministic frame generator: renders disparity/label rasters by casting
// one ray per column against building walls and actor footprint boxes
// (nearest surface wins per pixel), then derives the noisy sensor channels
// from ground truth.
class Simulator {
public:
    Simulator(const ScenarioConfig& cfg, const DigitalMap& map);

    int frame_count() const { return frame_count_; }
    // Frames must be pulled in order; INS drift accumulates across calls.
    SensorFrame next_frame();
    bool done() const { return frame_index_ >= frame_count_; }

private:
    ScenarioConfig cfg_;
    DigitalMap map_;
    int frame_count_ = 0;
    int frame_index_ = 0;
    Rng rng_gnss_, rng_disp_, rng_flow_, rng_lane_;
    double ins_drift_accum_ = 0.0;
    // previous-frame actor centroid projections, for flow
    struct PrevProjection {
        int actor_id;
        double u, v;
    };
    std::vector<PrevProjection> prev_projections_;
};

// Default nominal scenario: ego drives north through the intersection with a
// leading vehicle, an oncoming vehicle, a crossing vehicle and a pedestrian
// near the north-east block.
ScenarioConfig nominal_scenario(uint64_t seed);

// 256x192 render with proportionally scaled intrinsics, for fast runs.
void apply_fast_mode(ScenarioConfig& cfg);

}  // namespace crosstrack
