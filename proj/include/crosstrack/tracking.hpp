#pragma once

#include <Eigen/Dense>
#include <deque>
#include <vector>

#include "crosstrack/digital_map.hpp"
#include "crosstrack/geometry.hpp"
#include "crosstrack/stixel.hpp"

namespace crosstrack {

struct ImageCoords {
    double u = 0.0;
    double v_t = 0.0;
    double d = 0.0;
};

// Sparse flow vectors anchored at frame t-1 image positions.
struct FlowVector {
    double u = 0.0;
    double v = 0.0;
    double du = 0.0;
    double dv = 0.0;
};

struct FlowField {
    std::vector<FlowVector> vectors;

    // Mean image displacement near (u, v); zero when nothing is anchored
    // within the radius.
    FlowVector lookup(double u, double v, double radius = 60.0) const;
};

struct MapHistoryEntry {
    double timestamp = 0.0;
    MapPoint position;
    double speed = 0.0;
};

struct Track {
    int id = 0;
    Eigen::Vector2d state = Eigen::Vector2d::Zero();     // (X'_north, X'_east), camera frame
    Eigen::Matrix2d covariance = Eigen::Matrix2d::Identity();
    Eigen::Vector2d velocity = Eigen::Vector2d::Zero();  // camera-frame m/s, treated as input
    SemanticClass label = SemanticClass::kOther;
    int age = 1;          // frames since creation
    int hits = 1;         // consecutive matched frames
    int misses = 0;       // consecutive unmatched frames
    bool confirmed = false;
    bool matched_this_frame = false;
    ImageCoords last_image_coords;
    // camera-frame delta from the measured surface point to the estimated
    // object center, refreshed on every match
    Eigen::Vector2d center_correction = Eigen::Vector2d::Zero();
    std::deque<MapHistoryEntry> map_history;
    // measurement-anchored positions for velocity re-estimation; filtered
    // states would echo the velocity prior back at long range where the
    // Kalman gain is small
    std::deque<std::pair<double, Eigen::Vector2d>> measured_history;
};

struct MotionModel {
    Eigen::Matrix2d process_noise = Eigen::Matrix2d::Identity() * 0.25;  // Q, m^2
    Eigen::Matrix2d measurement_noise =
        (Eigen::Matrix2d() << 4.0, 0.0, 0.0, 1.0).finished();  // R, (u px)^2 and (d px)^2
    double dt = 1.0 / 15.0;
};

struct TrackingParams {
    MotionModel model;
    double gate_px = 40.0;           // flow-consistency gate on u
    int confirm_hits = 3;
    int max_misses = 5;
    double initial_speed = 6.0;      // m/s prior along the ego heading
    int velocity_window = 3;         // frames of state differences
    double max_spawn_range = 80.0;  // m; no new tracks beyond stereo's useful depth
    // footprint extents for surface-to-center compensation, meters
    double vehicle_half_length = 2.25;
    double vehicle_half_width = 0.9;
    double pedestrian_half_extent = 0.25;
    double face_cutoff = 3.0;  // visible extent below this reads as the width face
};

struct Assignment {
    std::vector<std::pair<int, int>> matches;  // (track index, obstacle index)
    std::vector<int> unmatched_tracks;
    std::vector<int> unmatched_obstacles;
};

// Constant-position transition with the velocity input: X += dt*v, P += Q.
void predict(Track& track, const MotionModel& model);

ImageCoords flow_propagate(const ImageCoords& coords, const FlowVector& flow);

// Cost is the (u, d) Euclidean distance between the track's predicted
// measurement and the obstacle centroid. Pairs with mismatched labels, or
// whose flow-propagated u disagrees with the obstacle u_center by more than
// the gate, are forbidden. Optimal one-to-one assignment over the rest.
Assignment associate(const std::vector<Track>& tracks, const ObstacleSet& obstacles,
                     const FlowField& flow, double gate_px, const CameraIntrinsics& cam);

// EKF measurement update against z = (u_center, d_center) with the pinhole
// model h and its Jacobian; the covariance is re-symmetrized afterwards.
void ekf_update(Track& track, const PixelMeasurement& z, const CameraIntrinsics& cam,
                const MotionModel& model);

// Jacobian of h(X') = (c_u + f_u*X'_east/X'_north, b'*f_u/X'_north).
Eigen::Matrix2d measurement_jacobian(const Eigen::Vector2d& state, const CameraIntrinsics& cam);
Eigen::Vector2d measurement_function(const Eigen::Vector2d& state, const CameraIntrinsics& cam);

// Registers the track in the map frame and appends to its history. The
// offset shifts the camera-frame state first (surface-to-center
// compensation computed elsewhere).
MapPoint localize_on_map(Track& track, const EgoPose& pose,
                         const Eigen::Vector2d& offset = Eigen::Vector2d::Zero());

// Stereo measures the visible faces of an obstacle, not its center. The
// cluster's unprojected points give the dominant visible face by PCA; the
// center lies half the hidden extent behind it, along the face normal
// pointing away from the camera. Face extents near the class width read as
// a head-on view, longer ones as a side view.
CameraPoint estimate_object_center(const std::vector<SemanticStixel>& members,
                                   const CameraIntrinsics& cam, SemanticClass label,
                                   const TrackingParams& params);

class Tracker {
public:
    explicit Tracker(const TrackingParams& params, const CameraIntrinsics& cam)
        : params_(params), cam_(cam) {}

    // One frame: predict, associate, update matched, age and prune, spawn
    // tentative tracks from unmatched obstacles. New tracks start with the
    // speed prior along the camera forward axis (the ego heading).
    void process(const ObstacleSet& obstacles, const FlowField& flow, double timestamp);

    std::vector<Track>& tracks() { return tracks_; }
    const std::vector<Track>& tracks() const { return tracks_; }
    int next_id() const { return next_id_; }

private:
    TrackingParams params_;
    CameraIntrinsics cam_;
    std::vector<Track> tracks_;
    int next_id_ = 1;
};

}  // namespace crosstrack
