#pragma once

#include <string>
#include <vector>

#include "crosstrack/geometry.hpp"
#include "crosstrack/image.hpp"

namespace crosstrack {

enum class SemanticClass : uint8_t {
    kVehicle = 0,
    kPedestrian = 1,
    kBuilding = 2,
    kOther = 3,
};

const char* to_string(SemanticClass c);
SemanticClass semantic_class_from_string(const std::string& s);

// One thin vertical obstacle slice: image column, base and top rows
// (rows grow downward, so v_t < v_b), disparity and semantic class.
struct SemanticStixel {
    double u = 0.0;
    double v_b = 0.0;
    double v_t = 0.0;
    double d = 0.0;
    SemanticClass label = SemanticClass::kOther;
};

struct StixelSet {
    double timestamp = 0.0;
    std::vector<SemanticStixel> stixels;
};

struct StixelParams {
    int stixel_width = 5;              // columns per band
    double disparity_tolerance = 1.0;  // px deviation from the running median
    int min_height_px = 8;             // discard shorter runs
    double min_disparity = kMinDisparity;
};

// Column-band segmentation: per band, rows are summarized by their majority
// label and median disparity, then split into maximal runs of equal label
// whose disparity stays within disparity_tolerance of the run's running
// median. Ground and sky rows never produce stixels.
StixelSet extract_stixels(const DisparityRaster& disparity, const LabelRaster& labels,
                          const CameraIntrinsics& cam, const StixelParams& params);

struct ObstacleCluster {
    int cluster_id = 0;                 // 1-based, no gaps within a set
    std::vector<SemanticStixel> members;
    double u_center = 0.0;
    double v_t_center = 0.0;
    double d_center = 0.0;
    SemanticClass label = SemanticClass::kOther;
};

struct ObstacleSet {
    double timestamp = 0.0;
    std::vector<ObstacleCluster> obstacles;
    int count() const { return static_cast<int>(obstacles.size()); }
};

struct Centroid {
    double u_center = 0.0;
    double v_t_center = 0.0;
    double d_center = 0.0;
};

// Mean of u and v_t, median of d.
Centroid obstacle_centroid(const std::vector<SemanticStixel>& members);

// DBSCAN over the stixels' camera-plane positions (unproject of (u, d)).
// With label_constrained, the distance across different semantic classes is
// infinite, so clusters stay class-pure; label-agnostic clustering keeps the
// plain metric and assigns each cluster its majority class. Noise stixels
// are dropped; clusters are renumbered 1..C by leftmost member column.
ObstacleSet cluster_stixels(const StixelSet& s, const CameraIntrinsics& cam, double eps,
                            int min_pts, bool label_constrained = true);

}  // namespace crosstrack
