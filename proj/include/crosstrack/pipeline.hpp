#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "crosstrack/digital_map.hpp"
#include "crosstrack/io.hpp"
#include "crosstrack/localization.hpp"
#include "crosstrack/ndt.hpp"
#include "crosstrack/sim.hpp"
#include "crosstrack/stixel.hpp"
#include "crosstrack/tracking.hpp"

namespace crosstrack {

struct AblationSwitches {
    bool heading_correction = true;   // NDT building matching on/off
    bool lane_weighting = true;       // lane observations in the particle filter
    bool semantic_clustering = true;  // label-constrained DBSCAN + class filtering
};

struct PipelineParams {
    StixelParams stixel;
    double dbscan_eps = 1.5;  // m
    int dbscan_min_pts = 2;
    LocalizationParams localization;
    NdtParams ndt;
    TrackingParams tracking;
    AblationSwitches ablations;
    int min_building_stixels = 50;     // NDT runs only above this
    uint64_t seed = 1;
    // When set, stixels come from this log instead of the rasters.
    std::string stixels_from_file;
};

struct FrameOutput {
    double timestamp = 0.0;
    EgoPose ego_estimate;
    bool heading_from_ndt = false;
    int stixel_count = 0;
    int obstacle_count = 0;
    std::vector<TrackRecord> track_records;
};

// Per-frame loop: stixel extraction, clustering, particle-filter
// localization, NDT heading correction, EKF tracking, map registration and
// lane assignment. Owns all cross-frame state for one scenario.
class Pipeline {
public:
    Pipeline(const PipelineParams& params, const CameraIntrinsics& cam, const DigitalMap& map);

    FrameOutput run_frame(const SensorFrame& frame);

    // stixel source override (external stixel log), keyed by frame timestamp
    void set_external_stixels(std::vector<StixelSet> sets);

    const DigitalMap& map() const { return map_; }

private:
    StixelSet obtain_stixels(const SensorFrame& frame);

    PipelineParams params_;
    CameraIntrinsics cam_;
    DigitalMap map_;
    NdtGrid building_grid_;
    ParticleFilter filter_;
    Tracker tracker_;
    std::vector<StixelSet> external_stixels_;
    size_t external_cursor_ = 0;
    std::optional<Heading> last_heading_;
    std::optional<double> last_ins_heading_;
    bool first_frame_ = true;
    double last_timestamp_ = 0.0;
};

// Convenience driver: run every frame of a simulator through a pipeline and
// collect the emitted track records.
std::vector<TrackRecord> run_pipeline(Pipeline& pipeline, Simulator& sim,
                                      std::vector<EgoPose>* ego_estimates = nullptr);

}  // namespace crosstrack
