#pragma once

#include <map>
#include <string>
#include <vector>

#include "crosstrack/digital_map.hpp"
#include "crosstrack/io.hpp"
#include "crosstrack/stixel.hpp"

namespace crosstrack {

struct Detection {
    MapPoint position;
    SemanticClass label = SemanticClass::kOther;
    int track_id = 0;
    LaneAssignment lane;
};

struct GroundTruthObject {
    int object_id = 0;
    MapPoint position;
    SemanticClass label = SemanticClass::kOther;
    LaneAssignment lane;
};

struct FrameEval {
    double timestamp = 0.0;
    int true_positives = 0;
    int false_positives = 0;
    int misses = 0;
    // (detection index, truth index) pairs of the optimal matching
    std::vector<std::pair<int, int>> matches;
};

// Optimal one-to-one matching between detections and truth, same label and
// within radius; leftovers count as false positives and misses.
FrameEval match_frame(const std::vector<Detection>& detections,
                      const std::vector<GroundTruthObject>& truth, double radius);

struct TrackEvalEntry {
    int object_id = 0;
    double coverage = 0.0;  // matched frames / visible frames
    bool mostly_tracked = false;
    bool mostly_lost = false;
};

struct EvalReport {
    double detection_rate = 0.0;        // sum TP / sum (TP + misses)
    double fp_rate = 0.0;               // sum FP / sum detections
    int frames_with_fp = 0;
    int frames_total = 0;
    long total_tp = 0, total_fp = 0, total_misses = 0, total_detections = 0;
    double mt_rate = 0.0;
    double ml_rate = 0.0;
    int gt_trajectories = 0;
    double lane_localization_rate = 0.0;
    long lane_matched = 0, lane_total = 0;
    std::vector<TrackEvalEntry> per_trajectory;
};

struct EvalParams {
    double match_radius = 2.0;      // m
    double mt_threshold = 0.8;
    double ml_threshold = 0.2;
    int min_visible_cols = 25;      // actors below this stay out of the truth set
    double min_visible_fraction = 0.5;  // heavily occluded actors are ignored
    // detections near an ignored actor are neither TP nor FP
    double ignore_radius = 5.0;     // m
};

// Frame-by-frame matching of track records against truth records, then the
// aggregate Table-style metrics. Records are grouped by timestamp (rounded
// to the millisecond) and processed in time order regardless of input order.
EvalReport evaluate(const std::vector<TrackRecord>& tracks,
                    const std::vector<TruthRecord>& truth, const EvalParams& params);

std::string render_report_table(const EvalReport& r);
std::string render_report_kv(const EvalReport& r);

}  // namespace crosstrack
