#pragma once

#include <string>
#include <vector>

#include "crosstrack/digital_map.hpp"
#include "crosstrack/localization.hpp"
#include "crosstrack/sim.hpp"
#include "crosstrack/stixel.hpp"

namespace crosstrack {

// sensors.csv: timestamp,gnss_north,gnss_east,ins_speed,ins_heading,
//              lane_left,lane_right,lane_valid
struct SensorRecord {
    double timestamp = 0.0;
    GnssReading gnss;
    InsReading ins;
    LaneObservation lane_obs;
};

std::vector<SensorRecord> read_sensor_log(const std::string& path);
void write_sensor_log(const std::string& path, const std::vector<SensorRecord>& records);

// stixels.csv: timestamp,u,v_b,v_t,d,l — one stixel per line.
std::vector<StixelSet> read_stixel_log(const std::string& path);
void write_stixel_log(const std::string& path, const std::vector<StixelSet>& sets);

// tracks.csv: timestamp,track_id,label,map_north,map_east,speed_mps,
//             lane_assignment — the contract consumed by eval and plot.
struct TrackRecord {
    double timestamp = 0.0;
    int track_id = 0;
    SemanticClass label = SemanticClass::kOther;
    MapPoint position;
    double speed = 0.0;
    LaneAssignment lane;
};

std::vector<TrackRecord> read_track_log(const std::string& path);
void write_track_log(const std::string& path, const std::vector<TrackRecord>& records);

// flow.csv: timestamp,anchor_u,anchor_v,du,dv
struct FlowRecord {
    double timestamp = 0.0;
    FlowVector vec;
};
std::vector<FlowRecord> read_flow_log(const std::string& path);
void write_flow_log(const std::string& path, const std::vector<FlowRecord>& records);

// truth_actors.csv: timestamp,actor_id,label,north,east,speed,lane,visible_cols
struct TruthRecord {
    double timestamp = 0.0;
    ActorTruth actor;
};
std::vector<TruthRecord> read_truth_log(const std::string& path);
void write_truth_log(const std::string& path, const std::vector<TruthRecord>& records);

// truth_ego.csv: timestamp,north,east,theta
std::vector<EgoPose> read_ego_log(const std::string& path);
void write_ego_log(const std::string& path, const std::vector<EgoPose>& poses);

// Dataset directory layout:
//   map.txt, meta.json, sensors.csv, flow.csv, truth_ego.csv,
//   truth_actors.csv, frames/disp_NNNNNN.bin, frames/label_NNNNNN.bin
struct DatasetMeta {
    CameraIntrinsics camera;
    double frame_rate = 15.0;
    int frames = 0;
    double camera_height = 1.5;
};

void write_dataset(const std::string& dir, const ScenarioConfig& cfg, const DigitalMap& map,
                   Simulator& sim);
DatasetMeta read_dataset_meta(const std::string& dir);
SensorFrame read_dataset_frame(const std::string& dir, const DatasetMeta& meta, int index,
                               const std::vector<SensorRecord>& sensors,
                               const std::vector<FlowRecord>& flow);

}  // namespace crosstrack
