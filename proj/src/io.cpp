#include "crosstrack/io.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "crosstrack/errors.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace crosstrack {

namespace {

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            fields.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur.push_back(c);
        }
    }
    fields.push_back(cur);
    return fields;
}

std::ifstream open_in(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw MissingLog("cannot open: " + path);
    return is;
}

std::ofstream open_out(const std::string& path) {
    std::ofstream os(path);
    if (!os) throw MissingLog("cannot open for write: " + path);
    return os;
}

bool is_comment_or_blank(const std::string& line) {
    for (char c : line) {
        if (c == '#') return true;
        if (!std::isspace(static_cast<unsigned char>(c))) return false;
    }
    return true;
}

std::string fmt(const char* format, double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), format, v);
    return buf;
}

}  // namespace

std::vector<SensorRecord> read_sensor_log(const std::string& path) {
    std::ifstream is = open_in(path);
    std::vector<SensorRecord> out;
    std::string line;
    while (std::getline(is, line)) {
        if (is_comment_or_blank(line)) continue;
        const auto f = split_csv(line);
        if (f.size() != 8) throw ParseError("sensor log: expected 8 fields: " + line);
        SensorRecord r;
        r.timestamp = std::stod(f[0]);
        r.gnss.position = {std::stod(f[1]), std::stod(f[2])};
        r.gnss.timestamp = r.timestamp;
        r.ins.speed = std::stod(f[3]);
        r.ins.heading = Heading(std::stod(f[4]));
        r.ins.timestamp = r.timestamp;
        r.lane_obs.dist_left = std::stod(f[5]);
        r.lane_obs.dist_right = std::stod(f[6]);
        r.lane_obs.valid = std::stoi(f[7]) != 0;
        out.push_back(r);
    }
    return out;
}

void write_sensor_log(const std::string& path, const std::vector<SensorRecord>& records) {
    std::ofstream os = open_out(path);
    os << "# timestamp,gnss_north,gnss_east,ins_speed,ins_heading,lane_left,lane_right,lane_valid\n";
    for (const SensorRecord& r : records) {
        os << fmt("%.6f", r.timestamp) << ',' << fmt("%.6f", r.gnss.position.north) << ','
           << fmt("%.6f", r.gnss.position.east) << ',' << fmt("%.6f", r.ins.speed) << ','
           << fmt("%.9f", r.ins.heading.theta) << ',' << fmt("%.6f", r.lane_obs.dist_left) << ','
           << fmt("%.6f", r.lane_obs.dist_right) << ',' << (r.lane_obs.valid ? 1 : 0) << '\n';
    }
}

std::vector<StixelSet> read_stixel_log(const std::string& path) {
    std::ifstream is = open_in(path);
    std::vector<StixelSet> out;
    std::string line;
    while (std::getline(is, line)) {
        if (is_comment_or_blank(line)) continue;
        const auto f = split_csv(line);
        if (f.size() != 6) throw ParseError("stixel log: expected 6 fields: " + line);
        const double ts = std::stod(f[0]);
        SemanticStixel s;
        s.u = std::stod(f[1]);
        s.v_b = std::stod(f[2]);
        s.v_t = std::stod(f[3]);
        s.d = std::stod(f[4]);
        s.label = semantic_class_from_string(f[5]);
        if (out.empty() || out.back().timestamp != ts) {
            StixelSet set;
            set.timestamp = ts;
            out.push_back(set);
        }
        out.back().stixels.push_back(s);
    }
    return out;
}

void write_stixel_log(const std::string& path, const std::vector<StixelSet>& sets) {
    std::ofstream os = open_out(path);
    os << "# timestamp,u,v_b,v_t,d,l\n";
    for (const StixelSet& set : sets) {
        for (const SemanticStixel& s : set.stixels) {
            os << fmt("%.6f", set.timestamp) << ',' << fmt("%.3f", s.u) << ','
               << fmt("%.3f", s.v_b) << ',' << fmt("%.3f", s.v_t) << ',' << fmt("%.4f", s.d)
               << ',' << to_string(s.label) << '\n';
        }
    }
}

std::vector<TrackRecord> read_track_log(const std::string& path) {
    std::ifstream is = open_in(path);
    std::vector<TrackRecord> out;
    std::string line;
    while (std::getline(is, line)) {
        if (is_comment_or_blank(line)) continue;
        const auto f = split_csv(line);
        if (f.size() != 7) throw ParseError("track log: expected 7 fields: " + line);
        TrackRecord r;
        r.timestamp = std::stod(f[0]);
        r.track_id = std::stoi(f[1]);
        r.label = semantic_class_from_string(f[2]);
        r.position = {std::stod(f[3]), std::stod(f[4])};
        r.speed = std::stod(f[5]);
        r.lane = lane_assignment_from_string(f[6]);
        out.push_back(r);
    }
    return out;
}

void write_track_log(const std::string& path, const std::vector<TrackRecord>& records) {
    std::ofstream os = open_out(path);
    os << "# timestamp,track_id,label,map_north,map_east,speed_mps,lane_assignment\n";
    for (const TrackRecord& r : records) {
        os << fmt("%.6f", r.timestamp) << ',' << r.track_id << ',' << to_string(r.label) << ','
           << fmt("%.6f", r.position.north) << ',' << fmt("%.6f", r.position.east) << ','
           << fmt("%.6f", r.speed) << ',' << to_string(r.lane) << '\n';
    }
}

std::vector<FlowRecord> read_flow_log(const std::string& path) {
    std::ifstream is = open_in(path);
    std::vector<FlowRecord> out;
    std::string line;
    while (std::getline(is, line)) {
        if (is_comment_or_blank(line)) continue;
        const auto f = split_csv(line);
        if (f.size() != 5) throw ParseError("flow log: expected 5 fields: " + line);
        FlowRecord r;
        r.timestamp = std::stod(f[0]);
        r.vec = {std::stod(f[1]), std::stod(f[2]), std::stod(f[3]), std::stod(f[4])};
        out.push_back(r);
    }
    return out;
}

void write_flow_log(const std::string& path, const std::vector<FlowRecord>& records) {
    std::ofstream os = open_out(path);
    os << "# timestamp,anchor_u,anchor_v,du,dv\n";
    for (const FlowRecord& r : records) {
        os << fmt("%.6f", r.timestamp) << ',' << fmt("%.3f", r.vec.u) << ','
           << fmt("%.3f", r.vec.v) << ',' << fmt("%.4f", r.vec.du) << ',' << fmt("%.4f", r.vec.dv)
           << '\n';
    }
}

std::vector<TruthRecord> read_truth_log(const std::string& path) {
    std::ifstream is = open_in(path);
    std::vector<TruthRecord> out;
    std::string line;
    while (std::getline(is, line)) {
        if (is_comment_or_blank(line)) continue;
        const auto f = split_csv(line);
        if (f.size() != 10) throw ParseError("truth log: expected 10 fields: " + line);
        TruthRecord r;
        r.timestamp = std::stod(f[0]);
        r.actor.actor_id = std::stoi(f[1]);
        r.actor.label = semantic_class_from_string(f[2]);
        r.actor.position = {std::stod(f[3]), std::stod(f[4])};
        r.actor.speed = std::stod(f[5]);
        r.actor.lane = lane_assignment_from_string(f[6]);
        r.actor.visible_cols = std::stoi(f[7]);
        r.actor.expected_cols = std::stoi(f[8]);
        r.actor.truncated = std::stoi(f[9]) != 0;
        out.push_back(r);
    }
    return out;
}

void write_truth_log(const std::string& path, const std::vector<TruthRecord>& records) {
    std::ofstream os = open_out(path);
    os << "# timestamp,actor_id,label,north,east,speed,lane,visible_cols,expected_cols,truncated\n";
    for (const TruthRecord& r : records) {
        os << fmt("%.6f", r.timestamp) << ',' << r.actor.actor_id << ',' << to_string(r.actor.label)
           << ',' << fmt("%.6f", r.actor.position.north) << ',' << fmt("%.6f", r.actor.position.east)
           << ',' << fmt("%.6f", r.actor.speed) << ',' << to_string(r.actor.lane) << ','
           << r.actor.visible_cols << ',' << r.actor.expected_cols << ','
           << (r.actor.truncated ? 1 : 0) << '\n';
    }
}

std::vector<EgoPose> read_ego_log(const std::string& path) {
    std::ifstream is = open_in(path);
    std::vector<EgoPose> out;
    std::string line;
    while (std::getline(is, line)) {
        if (is_comment_or_blank(line)) continue;
        const auto f = split_csv(line);
        if (f.size() != 4) throw ParseError("ego log: expected 4 fields: " + line);
        EgoPose p;
        p.timestamp = std::stod(f[0]);
        p.position = {std::stod(f[1]), std::stod(f[2])};
        p.theta = Heading(std::stod(f[3]));
        out.push_back(p);
    }
    return out;
}

void write_ego_log(const std::string& path, const std::vector<EgoPose>& poses) {
    std::ofstream os = open_out(path);
    os << "# timestamp,north,east,theta\n";
    for (const EgoPose& p : poses) {
        os << fmt("%.6f", p.timestamp) << ',' << fmt("%.6f", p.position.north) << ','
           << fmt("%.6f", p.position.east) << ',' << fmt("%.9f", p.theta.theta) << '\n';
    }
}

namespace {

std::string frame_name(const char* prefix, int index) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%s_%06d.bin", prefix, index);
    return buf;
}

}  // namespace

void write_dataset(const std::string& dir, const ScenarioConfig& cfg, const DigitalMap& map,
                   Simulator& sim) {
    fs::create_directories(fs::path(dir) / "frames");
    save_map((fs::path(dir) / "map.txt").string(), map);

    json meta;
    meta["camera"] = {{"f_u", cfg.camera.f_u},   {"b_prime", cfg.camera.b_prime},
                      {"c_u", cfg.camera.c_u},   {"c_v", cfg.camera.c_v},
                      {"width", cfg.camera.width}, {"height", cfg.camera.height}};
    meta["frame_rate"] = cfg.frame_rate;
    meta["frames"] = sim.frame_count();
    meta["camera_height"] = cfg.camera_height;
    std::ofstream meta_os((fs::path(dir) / "meta.json").string());
    meta_os << meta.dump(2) << '\n';

    std::vector<SensorRecord> sensors;
    std::vector<FlowRecord> flow;
    std::vector<TruthRecord> truth;
    std::vector<EgoPose> ego;
    int index = 0;
    while (!sim.done()) {
        const SensorFrame frame = sim.next_frame();
        write_raster_u16((fs::path(dir) / "frames" / frame_name("disp", index)).string(),
                         frame.disparity);
        write_raster_u8((fs::path(dir) / "frames" / frame_name("label", index)).string(),
                        frame.labels);
        sensors.push_back({frame.timestamp, frame.gnss, frame.ins, frame.lane_obs});
        for (const FlowVector& v : frame.flow.vectors) flow.push_back({frame.timestamp, v});
        for (const ActorTruth& a : frame.truth_actors) truth.push_back({frame.timestamp, a});
        ego.push_back(frame.truth_ego);
        ++index;
    }
    write_sensor_log((fs::path(dir) / "sensors.csv").string(), sensors);
    write_flow_log((fs::path(dir) / "flow.csv").string(), flow);
    write_truth_log((fs::path(dir) / "truth_actors.csv").string(), truth);
    write_ego_log((fs::path(dir) / "truth_ego.csv").string(), ego);
}

DatasetMeta read_dataset_meta(const std::string& dir) {
    const std::string path = (fs::path(dir) / "meta.json").string();
    std::ifstream is(path);
    if (!is) throw MissingLog("cannot open dataset meta: " + path);
    json meta = json::parse(is, nullptr, true, true);
    DatasetMeta out;
    const json& cam = meta.at("camera");
    out.camera.f_u = cam.at("f_u").get<double>();
    out.camera.b_prime = cam.at("b_prime").get<double>();
    out.camera.c_u = cam.at("c_u").get<double>();
    out.camera.c_v = cam.at("c_v").get<double>();
    out.camera.width = cam.at("width").get<int>();
    out.camera.height = cam.at("height").get<int>();
    out.frame_rate = meta.at("frame_rate").get<double>();
    out.frames = meta.at("frames").get<int>();
    out.camera_height = meta.value("camera_height", 1.5);
    return out;
}

SensorFrame read_dataset_frame(const std::string& dir, const DatasetMeta& meta, int index,
                               const std::vector<SensorRecord>& sensors,
                               const std::vector<FlowRecord>& flow) {
    SensorFrame frame;
    if (index < 0 || index >= static_cast<int>(sensors.size()))
        throw MissingLog("dataset frame index out of range");
    const SensorRecord& rec = sensors[index];
    frame.timestamp = rec.timestamp;
    frame.gnss = rec.gnss;
    frame.ins = rec.ins;
    frame.lane_obs = rec.lane_obs;
    frame.disparity =
        read_raster_u16((fs::path(dir) / "frames" / frame_name("disp", index)).string());
    frame.labels =
        read_raster_u8((fs::path(dir) / "frames" / frame_name("label", index)).string());
    if (!frame.disparity.same_size(meta.camera.width, meta.camera.height) ||
        !frame.labels.same_size(meta.camera.width, meta.camera.height))
        throw ParseError("dataset frame size disagrees with meta.json");
    for (const FlowRecord& f : flow) {
        if (std::abs(f.timestamp - rec.timestamp) < 1e-6) frame.flow.vectors.push_back(f.vec);
    }
    return frame;
}

}  // namespace crosstrack
