#include "crosstrack/stixel.hpp"

#include <algorithm>
#include <array>
#include <map>

#include "crosstrack/dbscan.hpp"
#include "crosstrack/errors.hpp"

namespace crosstrack {

const char* to_string(SemanticClass c) {
    switch (c) {
        case SemanticClass::kVehicle: return "vehicle";
        case SemanticClass::kPedestrian: return "pedestrian";
        case SemanticClass::kBuilding: return "building";
        case SemanticClass::kOther: return "other";
    }
    return "other";
}

SemanticClass semantic_class_from_string(const std::string& s) {
    if (s == "vehicle") return SemanticClass::kVehicle;
    if (s == "pedestrian") return SemanticClass::kPedestrian;
    if (s == "building") return SemanticClass::kBuilding;
    if (s == "other") return SemanticClass::kOther;
    throw ParseError("unknown semantic class: " + s);
}

namespace {

double median_inplace(std::vector<double>& v) {
    const size_t n = v.size();
    std::sort(v.begin(), v.end());
    if (n % 2 == 1) return v[n / 2];
    return 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

// stixel classes come straight from the raster label codes; ground and sky
// rows carry no obstacle
bool obstacle_code(uint8_t code, SemanticClass& out) {
    switch (code) {
        case kLabelVehicle: out = SemanticClass::kVehicle; return true;
        case kLabelPedestrian: out = SemanticClass::kPedestrian; return true;
        case kLabelBuilding: out = SemanticClass::kBuilding; return true;
        case kLabelOther: out = SemanticClass::kOther; return true;
        default: return false;
    }
}

struct RowSummary {
    bool obstacle = false;
    SemanticClass label = SemanticClass::kOther;
    double disparity = 0.0;
};

// Median maintained over the disparities of an open segment.
struct RunningMedian {
    std::vector<double> sorted;

    void clear() { sorted.clear(); }
    void push(double d) { sorted.insert(std::upper_bound(sorted.begin(), sorted.end(), d), d); }
    double median() const {
        const size_t n = sorted.size();
        if (n % 2 == 1) return sorted[n / 2];
        return 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
    }
    bool empty() const { return sorted.empty(); }
};

}  // namespace

StixelSet extract_stixels(const DisparityRaster& disparity, const LabelRaster& labels,
                          const CameraIntrinsics& cam, const StixelParams& params) {
    if (!disparity.same_size(labels.width, labels.height) ||
        !disparity.same_size(cam.width, cam.height))
        throw DimensionMismatch("extract_stixels: raster dimensions disagree");

    StixelSet out;
    const int width = disparity.width;
    const int height = disparity.height;
    const int band_w = std::max(1, params.stixel_width);

    std::vector<double> row_disps;
    std::vector<int> label_votes;

    for (int band_start = 0; band_start < width; band_start += band_w) {
        const int band_end = std::min(band_start + band_w, width);
        const double band_u = 0.5 * (band_start + band_end - 1);

        // summarize each row of the band: majority obstacle label + median disparity
        std::vector<RowSummary> rows(height);
        for (int v = 0; v < height; ++v) {
            label_votes.assign(6, 0);
            row_disps.clear();
            for (int u = band_start; u < band_end; ++u) {
                const uint8_t code = labels.at(v, u);
                label_votes[code < 6 ? code : static_cast<uint8_t>(kLabelOther)]++;
            }
            const int majority = static_cast<int>(
                std::max_element(label_votes.begin(), label_votes.end()) - label_votes.begin());
            SemanticClass cls;
            if (!obstacle_code(static_cast<uint8_t>(majority), cls)) continue;
            for (int u = band_start; u < band_end; ++u) {
                if (labels.at(v, u) == majority)
                    row_disps.push_back(disparity.at(v, u) / kDisparityScale);
            }
            if (row_disps.empty()) continue;
            rows[v].obstacle = true;
            rows[v].label = cls;
            rows[v].disparity = median_inplace(row_disps);
        }

        // maximal runs of equal label whose disparity stays near the running median
        int run_start = -1;
        SemanticClass run_label = SemanticClass::kOther;
        RunningMedian run_median;
        auto close_run = [&](int last_row) {
            if (run_start < 0) return;
            const int run_len = last_row - run_start + 1;
            const double d = run_median.median();
            if (run_len >= params.min_height_px && run_len >= 2 && d > params.min_disparity) {
                SemanticStixel s;
                s.u = band_u;
                s.v_t = run_start;
                s.v_b = last_row;
                s.d = d;
                s.label = run_label;
                out.stixels.push_back(s);
            }
            run_start = -1;
            run_median.clear();
        };

        for (int v = 0; v < height; ++v) {
            const RowSummary& r = rows[v];
            const bool continues = run_start >= 0 && r.obstacle && r.label == run_label &&
                                   std::abs(r.disparity - run_median.median()) <=
                                       params.disparity_tolerance;
            if (continues) {
                run_median.push(r.disparity);
                continue;
            }
            close_run(v - 1);
            if (r.obstacle) {
                run_start = v;
                run_label = r.label;
                run_median.push(r.disparity);
            }
        }
        close_run(height - 1);
    }
    return out;
}

Centroid obstacle_centroid(const std::vector<SemanticStixel>& members) {
    if (members.empty()) throw EmptyCluster("obstacle_centroid: no members");
    Centroid c;
    std::vector<double> disps;
    disps.reserve(members.size());
    for (const SemanticStixel& s : members) {
        c.u_center += s.u;
        c.v_t_center += s.v_t;
        disps.push_back(s.d);
    }
    c.u_center /= members.size();
    c.v_t_center /= members.size();
    c.d_center = median_inplace(disps);
    return c;
}

ObstacleSet cluster_stixels(const StixelSet& s, const CameraIntrinsics& cam, double eps,
                            int min_pts, bool label_constrained) {
    ObstacleSet out;
    out.timestamp = s.timestamp;

    // usable stixels and their camera-plane feature points
    std::vector<int> usable;
    std::vector<DbscanPoint> features;
    for (int i = 0; i < static_cast<int>(s.stixels.size()); ++i) {
        const SemanticStixel& st = s.stixels[i];
        if (!(st.d > kMinDisparity)) continue;
        const CameraPoint p = unproject(st.u, st.d, cam);
        usable.push_back(i);
        features.push_back({p.x_north_cam, p.x_east_cam});
    }
    if (usable.empty()) return out;

    // partition by label when constrained; +inf cross-label distance is
    // equivalent to clustering each class on its own
    std::map<int, std::vector<int>> partitions;  // partition key -> indices into usable
    for (int k = 0; k < static_cast<int>(usable.size()); ++k) {
        const int part = label_constrained
                             ? static_cast<int>(s.stixels[usable[k]].label)
                             : 0;
        partitions[part].push_back(k);
    }

    std::vector<ObstacleCluster> clusters;
    for (const auto& [part, idxs] : partitions) {
        std::vector<DbscanPoint> pts;
        pts.reserve(idxs.size());
        for (int k : idxs) pts.push_back(features[k]);
        const std::vector<int> labels = dbscan(pts, eps, min_pts);
        const int n_clusters = labels.empty() ? 0 : *std::max_element(labels.begin(), labels.end()) + 1;
        std::vector<ObstacleCluster> local(std::max(0, n_clusters));
        for (size_t k = 0; k < idxs.size(); ++k) {
            if (labels[k] < 0) continue;  // noise
            local[labels[k]].members.push_back(s.stixels[usable[idxs[k]]]);
        }
        for (ObstacleCluster& c : local)
            if (!c.members.empty()) clusters.push_back(std::move(c));
    }

    for (ObstacleCluster& c : clusters) {
        const Centroid cen = obstacle_centroid(c.members);
        c.u_center = cen.u_center;
        c.v_t_center = cen.v_t_center;
        c.d_center = cen.d_center;
        // majority class; under the constrained metric members are pure anyway
        std::array<int, 4> votes{0, 0, 0, 0};
        for (const SemanticStixel& m : c.members) votes[static_cast<int>(m.label)]++;
        c.label = static_cast<SemanticClass>(
            std::max_element(votes.begin(), votes.end()) - votes.begin());
    }

    // renumber 1..C by leftmost member column
    std::sort(clusters.begin(), clusters.end(), [](const ObstacleCluster& a, const ObstacleCluster& b) {
        const auto key = [](const ObstacleCluster& c) {
            double min_u = c.members.front().u, min_vt = c.members.front().v_t;
            for (const SemanticStixel& m : c.members) {
                min_u = std::min(min_u, m.u);
                min_vt = std::min(min_vt, m.v_t);
            }
            return std::tuple<double, double, int>(min_u, min_vt, static_cast<int>(c.label));
        };
        return key(a) < key(b);
    });
    for (int i = 0; i < static_cast<int>(clusters.size()); ++i) clusters[i].cluster_id = i + 1;
    out.obstacles = std::move(clusters);
    return out;
}

}  // namespace crosstrack
