#include "crosstrack/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>
#include <sstream>

#include "crosstrack/hungarian.hpp"

namespace crosstrack {

FrameEval match_frame(const std::vector<Detection>& detections,
                      const std::vector<GroundTruthObject>& truth, double radius) {
    FrameEval eval;
    const int n_det = static_cast<int>(detections.size());
    const int n_gt = static_cast<int>(truth.size());

    if (n_det > 0 && n_gt > 0) {
        std::vector<double> cost(static_cast<size_t>(n_det) * n_gt, kAssignmentForbidden);
        for (int i = 0; i < n_det; ++i) {
            for (int j = 0; j < n_gt; ++j) {
                if (detections[i].label != truth[j].label) continue;
                const double d = distance(detections[i].position, truth[j].position);
                if (d > radius) continue;
                cost[static_cast<size_t>(i) * n_gt + j] = d;
            }
        }
        const std::vector<int> match = solve_assignment(cost, n_det, n_gt);
        for (int i = 0; i < n_det; ++i)
            if (match[i] >= 0) eval.matches.emplace_back(i, match[i]);
    }

    eval.true_positives = static_cast<int>(eval.matches.size());
    eval.false_positives = n_det - eval.true_positives;
    eval.misses = n_gt - eval.true_positives;
    return eval;
}

namespace {

int64_t time_key(double t) { return static_cast<int64_t>(std::llround(t * 1000.0)); }

}  // namespace

EvalReport evaluate(const std::vector<TrackRecord>& tracks,
                    const std::vector<TruthRecord>& truth, const EvalParams& params) {
    // group by timestamp; ordering of the inputs must not matter
    std::map<int64_t, std::vector<const TrackRecord*>> tracks_by_t;
    for (const TrackRecord& r : tracks) tracks_by_t[time_key(r.timestamp)].push_back(&r);
    std::map<int64_t, std::vector<const TruthRecord*>> truth_by_t;
    for (const TruthRecord& r : truth) truth_by_t[time_key(r.timestamp)].push_back(&r);

    EvalReport rep;
    std::map<int, int> gt_visible_frames;   // actor id -> frames visible
    std::map<int, int> gt_matched_frames;   // actor id -> frames matched

    std::set<int64_t> all_times;
    for (const auto& [t, _] : tracks_by_t) all_times.insert(t);
    for (const auto& [t, _] : truth_by_t) all_times.insert(t);

    for (int64_t t : all_times) {
        std::vector<Detection> detections;
        std::vector<GroundTruthObject> gt;
        std::vector<GroundTruthObject> ignore;  // actors below the visibility floor
        if (auto it = tracks_by_t.find(t); it != tracks_by_t.end()) {
            auto sorted = it->second;
            std::sort(sorted.begin(), sorted.end(),
                      [](const TrackRecord* a, const TrackRecord* b) { return a->track_id < b->track_id; });
            for (const TrackRecord* r : sorted)
                detections.push_back({r->position, r->label, r->track_id, r->lane});
        }
        if (auto it = truth_by_t.find(t); it != truth_by_t.end()) {
            auto sorted = it->second;
            std::sort(sorted.begin(), sorted.end(), [](const TruthRecord* a, const TruthRecord* b) {
                return a->actor.actor_id < b->actor.actor_id;
            });
            for (const TruthRecord* r : sorted) {
                const GroundTruthObject obj{r->actor.actor_id, r->actor.position, r->actor.label,
                                            r->actor.lane};
                const bool occluded =
                    r->actor.expected_cols > 0 &&
                    r->actor.visible_cols <
                        params.min_visible_fraction * r->actor.expected_cols;
                if (r->actor.visible_cols < params.min_visible_cols || r->actor.truncated ||
                    occluded) {
                    ignore.push_back(obj);
                } else {
                    gt.push_back(obj);
                    gt_visible_frames[r->actor.actor_id]++;
                }
            }
        }

        const FrameEval fe = match_frame(detections, gt, params.match_radius);

        // unmatched detections near a barely-visible actor are discarded
        // rather than counted against the pipeline
        std::vector<bool> matched_det(detections.size(), false);
        for (const auto& [di, gi] : fe.matches) matched_det[di] = true;
        int ignored = 0;
        for (size_t di = 0; di < detections.size(); ++di) {
            if (matched_det[di]) continue;
            for (const GroundTruthObject& ig : ignore) {
                if (ig.label == detections[di].label &&
                    distance(ig.position, detections[di].position) <= params.ignore_radius) {
                    ignored++;
                    break;
                }
            }
        }

        rep.frames_total++;
        rep.total_tp += fe.true_positives;
        rep.total_fp += fe.false_positives - ignored;
        rep.total_misses += fe.misses;
        rep.total_detections += static_cast<long>(detections.size()) - ignored;
        if (fe.false_positives - ignored > 0) rep.frames_with_fp++;

        for (const auto& [di, gi] : fe.matches) {
            gt_matched_frames[gt[gi].object_id]++;
            rep.lane_total++;
            if (detections[di].lane == gt[gi].lane) rep.lane_matched++;
        }
    }

    rep.detection_rate = (rep.total_tp + rep.total_misses) > 0
                             ? static_cast<double>(rep.total_tp) / (rep.total_tp + rep.total_misses)
                             : 0.0;
    rep.fp_rate = rep.total_detections > 0
                      ? static_cast<double>(rep.total_fp) / rep.total_detections
                      : 0.0;
    rep.lane_localization_rate =
        rep.lane_total > 0 ? static_cast<double>(rep.lane_matched) / rep.lane_total : 0.0;

    int mt = 0, ml = 0;
    for (const auto& [id, visible] : gt_visible_frames) {
        TrackEvalEntry entry;
        entry.object_id = id;
        entry.coverage = visible > 0
                             ? static_cast<double>(gt_matched_frames.count(id) ? gt_matched_frames[id] : 0) / visible
                             : 0.0;
        entry.mostly_tracked = entry.coverage > params.mt_threshold;
        entry.mostly_lost = entry.coverage < params.ml_threshold;
        if (entry.mostly_tracked) mt++;
        if (entry.mostly_lost) ml++;
        rep.per_trajectory.push_back(entry);
    }
    rep.gt_trajectories = static_cast<int>(gt_visible_frames.size());
    if (rep.gt_trajectories > 0) {
        rep.mt_rate = static_cast<double>(mt) / rep.gt_trajectories;
        rep.ml_rate = static_cast<double>(ml) / rep.gt_trajectories;
    }
    return rep;
}

std::string render_report_table(const EvalReport& r) {
    char buf[128];
    std::ostringstream os;
    os << "metric                          value\n";
    os << "------------------------------  -----------\n";
    std::snprintf(buf, sizeof(buf), "%-30s  %.1f%%\n", "Detection Rate", 100.0 * r.detection_rate);
    os << buf;
    std::snprintf(buf, sizeof(buf), "%-30s  %.2f%%\n", "False Positive", 100.0 * r.fp_rate);
    os << buf;
    std::snprintf(buf, sizeof(buf), "%-30s  %d / %d\n", "Frames with False Positive",
                  r.frames_with_fp, r.frames_total);
    os << buf;
    std::snprintf(buf, sizeof(buf), "%-30s  %.1f%%\n", "MT", 100.0 * r.mt_rate);
    os << buf;
    std::snprintf(buf, sizeof(buf), "%-30s  %.1f%%\n", "ML", 100.0 * r.ml_rate);
    os << buf;
    std::snprintf(buf, sizeof(buf), "%-30s  %.1f%%\n", "Lane-Localization Rate",
                  100.0 * r.lane_localization_rate);
    os << buf;
    return os.str();
}

std::string render_report_kv(const EvalReport& r) {
    char buf[96];
    std::ostringstream os;
    auto put = [&](const char* key, const char* format, auto value) {
        std::snprintf(buf, sizeof(buf), format, value);
        os << key << '=' << buf << '\n';
    };
    put("detection_rate", "%.6f", r.detection_rate);
    put("fp_rate", "%.6f", r.fp_rate);
    put("frames_with_fp", "%d", r.frames_with_fp);
    put("frames_total", "%d", r.frames_total);
    put("tp", "%ld", r.total_tp);
    put("fp", "%ld", r.total_fp);
    put("misses", "%ld", r.total_misses);
    put("detections", "%ld", r.total_detections);
    put("mt_rate", "%.6f", r.mt_rate);
    put("ml_rate", "%.6f", r.ml_rate);
    put("gt_trajectories", "%d", r.gt_trajectories);
    put("lane_localization_rate", "%.6f", r.lane_localization_rate);
    return os.str();
}

}  // namespace crosstrack
