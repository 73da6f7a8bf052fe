#include <doctest.h>

#include <algorithm>

#include "crosstrack/eval.hpp"
#include "crosstrack/hungarian.hpp"
#include "crosstrack/random.hpp"
#include "oracles.hpp"

using namespace crosstrack;

namespace {

Detection det(double n, double e, SemanticClass label = SemanticClass::kVehicle, int id = 1) {
    return {{n, e}, label, id, {}};
}

GroundTruthObject gt(int id, double n, double e, SemanticClass label = SemanticClass::kVehicle) {
    return {id, {n, e}, label, {}};
}

TrackRecord track_rec(double t, int id, double n, double e, LaneAssignment lane = {},
                      SemanticClass label = SemanticClass::kVehicle) {
    TrackRecord r;
    r.timestamp = t;
    r.track_id = id;
    r.label = label;
    r.position = {n, e};
    r.lane = lane;
    return r;
}

TruthRecord truth_rec(double t, int id, double n, double e, LaneAssignment lane = {},
                      SemanticClass label = SemanticClass::kVehicle, int cols = 50) {
    TruthRecord r;
    r.timestamp = t;
    r.actor.actor_id = id;
    r.actor.label = label;
    r.actor.position = {n, e};
    r.actor.lane = lane;
    r.actor.visible_cols = cols;
    return r;
}

}  // namespace

TEST_CASE("identical sets match perfectly") {
    std::vector<Detection> d = {det(0, 0), det(10, 5), det(-3, 2)};
    std::vector<GroundTruthObject> g = {gt(1, 0, 0), gt(2, 10, 5), gt(3, -3, 2)};
    const FrameEval e = match_frame(d, g, 2.0);
    CHECK(e.true_positives == 3);
    CHECK(e.false_positives == 0);
    CHECK(e.misses == 0);
}

TEST_CASE("a spurious detection counts as a false positive") {
    std::vector<Detection> d = {det(0, 0), det(50, 50)};
    std::vector<GroundTruthObject> g = {gt(1, 0, 0)};
    const FrameEval e = match_frame(d, g, 2.0);
    CHECK(e.true_positives == 1);
    CHECK(e.false_positives == 1);
    CHECK(e.misses == 0);
}

TEST_CASE("labels must agree for a match") {
    std::vector<Detection> d = {det(0, 0, SemanticClass::kPedestrian)};
    std::vector<GroundTruthObject> g = {gt(1, 0, 0, SemanticClass::kVehicle)};
    const FrameEval e = match_frame(d, g, 2.0);
    CHECK(e.true_positives == 0);
    CHECK(e.false_positives == 1);
    CHECK(e.misses == 1);
}

TEST_CASE("crossed distances resolve to the optimal matching") {
    // verified against exhaustive enumeration
    Rng rng(3);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<Detection> d;
        std::vector<GroundTruthObject> g;
        const int n_det = rng.uniform_int(1, 3);
        const int n_gt = rng.uniform_int(1, 3);
        for (int i = 0; i < n_det; ++i) d.push_back(det(rng.uniform(0, 6), rng.uniform(0, 6)));
        for (int j = 0; j < n_gt; ++j) g.push_back(gt(j + 1, rng.uniform(0, 6), rng.uniform(0, 6)));
        const double radius = 4.0;
        const FrameEval e = match_frame(d, g, radius);

        std::vector<double> cost(static_cast<size_t>(n_det) * n_gt, kAssignmentForbidden);
        for (int i = 0; i < n_det; ++i)
            for (int j = 0; j < n_gt; ++j) {
                const double dist = distance(d[i].position, g[j].position);
                if (dist <= radius) cost[static_cast<size_t>(i) * n_gt + j] = dist;
            }
        const auto ref = oracle::assignment_bruteforce(cost, n_det, n_gt, kAssignmentForbidden);
        CHECK(e.true_positives == ref.matched);
        double got = 0.0;
        for (const auto& [di, gi] : e.matches) got += distance(d[di].position, g[gi].position);
        CHECK(got == doctest::Approx(ref.cost).epsilon(1e-9));
    }
}

TEST_CASE("perfect tracking aggregates to perfect rates") {
    std::vector<TrackRecord> tracks;
    std::vector<TruthRecord> truth;
    for (int frame = 0; frame < 20; ++frame) {
        const double t = frame / 15.0;
        tracks.push_back(track_rec(t, 1, 10.0 + frame, 2.0));
        truth.push_back(truth_rec(t, 7, 10.0 + frame, 2.0));
    }
    const EvalReport r = evaluate(tracks, truth, EvalParams{});
    CHECK(r.detection_rate == doctest::Approx(1.0));
    CHECK(r.fp_rate == doctest::Approx(0.0));
    CHECK(r.frames_with_fp == 0);
    CHECK(r.mt_rate == doctest::Approx(1.0));
    CHECK(r.ml_rate == doctest::Approx(0.0));
}

TEST_CASE("mt and ml follow the coverage thresholds") {
    std::vector<TrackRecord> tracks;
    std::vector<TruthRecord> truth;
    for (int frame = 0; frame < 100; ++frame) {
        const double t = frame / 15.0;
        truth.push_back(truth_rec(t, 1, 5.0, 0.0));   // covered 85%
        truth.push_back(truth_rec(t, 2, 50.0, 0.0));  // covered 15%
        if (frame < 85) tracks.push_back(track_rec(t, 11, 5.0, 0.0));
        if (frame < 15) tracks.push_back(track_rec(t, 12, 50.0, 0.0));
    }
    const EvalReport r = evaluate(tracks, truth, EvalParams{});
    REQUIRE(r.per_trajectory.size() == 2);
    const auto& a = r.per_trajectory[0];
    const auto& b = r.per_trajectory[1];
    CHECK(a.coverage == doctest::Approx(0.85));
    CHECK(a.mostly_tracked);
    CHECK(!a.mostly_lost);
    CHECK(b.coverage == doctest::Approx(0.15));
    CHECK(!b.mostly_tracked);
    CHECK(b.mostly_lost);
    CHECK(r.mt_rate + r.ml_rate <= 1.0 + 1e-12);
}

TEST_CASE("lane localization rate counts matched detections on the truth lane") {
    const LaneAssignment lane1{LaneAssignmentKind::kLane, 1};
    const LaneAssignment lane2{LaneAssignmentKind::kLane, 2};
    std::vector<TrackRecord> tracks;
    std::vector<TruthRecord> truth;
    for (int frame = 0; frame < 10; ++frame) {
        const double t = frame / 15.0;
        tracks.push_back(track_rec(t, 1, 5.0, 0.0, frame < 7 ? lane1 : lane2));
        truth.push_back(truth_rec(t, 1, 5.0, 0.0, lane1));
    }
    const EvalReport r = evaluate(tracks, truth, EvalParams{});
    CHECK(r.lane_localization_rate == doctest::Approx(0.7));
}

TEST_CASE("metrics are invariant under record reordering") {
    Rng rng(9);
    std::vector<TrackRecord> tracks;
    std::vector<TruthRecord> truth;
    for (int frame = 0; frame < 30; ++frame) {
        const double t = frame / 15.0;
        truth.push_back(truth_rec(t, 1, 5.0 + frame, 0.0));
        truth.push_back(truth_rec(t, 2, -5.0, 3.0 + frame));
        if (frame % 3 != 0) tracks.push_back(track_rec(t, 4, 5.0 + frame, 0.2));
        if (frame % 4 != 0) tracks.push_back(track_rec(t, 5, -5.1, 3.0 + frame));
        if (frame == 10) tracks.push_back(track_rec(t, 6, 90.0, 90.0));
    }
    const EvalReport base = evaluate(tracks, truth, EvalParams{});

    for (int trial = 0; trial < 5; ++trial) {
        auto t2 = tracks;
        auto g2 = truth;
        for (size_t i = t2.size(); i > 1; --i)
            std::swap(t2[i - 1], t2[rng.uniform_int(0, static_cast<int>(i) - 1)]);
        for (size_t i = g2.size(); i > 1; --i)
            std::swap(g2[i - 1], g2[rng.uniform_int(0, static_cast<int>(i) - 1)]);
        const EvalReport r = evaluate(t2, g2, EvalParams{});
        CHECK(r.detection_rate == doctest::Approx(base.detection_rate));
        CHECK(r.fp_rate == doctest::Approx(base.fp_rate));
        CHECK(r.frames_with_fp == base.frames_with_fp);
        CHECK(r.mt_rate == doctest::Approx(base.mt_rate));
        CHECK(r.lane_localization_rate == doctest::Approx(base.lane_localization_rate));
    }
}

TEST_CASE("report renders the quantitative table columns") {
    std::vector<TrackRecord> tracks = {track_rec(0.0, 1, 0.0, 0.0)};
    std::vector<TruthRecord> truth = {truth_rec(0.0, 1, 0.0, 0.0)};
    const EvalReport r = evaluate(tracks, truth, EvalParams{});
    const std::string table = render_report_table(r);
    CHECK(table.find("Detection Rate") != std::string::npos);
    CHECK(table.find("False Positive") != std::string::npos);
    CHECK(table.find("Frames with False Positive") != std::string::npos);
    CHECK(table.find("MT") != std::string::npos);
    CHECK(table.find("ML") != std::string::npos);
    CHECK(table.find("Lane-Localization Rate") != std::string::npos);

    const std::string kv = render_report_kv(r);
    CHECK(kv.find("detection_rate=1.000000") != std::string::npos);
    CHECK(kv.find("frames_with_fp=0") != std::string::npos);
}

TEST_CASE("rates stay within [0, 1]") {
    Rng rng(15);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<TrackRecord> tracks;
        std::vector<TruthRecord> truth;
        for (int frame = 0; frame < 10; ++frame) {
            const double t = frame / 15.0;
            const int nd = rng.uniform_int(0, 4);
            const int ng = rng.uniform_int(0, 4);
            for (int i = 0; i < nd; ++i)
                tracks.push_back(track_rec(t, i + 1, rng.uniform(-20, 20), rng.uniform(-20, 20)));
            for (int j = 0; j < ng; ++j)
                truth.push_back(truth_rec(t, j + 1, rng.uniform(-20, 20), rng.uniform(-20, 20)));
        }
        const EvalReport r = evaluate(tracks, truth, EvalParams{});
        for (double rate : {r.detection_rate, r.fp_rate, r.mt_rate, r.ml_rate,
                            r.lane_localization_rate}) {
            CHECK(rate >= 0.0);
            CHECK(rate <= 1.0);
        }
        CHECK(r.mt_rate + r.ml_rate <= 1.0 + 1e-12);
    }
}

TEST_CASE("actors below the visibility floor are not ground truth") {
    std::vector<TrackRecord> tracks;
    std::vector<TruthRecord> truth = {truth_rec(0.0, 1, 0.0, 0.0, {}, SemanticClass::kVehicle, 4)};
    const EvalReport r = evaluate(tracks, truth, EvalParams{});
    CHECK(r.total_misses == 0);
    CHECK(r.gt_trajectories == 0);
}
