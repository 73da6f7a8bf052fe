#include "crosstrack/tracking.hpp"

#include <algorithm>
#include <cmath>

#include "crosstrack/errors.hpp"
#include "crosstrack/hungarian.hpp"

namespace crosstrack {

FlowVector FlowField::lookup(double u, double v, double radius) const {
    FlowVector mean;
    int count = 0;
    const double r2 = radius * radius;
    for (const FlowVector& f : vectors) {
        const double du = f.u - u;
        const double dv = f.v - v;
        if (du * du + dv * dv > r2) continue;
        mean.du += f.du;
        mean.dv += f.dv;
        count++;
    }
    if (count > 0) {
        mean.du /= count;
        mean.dv /= count;
    }
    mean.u = u;
    mean.v = v;
    return mean;
}

void predict(Track& track, const MotionModel& model) {
    track.state += model.dt * track.velocity;
    track.covariance += model.process_noise;
}

ImageCoords flow_propagate(const ImageCoords& coords, const FlowVector& flow) {
    ImageCoords out = coords;
    out.u += flow.du;
    out.v_t += flow.dv;
    return out;
}

Eigen::Vector2d measurement_function(const Eigen::Vector2d& state, const CameraIntrinsics& cam) {
    return {cam.c_u + cam.f_u * state(1) / state(0), cam.b_prime * cam.f_u / state(0)};
}

Eigen::Matrix2d measurement_jacobian(const Eigen::Vector2d& state, const CameraIntrinsics& cam) {
    const double xn = state(0);
    const double xe = state(1);
    Eigen::Matrix2d h;
    h(0, 0) = -cam.f_u * xe / (xn * xn);
    h(0, 1) = cam.f_u / xn;
    h(1, 0) = -cam.b_prime * cam.f_u / (xn * xn);
    h(1, 1) = 0.0;
    return h;
}

Assignment associate(const std::vector<Track>& tracks, const ObstacleSet& obstacles,
                     const FlowField& flow, double gate_px, const CameraIntrinsics& cam) {
    Assignment out;
    const int n_tracks = static_cast<int>(tracks.size());
    const int n_obs = static_cast<int>(obstacles.obstacles.size());
    if (n_tracks == 0 || n_obs == 0) {
        for (int i = 0; i < n_tracks; ++i) out.unmatched_tracks.push_back(i);
        for (int j = 0; j < n_obs; ++j) out.unmatched_obstacles.push_back(j);
        return out;
    }

    std::vector<double> cost(static_cast<size_t>(n_tracks) * n_obs, kAssignmentForbidden);
    for (int i = 0; i < n_tracks; ++i) {
        const Track& t = tracks[i];
        const FlowVector f = flow.lookup(t.last_image_coords.u, t.last_image_coords.v_t);
        const ImageCoords propagated = flow_propagate(t.last_image_coords, f);
        Eigen::Vector2d predicted_z;
        if (t.state(0) > kEpsilonDepth) {
            predicted_z = measurement_function(t.state, cam);
        } else {
            continue;  // degenerate depth, leave row forbidden
        }
        for (int j = 0; j < n_obs; ++j) {
            const ObstacleCluster& o = obstacles.obstacles[j];
            if (o.label != t.label) continue;
            if (std::abs(propagated.u - o.u_center) > gate_px) continue;
            const double du = predicted_z(0) - o.u_center;
            const double dd = predicted_z(1) - o.d_center;
            cost[static_cast<size_t>(i) * n_obs + j] = std::hypot(du, dd);
        }
    }

    const std::vector<int> row_match = solve_assignment(cost, n_tracks, n_obs);
    std::vector<bool> obs_taken(n_obs, false);
    for (int i = 0; i < n_tracks; ++i) {
        if (row_match[i] >= 0) {
            out.matches.emplace_back(i, row_match[i]);
            obs_taken[row_match[i]] = true;
        } else {
            out.unmatched_tracks.push_back(i);
        }
    }
    for (int j = 0; j < n_obs; ++j)
        if (!obs_taken[j]) out.unmatched_obstacles.push_back(j);
    return out;
}

namespace {

void reestimate_velocity(Track& track, int window) {
    const auto& h = track.measured_history;
    if (h.size() < 2) return;
    const size_t first = h.size() > static_cast<size_t>(window + 1)
                             ? h.size() - static_cast<size_t>(window + 1)
                             : 0;
    const double dt = h.back().first - h[first].first;
    if (dt <= 0.0) return;
    track.velocity = (h.back().second - h[first].second) / dt;
}

}  // namespace

void ekf_update(Track& track, const PixelMeasurement& z, const CameraIntrinsics& cam,
                const MotionModel& model) {
    if (!(track.state(0) > kEpsilonDepth))
        throw DepthTooSmall("ekf_update: predicted depth at or below epsilon");

    const Eigen::Matrix2d h_jac = measurement_jacobian(track.state, cam);
    const Eigen::Vector2d predicted = measurement_function(track.state, cam);
    const Eigen::Vector2d innovation(z.u - predicted(0), z.d - predicted(1));
    const Eigen::Matrix2d innovation_cov =
        h_jac * track.covariance * h_jac.transpose() + model.measurement_noise;
    const double det = innovation_cov.determinant();
    if (!(std::abs(det) > 1e-12))
        throw SingularInnovation("ekf_update: innovation covariance not invertible");
    const Eigen::Matrix2d gain = track.covariance * h_jac.transpose() * innovation_cov.inverse();
    track.state += gain * innovation;
    track.covariance = (Eigen::Matrix2d::Identity() - gain * h_jac) * track.covariance;
    track.covariance = 0.5 * (track.covariance + track.covariance.transpose());
}

MapPoint localize_on_map(Track& track, const EgoPose& pose, const Eigen::Vector2d& offset) {
    const Eigen::Vector2d state = track.state + offset;
    const CameraPoint p{state(0), state(1)};
    const MapPoint m = camera_to_map(p, pose);
    track.map_history.push_back({pose.timestamp, m, track.velocity.norm()});
    if (track.map_history.size() > 4096) track.map_history.pop_front();
    return m;
}

CameraPoint estimate_object_center(const std::vector<SemanticStixel>& members,
                                   const CameraIntrinsics& cam, SemanticClass label,
                                   const TrackingParams& params) {
    std::vector<Eigen::Vector2d> pts;
    Eigen::Vector2d centroid = Eigen::Vector2d::Zero();
    for (const SemanticStixel& s : members) {
        if (!(s.d > kMinDisparity)) continue;
        const CameraPoint p = unproject(s.u, s.d, cam);
        pts.emplace_back(p.x_north_cam, p.x_east_cam);
        centroid += pts.back();
    }
    if (pts.empty()) return {0.0, 0.0};
    centroid /= static_cast<double>(pts.size());

    double push = 0.0;
    Eigen::Vector2d normal;
    if (label == SemanticClass::kPedestrian) {
        push = params.pedestrian_half_extent;
        normal = centroid.normalized();  // footprint is square; the ray serves
    } else {
        // dominant visible face by PCA over the footprint points
        Eigen::Matrix2d scatter = Eigen::Matrix2d::Zero();
        for (const Eigen::Vector2d& p : pts) {
            const Eigen::Vector2d d = p - centroid;
            scatter += d * d.transpose();
        }
        Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> eig(scatter);
        const Eigen::Vector2d axis = eig.eigenvectors().col(1);
        double lo = 1e18, hi = -1e18;
        for (const Eigen::Vector2d& p : pts) {
            const double t = axis.dot(p - centroid);
            lo = std::min(lo, t);
            hi = std::max(hi, t);
        }
        const double extent = pts.size() >= 3 ? hi - lo : 0.0;
        push = extent < params.face_cutoff ? params.vehicle_half_length
                                           : params.vehicle_half_width;
        normal = Eigen::Vector2d(-axis(1), axis(0));
        if (pts.size() < 3) normal = centroid.normalized();
        if (normal.dot(centroid) < 0.0) normal = -normal;  // away from the camera
    }
    const Eigen::Vector2d center = centroid + push * normal;
    return {center(0), center(1)};
}

void Tracker::process(const ObstacleSet& obstacles, const FlowField& flow, double timestamp) {
    for (Track& t : tracks_) {
        predict(t, params_.model);
        t.matched_this_frame = false;
    }

    const Assignment assignment = associate(tracks_, obstacles, flow, params_.gate_px, cam_);

    for (const auto& [ti, oi] : assignment.matches) {
        Track& t = tracks_[ti];
        const ObstacleCluster& o = obstacles.obstacles[oi];
        ekf_update(t, PixelMeasurement{o.u_center, o.d_center}, cam_, params_.model);
        if (o.d_center > kMinDisparity) {
            const CameraPoint meas = unproject(o.u_center, o.d_center, cam_);
            const Eigen::Vector2d meas_vec(meas.x_north_cam, meas.x_east_cam);
            t.measured_history.emplace_back(timestamp, meas_vec);
            while (t.measured_history.size() > static_cast<size_t>(params_.velocity_window + 1))
                t.measured_history.pop_front();
            const CameraPoint center = estimate_object_center(o.members, cam_, t.label, params_);
            t.center_correction =
                Eigen::Vector2d(center.x_north_cam, center.x_east_cam) - meas_vec;
        }
        reestimate_velocity(t, params_.velocity_window);
        t.last_image_coords = {o.u_center, o.v_t_center, o.d_center};
        t.hits++;
        t.misses = 0;
        t.matched_this_frame = true;
        if (t.hits >= params_.confirm_hits) t.confirmed = true;
    }
    for (int ti : assignment.unmatched_tracks) {
        tracks_[ti].misses++;
        tracks_[ti].hits = 0;
    }
    for (Track& t : tracks_) t.age++;

    tracks_.erase(std::remove_if(tracks_.begin(), tracks_.end(),
                                 [&](const Track& t) { return t.misses >= params_.max_misses; }),
                  tracks_.end());

    // unmatched obstacles spawn tentative tracks with the speed prior along
    // the ego heading (camera-frame forward); past the spawn range the
    // stereo depth is too coarse to initialize from
    const double spawn_disparity =
        cam_.b_prime * cam_.f_u / std::max(1.0, params_.max_spawn_range);
    for (int oi : assignment.unmatched_obstacles) {
        const ObstacleCluster& o = obstacles.obstacles[oi];
        if (!(o.d_center > std::max(kMinDisparity, spawn_disparity))) continue;
        const CameraPoint p = unproject(o.u_center, o.d_center, cam_);
        Track t;
        t.id = next_id_++;
        t.state = Eigen::Vector2d(p.x_north_cam, p.x_east_cam);
        t.covariance = Eigen::Matrix2d::Identity() * 2.0;
        t.velocity = Eigen::Vector2d(params_.initial_speed, 0.0);
        t.label = o.label;
        t.age = 1;
        t.hits = 1;
        t.misses = 0;
        t.matched_this_frame = true;
        t.last_image_coords = {o.u_center, o.v_t_center, o.d_center};
        t.measured_history.emplace_back(timestamp, t.state);
        const CameraPoint center = estimate_object_center(o.members, cam_, t.label, params_);
        t.center_correction =
            Eigen::Vector2d(center.x_north_cam, center.x_east_cam) - t.state;
        tracks_.push_back(std::move(t));
    }
}

}  // namespace crosstrack
