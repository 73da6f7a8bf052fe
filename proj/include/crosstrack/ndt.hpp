#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "crosstrack/geometry.hpp"

namespace crosstrack {

struct NdtCell {
    Eigen::Vector2d mean = Eigen::Vector2d::Zero();
    Eigen::Matrix2d cov_inverse = Eigen::Matrix2d::Identity();
    int count = 0;
};

struct NdtParams {
    double cell_size = 2.0;          // m
    double window_deg = 15.0;        // half-width of the theta search window
    double coarse_step_deg = 0.5;
    double resolution_deg = 0.02;    // golden-section stop width
    double score_floor = 1.0;        // below this the estimate is rejected
    int min_cell_points = 3;
};

// Per-cell Gaussians over a 2D point cloud. Cells with fewer than
// min_cell_points are dropped; covariance eigenvalues are floored at
// 0.01 * lambda_max so thin walls stay invertible.
class NdtGrid {
public:
    NdtGrid() = default;
    NdtGrid(const std::vector<MapPoint>& points, const NdtParams& params);

    bool empty() const { return cells_.empty(); }
    size_t cell_count() const { return cells_.size(); }
    double cell_size() const { return cell_size_; }
    const NdtCell* find(MapPoint p) const;

    // stored cells in index order, for inspection
    std::vector<std::pair<std::pair<int64_t, int64_t>, NdtCell>> cells() const;

private:
    std::map<std::pair<int64_t, int64_t>, NdtCell> cells_;
    double cell_size_ = 2.0;
};

// Sum over points of exp(-1/2 (p' - mu)^T Sigma^-1 (p' - mu)) where
// p' = rotate2d(theta, p) + ego; points landing in empty cells score 0.
double ndt_score(Heading theta, const std::vector<CameraPoint>& stixel_points, MapPoint ego,
                 const NdtGrid& grid);

// Argmax of ndt_score over theta in [theta_init - window, theta_init + window]:
// coarse grid sweep, then golden-section refinement. Returns nullopt when the
// peak score stays below params.score_floor (low confidence).
std::optional<Heading> estimate_heading(const std::vector<CameraPoint>& stixel_points,
                                        MapPoint ego, const NdtGrid& grid, Heading theta_init,
                                        const NdtParams& params);

}  // namespace crosstrack
