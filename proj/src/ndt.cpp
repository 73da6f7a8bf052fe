#include "crosstrack/ndt.hpp"

#include <cmath>

#include "crosstrack/errors.hpp"

namespace crosstrack {

namespace {

std::pair<int64_t, int64_t> cell_key(MapPoint p, double cell_size) {
    return {static_cast<int64_t>(std::floor(p.north / cell_size)),
            static_cast<int64_t>(std::floor(p.east / cell_size))};
}

}  // namespace

NdtGrid::NdtGrid(const std::vector<MapPoint>& points, const NdtParams& params)
    : cell_size_(params.cell_size) {
    // moments accumulated relative to the cell origin; raw global
    // coordinates would cancel catastrophically in the covariance
    struct Accum {
        double sn = 0, se = 0;
        double snn = 0, sne = 0, see = 0;
        int count = 0;
    };
    std::map<std::pair<int64_t, int64_t>, Accum> accum;
    for (const MapPoint& p : points) {
        const auto key = cell_key(p, cell_size_);
        Accum& a = accum[key];
        const double ln = p.north - key.first * cell_size_;
        const double le = p.east - key.second * cell_size_;
        a.sn += ln;
        a.se += le;
        a.snn += ln * ln;
        a.sne += ln * le;
        a.see += le * le;
        a.count++;
    }
    for (const auto& [key, a] : accum) {
        if (a.count < params.min_cell_points) continue;
        const double n = a.count;
        const Eigen::Vector2d local_mean(a.sn / n, a.se / n);
        const Eigen::Vector2d mean(local_mean(0) + key.first * cell_size_,
                                   local_mean(1) + key.second * cell_size_);
        Eigen::Matrix2d cov;
        cov(0, 0) = a.snn / n - local_mean(0) * local_mean(0);
        cov(0, 1) = a.sne / n - local_mean(0) * local_mean(1);
        cov(1, 0) = cov(0, 1);
        cov(1, 1) = a.see / n - local_mean(1) * local_mean(1);

        // floor the small eigenvalue so thin walls stay invertible
        Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> eig(cov);
        Eigen::Vector2d vals = eig.eigenvalues();
        const double floor_val = std::max(1e-9, 0.01 * vals.maxCoeff());
        vals(0) = std::max(vals(0), floor_val);
        vals(1) = std::max(vals(1), floor_val);
        const Eigen::Matrix2d regularized =
            eig.eigenvectors() * vals.asDiagonal() * eig.eigenvectors().transpose();

        NdtCell cell;
        cell.mean = mean;
        cell.cov_inverse = regularized.inverse();
        cell.count = a.count;
        cells_[key] = cell;
    }
    if (cells_.empty()) throw InsufficientPoints("build_ndt: no cell gathered 3+ points");
}

const NdtCell* NdtGrid::find(MapPoint p) const {
    const auto it = cells_.find(cell_key(p, cell_size_));
    return it == cells_.end() ? nullptr : &it->second;
}

std::vector<std::pair<std::pair<int64_t, int64_t>, NdtCell>> NdtGrid::cells() const {
    return {cells_.begin(), cells_.end()};
}

double ndt_score(Heading theta, const std::vector<CameraPoint>& stixel_points, MapPoint ego,
                 const NdtGrid& grid) {
    const double c = std::cos(theta.theta);
    const double s = std::sin(theta.theta);
    double score = 0.0;
    for (const CameraPoint& b : stixel_points) {
        const MapPoint p{c * b.x_north_cam - s * b.x_east_cam + ego.north,
                         s * b.x_north_cam + c * b.x_east_cam + ego.east};
        const NdtCell* cell = grid.find(p);
        if (!cell) continue;
        const Eigen::Vector2d delta(p.north - cell->mean(0), p.east - cell->mean(1));
        const double mahal = delta.dot(cell->cov_inverse * delta);
        score += std::exp(-0.5 * mahal);
    }
    return score;
}

std::optional<Heading> estimate_heading(const std::vector<CameraPoint>& stixel_points,
                                        MapPoint ego, const NdtGrid& grid, Heading theta_init,
                                        const NdtParams& params) {
    if (grid.empty() || stixel_points.empty()) return std::nullopt;

    const double window = deg2rad(params.window_deg);
    const double coarse = deg2rad(params.coarse_step_deg);
    const double lo = theta_init.theta - window;
    const double hi = theta_init.theta + window;

    auto score_at = [&](double t) { return ndt_score(Heading(t), stixel_points, ego, grid); };

    double best_t = lo;
    double best_score = -1.0;
    for (double t = lo; t <= hi + 1e-12; t += coarse) {
        const double sc = score_at(t);
        if (sc > best_score) {
            best_score = sc;
            best_t = t;
        }
    }

    // golden-section refinement inside the bracket around the coarse peak
    double a = std::max(lo, best_t - coarse);
    double b = std::min(hi, best_t + coarse);
    constexpr double kInvPhi = 0.6180339887498949;
    double x1 = b - kInvPhi * (b - a);
    double x2 = a + kInvPhi * (b - a);
    double f1 = score_at(x1);
    double f2 = score_at(x2);
    const double stop = deg2rad(params.resolution_deg);
    while (b - a > stop) {
        if (f1 < f2) {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + kInvPhi * (b - a);
            f2 = score_at(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - kInvPhi * (b - a);
            f1 = score_at(x1);
        }
    }
    const double refined = 0.5 * (a + b);
    const double refined_score = score_at(refined);
    const double peak = std::max(best_score, refined_score);
    if (peak < params.score_floor) return std::nullopt;  // low confidence
    return Heading(refined_score >= best_score ? refined : best_t);
}

}  // namespace crosstrack
