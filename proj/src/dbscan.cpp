#include "crosstrack/dbscan.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <map>
#include <numeric>
#include <queue>

namespace crosstrack {

namespace {

struct GridIndex {
    double eps;
    std::map<std::pair<int64_t, int64_t>, std::vector<int>> cells;

    GridIndex(const std::vector<DbscanPoint>& pts, double eps_in) : eps(eps_in) {
        for (int i = 0; i < static_cast<int>(pts.size()); ++i)
            cells[key(pts[i])].push_back(i);
    }

    std::pair<int64_t, int64_t> key(const DbscanPoint& p) const {
        return {static_cast<int64_t>(std::floor(p.x / eps)),
                static_cast<int64_t>(std::floor(p.y / eps))};
    }

    // indices within eps of pts[i], including i itself
    void neighbors(const std::vector<DbscanPoint>& pts, int i, std::vector<int>& out) const {
        out.clear();
        const auto [cx, cy] = key(pts[i]);
        const double eps2 = eps * eps;
        for (int64_t dx = -1; dx <= 1; ++dx) {
            for (int64_t dy = -1; dy <= 1; ++dy) {
                const auto it = cells.find({cx + dx, cy + dy});
                if (it == cells.end()) continue;
                for (int j : it->second) {
                    const double ddx = pts[i].x - pts[j].x;
                    const double ddy = pts[i].y - pts[j].y;
                    if (ddx * ddx + ddy * ddy <= eps2) out.push_back(j);
                }
            }
        }
    }
};

bool coord_less(const DbscanPoint& a, const DbscanPoint& b) {
    if (a.x != b.x) return a.x < b.x;
    return a.y < b.y;
}

}  // namespace

std::vector<int> dbscan(const std::vector<DbscanPoint>& points, double eps, int min_pts) {
    const int n = static_cast<int>(points.size());
    std::vector<int> labels(n, kDbscanNoise);
    if (n == 0) return labels;

    GridIndex grid(points, eps);
    std::vector<std::vector<int>> nbrs(n);
    std::vector<bool> core(n, false);
    for (int i = 0; i < n; ++i) {
        grid.neighbors(points, i, nbrs[i]);
        core[i] = static_cast<int>(nbrs[i].size()) >= min_pts;
    }

    // components of the core-core eps-graph
    int next_cluster = 0;
    for (int i = 0; i < n; ++i) {
        if (!core[i] || labels[i] != kDbscanNoise) continue;
        const int cid = next_cluster++;
        std::queue<int> frontier;
        labels[i] = cid;
        frontier.push(i);
        while (!frontier.empty()) {
            const int cur = frontier.front();
            frontier.pop();
            for (int j : nbrs[cur]) {
                if (core[j] && labels[j] == kDbscanNoise) {
                    labels[j] = cid;
                    frontier.push(j);
                }
            }
        }
    }

    // border points attach to their nearest core neighbor
    for (int i = 0; i < n; ++i) {
        if (core[i] || labels[i] != kDbscanNoise) continue;
        int best = -1;
        double best_d2 = std::numeric_limits<double>::infinity();
        for (int j : nbrs[i]) {
            if (!core[j]) continue;
            const double dx = points[i].x - points[j].x;
            const double dy = points[i].y - points[j].y;
            const double d2 = dx * dx + dy * dy;
            if (d2 < best_d2 || (d2 == best_d2 && best >= 0 && coord_less(points[j], points[best]))) {
                best = j;
                best_d2 = d2;
            }
        }
        if (best >= 0) labels[i] = labels[best];
    }

    if (next_cluster == 0) return labels;

    // canonical cluster numbering by each cluster's smallest (x, y) member
    std::vector<int> rep(next_cluster, -1);
    for (int i = 0; i < n; ++i) {
        const int c = labels[i];
        if (c < 0) continue;
        if (rep[c] < 0 || coord_less(points[i], points[rep[c]])) rep[c] = i;
    }
    std::vector<int> order(next_cluster);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](int a, int b) { return coord_less(points[rep[a]], points[rep[b]]); });
    std::vector<int> remap(next_cluster, 0);
    for (int r = 0; r < next_cluster; ++r) remap[order[r]] = r;
    for (int& l : labels)
        if (l >= 0) l = remap[l];
    return labels;
}

}  // namespace crosstrack
