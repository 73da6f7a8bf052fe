#pragma once

#include <cstdint>
#include <vector>

namespace crosstrack {

struct DbscanPoint {
    double x = 0.0;
    double y = 0.0;
};

inline constexpr int kDbscanNoise = -1;

// Density-based clustering over 2D points. Returns one label per input
// point: kDbscanNoise for noise, otherwise a cluster index starting at 0.
//
// Semantics are deliberately order-invariant: a point is core when it has
// at least min_pts neighbors within eps (itself included); clusters are
// the connected components of the core-point eps-graph; a non-core point
// within eps of a core point joins the cluster of its nearest core point
// (ties broken by the core point with the smaller (x, y) pair). Cluster
// indices are assigned by the smallest (x, y) member of each cluster, so
// two runs over permuted inputs agree up to the permutation.
//
// Implementation uses a uniform grid of cell size eps for neighbor queries.
std::vector<int> dbscan(const std::vector<DbscanPoint>& points, double eps, int min_pts);

}  // namespace crosstrack
