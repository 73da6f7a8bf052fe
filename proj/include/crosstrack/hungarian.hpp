#pragma once

#include <vector>

namespace crosstrack {

// Cost at or above this marks a forbidden pair. It dominates any feasible
// total, so the solver maximizes the number of real matches first and
// minimizes their summed cost second.
inline constexpr double kAssignmentForbidden = 1e9;

// Minimum-cost one-to-one assignment over a rectangular cost matrix
// (rows x cols, row-major). Returns col index per row, -1 for unmatched.
// O(n^3) Hungarian with potentials.
std::vector<int> solve_assignment(const std::vector<double>& cost, int rows, int cols);

}  // namespace crosstrack
