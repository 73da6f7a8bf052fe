#include "crosstrack/hungarian.hpp"

#include <algorithm>
#include <limits>

namespace crosstrack {

// Potentials-based Hungarian over the square padding of the input; padding
// entries cost kAssignmentForbidden so padded/forbidden pairs read back as
// unmatched.
std::vector<int> solve_assignment(const std::vector<double>& cost, int rows, int cols) {
    std::vector<int> result(rows, -1);
    if (rows == 0 || cols == 0) return result;

    const int n = std::max(rows, cols);
    auto at = [&](int r, int c) -> double {
        if (r >= rows || c >= cols) return kAssignmentForbidden;
        return cost[static_cast<size_t>(r) * cols + c];
    };

    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
    std::vector<int> match_col(n + 1, 0);  // 1-based; match_col[c] = row matched to c
    std::vector<int> way(n + 1, 0);

    for (int r = 1; r <= n; ++r) {
        match_col[0] = r;
        int j0 = 0;
        std::vector<double> minv(n + 1, inf);
        std::vector<char> used(n + 1, false);
        do {
            used[j0] = true;
            const int i0 = match_col[j0];
            double delta = inf;
            int j1 = -1;
            for (int j = 1; j <= n; ++j) {
                if (used[j]) continue;
                const double cur = at(i0 - 1, j - 1) - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (int j = 0; j <= n; ++j) {
                if (used[j]) {
                    u[match_col[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (match_col[j0] != 0);
        do {
            const int j1 = way[j0];
            match_col[j0] = match_col[j1];
            j0 = j1;
        } while (j0);
    }

    for (int c = 1; c <= n; ++c) {
        const int r = match_col[c];
        if (r >= 1 && r <= rows && c <= cols && at(r - 1, c - 1) < kAssignmentForbidden)
            result[r - 1] = c - 1;
    }
    return result;
}

}  // namespace crosstrack
