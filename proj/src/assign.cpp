#include "camnet/assign.hpp"

#include "camnet/error.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace camnet {

std::vector<int> hungarian_min(const std::vector<double>& cost, int rows, int cols) {
    if (rows > cols) {
        throw InputError("hungarian_min needs rows <= cols");
    }
    if (rows == 0) {
        return {};
    }
    const double inf = std::numeric_limits<double>::infinity();
    const auto n = static_cast<std::size_t>(rows);
    const auto m = static_cast<std::size_t>(cols);
    // 1-based potentials; column 0 is the virtual root of each augmentation.
    std::vector<double> u(n + 1, 0.0);
    std::vector<double> v(m + 1, 0.0);
    std::vector<std::size_t> match(m + 1, 0);  // column -> row
    std::vector<std::size_t> way(m + 1, 0);
    std::vector<double> minv(m + 1);
    std::vector<char> used(m + 1);

    for (std::size_t i = 1; i <= n; ++i) {
        match[0] = i;
        std::size_t j0 = 0;
        std::fill(minv.begin(), minv.end(), inf);
        std::fill(used.begin(), used.end(), 0);
        do {
            used[j0] = 1;
            const std::size_t i0 = match[j0];
            double delta = inf;
            std::size_t j1 = 0;
            for (std::size_t j = 1; j <= m; ++j) {
                if (used[j]) {
                    continue;
                }
                const double cur = cost[(i0 - 1) * m + (j - 1)] - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (std::size_t j = 0; j <= m; ++j) {
                if (used[j]) {
                    u[match[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (match[j0] != 0);
        do {
            const std::size_t j1 = way[j0];
            match[j0] = match[j1];
            j0 = j1;
        } while (j0 != 0);
    }

    std::vector<int> result(n, -1);
    for (std::size_t j = 1; j <= m; ++j) {
        if (match[j] != 0) {
            result[match[j] - 1] = static_cast<int>(j - 1);
        }
    }
    return result;
}

AssignmentResult solve_assignment(const AssignmentProblem& problem) {
    if (problem.rows < 0 || problem.cols < 0) {
        throw InputError("assignment problem with negative dimensions");
    }
    const int rows = problem.rows;
    if (rows == 0) {
        return {};
    }

    // Expanded column layout: ordinary columns once, replicable columns once
    // per row, then guard-only padding when rows still outnumber columns.
    std::vector<int> first_copy(static_cast<std::size_t>(problem.cols), -1);
    std::vector<int> original;
    for (int c = 0; c < problem.cols; ++c) {
        first_copy[static_cast<std::size_t>(c)] = static_cast<int>(original.size());
        const int copies = problem.replicable_cols.contains(c) ? rows : 1;
        for (int k = 0; k < copies; ++k) {
            original.push_back(c);
        }
    }
    while (static_cast<int>(original.size()) < rows) {
        original.push_back(-1);
    }
    const int width = static_cast<int>(original.size());

    double magnitude = 0.0;
    std::vector<char> admissible_row(static_cast<std::size_t>(rows), 0);
    for (const AssignmentCell& cell : problem.cells) {
        if (cell.row < 0 || cell.row >= rows || cell.col < 0 || cell.col >= problem.cols) {
            throw InputError("assignment cell outside the problem dimensions");
        }
        if (!std::isfinite(cell.cost)) {
            throw InputError("assignment cell cost must be finite");
        }
        magnitude += std::abs(cell.cost);
        admissible_row[static_cast<std::size_t>(cell.row)] = 1;
    }
    for (int r = 0; r < rows; ++r) {
        if (!admissible_row[static_cast<std::size_t>(r)]) {
            std::ostringstream os;
            os << "assignment row " << r << " has no admissible column";
            throw InfeasibleProblemError(os.str());
        }
    }
    const double guard = 2.0 * magnitude + 1.0;

    std::vector<double> cost(static_cast<std::size_t>(rows) * static_cast<std::size_t>(width),
                             guard);
    std::vector<char> allowed(cost.size(), 0);
    for (const AssignmentCell& cell : problem.cells) {
        const int copies = problem.replicable_cols.contains(cell.col) ? rows : 1;
        const int start = first_copy[static_cast<std::size_t>(cell.col)];
        for (int k = 0; k < copies; ++k) {
            const std::size_t idx = static_cast<std::size_t>(cell.row) * width +
                                    static_cast<std::size_t>(start + k);
            if (!allowed[idx] || cell.cost < cost[idx]) {
                cost[idx] = cell.cost;
            }
            allowed[idx] = 1;
        }
    }

    const std::vector<int> chosen = hungarian_min(cost, rows, width);
    AssignmentResult result;
    result.assignment.resize(static_cast<std::size_t>(rows));
    for (int r = 0; r < rows; ++r) {
        const int j = chosen[static_cast<std::size_t>(r)];
        const std::size_t idx = static_cast<std::size_t>(r) * width + static_cast<std::size_t>(j);
        if (!allowed[idx]) {
            throw InfeasibleProblemError("no assignment covers every row with admissible cells");
        }
        result.assignment[static_cast<std::size_t>(r)] = original[static_cast<std::size_t>(j)];
        result.total_cost += cost[idx];
    }
    return result;
}

}  // namespace camnet
