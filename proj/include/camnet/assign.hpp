#pragma once

#include <set>
#include <vector>

namespace camnet {

struct AssignmentCell {
    int row = 0;
    int col = 0;
    double cost = 0.0;
};

/// Rectangular assignment over admissible cells. Rows and columns are dense
/// indices [0, rows) and [0, cols). Replicable columns have unlimited
/// capacity; every other column may be used at most once.
struct AssignmentProblem {
    int rows = 0;
    int cols = 0;
    std::vector<AssignmentCell> cells;
    std::set<int> replicable_cols;
};

struct AssignmentResult {
    std::vector<int> assignment;  // row -> column
    double total_cost = 0.0;
};

/// Minimum-cost assignment of every row to one admissible column.
///
/// Replicable columns are expanded into one copy per row and the expanded
/// matrix is solved with the shortest-augmenting-path Hungarian method.
/// Inadmissible cells carry a guard cost larger than twice the sum of all
/// admissible magnitudes, and a solution that touches one is rejected with
/// InfeasibleProblemError. Ties resolve in row-then-column scan order, so
/// identical inputs always produce identical assignments.
AssignmentResult solve_assignment(const AssignmentProblem& problem);

/// Dense square-or-wide Hungarian core: cost is rows x cols row-major with
/// rows <= cols. Returns the column for each row.
std::vector<int> hungarian_min(const std::vector<double>& cost, int rows, int cols);

}  // namespace camnet
