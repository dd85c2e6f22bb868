#pragma once

// Exhaustive assignment enumeration, the reference for the Hungarian solver.

#include "camnet/assign.hpp"

#include <cmath>
#include <limits>
#include <map>
#include <random>
#include <set>
#include <vector>

namespace camnet::testing {

struct EnumerationResult {
    double best = std::numeric_limits<double>::infinity();
    std::size_t feasible = 0;
    std::set<std::vector<int>> argmins;  // within 1e-9 of best
};

inline EnumerationResult enumerate_assignments(const AssignmentProblem& p) {
    std::vector<std::map<int, double>> rows(static_cast<std::size_t>(p.rows));
    for (const AssignmentCell& c : p.cells) {
        rows[static_cast<std::size_t>(c.row)][c.col] = c.cost;
    }
    std::vector<std::pair<std::vector<int>, double>> all;
    std::vector<int> current(static_cast<std::size_t>(p.rows), -1);
    std::vector<bool> used(static_cast<std::size_t>(p.cols), false);
    auto rec = [&](auto&& self, int r, double cost) -> void {
        if (r == p.rows) {
            all.emplace_back(current, cost);
            return;
        }
        for (const auto& [col, c] : rows[static_cast<std::size_t>(r)]) {
            const bool replicable = p.replicable_cols.contains(col);
            if (!replicable && used[static_cast<std::size_t>(col)]) {
                continue;
            }
            if (!replicable) {
                used[static_cast<std::size_t>(col)] = true;
            }
            current[static_cast<std::size_t>(r)] = col;
            self(self, r + 1, cost + c);
            if (!replicable) {
                used[static_cast<std::size_t>(col)] = false;
            }
        }
    };
    rec(rec, 0, 0.0);
    EnumerationResult out;
    out.feasible = all.size();
    for (const auto& [a, cost] : all) {
        out.best = std::min(out.best, cost);
    }
    for (const auto& [a, cost] : all) {
        if (std::abs(cost - out.best) <= 1e-9) {
            out.argmins.insert(a);
        }
    }
    return out;
}

inline double assignment_cost(const AssignmentProblem& p, const std::vector<int>& assignment) {
    double total = 0.0;
    for (std::size_t r = 0; r < assignment.size(); ++r) {
        for (const AssignmentCell& c : p.cells) {
            if (c.row == static_cast<int>(r) && c.col == assignment[r]) {
                total += c.cost;
            }
        }
    }
    return total;
}

inline bool assignment_valid(const AssignmentProblem& p, const std::vector<int>& assignment) {
    if (assignment.size() != static_cast<std::size_t>(p.rows)) {
        return false;
    }
    std::set<int> used;
    for (std::size_t r = 0; r < assignment.size(); ++r) {
        bool admissible = false;
        for (const AssignmentCell& c : p.cells) {
            admissible |= c.row == static_cast<int>(r) && c.col == assignment[r];
        }
        if (!admissible) {
            return false;
        }
        if (!p.replicable_cols.contains(assignment[r]) && !used.insert(assignment[r]).second) {
            return false;
        }
    }
    return true;
}

// Up to max_rows x max_cols with random admissibility and replicable
// columns. Every other problem uses small integer costs so ties are common.
inline AssignmentProblem random_assignment_problem(std::mt19937_64& rng, int max_rows,
                                                   int max_cols) {
    std::uniform_int_distribution<int> rows(1, max_rows);
    std::uniform_int_distribution<int> cols(1, max_cols);
    std::bernoulli_distribution admissible(0.7);
    std::bernoulli_distribution replicable(0.25);
    std::bernoulli_distribution integer(0.5);
    std::uniform_int_distribution<int> small(0, 9);
    std::uniform_real_distribution<double> real(-10.0, 10.0);
    AssignmentProblem p;
    p.rows = rows(rng);
    p.cols = cols(rng);
    const bool ints = integer(rng);
    for (int c = 0; c < p.cols; ++c) {
        if (replicable(rng)) {
            p.replicable_cols.insert(c);
        }
    }
    for (int r = 0; r < p.rows; ++r) {
        for (int c = 0; c < p.cols; ++c) {
            if (admissible(rng)) {
                p.cells.push_back({r, c, ints ? static_cast<double>(small(rng)) : real(rng)});
            }
        }
    }
    return p;
}

}  // namespace camnet::testing
