#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

namespace camnet {

/// alpha_t = scale / sqrt(t), t >= 1.
struct StepSchedule {
    double scale = 5.0;

    double alpha(int t) const { return scale / std::sqrt(static_cast<double>(t)); }
    void validate() const;
};

struct StoppingRule {
    double tolerance = 1e-6;   // relative primal-dual gap
    int agreement_window = 10; // consecutive conflict-free iterations
    int max_iterations = 5000;

    void validate() const;
};

enum class RunStatus { gap_closed, agreement, max_iterations };

std::string to_string(RunStatus status);

struct IterationRecord {
    int t = 0;
    double alpha = 0.0;
    double dual = 0.0;
    double best_dual = 0.0;
    double primal = 0.0;
    double best_primal = 0.0;
    int conflicts = 0;
};

struct RunReport {
    std::vector<IterationRecord> iterations;
    double best_dual = 0.0;
    double best_primal = 0.0;
    int best_primal_iteration = 0;
    int converged_iteration = 0;  // 0 when the run hit max_iterations
    RunStatus status = RunStatus::max_iterations;
    double wall_seconds = 0.0;
};

struct DdOptions {
    StepSchedule schedule;
    StoppingRule stop;
    int threads = 1;
};

/// Projected-subgradient step for a link shared by exactly two subproblems:
/// the adjustment applied to the subproblem whose label is `own`.
inline double consensus_adjustment(double alpha, int own, int other) {
    return alpha * (static_cast<double>(own) - 0.5 * static_cast<double>(own + other));
}

/// Tracks best bounds and applies the stopping rule. Shared by the
/// centralized and simulated-distributed runners so both take identical
/// decisions from identical values.
class ConvergenceMonitor {
public:
    explicit ConvergenceMonitor(StoppingRule rule);

    /// Records one iteration; returns true when the primal value improved on
    /// the best so far.
    bool record(int t, double alpha, double dual, double primal, int conflicts);
    bool should_stop() const { return stop_; }

    const RunReport& report() const { return report_; }
    RunReport take_report() { return std::move(report_); }

private:
    StoppingRule rule_;
    RunReport report_;
    int agreement_streak_ = 0;
    bool stop_ = false;
};

/// Runs fn(i) for i in [0, n) on up to `threads` workers. Each index is
/// handled by exactly one worker; callers write only to per-index state.
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& fn);

/// Delimiter-separated energy curve: t,alpha,dual,best_dual,primal,best_primal,conflicts.
void write_report_csv(std::ostream& os, const RunReport& report);

}  // namespace camnet
