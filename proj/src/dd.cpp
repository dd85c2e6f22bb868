#include "camnet/dd.hpp"

#include "camnet/error.hpp"

#include <algorithm>
#include <cstdio>
#include <ostream>
#include <thread>

namespace camnet {

void StepSchedule::validate() const {
    if (!(scale > 0.0) || !std::isfinite(scale)) {
        throw ConfigError("step scale must be positive");
    }
}

void StoppingRule::validate() const {
    if (!(tolerance >= 0.0)) {
        throw ConfigError("stopping tolerance must be non-negative");
    }
    if (agreement_window < 1) {
        throw ConfigError("agreement window must be at least 1");
    }
    if (max_iterations < 1) {
        throw ConfigError("max iterations must be at least 1");
    }
}

std::string to_string(RunStatus status) {
    switch (status) {
        case RunStatus::gap_closed:
            return "gap_closed";
        case RunStatus::agreement:
            return "agreement";
        case RunStatus::max_iterations:
            return "max_iterations";
    }
    return "unknown";
}

ConvergenceMonitor::ConvergenceMonitor(StoppingRule rule) : rule_(rule) { rule_.validate(); }

bool ConvergenceMonitor::record(int t, double alpha, double dual, double primal, int conflicts) {
    const bool first = report_.iterations.empty();
    if (first || dual > report_.best_dual) {
        report_.best_dual = dual;
    }
    bool improved = false;
    if (first || primal < report_.best_primal) {
        report_.best_primal = primal;
        report_.best_primal_iteration = t;
        improved = true;
    }
    report_.iterations.push_back(IterationRecord{t, alpha, dual, report_.best_dual, primal,
                                                 report_.best_primal, conflicts});

    agreement_streak_ = conflicts == 0 ? agreement_streak_ + 1 : 0;
    const double gap = report_.best_primal - report_.best_dual;
    if (gap <= rule_.tolerance * std::max(1.0, std::abs(report_.best_primal))) {
        report_.status = RunStatus::gap_closed;
        report_.converged_iteration = t;
        stop_ = true;
    } else if (agreement_streak_ >= rule_.agreement_window) {
        report_.status = RunStatus::agreement;
        report_.converged_iteration = t;
        stop_ = true;
    } else if (t >= rule_.max_iterations) {
        report_.status = RunStatus::max_iterations;
        stop_ = true;
    }
    return improved;
}

void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& fn) {
    const std::size_t workers =
        std::min<std::size_t>(n, static_cast<std::size_t>(std::max(1, threads)));
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) {
            fn(i);
        }
        return;
    }
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            for (std::size_t i = w; i < n; i += workers) {
                fn(i);
            }
        });
    }
}

void write_report_csv(std::ostream& os, const RunReport& report) {
    os << "t,alpha,dual,best_dual,primal,best_primal,conflicts\n";
    char buf[256];
    for (const IterationRecord& r : report.iterations) {
        std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g,%.17g,%.17g,%.17g,%d\n", r.t, r.alpha,
                      r.dual, r.best_dual, r.primal, r.best_primal, r.conflicts);
        os << buf;
    }
}

}  // namespace camnet
