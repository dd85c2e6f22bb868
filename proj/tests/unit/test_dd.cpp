#include "camnet/dd.hpp"
#include "camnet/error.hpp"

#include <doctest.h>

#include <atomic>
#include <cmath>
#include <sstream>

using namespace camnet;

TEST_SUITE("dd") {

TEST_CASE("consensus adjustment on a link shared by two subproblems") {
    for (double alpha : {5.0, 1.0, 5.0 / std::sqrt(7.0)}) {
        CHECK(consensus_adjustment(alpha, 1, 0) == alpha / 2);
        CHECK(consensus_adjustment(alpha, 0, 1) == -alpha / 2);
        CHECK(consensus_adjustment(alpha, 1, 0) + consensus_adjustment(alpha, 0, 1) == 0.0);
        CHECK(consensus_adjustment(alpha, 1, 1) == 0.0);
        CHECK(consensus_adjustment(alpha, 0, 0) == 0.0);
    }
}

TEST_CASE("default step schedule") {
    const StepSchedule s;
    CHECK(s.scale == 5.0);
    CHECK(s.alpha(1) == 5.0);
    CHECK(s.alpha(4) == 2.5);
    CHECK(s.alpha(100) == doctest::Approx(0.5));
    for (int t = 1; t < 100000; ++t) {
        CHECK(s.alpha(t) > 0.0);
        CHECK(s.alpha(t + 1) < s.alpha(t));
    }
    CHECK(s.alpha(1'000'000'000) < 2e-4);
    StepSchedule bad;
    bad.scale = 0.0;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
}

TEST_CASE("stopping rule validation") {
    StoppingRule r;
    CHECK(r.tolerance == 1e-6);
    CHECK(r.agreement_window == 10);
    CHECK(r.max_iterations == 5000);
    r.agreement_window = 0;
    CHECK_THROWS_AS(r.validate(), ConfigError);
}

TEST_CASE("convergence monitor tracks best bounds") {
    StoppingRule rule;
    rule.max_iterations = 100;
    rule.agreement_window = 3;
    ConvergenceMonitor m(rule);
    CHECK(m.record(1, 1.0, 1.0, 10.0, 2));
    CHECK_FALSE(m.record(2, 1.0, 3.0, 12.0, 1));
    CHECK(m.record(3, 1.0, 2.0, 9.0, 1));
    CHECK_FALSE(m.should_stop());
    const RunReport& r = m.report();
    CHECK(r.best_dual == 3.0);
    CHECK(r.iterations[2].best_dual == 3.0);
    CHECK(r.iterations[2].dual == 2.0);
    CHECK(r.best_primal == 9.0);
    CHECK(r.best_primal_iteration == 3);
}

TEST_CASE("convergence monitor stops on a closed gap") {
    ConvergenceMonitor m(StoppingRule{});
    m.record(1, 1.0, 5.0, 5.0 + 1e-7, 3);
    CHECK(m.should_stop());
    CHECK(m.report().status == RunStatus::gap_closed);
    CHECK(m.report().converged_iteration == 1);
}

TEST_CASE("convergence monitor stops after the agreement window") {
    StoppingRule rule;
    rule.agreement_window = 3;
    ConvergenceMonitor m(rule);
    m.record(1, 1.0, 0.0, 10.0, 0);
    m.record(2, 1.0, 0.0, 10.0, 0);
    m.record(3, 1.0, 0.0, 10.0, 1);
    m.record(4, 1.0, 0.0, 10.0, 0);
    m.record(5, 1.0, 0.0, 10.0, 0);
    CHECK_FALSE(m.should_stop());
    m.record(6, 1.0, 0.0, 10.0, 0);
    CHECK(m.should_stop());
    CHECK(m.report().status == RunStatus::agreement);
    CHECK(m.report().converged_iteration == 6);
}

TEST_CASE("convergence monitor stops at the iteration cap") {
    StoppingRule rule;
    rule.max_iterations = 4;
    ConvergenceMonitor m(rule);
    for (int t = 1; t <= 4; ++t) {
        CHECK_FALSE(m.should_stop());
        m.record(t, 1.0, 0.0, 10.0, 1);
    }
    CHECK(m.should_stop());
    CHECK(m.report().status == RunStatus::max_iterations);
    CHECK(m.report().converged_iteration == 0);
}

TEST_CASE("parallel_for visits each index once") {
    for (int threads : {1, 2, 4, 16}) {
        std::vector<std::atomic<int>> hits(37);
        parallel_for(hits.size(), threads, [&](std::size_t i) { hits[i]++; });
        for (const auto& h : hits) {
            CHECK(h.load() == 1);
        }
    }
}

TEST_CASE("report CSV") {
    ConvergenceMonitor m(StoppingRule{});
    m.record(1, 5.0, 1.5, 3.25, 2);
    std::ostringstream os;
    write_report_csv(os, m.report());
    CHECK(os.str() == "t,alpha,dual,best_dual,primal,best_primal,conflicts\n1,5,1.5,1.5,3.25,3.25,2\n");
}

}  // TEST_SUITE
