#include "camnet/ldd.hpp"
#include "camnet/qdd.hpp"
#include "camnet/simnet.hpp"

#include "common/fixtures.hpp"
#include "common/random_scenario.hpp"

#include <doctest.h>

#include <cstring>
#include <map>
#include <sstream>

using namespace camnet;

namespace {

bool bitwise_equal(double a, double b) { return std::memcmp(&a, &b, sizeof a) == 0; }

void check_same_run(const RunReport& central, const RunReport& distributed) {
    REQUIRE(central.iterations.size() == distributed.iterations.size());
    for (std::size_t i = 0; i < central.iterations.size(); ++i) {
        const IterationRecord& a = central.iterations[i];
        const IterationRecord& b = distributed.iterations[i];
        CHECK(bitwise_equal(a.dual, b.dual));
        CHECK(bitwise_equal(a.primal, b.primal));
        CHECK(bitwise_equal(a.alpha, b.alpha));
        CHECK(a.conflicts == b.conflicts);
    }
    CHECK(central.status == distributed.status);
    CHECK(central.converged_iteration == distributed.converged_iteration);
    CHECK(bitwise_equal(central.best_dual, distributed.best_dual));
    CHECK(bitwise_equal(central.best_primal, distributed.best_primal));
}

}  // namespace

TEST_SUITE("simnet") {

TEST_CASE("distributed runs reproduce the centralized runs") {
    for (std::uint64_t seed = 1; seed <= 12; ++seed) {
        const Scenario sc = generate_scenario(camnet::testing::random_scenario_spec(seed));
        const CandidateLinkSet links = build_candidate_links(sc.topology, sc.observations);
        AffinityConfig cfg;
        cfg.appearance_mode = seed % 2 ? AppearanceMode::cbtf : AppearanceMode::direct;
        const EnergyModel model =
            build_energy_model(sc.topology, sc.observations, links, cfg, &sc.cbtf);
        DdOptions options;
        options.stop.max_iterations = 400;
        options.threads = 1 + static_cast<int>(seed % 3);
        const DdResult ldd = run_ldd(links, model, sc.topology, options);
        const DistributedResult dl =
            run_distributed(Algorithm::ldd, sc.topology, sc.observations, cfg, &sc.cbtf, options);
        check_same_run(ldd.report, dl.report);
        CHECK(ldd.config == dl.config);
        CHECK(audit_locality(dl.log, sc.topology));
        CHECK(dl.log.counters_consistent());

        const DdResult qdd = run_qdd(links, model, sc.topology, options);
        const DistributedResult dq =
            run_distributed(Algorithm::qdd, sc.topology, sc.observations, cfg, &sc.cbtf, options);
        check_same_run(qdd.report, dq.report);
        CHECK(qdd.config == dq.config);
        CHECK(audit_locality(dq.log, sc.topology));
        CHECK(dq.log.counters_consistent());
    }
}

TEST_CASE("label traffic per iteration follows the shared links") {
    const Scenario sc = generate_scenario(camnet::testing::random_scenario_spec(5));
    const CandidateLinkSet links = build_candidate_links(sc.topology, sc.observations);
    std::size_t shared = 0;
    for (const Link& l : links.links()) {
        shared += !l.is_virtual() && links.camera_of(l.from) != links.camera_of(l.to);
    }
    DdOptions options;
    options.stop.max_iterations = 50;
    for (Algorithm algo : {Algorithm::ldd, Algorithm::qdd}) {
        const DistributedResult r =
            run_distributed(algo, sc.topology, sc.observations, AffinityConfig{}, nullptr, options);
        std::map<int, std::size_t> entries;
        for (const AgentMessage& m : r.log.messages()) {
            if (m.kind == MessageKind::labels) {
                CHECK((m.bytes - kEnvelopeBytes) % kLabelBytes == 0);
                entries[m.iteration] += (m.bytes - kEnvelopeBytes) / kLabelBytes;
            }
        }
        for (std::size_t t = 1; t <= r.report.iterations.size(); ++t) {
            CHECK(entries[static_cast<int>(t)] == 2 * shared);
        }
    }
}

TEST_CASE("summaries are exchanged once per directed edge") {
    const Scenario sc = generate_scenario(camnet::testing::random_scenario_spec(9));
    DdOptions options;
    options.stop.max_iterations = 5;
    const DistributedResult r =
        run_distributed(Algorithm::qdd, sc.topology, sc.observations, AffinityConfig{}, nullptr,
                        options);
    std::size_t directed = 0;
    for (const auto& [u, v] : sc.topology.edges()) {
        directed += u == v ? 0 : 2;
    }
    CHECK(r.log.count(MessageKind::summary) == directed);
    for (const AgentMessage& m : r.log.messages()) {
        CHECK((m.kind == MessageKind::summary) == (m.iteration == 0));
    }
}

TEST_CASE("a single-camera network sends nothing") {
    CameraTopology t;
    t.add_camera(0);
    t.add_edge(0, 0);
    t.set_window(0, 0, TravelWindow{0.0, 10.0});
    const std::vector<Observation> obs{camnet::testing::make_observation(0, 0, 0, 1),
                                       camnet::testing::make_observation(1, 0, 3, 4),
                                       camnet::testing::make_observation(2, 0, 6, 7)};
    for (Algorithm algo : {Algorithm::ldd, Algorithm::qdd}) {
        const DistributedResult r = run_distributed(algo, t, obs, AffinityConfig{}, nullptr);
        CHECK(r.log.messages().empty());
        CHECK(r.log.total_bytes() == 0);
        CHECK_FALSE(r.report.iterations.empty());
    }
}

TEST_CASE("locality audit") {
    const CameraTopology t = camnet::testing::line_topology(3, TravelWindow{0.0, 1.0});
    MessageLog empty;
    CHECK(audit_locality(empty, t));
    MessageLog ok;
    ok.append(AgentMessage{1, 0, 1, MessageKind::labels, 33});
    ok.append(AgentMessage{1, 2, 1, MessageKind::vote, 40});
    CHECK(audit_locality(ok, t));
    MessageLog forged = ok;
    forged.append(AgentMessage{1, 0, 2, MessageKind::labels, 33});
    CHECK_FALSE(audit_locality(forged, t));
    MessageLog self;
    self.append(AgentMessage{1, 1, 1, MessageKind::vote, 40});
    CHECK_FALSE(audit_locality(self, t));
    MessageLog unknown;
    unknown.append(AgentMessage{1, 1, 9, MessageKind::vote, 40});
    CHECK_FALSE(audit_locality(unknown, t));
}

TEST_CASE("message log counters and CSV") {
    MessageLog log;
    log.append(AgentMessage{0, 0, 1, MessageKind::summary, 100});
    log.append(AgentMessage{1, 0, 1, MessageKind::labels, 33});
    log.append(AgentMessage{1, 1, 0, MessageKind::vote, 40});
    CHECK(log.total_bytes() == 173);
    CHECK(log.per_edge().at({0, 1}).messages == 2);
    CHECK(log.per_edge().at({0, 1}).bytes == 133);
    CHECK(log.count(MessageKind::vote) == 1);
    CHECK(log.counters_consistent());
    std::ostringstream os;
    write_message_log_csv(os, log);
    CHECK(os.str() ==
          "iteration,sender,receiver,kind,bytes\n0,0,1,summary,100\n1,0,1,labels,33\n1,1,0,vote,40\n");
}

}  // TEST_SUITE
