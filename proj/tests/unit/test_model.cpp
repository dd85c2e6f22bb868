#include "camnet/error.hpp"
#include "camnet/model.hpp"

#include "common/fixtures.hpp"
#include "common/random_instance.hpp"

#include <doctest.h>

#include <algorithm>
#include <random>

using namespace camnet;
using camnet::testing::flat_histogram;
using camnet::testing::line_topology;
using camnet::testing::make_observation;

TEST_SUITE("model") {

TEST_CASE("adjacent cameras with an in-window gap give one ordinary link") {
    const CameraTopology t = line_topology(2, TravelWindow{1.0, 5.0});
    const std::vector<Observation> obs{make_observation(0, 0, 0.0, 1.0),
                                       make_observation(1, 1, 3.0, 4.0)};
    const CandidateLinkSet links = build_candidate_links(t, obs);
    CHECK(links.link_count() == 5);
    CHECK(links.ordinary_count() == 1);
    const Link& l = links.link(*links.find(0, 1));
    CHECK(l.kind == LinkKind::ordinary);
    CHECK(l.from == 0);
    CHECK(l.to == 1);
}

TEST_CASE("no link between observations on non-adjacent cameras") {
    // Four cameras where 2 only reaches 1 and 3.
    CameraTopology t;
    for (int c = 1; c <= 4; ++c) {
        t.add_camera(c);
    }
    for (auto [u, v] : {std::pair{1, 2}, {1, 3}, {2, 3}, {3, 4}}) {
        t.add_edge(u, v);
        t.set_window(u, v, TravelWindow{0.0, 100.0});
        t.set_window(v, u, TravelWindow{0.0, 100.0});
    }
    const std::vector<Observation> obs{make_observation(1, 2, 0.0, 1.0),
                                       make_observation(3, 4, 5.0, 6.0)};
    const CandidateLinkSet links = build_candidate_links(t, obs);
    CHECK(links.ordinary_count() == 0);
    CHECK_FALSE(links.find(0, 1).has_value());
    const auto n2 = neighbors(t, 2);
    CHECK(std::find(n2.begin(), n2.end(), 4) == n2.end());
    CHECK(n2 == std::vector<CameraId>{1, 3});
}

TEST_CASE("window bounds are inclusive and the gap must be positive") {
    const CameraTopology t = line_topology(2, TravelWindow{2.0, 5.0});
    auto linked = [&](double gap) {
        const std::vector<Observation> obs{make_observation(0, 0, 0.0, 1.0),
                                           make_observation(1, 1, 1.0 + gap, 1.0 + gap)};
        return build_candidate_links(t, obs).ordinary_count() == 1;
    };
    CHECK(linked(2.0));
    CHECK(linked(5.0));
    CHECK(linked(3.5));
    CHECK_FALSE(linked(1.999));
    CHECK_FALSE(linked(5.001));

    const CameraTopology zero = line_topology(2, TravelWindow{0.0, 5.0});
    const std::vector<Observation> touching{make_observation(0, 0, 0.0, 1.0),
                                            make_observation(1, 1, 1.0, 2.0)};
    CHECK(build_candidate_links(zero, touching).ordinary_count() == 0);
}

TEST_CASE("zero direction probability prunes the link") {
    CameraTopology t = line_topology(2, TravelWindow{0.0, 5.0});
    t.set_direction_probability(0, "E", 1, "W", 0.0);
    const std::vector<Observation> obs{make_observation(0, 0, 0.0, 1.0, flat_histogram(), "N", "E"),
                                       make_observation(1, 1, 2.0, 3.0, flat_histogram(), "W", "N")};
    CHECK(build_candidate_links(t, obs).ordinary_count() == 0);
}

TEST_CASE("neighbors of a star center, a leaf and an isolated camera") {
    CameraTopology t;
    for (int c = 0; c < 5; ++c) {
        t.add_camera(c);
    }
    for (int leaf = 1; leaf <= 3; ++leaf) {
        t.add_edge(0, leaf);
    }
    CHECK(neighbors(t, 0) == std::vector<CameraId>{1, 2, 3});
    CHECK(neighbors(t, 2) == std::vector<CameraId>{0});
    CHECK(neighbors(t, 4).empty());
    CHECK_THROWS_AS(neighbors(t, 9), ConfigError);
}

TEST_CASE("self-edge lets a camera neighbor itself") {
    CameraTopology t;
    t.add_camera(0);
    t.add_edge(0, 0);
    CHECK(t.adjacent(0, 0));
    CHECK(neighbors(t, 0) == std::vector<CameraId>{0});
}

TEST_CASE("topology rejects bad references") {
    CameraTopology t = line_topology(3, TravelWindow{0.0, 1.0});
    CHECK_THROWS_AS(t.add_edge(0, 7), ConfigError);
    CHECK_THROWS_AS(t.set_window(0, 2, TravelWindow{0.0, 1.0}), ConfigError);
    CHECK_THROWS_AS(t.set_window(0, 1, TravelWindow{3.0, 1.0}), ConfigError);
    CHECK_THROWS_AS(t.set_direction_probability(0, "N", 1, "S", 1.5), ConfigError);
    try {
        t.add_edge(42, 0);
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("42") != std::string::npos);
    }
}

TEST_CASE("direction table normalization check") {
    CameraTopology t = line_topology(3, TravelWindow{0.0, 1.0});
    t.set_direction_probability(1, "N", 0, "S", 0.3);
    t.set_direction_probability(1, "N", 2, "S", 0.7);
    CHECK(t.direction_table_normalized());
    t.set_direction_probability(1, "E", 2, "W", 0.5);
    CHECK_FALSE(t.direction_table_normalized());
    CHECK(t.direction_probability(1, "N", 2, "S") == 0.7);
    CHECK(t.direction_probability(1, "S", 2, "S") == 0.25);
    t.set_strict(true);
    CHECK(t.direction_probability(1, "S", 2, "S") == 0.0);
}

TEST_CASE("observation validation") {
    const CameraTopology t = line_topology(2, TravelWindow{0.0, 1.0});
    std::vector<Observation> obs{make_observation(0, 0, 0.0, 1.0),
                                 make_observation(1, 1, 2.0, 3.0)};
    CHECK_NOTHROW(validate_observations(t, obs));
    obs[1].camera = 5;
    CHECK_THROWS_AS(validate_observations(t, obs), ConfigError);
    obs[1].camera = 1;
    obs[1].t_leave = 1.5;
    CHECK_THROWS_AS(validate_observations(t, obs), InputError);
    obs[1].t_leave = 3.0;
    obs[1].id = 0;
    CHECK_THROWS_AS(validate_observations(t, obs), InputError);
    obs[1].id = 1;
    obs[1].t_enter = 0.0;
    CHECK_THROWS_AS(validate_observations(t, obs), InputError);
}

TEST_CASE("histogram normalization") {
    AppearanceHistogram h(2, std::vector<double>(12, 3.0));
    CHECK_FALSE(h.is_normalized());
    h.normalize();
    CHECK(h.is_normalized());
    CHECK(h.slice(1, 2)[0] == doctest::Approx(0.5));
    AppearanceHistogram empty(2);
    CHECK_THROWS_AS(empty.normalize(), InputError);
    CHECK_THROWS_AS(AppearanceHistogram(2, std::vector<double>(5, 1.0)), InputError);
}

TEST_CASE("candidate link set structure on random instances") {
    std::mt19937_64 rng(11);
    for (int k = 0; k < 100; ++k) {
        camnet::testing::InstanceShape shape;
        shape.cameras = 2 + k % 5;
        shape.observations = 4 + k % 9;
        const auto inst = camnet::testing::random_instance(rng, shape);
        const CandidateLinkSet& links = inst.links;
        std::vector<int> in_count(links.link_count(), 0);
        std::vector<int> out_count(links.link_count(), 0);
        for (std::size_t i = 0; i < links.observation_count(); ++i) {
            const int obs = static_cast<int>(i);
            const auto& in = links.incoming(obs);
            const auto& out = links.outgoing(obs);
            CHECK(links.link(in.front()).kind == LinkKind::source_virtual);
            CHECK(links.link(out.back()).kind == LinkKind::sink_virtual);
            CHECK(std::count_if(in.begin(), in.end(),
                                [&](LinkId p) { return links.link(p).is_virtual(); }) == 1);
            CHECK(std::count_if(out.begin(), out.end(),
                                [&](LinkId q) { return links.link(q).is_virtual(); }) == 1);
            CHECK(links.pair_count(obs) == in.size() * out.size());
            CHECK(links.pairs(obs).size() == links.pair_count(obs));
            for (std::size_t s = 0; s < in.size(); ++s) {
                ++in_count[static_cast<std::size_t>(in[s])];
                CHECK(links.link(in[s]).in_slot == static_cast<int>(s));
            }
            for (std::size_t s = 0; s < out.size(); ++s) {
                ++out_count[static_cast<std::size_t>(out[s])];
                CHECK(links.link(out[s]).out_slot == static_cast<int>(s));
            }
        }
        for (const Link& l : links.links()) {
            if (l.is_virtual()) {
                continue;
            }
            CHECK(in_count[static_cast<std::size_t>(l.id)] == 1);
            CHECK(out_count[static_cast<std::size_t>(l.id)] == 1);
            const Observation& a = inst.observations[static_cast<std::size_t>(l.from)];
            const Observation& b = inst.observations[static_cast<std::size_t>(l.to)];
            CHECK(b.t_enter > a.t_leave);
            CHECK(inst.topology.adjacent(a.camera, b.camera));
            CHECK(inst.topology.window(a.camera, b.camera).contains(b.t_enter - a.t_leave));
        }
        // Ids follow (from, to) order with the source first and sink last.
        for (std::size_t q = 1; q < links.link_count(); ++q) {
            auto key = [&](const Link& l) {
                const long from = l.from == kSource ? -1L : l.from;
                const long to = l.to == kSink ? 1L << 40 : l.to;
                return std::pair{from, to};
            };
            CHECK(key(links.links()[q - 1]) < key(links.links()[q]));
        }
        // Rebuilding reproduces the same ids.
        const CandidateLinkSet again = build_candidate_links(inst.topology, inst.observations);
        REQUIRE(again.link_count() == links.link_count());
        for (std::size_t q = 0; q < links.link_count(); ++q) {
            CHECK(again.links()[q].from == links.links()[q].from);
            CHECK(again.links()[q].to == links.links()[q].to);
        }
    }
}

}  // TEST_SUITE
