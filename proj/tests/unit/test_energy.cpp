#include "camnet/energy.hpp"
#include "camnet/error.hpp"
#include "camnet/oracle.hpp"

#include "common/fixtures.hpp"
#include "common/random_instance.hpp"

#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <random>

using namespace camnet;
using camnet::testing::make_observation;

namespace {

// Six observations on a three-camera line; y1 -> y4 -> y6 is reachable.
struct ChainFixture {
    CameraTopology topology;
    std::vector<Observation> observations;
    CandidateLinkSet links;

    ChainFixture() {
        topology = camnet::testing::line_topology(3, TravelWindow{0.0, 10.0});
        const CameraId cams[] = {0, 2, 2, 1, 0, 2};
        for (int i = 0; i < 6; ++i) {
            observations.push_back(make_observation(i + 1, cams[i], i, i + 0.5));
        }
        links = build_candidate_links(topology, observations);
    }

    // Activates the given ordinary links (by observation index) and the
    // virtual links that complete them.
    LinkingConfig with_chain(std::vector<std::pair<int, int>> ordinary) const {
        LinkingConfig c;
        c.x.assign(links.link_count(), 0);
        std::vector<bool> has_in(observations.size()), has_out(observations.size());
        for (auto [a, b] : ordinary) {
            c.x[static_cast<std::size_t>(*links.find(a, b))] = 1;
            has_out[static_cast<std::size_t>(a)] = true;
            has_in[static_cast<std::size_t>(b)] = true;
        }
        for (std::size_t i = 0; i < observations.size(); ++i) {
            const int obs = static_cast<int>(i);
            if (!has_in[i]) {
                c.x[static_cast<std::size_t>(links.source_link(obs))] = 1;
            }
            if (!has_out[i]) {
                c.x[static_cast<std::size_t>(links.sink_link(obs))] = 1;
            }
        }
        return c;
    }
};

EnergyModel constant_model(const CandidateLinkSet& links, double ordinary, double virt) {
    std::vector<double> theta;
    for (const Link& l : links.links()) {
        theta.push_back(l.is_virtual() ? virt : ordinary);
    }
    return EnergyModel::zero_pairs(links, std::move(theta));
}

}  // namespace

TEST_SUITE("energy") {

TEST_CASE("linear feasibility") {
    const ChainFixture f;
    CHECK(is_feasible_linear(all_virtual(f.links), f.links));
    CHECK(is_feasible_linear(f.with_chain({{0, 3}, {3, 5}}), f.links));

    LinkingConfig doubled = f.with_chain({{0, 3}});
    doubled.x[static_cast<std::size_t>(f.links.source_link(3))] = 1;
    CHECK_FALSE(is_feasible_linear(doubled, f.links));

    LinkingConfig none = all_virtual(f.links);
    none.x[static_cast<std::size_t>(f.links.sink_link(2))] = 0;
    CHECK_FALSE(is_feasible_linear(none, f.links));
}

TEST_CASE("linear energy") {
    const ChainFixture f;
    const EnergyModel m = constant_model(f.links, 1.5, 25.0);
    LinkingConfig zero;
    zero.x.assign(f.links.link_count(), 0);
    CHECK(energy_linear(zero, m) == 0.0);
    LinkingConfig one = zero;
    one.x[static_cast<std::size_t>(f.links.source_link(0))] = 1;
    CHECK(energy_linear(one, m) == 25.0);
    CHECK(energy_linear(all_virtual(f.links), m) == doctest::Approx(12 * 25.0));
    CHECK(energy_linear(f.with_chain({{0, 3}, {3, 5}}), m) == doctest::Approx(8 * 25.0 + 3.0));

    std::mt19937_64 rng(21);
    for (int k = 0; k < 50; ++k) {
        const auto inst = camnet::testing::random_instance(rng, {});
        LinkingConfig x;
        std::bernoulli_distribution coin(0.5);
        for (std::size_t q = 0; q < inst.links.link_count(); ++q) {
            x.x.push_back(coin(rng) ? 1 : 0);
        }
        double reversed = 0.0;
        for (std::size_t q = inst.links.link_count(); q-- > 0;) {
            reversed += x.x[q] * inst.model.theta[q];
        }
        CHECK(energy_linear(x, inst.model) == doctest::Approx(reversed).epsilon(1e-12));
    }
}

TEST_CASE("quadratic feasibility") {
    const ChainFixture f;
    LinkingConfig c = f.with_chain({{0, 3}, {3, 5}});
    complete_pairs(c, f.links);
    CHECK(is_feasible_quadratic(c, f.links));
    const LinkPair through{*f.links.find(0, 3), *f.links.find(3, 5)};
    CHECK(c.pairs->contains(through));

    LinkingConfig missing = c;
    missing.pairs->erase(through);
    CHECK_FALSE(is_feasible_quadratic(missing, f.links));

    LinkingConfig extra = c;
    extra.pairs->insert(LinkPair{f.links.source_link(3), f.links.sink_link(3)});
    CHECK_FALSE(is_feasible_quadratic(extra, f.links));

    CHECK_THROWS_AS(is_feasible_quadratic(f.with_chain({}), f.links), InputError);
}

TEST_CASE("quadratic energy") {
    const ChainFixture f;
    const EnergyModel m = constant_model(f.links, 2.0, 25.0);
    LinkingConfig singletons = all_virtual(f.links);
    complete_pairs(singletons, f.links);
    CHECK(energy_quadratic(singletons, f.links, m) == doctest::Approx(2 * 6 * 25.0));
    LinkingConfig zero;
    zero.x.assign(f.links.link_count(), 0);
    zero.pairs.emplace();
    CHECK(energy_quadratic(zero, f.links, m) == 0.0);

    std::mt19937_64 rng(23);
    camnet::testing::InstanceShape shape;
    shape.observations = 6;
    for (int k = 0; k < 30; ++k) {
        const auto inst = camnet::testing::random_instance(rng, shape);
        for_each_linking(inst.links, [&](const LinkingConfig& x) {
            LinkingConfig full = x;
            complete_pairs(full, inst.links);
            CHECK(energy_quadratic(full, inst.links, inst.model) ==
                  doctest::Approx(energy_linear(x, inst.model)).epsilon(1e-12));
        });
    }
}

TEST_CASE("pair costs add on top of the linear part") {
    const ChainFixture f;
    EnergyModel m = constant_model(f.links, 1.0, 10.0);
    const LinkId p = *f.links.find(0, 3);
    const LinkId q = *f.links.find(3, 5);
    const std::size_t outs = f.links.outgoing(3).size();
    m.theta_pair[3][static_cast<std::size_t>(f.links.link(p).in_slot) * outs +
                    static_cast<std::size_t>(f.links.link(q).out_slot)] = 4.0;
    LinkingConfig c = f.with_chain({{0, 3}, {3, 5}});
    CHECK(energy_quadratic(c, f.links, m) == doctest::Approx(energy_linear(c, m) + 4.0));
}

TEST_CASE("partition conversion") {
    const ChainFixture f;
    const Partition singles = linking_to_partition(all_virtual(f.links), f.links);
    CHECK(singles.tracks.size() == 6);
    const Partition chain = linking_to_partition(f.with_chain({{0, 3}, {3, 5}}), f.links);
    CHECK(chain.tracks == std::vector<std::vector<ObservationId>>{{1, 4, 6}, {2}, {3}, {5}});

    CandidateLinkSet empty = build_candidate_links(f.topology, {});
    CHECK(linking_to_partition(all_virtual(empty), empty).tracks.empty());

    Partition singleton_partition;
    for (ObservationId id = 1; id <= 6; ++id) {
        singleton_partition.tracks.push_back({id});
    }
    CHECK(partition_to_linking(singleton_partition, f.links) == all_virtual(f.links));

    // Camera 0 and camera 2 are not adjacent.
    Partition bad{{{1, 2}, {3}, {4}, {5}, {6}}};
    CHECK_THROWS_AS(partition_to_linking(bad, f.links), EncodingError);
    Partition short_cover{{{1}, {2}}};
    CHECK_THROWS_AS(partition_to_linking(short_cover, f.links), InputError);
}

TEST_CASE("round trips and link counts over every feasible configuration") {
    std::mt19937_64 rng(29);
    camnet::testing::InstanceShape shape;
    shape.observations = 6;
    for (int k = 0; k < 30; ++k) {
        const auto inst = camnet::testing::random_instance(rng, shape);
        const std::size_t n = inst.links.observation_count();
        std::uint64_t visited = 0;
        for_each_linking(inst.links, [&](const LinkingConfig& x) {
            ++visited;
            CHECK(is_feasible_linear(x, inst.links));
            const Partition p = linking_to_partition(x, inst.links);
            CHECK(partition_to_linking(p, inst.links) == x);
            CHECK(linking_to_partition(partition_to_linking(p, inst.links), inst.links) == p);
            std::size_t ordinary = 0;
            std::size_t virt = 0;
            for (const Link& l : inst.links.links()) {
                if (x.active(l.id)) {
                    (l.is_virtual() ? virt : ordinary) += 1;
                }
            }
            CHECK(virt == 2 * p.tracks.size());
            CHECK(ordinary + virt == n + p.tracks.size());
            std::size_t covered = 0;
            for (const auto& track : p.tracks) {
                covered += track.size();
                CHECK(std::is_sorted(track.begin(), track.end()));
            }
            CHECK(covered == n);
        });
        CHECK(visited == count_linkings(inst.links));
    }
}

TEST_CASE("energy model validation") {
    const ChainFixture f;
    EnergyModel m = constant_model(f.links, 1.0, 1.0);
    CHECK_NOTHROW(m.validate(f.links));
    m.theta.pop_back();
    CHECK_THROWS_AS(m.validate(f.links), InputError);
}

}  // TEST_SUITE
