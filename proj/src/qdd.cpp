#include "camnet/qdd.hpp"

#include "camnet/error.hpp"

#include <algorithm>
#include <chrono>

namespace camnet {

ObservationSlave make_observation_slave(const CandidateLinkSet& links, const EnergyModel& model,
                                        int obs) {
    ObservationSlave slave;
    slave.observation = obs;
    slave.camera = links.camera_of(obs);
    slave.incoming = links.incoming(obs);
    slave.outgoing = links.outgoing(obs);
    auto weight = [&](LinkId q) {
        const double theta = model.theta[static_cast<std::size_t>(q)];
        return links.link(q).is_virtual() ? theta : 0.5 * theta;
    };
    for (LinkId p : slave.incoming) {
        slave.initial_in_weights.push_back(weight(p));
    }
    for (LinkId q : slave.outgoing) {
        slave.initial_out_weights.push_back(weight(q));
    }
    slave.in_weights = slave.initial_in_weights;
    slave.out_weights = slave.initial_out_weights;
    slave.edge_weights = model.theta_pair[static_cast<std::size_t>(obs)];
    return slave;
}

QddDecomposition build_observation_slaves(const CandidateLinkSet& links,
                                          const EnergyModel& model,
                                          const CameraTopology& topology) {
    model.validate(links);
    QddDecomposition d;
    d.cameras.assign(topology.cameras().begin(), topology.cameras().end());
    d.observations_by_camera.resize(d.cameras.size());
    d.slaves.reserve(links.observation_count());
    for (std::size_t i = 0; i < links.observation_count(); ++i) {
        const int obs = static_cast<int>(i);
        auto it = std::lower_bound(d.cameras.begin(), d.cameras.end(), links.camera_of(obs));
        if (it == d.cameras.end() || *it != links.camera_of(obs)) {
            throw ConfigError("observation on a camera missing from the topology");
        }
        d.observations_by_camera[static_cast<std::size_t>(it - d.cameras.begin())].push_back(obs);
        d.slaves.push_back(make_observation_slave(links, model, obs));
    }
    return d;
}

double solve_observation_slave(ObservationSlave& slave) {
    const std::size_t m = slave.outgoing.size();
    double best = 0.0;
    std::size_t best_a = 0;
    std::size_t best_b = 0;
    bool found = false;
    for (std::size_t a = 0; a < slave.incoming.size(); ++a) {
        const double base = slave.in_weights[a];
        const double* row = slave.edge_weights.data() + a * m;
        for (std::size_t b = 0; b < m; ++b) {
            const double v = base + slave.out_weights[b] + row[b];
            if (!found || v < best) {
                best = v;
                best_a = a;
                best_b = b;
                found = true;
            }
        }
    }
    slave.chosen_in = static_cast<int>(best_a);
    slave.chosen_out = static_cast<int>(best_b);
    slave.value = best;
    return best;
}

namespace {

struct SharedLabels {
    int incoming_side;  // label in the slave of link.to
    int outgoing_side;  // label in the slave of link.from
};

SharedLabels labels_of(const QddDecomposition& d, const Link& l) {
    const ObservationSlave& head = d.slaves[static_cast<std::size_t>(l.to)];
    const ObservationSlave& tail = d.slaves[static_cast<std::size_t>(l.from)];
    return SharedLabels{head.chosen_in == l.in_slot ? 1 : 0, tail.chosen_out == l.out_slot ? 1 : 0};
}

}  // namespace

int count_conflicts(const QddDecomposition& d, const CandidateLinkSet& links) {
    int conflicts = 0;
    for (const Link& l : links.links()) {
        if (l.is_virtual()) {
            continue;
        }
        const SharedLabels s = labels_of(d, l);
        if (s.incoming_side != s.outgoing_side) {
            ++conflicts;
        }
    }
    return conflicts;
}

int update_node_weights(QddDecomposition& d, const CandidateLinkSet& links, double alpha) {
    int conflicts = 0;
    for (const Link& l : links.links()) {
        if (l.is_virtual()) {
            continue;
        }
        const SharedLabels s = labels_of(d, l);
        if (s.incoming_side == s.outgoing_side) {
            continue;
        }
        ++conflicts;
        d.slaves[static_cast<std::size_t>(l.to)].in_weights[static_cast<std::size_t>(l.in_slot)] +=
            consensus_adjustment(alpha, s.incoming_side, s.outgoing_side);
        d.slaves[static_cast<std::size_t>(l.from)]
            .out_weights[static_cast<std::size_t>(l.out_slot)] +=
            consensus_adjustment(alpha, s.outgoing_side, s.incoming_side);
    }
    return conflicts;
}

LinkingConfig extract_primal_quadratic(const QddDecomposition& d, const CandidateLinkSet& links,
                                       bool with_pairs) {
    LinkingConfig config;
    config.x.assign(links.link_count(), 0);
    for (const Link& l : links.links()) {
        if (l.is_virtual()) {
            continue;
        }
        const SharedLabels s = labels_of(d, l);
        if (s.incoming_side == 1 && s.outgoing_side == 1) {
            config.x[static_cast<std::size_t>(l.id)] = 1;
        }
    }
    // An observation whose own choice on a side was dropped (or was already
    // virtual) falls back to the virtual link of that side.
    for (const ObservationSlave& slave : d.slaves) {
        const LinkId in = slave.incoming[static_cast<std::size_t>(slave.chosen_in)];
        const LinkId out = slave.outgoing[static_cast<std::size_t>(slave.chosen_out)];
        if (!config.active(in)) {
            config.x[static_cast<std::size_t>(slave.incoming.front())] = 1;
        }
        if (!config.active(out)) {
            config.x[static_cast<std::size_t>(slave.outgoing.back())] = 1;
        }
    }
    if (with_pairs) {
        complete_pairs(config, links);
    }
    return config;
}

double qdd_dual_value(const QddDecomposition& d) {
    double dual = 0.0;
    for (const auto& group : d.observations_by_camera) {
        double local = 0.0;
        for (int obs : group) {
            local += d.slaves[static_cast<std::size_t>(obs)].value;
        }
        dual += local;
    }
    return dual;
}

DdResult run_qdd(const CandidateLinkSet& links, const EnergyModel& model,
                 const CameraTopology& topology, const DdOptions& options) {
    options.schedule.validate();
    const auto start = std::chrono::steady_clock::now();
    QddDecomposition d = build_observation_slaves(links, model, topology);
    ConvergenceMonitor monitor(options.stop);
    DdResult result;
    for (int t = 1;; ++t) {
        const double alpha = options.schedule.alpha(t);
        parallel_for(d.slaves.size(), options.threads,
                     [&](std::size_t i) { solve_observation_slave(d.slaves[i]); });
        const double dual = qdd_dual_value(d);
        LinkingConfig primal_config = extract_primal_quadratic(d, links, false);
        const double primal =
            camera_grouped_energy(primal_config, links, model, d.observations_by_camera, true);
        const int conflicts = count_conflicts(d, links);
        if (monitor.record(t, alpha, dual, primal, conflicts)) {
            complete_pairs(primal_config, links);
            result.config = std::move(primal_config);
        }
        if (monitor.should_stop()) {
            break;
        }
        update_node_weights(d, links, alpha);
    }
    result.report = monitor.take_report();
    result.report.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return result;
}

}  // namespace camnet
