#include "camnet/ldd.hpp"

#include "camnet/assign.hpp"
#include "camnet/error.hpp"

#include <algorithm>
#include <chrono>

namespace camnet {

namespace {

double initial_weight(const Link& link, double theta) {
    return link.is_virtual() ? theta : 0.5 * theta;
}

std::vector<std::vector<int>> group_by_camera(const CandidateLinkSet& links,
                                              const std::vector<CameraId>& cameras) {
    std::vector<std::vector<int>> groups(cameras.size());
    for (std::size_t i = 0; i < links.observation_count(); ++i) {
        const CameraId c = links.camera_of(static_cast<int>(i));
        auto it = std::lower_bound(cameras.begin(), cameras.end(), c);
        if (it == cameras.end() || *it != c) {
            throw ConfigError("observation on a camera missing from the topology");
        }
        groups[static_cast<std::size_t>(it - cameras.begin())].push_back(static_cast<int>(i));
    }
    return groups;
}

}  // namespace

SlaveProblem make_slave(const CandidateLinkSet& links, const EnergyModel& model, CameraId camera,
                        SlaveSide side) {
    SlaveProblem slave;
    slave.owner_camera = camera;
    slave.side = side;
    for (std::size_t i = 0; i < links.observation_count(); ++i) {
        if (links.camera_of(static_cast<int>(i)) == camera) {
            slave.rows.push_back(static_cast<int>(i));
        }
    }
    const bool pred = side == SlaveSide::predecessor;
    auto partner = [&](const Link& l) { return pred ? l.from : l.to; };

    for (int row : slave.rows) {
        for (LinkId q : pred ? links.incoming(row) : links.outgoing(row)) {
            const Link& l = links.link(q);
            if (!l.is_virtual()) {
                slave.columns.push_back(partner(l));
            }
        }
    }
    std::sort(slave.columns.begin(), slave.columns.end());
    slave.columns.erase(std::unique(slave.columns.begin(), slave.columns.end()),
                        slave.columns.end());

    for (std::size_t r = 0; r < slave.rows.size(); ++r) {
        const int row = slave.rows[r];
        for (LinkId q : pred ? links.incoming(row) : links.outgoing(row)) {
            const Link& l = links.link(q);
            int col = slave.virtual_column();
            if (!l.is_virtual()) {
                col = static_cast<int>(
                    std::lower_bound(slave.columns.begin(), slave.columns.end(), partner(l)) -
                    slave.columns.begin());
            }
            const double w = initial_weight(l, model.theta[static_cast<std::size_t>(q)]);
            slave.scope.push_back(q);
            slave.entry_row.push_back(static_cast<int>(r));
            slave.entry_col.push_back(col);
            slave.initial_weights.push_back(w);
            slave.weights.push_back(w);
        }
    }
    slave.labels.assign(slave.scope.size(), 0);
    return slave;
}

LddDecomposition build_slaves(const CandidateLinkSet& links, const EnergyModel& model,
                              const CameraTopology& topology) {
    model.validate(links);
    LddDecomposition d;
    d.cameras.assign(topology.cameras().begin(), topology.cameras().end());
    d.observations_by_camera = group_by_camera(links, d.cameras);
    d.predecessor_slot.assign(links.link_count(), SlaveSlot{});
    d.successor_slot.assign(links.link_count(), SlaveSlot{});
    for (CameraId camera : d.cameras) {
        d.slaves.push_back(make_slave(links, model, camera, SlaveSide::predecessor));
        d.slaves.push_back(make_slave(links, model, camera, SlaveSide::successor));
    }
    for (std::size_t s = 0; s < d.slaves.size(); ++s) {
        const SlaveProblem& slave = d.slaves[s];
        auto& slots = slave.side == SlaveSide::predecessor ? d.predecessor_slot : d.successor_slot;
        for (std::size_t e = 0; e < slave.scope.size(); ++e) {
            slots[static_cast<std::size_t>(slave.scope[e])] =
                SlaveSlot{static_cast<int>(s), static_cast<int>(e)};
        }
    }
    return d;
}

double solve_slave(SlaveProblem& slave) {
    std::fill(slave.labels.begin(), slave.labels.end(), 0);
    slave.value = 0.0;
    if (slave.rows.empty()) {
        return 0.0;
    }
    AssignmentProblem problem;
    problem.rows = static_cast<int>(slave.rows.size());
    problem.cols = static_cast<int>(slave.columns.size()) + 1;
    problem.replicable_cols.insert(slave.virtual_column());
    problem.cells.reserve(slave.scope.size());
    for (std::size_t e = 0; e < slave.scope.size(); ++e) {
        problem.cells.push_back(AssignmentCell{slave.entry_row[e], slave.entry_col[e],
                                               slave.weights[e]});
    }
    const AssignmentResult result = solve_assignment(problem);

    // Each row has exactly one link per column, so the chosen (row, column)
    // identifies one scope entry. Entries are in row order.
    double value = 0.0;
    for (std::size_t e = 0; e < slave.scope.size(); ++e) {
        if (result.assignment[static_cast<std::size_t>(slave.entry_row[e])] ==
            slave.entry_col[e]) {
            slave.labels[e] = 1;
            value += slave.weights[e];
        }
    }
    slave.value = value;
    return value;
}

int count_conflicts(const LddDecomposition& d) {
    int conflicts = 0;
    for (std::size_t q = 0; q < d.predecessor_slot.size(); ++q) {
        const SlaveSlot a = d.predecessor_slot[q];
        const SlaveSlot b = d.successor_slot[q];
        if (a.slave < 0 || b.slave < 0) {
            continue;
        }
        if (d.slaves[static_cast<std::size_t>(a.slave)].labels[static_cast<std::size_t>(a.entry)] !=
            d.slaves[static_cast<std::size_t>(b.slave)].labels[static_cast<std::size_t>(b.entry)]) {
            ++conflicts;
        }
    }
    return conflicts;
}

int update_weights(LddDecomposition& d, double alpha) {
    int conflicts = 0;
    for (std::size_t q = 0; q < d.predecessor_slot.size(); ++q) {
        const SlaveSlot a = d.predecessor_slot[q];
        const SlaveSlot b = d.successor_slot[q];
        if (a.slave < 0 || b.slave < 0) {
            continue;
        }
        SlaveProblem& sa = d.slaves[static_cast<std::size_t>(a.slave)];
        SlaveProblem& sb = d.slaves[static_cast<std::size_t>(b.slave)];
        const int la = sa.labels[static_cast<std::size_t>(a.entry)];
        const int lb = sb.labels[static_cast<std::size_t>(b.entry)];
        if (la == lb) {
            continue;
        }
        ++conflicts;
        sa.weights[static_cast<std::size_t>(a.entry)] += consensus_adjustment(alpha, la, lb);
        sb.weights[static_cast<std::size_t>(b.entry)] += consensus_adjustment(alpha, lb, la);
    }
    return conflicts;
}

LinkingConfig extract_primal(const LddDecomposition& d, const CandidateLinkSet& links) {
    LinkingConfig config;
    config.x.assign(links.link_count(), 0);
    for (std::size_t q = 0; q < d.predecessor_slot.size(); ++q) {
        const SlaveSlot a = d.predecessor_slot[q];
        const SlaveSlot b = d.successor_slot[q];
        if (a.slave < 0 || b.slave < 0) {
            continue;
        }
        if (d.slaves[static_cast<std::size_t>(a.slave)].labels[static_cast<std::size_t>(a.entry)] &&
            d.slaves[static_cast<std::size_t>(b.slave)].labels[static_cast<std::size_t>(b.entry)]) {
            config.x[q] = 1;
        }
    }
    for (std::size_t i = 0; i < links.observation_count(); ++i) {
        const int obs = static_cast<int>(i);
        const auto& in = links.incoming(obs);
        const auto& out = links.outgoing(obs);
        const bool has_in = std::any_of(in.begin() + 1, in.end(),
                                        [&](LinkId p) { return config.active(p); });
        const bool has_out = std::any_of(out.begin(), out.end() - 1,
                                         [&](LinkId q) { return config.active(q); });
        config.x[static_cast<std::size_t>(in.front())] = has_in ? 0 : 1;
        config.x[static_cast<std::size_t>(out.back())] = has_out ? 0 : 1;
    }
    return config;
}

double ldd_dual_value(const LddDecomposition& d) {
    double dual = 0.0;
    for (std::size_t c = 0; c < d.cameras.size(); ++c) {
        dual += d.slaves[2 * c].value + d.slaves[2 * c + 1].value;
    }
    return dual;
}

double camera_grouped_energy(const LinkingConfig& config, const CandidateLinkSet& links,
                             const EnergyModel& model,
                             const std::vector<std::vector<int>>& observations_by_camera,
                             bool with_pairs) {
    double total = 0.0;
    for (const auto& group : observations_by_camera) {
        double local = 0.0;
        for (int obs : group) {
            local += observation_energy_term(config, links, model, obs, with_pairs);
        }
        total += local;
    }
    return total;
}

DdResult run_ldd(const CandidateLinkSet& links, const EnergyModel& model,
                 const CameraTopology& topology, const DdOptions& options) {
    options.schedule.validate();
    const auto start = std::chrono::steady_clock::now();
    LddDecomposition d = build_slaves(links, model, topology);
    ConvergenceMonitor monitor(options.stop);
    DdResult result;
    for (int t = 1;; ++t) {
        const double alpha = options.schedule.alpha(t);
        parallel_for(d.slaves.size(), options.threads,
                     [&](std::size_t s) { solve_slave(d.slaves[s]); });
        const double dual = ldd_dual_value(d);
        LinkingConfig primal_config = extract_primal(d, links);
        const double primal =
            camera_grouped_energy(primal_config, links, model, d.observations_by_camera, false);
        const int conflicts = count_conflicts(d);
        if (monitor.record(t, alpha, dual, primal, conflicts)) {
            result.config = std::move(primal_config);
        }
        if (monitor.should_stop()) {
            break;
        }
        update_weights(d, alpha);
    }
    result.report = monitor.take_report();
    result.report.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return result;
}

}  // namespace camnet
