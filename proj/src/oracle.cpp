#include "camnet/oracle.hpp"

#include "camnet/assign.hpp"
#include "camnet/error.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <string>

namespace camnet {

namespace {

void require_cap(const CandidateLinkSet& links, std::size_t cap, const char* what) {
    if (links.observation_count() > cap) {
        throw SizeError(std::string(what) + ": " + std::to_string(links.observation_count()) +
                        " observations exceed the cap of " + std::to_string(cap));
    }
}

struct LinkingEnumerator {
    const CandidateLinkSet& links;
    const std::function<void(const LinkingConfig&)>& visit;
    LinkingConfig config;
    std::vector<std::uint8_t> has_successor;

    void run(std::size_t j) {
        const std::size_t n = links.observation_count();
        if (j == n) {
            for (std::size_t i = 0; i < n; ++i) {
                if (!has_successor[i]) {
                    config.x[static_cast<std::size_t>(links.sink_link(static_cast<int>(i)))] = 1;
                }
            }
            visit(config);
            for (std::size_t i = 0; i < n; ++i) {
                config.x[static_cast<std::size_t>(links.sink_link(static_cast<int>(i)))] = 0;
            }
            return;
        }
        for (LinkId p : links.incoming(static_cast<int>(j))) {
            const Link& l = links.link(p);
            std::uint8_t* used = nullptr;
            if (!l.is_virtual()) {
                used = &has_successor[static_cast<std::size_t>(l.from)];
                if (*used) {
                    continue;
                }
                *used = 1;
            }
            config.x[static_cast<std::size_t>(p)] = 1;
            run(j + 1);
            config.x[static_cast<std::size_t>(p)] = 0;
            if (used) {
                *used = 0;
            }
        }
    }
};

OracleResult minimize_over_linkings(const CandidateLinkSet& links,
                                    const std::function<double(const LinkingConfig&)>& energy) {
    OracleResult best;
    bool found = false;
    for_each_linking(links, [&](const LinkingConfig& config) {
        const double e = energy(config);
        if (!found || e < best.energy || (e == best.energy && config.x < best.config.x)) {
            best.config = config;
            best.energy = e;
            found = true;
        }
    });
    return best;
}

}  // namespace

void for_each_linking(const CandidateLinkSet& links,
                      const std::function<void(const LinkingConfig&)>& visit) {
    LinkingEnumerator e{links, visit, {}, {}};
    e.config.x.assign(links.link_count(), 0);
    e.has_successor.assign(links.observation_count(), 0);
    e.run(0);
}

std::uint64_t count_linkings(const CandidateLinkSet& links) {
    std::uint64_t count = 0;
    for_each_linking(links, [&](const LinkingConfig&) { ++count; });
    return count;
}

OracleResult brute_force_linear(const CandidateLinkSet& links, const EnergyModel& model,
                                std::size_t cap) {
    require_cap(links, cap, "brute_force_linear");
    model.validate(links);
    return minimize_over_linkings(
        links, [&](const LinkingConfig& c) { return energy_linear(c, model); });
}

OracleResult brute_force_quadratic(const CandidateLinkSet& links, const EnergyModel& model,
                                   std::size_t cap) {
    require_cap(links, cap, "brute_force_quadratic");
    model.validate(links);
    OracleResult best = minimize_over_linkings(
        links, [&](const LinkingConfig& c) { return energy_quadratic(c, links, model); });
    complete_pairs(best.config, links);
    return best;
}

OracleResult exact_linear_assignment(const CandidateLinkSet& links, const EnergyModel& model) {
    model.validate(links);
    const int n = static_cast<int>(links.observation_count());
    OracleResult result;
    result.config.x.assign(links.link_count(), 0);
    if (n == 0) {
        return result;
    }
    auto theta = [&](LinkId q) { return model.theta[static_cast<std::size_t>(q)]; };

    // Row j picks its predecessor; column i < n is observation i as
    // predecessor, column n the source. Choosing i replaces i's sink link.
    AssignmentProblem problem;
    problem.rows = n;
    problem.cols = n + 1;
    problem.replicable_cols.insert(n);
    for (int j = 0; j < n; ++j) {
        for (LinkId p : links.incoming(j)) {
            const Link& l = links.link(p);
            if (l.is_virtual()) {
                problem.cells.push_back(AssignmentCell{j, n, theta(p)});
            } else {
                problem.cells.push_back(
                    AssignmentCell{j, l.from, theta(p) - theta(links.sink_link(l.from))});
            }
        }
    }
    const AssignmentResult solved = solve_assignment(problem);

    std::vector<std::uint8_t> has_successor(static_cast<std::size_t>(n), 0);
    for (int j = 0; j < n; ++j) {
        const int col = solved.assignment[static_cast<std::size_t>(j)];
        if (col == n) {
            result.config.x[static_cast<std::size_t>(links.source_link(j))] = 1;
        } else {
            const std::optional<LinkId> q = links.find(col, j);
            if (!q) {
                throw EncodingError("assignment chose a pair with no candidate link");
            }
            result.config.x[static_cast<std::size_t>(*q)] = 1;
            has_successor[static_cast<std::size_t>(col)] = 1;
        }
    }
    for (int i = 0; i < n; ++i) {
        if (!has_successor[static_cast<std::size_t>(i)]) {
            result.config.x[static_cast<std::size_t>(links.sink_link(i))] = 1;
        }
    }
    result.energy = energy_linear(result.config, model);
    return result;
}

PairIndex index_pairs(const CandidateLinkSet& links) {
    PairIndex index;
    index.pairs.reserve(links.total_pair_count());
    index.observation.reserve(links.total_pair_count());
    for (std::size_t i = 0; i < links.observation_count(); ++i) {
        for (const LinkPair& pair : links.pairs(static_cast<int>(i))) {
            index.pairs.push_back(pair);
            index.observation.push_back(static_cast<int>(i));
        }
    }
    return index;
}

std::vector<double> flow_costs(const CandidateLinkSet& links, const EnergyModel& model) {
    model.validate(links);
    auto half = [&](LinkId q) {
        const double theta = model.theta[static_cast<std::size_t>(q)];
        return links.link(q).is_virtual() ? theta : 0.5 * theta;
    };
    std::vector<double> costs;
    costs.reserve(links.total_pair_count());
    for (std::size_t i = 0; i < links.observation_count(); ++i) {
        const int obs = static_cast<int>(i);
        const auto& in = links.incoming(obs);
        const auto& out = links.outgoing(obs);
        for (std::size_t a = 0; a < in.size(); ++a) {
            for (std::size_t b = 0; b < out.size(); ++b) {
                costs.push_back(half(in[a]) + half(out[b]) +
                                model.pair_cost(obs, static_cast<int>(a), static_cast<int>(b),
                                                out.size()));
            }
        }
    }
    return costs;
}

namespace {

struct FlowEdge {
    int to;
    int cap;
    double cost;
    int rev;
    int pair;  // -1 for residual reverse edges
};

// Link graph of the flow subproblem. Nodes are the ordinary links plus a
// super source and a super sink standing in for every source and sink link;
// each p-s pair is a unit arc. Built once, re-solved for new arc costs.
class FlowNetwork {
public:
    FlowNetwork(const CandidateLinkSet& links, const PairIndex& index) : pairs_(index.pairs.size()) {
        std::vector<int> node_of(links.link_count(), -1);
        int nodes = 0;
        for (const Link& l : links.links()) {
            if (!l.is_virtual()) {
                node_of[static_cast<std::size_t>(l.id)] = nodes++;
            }
        }
        source_ = nodes++;
        sink_ = nodes++;
        graph_.resize(static_cast<std::size_t>(nodes));
        for (std::size_t k = 0; k < index.pairs.size(); ++k) {
            const LinkPair& pair = index.pairs[k];
            const int u = links.link(pair.in).is_virtual()
                              ? source_
                              : node_of[static_cast<std::size_t>(pair.in)];
            const int v = links.link(pair.out).is_virtual()
                              ? sink_
                              : node_of[static_cast<std::size_t>(pair.out)];
            auto& gu = graph_[static_cast<std::size_t>(u)];
            auto& gv = graph_[static_cast<std::size_t>(v)];
            gu.push_back(FlowEdge{v, 1, 0.0, static_cast<int>(gv.size()), static_cast<int>(k)});
            gv.push_back(FlowEdge{u, 0, 0.0, static_cast<int>(gu.size()) - 1, -1});
        }
        dist_.resize(graph_.size());
        prev_node_.resize(graph_.size());
        prev_edge_.resize(graph_.size());
    }

    FlowSolution solve(const std::vector<double>& arc_cost) {
        if (arc_cost.size() != pairs_) {
            throw InputError("arc cost table does not match the pair index");
        }
        for (auto& edges : graph_) {
            for (FlowEdge& e : edges) {
                if (e.pair >= 0) {
                    e.cap = 1;
                    e.cost = arc_cost[static_cast<std::size_t>(e.pair)];
                    FlowEdge& back = graph_[static_cast<std::size_t>(e.to)]
                                           [static_cast<std::size_t>(e.rev)];
                    back.cap = 0;
                    back.cost = -e.cost;
                }
            }
        }
        // Successive shortest paths: augment one unit along the cheapest
        // source-sink path while that path has negative cost.
        while (shortest_path() && dist_[static_cast<std::size_t>(sink_)] < -kEps) {
            for (int v = sink_; v != source_; v = prev_node_[static_cast<std::size_t>(v)]) {
                const int u = prev_node_[static_cast<std::size_t>(v)];
                FlowEdge& e = graph_[static_cast<std::size_t>(u)]
                                    [static_cast<std::size_t>(prev_edge_[static_cast<std::size_t>(v)])];
                e.cap -= 1;
                graph_[static_cast<std::size_t>(v)][static_cast<std::size_t>(e.rev)].cap += 1;
            }
        }

        FlowSolution solution;
        solution.z.assign(pairs_, 0);
        for (const auto& edges : graph_) {
            for (const FlowEdge& e : edges) {
                if (e.pair >= 0 && e.cap == 0) {
                    solution.z[static_cast<std::size_t>(e.pair)] = 1;
                }
            }
        }
        for (std::size_t k = 0; k < pairs_; ++k) {
            if (solution.z[k]) {
                solution.value += arc_cost[k];
            }
        }
        return solution;
    }

private:
    static constexpr double kEps = 1e-12;

    // Bellman-Ford from the source; returns false if the sink is unreachable.
    bool shortest_path() {
        constexpr double kInf = std::numeric_limits<double>::infinity();
        std::fill(dist_.begin(), dist_.end(), kInf);
        dist_[static_cast<std::size_t>(source_)] = 0.0;
        const std::size_t n = graph_.size();
        for (std::size_t pass = 0; pass < n; ++pass) {
            bool changed = false;
            for (std::size_t u = 0; u < n; ++u) {
                const double du = dist_[u];
                if (du == kInf) {
                    continue;
                }
                const auto& edges = graph_[u];
                for (std::size_t e = 0; e < edges.size(); ++e) {
                    const FlowEdge& edge = edges[e];
                    auto& dv = dist_[static_cast<std::size_t>(edge.to)];
                    if (edge.cap > 0 && du + edge.cost < dv - kEps) {
                        dv = du + edge.cost;
                        prev_node_[static_cast<std::size_t>(edge.to)] = static_cast<int>(u);
                        prev_edge_[static_cast<std::size_t>(edge.to)] = static_cast<int>(e);
                        changed = true;
                    }
                }
            }
            if (!changed) {
                return dist_[static_cast<std::size_t>(sink_)] != kInf;
            }
        }
        throw InfeasibleProblemError("negative cycle in the flow residual graph");
    }

    std::size_t pairs_;
    int source_ = 0;
    int sink_ = 0;
    std::vector<std::vector<FlowEdge>> graph_;
    std::vector<double> dist_;
    std::vector<int> prev_node_;
    std::vector<int> prev_edge_;
};

}  // namespace

FlowSolution solve_flow_subproblem(const CandidateLinkSet& links, const PairIndex& index,
                                   const std::vector<double>& arc_cost) {
    FlowNetwork network(links, index);
    return network.solve(arc_cost);
}

namespace {

template <typename Visit>
void enumerate_flows(const CandidateLinkSet& links, const PairIndex& index, std::size_t max_pairs,
                     Visit visit) {
    const std::size_t m = index.pairs.size();
    if (m > max_pairs) {
        throw SizeError("flow enumeration over " + std::to_string(m) +
                        " pairs exceeds the cap of " + std::to_string(max_pairs));
    }
    // Per ordinary link: pairs that carry flow into it and pairs that carry
    // flow out of it.
    std::vector<std::uint64_t> into(links.link_count(), 0);
    std::vector<std::uint64_t> out_of(links.link_count(), 0);
    for (std::size_t k = 0; k < m; ++k) {
        out_of[static_cast<std::size_t>(index.pairs[k].in)] |= std::uint64_t{1} << k;
        into[static_cast<std::size_t>(index.pairs[k].out)] |= std::uint64_t{1} << k;
    }
    std::vector<std::size_t> ordinary;
    for (const Link& l : links.links()) {
        if (!l.is_virtual()) {
            ordinary.push_back(static_cast<std::size_t>(l.id));
        }
    }
    const std::uint64_t end = std::uint64_t{1} << m;
    for (std::uint64_t mask = 0; mask < end; ++mask) {
        const bool conserved = std::all_of(ordinary.begin(), ordinary.end(), [&](std::size_t q) {
            return std::popcount(mask & into[q]) == std::popcount(mask & out_of[q]);
        });
        if (conserved) {
            visit(mask);
        }
    }
}

}  // namespace

FlowSolution enumerate_flow_subproblem(const CandidateLinkSet& links, const PairIndex& index,
                                       const std::vector<double>& arc_cost,
                                       std::size_t max_pairs) {
    if (arc_cost.size() != index.pairs.size()) {
        throw InputError("arc cost table does not match the pair index");
    }
    FlowSolution best;
    std::uint64_t best_mask = 0;
    bool found = false;
    enumerate_flows(links, index, max_pairs, [&](std::uint64_t mask) {
        double value = 0.0;
        for (std::size_t k = 0; k < arc_cost.size(); ++k) {
            if (mask >> k & 1U) {
                value += arc_cost[k];
            }
        }
        if (!found || value < best.value) {
            best.value = value;
            best_mask = mask;
            found = true;
        }
    });
    best.z.assign(index.pairs.size(), 0);
    for (std::size_t k = 0; k < best.z.size(); ++k) {
        best.z[k] = static_cast<std::uint8_t>(best_mask >> k & 1U);
    }
    return best;
}

std::uint64_t count_flows(const CandidateLinkSet& links, std::size_t max_pairs) {
    std::uint64_t count = 0;
    enumerate_flows(links, index_pairs(links), max_pairs, [&](std::uint64_t) { ++count; });
    return count;
}

LrmcfResult lrmcf_lower_bound(const CandidateLinkSet& links, const EnergyModel& model,
                              const StepSchedule& schedule, int iterations, double stop_at,
                              std::size_t cap) {
    require_cap(links, cap, "lrmcf_lower_bound");
    schedule.validate();
    if (iterations < 1) {
        throw ConfigError("lrmcf_lower_bound needs at least one iteration");
    }
    const PairIndex index = index_pairs(links);
    const std::vector<double> costs = flow_costs(links, model);
    const std::size_t n = links.observation_count();

    LrmcfResult result;
    result.lambda.assign(n, 0.0);
    FlowNetwork network(links, index);
    std::vector<double> arc(costs.size());
    std::vector<int> usage(n);
    const double reach = stop_at - 1e-9 * std::max(1.0, std::abs(stop_at));
    for (int t = 1; t <= iterations; ++t) {
        for (std::size_t k = 0; k < costs.size(); ++k) {
            arc[k] = costs[k] + result.lambda[static_cast<std::size_t>(index.observation[k])];
        }
        const FlowSolution flow = network.solve(arc);
        double lambda_sum = 0.0;
        for (double l : result.lambda) {
            lambda_sum += l;
        }
        const double dual = flow.value - lambda_sum;
        result.duals.push_back(dual);
        if (t == 1 || dual > result.best_dual) {
            result.best_dual = dual;
        }
        if (result.best_dual >= reach) {
            break;
        }
        std::fill(usage.begin(), usage.end(), 0);
        for (std::size_t k = 0; k < flow.z.size(); ++k) {
            usage[static_cast<std::size_t>(index.observation[k])] += flow.z[k];
        }
        const double alpha = schedule.alpha(t);
        for (std::size_t i = 0; i < n; ++i) {
            result.lambda[i] += alpha * (usage[i] - 1);
        }
    }
    return result;
}

}  // namespace camnet
