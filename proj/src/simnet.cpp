#include "camnet/simnet.hpp"

#include "camnet/error.hpp"
#include "camnet/ldd.hpp"
#include "camnet/qdd.hpp"

#include <algorithm>
#include <chrono>
#include <ostream>
#include <set>
#include <variant>

namespace camnet {

std::string to_string(MessageKind kind) {
    switch (kind) {
        case MessageKind::summary:
            return "summary";
        case MessageKind::labels:
            return "labels";
        case MessageKind::vote:
            return "vote";
    }
    return "unknown";
}

void MessageLog::append(const AgentMessage& message) {
    messages_.push_back(message);
    EdgeCounter& c = per_edge_[{message.sender, message.receiver}];
    ++c.messages;
    c.bytes += message.bytes;
    total_bytes_ += message.bytes;
}

std::size_t MessageLog::count(MessageKind kind) const {
    return static_cast<std::size_t>(std::count_if(
        messages_.begin(), messages_.end(), [&](const AgentMessage& m) { return m.kind == kind; }));
}

bool MessageLog::counters_consistent() const {
    std::map<std::pair<CameraId, CameraId>, EdgeCounter> recount;
    std::size_t total = 0;
    for (const AgentMessage& m : messages_) {
        EdgeCounter& c = recount[{m.sender, m.receiver}];
        ++c.messages;
        c.bytes += m.bytes;
        total += m.bytes;
    }
    return recount == per_edge_ && total == total_bytes_;
}

std::size_t summary_bytes(const Observation& o) {
    // id 8, camera 4, t_enter 8, t_leave 8, bin count 4, 4 bytes of label
    // lengths, then the labels and the histogram.
    return 36 + o.dir_enter.size() + o.dir_leave.size() + o.appearance.data().size() * 8;
}

bool audit_locality(const MessageLog& log, const CameraTopology& topology) {
    return std::all_of(log.messages().begin(), log.messages().end(), [&](const AgentMessage& m) {
        return m.sender != m.receiver && topology.has_camera(m.sender) &&
               topology.has_camera(m.receiver) && topology.adjacent(m.sender, m.receiver);
    });
}

void write_message_log_csv(std::ostream& os, const MessageLog& log) {
    os << "iteration,sender,receiver,kind,bytes\n";
    for (const AgentMessage& m : log.messages()) {
        os << m.iteration << ',' << m.sender << ',' << m.receiver << ',' << to_string(m.kind) << ','
           << m.bytes << '\n';
    }
}

namespace {

struct LabelEntry {
    ObservationId from = 0;
    ObservationId to = 0;
    std::uint8_t label = 0;
};

struct Vote {
    CameraId camera = 0;
    int conflicts = 0;
    double dual = 0.0;
    double primal = 0.0;
};

using Payload = std::variant<std::vector<Observation>, std::vector<LabelEntry>, std::vector<Vote>>;

struct Envelope {
    AgentMessage header;
    Payload payload;
};

// In-process transport. Messages sent during a round are delivered together
// at the barrier in (iteration, sender, receiver) order.
class Network {
public:
    explicit Network(const CameraTopology& topology) : topology_(topology) {}

    void send(int iteration, CameraId sender, CameraId receiver, MessageKind kind,
              std::size_t bytes, Payload payload) {
        if (sender == receiver || !topology_.adjacent(sender, receiver)) {
            throw Error("agent attempted to message a non-neighbor");
        }
        pending_.push_back(
            Envelope{AgentMessage{iteration, sender, receiver, kind, bytes}, std::move(payload)});
    }

    std::vector<Envelope> deliver() {
        std::stable_sort(pending_.begin(), pending_.end(), [](const Envelope& a, const Envelope& b) {
            return std::tie(a.header.iteration, a.header.sender, a.header.receiver) <
                   std::tie(b.header.iteration, b.header.sender, b.header.receiver);
        });
        for (const Envelope& e : pending_) {
            log_.append(e.header);
        }
        std::vector<Envelope> out;
        out.swap(pending_);
        return out;
    }

    MessageLog take_log() { return std::move(log_); }

private:
    const CameraTopology& topology_;
    std::vector<Envelope> pending_;
    MessageLog log_;
};

// One ordinary link touching an agent's own observations. `own_in` is set
// when the agent owns the head (the link is one of its incoming links),
// `own_out` when it owns the tail; both for links within one camera.
struct LinkCopy {
    LinkId link = 0;
    ObservationId from_id = 0;
    ObservationId to_id = 0;
    CameraId from_camera = 0;
    CameraId to_camera = 0;
    int own_in = -1;   // L-DD: predecessor entry; Q-DD: own slave index
    int own_out = -1;  // L-DD: successor entry; Q-DD: own slave index
    int in_label = 0;
    int out_label = 0;
};

struct Agent {
    CameraId camera = 0;
    std::vector<CameraId> neighbors;  // excluding the camera itself
    std::vector<Observation> own_observations;
    std::vector<Observation> local_observations;
    CandidateLinkSet links;
    EnergyModel model;
    std::vector<int> own;  // local indices of own observations, ascending

    SlaveProblem predecessor;
    SlaveProblem successor;
    std::vector<ObservationSlave> slaves;  // parallel to `own`

    std::vector<LinkCopy> copies;
    std::map<std::pair<ObservationId, ObservationId>, int> copy_of;
    LinkingConfig x;

    int conflicts = 0;
    double dual = 0.0;
    double primal = 0.0;

    std::map<CameraId, Vote> known_votes;
    std::map<CameraId, std::set<CameraId>> vote_sent;  // neighbor -> vote cameras
};

LinkCopy& copy_for(Agent& agent, LinkId q) {
    const Link& l = agent.links.link(q);
    const ObservationId from = agent.links.observation_id(l.from);
    const ObservationId to = agent.links.observation_id(l.to);
    auto [it, inserted] = agent.copy_of.try_emplace({from, to}, static_cast<int>(agent.copies.size()));
    if (inserted) {
        agent.copies.push_back(LinkCopy{q, from, to, agent.links.camera_of(l.from),
                                        agent.links.camera_of(l.to), -1, -1, 0, 0});
    }
    return agent.copies[static_cast<std::size_t>(it->second)];
}

void setup_agent(Agent& agent, Algorithm algorithm, const CameraTopology& topology,
                 const AffinityConfig& affinity, const CbtfTable* cbtf) {
    agent.links = build_candidate_links(topology, agent.local_observations);
    agent.model =
        build_energy_model(topology, agent.local_observations, agent.links, affinity, cbtf);
    for (std::size_t i = 0; i < agent.local_observations.size(); ++i) {
        if (agent.local_observations[i].camera == agent.camera) {
            agent.own.push_back(static_cast<int>(i));
        }
    }
    if (algorithm == Algorithm::ldd) {
        agent.predecessor =
            make_slave(agent.links, agent.model, agent.camera, SlaveSide::predecessor);
        agent.successor = make_slave(agent.links, agent.model, agent.camera, SlaveSide::successor);
        for (std::size_t e = 0; e < agent.predecessor.scope.size(); ++e) {
            const LinkId q = agent.predecessor.scope[e];
            if (!agent.links.link(q).is_virtual()) {
                copy_for(agent, q).own_in = static_cast<int>(e);
            }
        }
        for (std::size_t e = 0; e < agent.successor.scope.size(); ++e) {
            const LinkId q = agent.successor.scope[e];
            if (!agent.links.link(q).is_virtual()) {
                copy_for(agent, q).own_out = static_cast<int>(e);
            }
        }
    } else {
        for (std::size_t s = 0; s < agent.own.size(); ++s) {
            const int obs = agent.own[s];
            agent.slaves.push_back(make_observation_slave(agent.links, agent.model, obs));
            for (LinkId p : agent.links.incoming(obs)) {
                if (!agent.links.link(p).is_virtual()) {
                    copy_for(agent, p).own_in = static_cast<int>(s);
                }
            }
            for (LinkId q : agent.links.outgoing(obs)) {
                if (!agent.links.link(q).is_virtual()) {
                    copy_for(agent, q).own_out = static_cast<int>(s);
                }
            }
        }
    }
    // Send order follows link order.
    std::sort(agent.copies.begin(), agent.copies.end(),
              [](const LinkCopy& a, const LinkCopy& b) { return a.link < b.link; });
    for (std::size_t c = 0; c < agent.copies.size(); ++c) {
        agent.copy_of[{agent.copies[c].from_id, agent.copies[c].to_id}] = static_cast<int>(c);
    }
    agent.x.x.assign(agent.links.link_count(), 0);
}

void solve_local(Agent& agent, Algorithm algorithm) {
    if (algorithm == Algorithm::ldd) {
        solve_slave(agent.predecessor);
        solve_slave(agent.successor);
        for (LinkCopy& c : agent.copies) {
            if (c.own_in >= 0) {
                c.in_label = agent.predecessor.labels[static_cast<std::size_t>(c.own_in)];
            }
            if (c.own_out >= 0) {
                c.out_label = agent.successor.labels[static_cast<std::size_t>(c.own_out)];
            }
        }
        return;
    }
    for (ObservationSlave& slave : agent.slaves) {
        solve_observation_slave(slave);
    }
    for (LinkCopy& c : agent.copies) {
        const Link& l = agent.links.link(c.link);
        if (c.own_in >= 0) {
            c.in_label =
                agent.slaves[static_cast<std::size_t>(c.own_in)].chosen_in == l.in_slot ? 1 : 0;
        }
        if (c.own_out >= 0) {
            c.out_label =
                agent.slaves[static_cast<std::size_t>(c.own_out)].chosen_out == l.out_slot ? 1 : 0;
        }
    }
}

void send_labels(const Agent& agent, Network& net, int t) {
    std::map<CameraId, std::vector<LabelEntry>> outbox;
    for (const LinkCopy& c : agent.copies) {
        if (c.from_camera == c.to_camera) {
            continue;
        }
        if (c.own_in >= 0) {
            outbox[c.from_camera].push_back(
                LabelEntry{c.from_id, c.to_id, static_cast<std::uint8_t>(c.in_label)});
        } else {
            outbox[c.to_camera].push_back(
                LabelEntry{c.from_id, c.to_id, static_cast<std::uint8_t>(c.out_label)});
        }
    }
    for (auto& [receiver, entries] : outbox) {
        const std::size_t bytes = kEnvelopeBytes + kLabelBytes * entries.size();
        net.send(t, agent.camera, receiver, MessageKind::labels, bytes, std::move(entries));
    }
}

void receive_labels(Agent& agent, const std::vector<LabelEntry>& entries) {
    for (const LabelEntry& e : entries) {
        auto it = agent.copy_of.find({e.from, e.to});
        if (it == agent.copy_of.end()) {
            throw Error("label for a link the agent does not hold");
        }
        LinkCopy& c = agent.copies[static_cast<std::size_t>(it->second)];
        if (c.own_in >= 0) {
            c.out_label = e.label;
        } else {
            c.in_label = e.label;
        }
    }
}

// Conflicts (counted by the head owner), local primal configuration over
// the agent's own observations, and the agent's dual and primal shares.
void evaluate_local(Agent& agent, Algorithm algorithm) {
    std::fill(agent.x.x.begin(), agent.x.x.end(), 0);
    agent.conflicts = 0;
    for (const LinkCopy& c : agent.copies) {
        if (c.own_in >= 0 && c.in_label != c.out_label) {
            ++agent.conflicts;
        }
        if (c.in_label == 1 && c.out_label == 1) {
            agent.x.x[static_cast<std::size_t>(c.link)] = 1;
        }
    }
    const CandidateLinkSet& links = agent.links;
    if (algorithm == Algorithm::ldd) {
        for (int obs : agent.own) {
            const auto& in = links.incoming(obs);
            const auto& out = links.outgoing(obs);
            const bool has_in = std::any_of(in.begin() + 1, in.end(),
                                            [&](LinkId p) { return agent.x.active(p); });
            const bool has_out = std::any_of(out.begin(), out.end() - 1,
                                             [&](LinkId q) { return agent.x.active(q); });
            agent.x.x[static_cast<std::size_t>(in.front())] = has_in ? 0 : 1;
            agent.x.x[static_cast<std::size_t>(out.back())] = has_out ? 0 : 1;
        }
        agent.dual = agent.predecessor.value + agent.successor.value;
    } else {
        for (const ObservationSlave& slave : agent.slaves) {
            const LinkId in = slave.incoming[static_cast<std::size_t>(slave.chosen_in)];
            const LinkId out = slave.outgoing[static_cast<std::size_t>(slave.chosen_out)];
            if (!agent.x.active(in)) {
                agent.x.x[static_cast<std::size_t>(slave.incoming.front())] = 1;
            }
            if (!agent.x.active(out)) {
                agent.x.x[static_cast<std::size_t>(slave.outgoing.back())] = 1;
            }
        }
        double local = 0.0;
        for (const ObservationSlave& slave : agent.slaves) {
            local += slave.value;
        }
        agent.dual = local;
    }
    double primal = 0.0;
    for (int obs : agent.own) {
        primal += observation_energy_term(agent.x, links, agent.model, obs,
                                          algorithm == Algorithm::qdd);
    }
    agent.primal = primal;
}

void update_local(Agent& agent, Algorithm algorithm, double alpha) {
    for (const LinkCopy& c : agent.copies) {
        if (c.in_label == c.out_label) {
            continue;
        }
        const Link& l = agent.links.link(c.link);
        if (c.own_in >= 0) {
            const double delta = consensus_adjustment(alpha, c.in_label, c.out_label);
            if (algorithm == Algorithm::ldd) {
                agent.predecessor.weights[static_cast<std::size_t>(c.own_in)] += delta;
            } else {
                agent.slaves[static_cast<std::size_t>(c.own_in)]
                    .in_weights[static_cast<std::size_t>(l.in_slot)] += delta;
            }
        }
        if (c.own_out >= 0) {
            const double delta = consensus_adjustment(alpha, c.out_label, c.in_label);
            if (algorithm == Algorithm::ldd) {
                agent.successor.weights[static_cast<std::size_t>(c.own_out)] += delta;
            } else {
                agent.slaves[static_cast<std::size_t>(c.own_out)]
                    .out_weights[static_cast<std::size_t>(l.out_slot)] += delta;
            }
        }
    }
}

// Floods every agent's vote through its component: each round an agent
// forwards to each neighbor the votes it has not yet exchanged with it.
void flood_votes(std::vector<Agent>& agents, const std::map<CameraId, std::size_t>& index,
                 Network& net, int t) {
    for (Agent& a : agents) {
        a.known_votes.clear();
        a.vote_sent.clear();
        a.known_votes[a.camera] = Vote{a.camera, a.conflicts, a.dual, a.primal};
    }
    for (;;) {
        bool any = false;
        for (Agent& a : agents) {
            for (CameraId b : a.neighbors) {
                std::set<CameraId>& sent = a.vote_sent[b];
                std::vector<Vote> batch;
                for (const auto& [camera, vote] : a.known_votes) {
                    if (!sent.contains(camera)) {
                        batch.push_back(vote);
                        sent.insert(camera);
                    }
                }
                if (!batch.empty()) {
                    const std::size_t bytes = kEnvelopeBytes + kVoteBytes * batch.size();
                    net.send(t, a.camera, b, MessageKind::vote, bytes, std::move(batch));
                    any = true;
                }
            }
        }
        if (!any) {
            break;
        }
        for (Envelope& e : net.deliver()) {
            Agent& receiver = agents[index.at(e.header.receiver)];
            for (const Vote& v : std::get<std::vector<Vote>>(e.payload)) {
                receiver.known_votes.emplace(v.camera, v);
                // The sender already has it; never echo back.
                receiver.vote_sent[e.header.sender].insert(v.camera);
            }
        }
    }
}

}  // namespace

DistributedResult run_distributed(Algorithm algorithm, const CameraTopology& topology,
                                  std::span<const Observation> observations,
                                  const AffinityConfig& affinity, const CbtfTable* cbtf,
                                  const DdOptions& options) {
    options.schedule.validate();
    const auto start = std::chrono::steady_clock::now();
    topology.validate();
    validate_observations(topology, observations);
    // Used only by the observer to report in global link ids.
    const CandidateLinkSet global_links = build_candidate_links(topology, observations);

    std::vector<Agent> agents;
    std::map<CameraId, std::size_t> index;
    for (CameraId c : topology.cameras()) {
        index[c] = agents.size();
        Agent a;
        a.camera = c;
        for (CameraId n : topology.neighbors(c)) {
            if (n != c) {
                a.neighbors.push_back(n);
            }
        }
        agents.push_back(std::move(a));
    }
    for (const Observation& o : observations) {
        agents[index.at(o.camera)].own_observations.push_back(o);
    }

    Network net(topology);
    // Phase 1: observation summaries to every neighbor.
    for (const Agent& a : agents) {
        std::size_t bytes = kEnvelopeBytes;
        for (const Observation& o : a.own_observations) {
            bytes += summary_bytes(o);
        }
        for (CameraId b : a.neighbors) {
            net.send(0, a.camera, b, MessageKind::summary, bytes, a.own_observations);
        }
    }
    for (Agent& a : agents) {
        a.local_observations = a.own_observations;
    }
    for (Envelope& e : net.deliver()) {
        auto& received = std::get<std::vector<Observation>>(e.payload);
        auto& local = agents[index.at(e.header.receiver)].local_observations;
        local.insert(local.end(), std::make_move_iterator(received.begin()),
                     std::make_move_iterator(received.end()));
    }
    parallel_for(agents.size(), options.threads, [&](std::size_t i) {
        Agent& a = agents[i];
        std::sort(a.local_observations.begin(), a.local_observations.end(),
                  [](const Observation& x, const Observation& y) { return x.id < y.id; });
        setup_agent(a, algorithm, topology, affinity, cbtf);
    });

    ConvergenceMonitor monitor(options.stop);
    DistributedResult result;
    for (int t = 1;; ++t) {
        const double alpha = options.schedule.alpha(t);
        parallel_for(agents.size(), options.threads,
                     [&](std::size_t i) { solve_local(agents[i], algorithm); });
        for (const Agent& a : agents) {
            send_labels(a, net, t);
        }
        for (Envelope& e : net.deliver()) {
            receive_labels(agents[index.at(e.header.receiver)],
                           std::get<std::vector<LabelEntry>>(e.payload));
        }
        parallel_for(agents.size(), options.threads,
                     [&](std::size_t i) { evaluate_local(agents[i], algorithm); });
        flood_votes(agents, index, net, t);

        // Scheduler barrier: combine the votes in camera order.
        double dual = 0.0;
        double primal = 0.0;
        int conflicts = 0;
        for (const Agent& a : agents) {
            const Vote& v = a.known_votes.at(a.camera);
            dual += v.dual;
            primal += v.primal;
            conflicts += v.conflicts;
        }
        if (monitor.record(t, alpha, dual, primal, conflicts)) {
            LinkingConfig config;
            config.x.assign(global_links.link_count(), 0);
            for (const Agent& a : agents) {
                for (int obs : a.own) {
                    const int g = *global_links.index_of(a.links.observation_id(obs));
                    for (LinkId p : a.links.incoming(obs)) {
                        if (!a.x.active(p)) {
                            continue;
                        }
                        const Link& l = a.links.link(p);
                        const LinkId gp =
                            l.is_virtual()
                                ? global_links.source_link(g)
                                : *global_links.find(
                                      *global_links.index_of(a.links.observation_id(l.from)), g);
                        config.x[static_cast<std::size_t>(gp)] = 1;
                    }
                    if (a.x.active(a.links.sink_link(obs))) {
                        config.x[static_cast<std::size_t>(global_links.sink_link(g))] = 1;
                    }
                }
            }
            if (algorithm == Algorithm::qdd) {
                complete_pairs(config, global_links);
            }
            result.config = std::move(config);
        }
        if (monitor.should_stop()) {
            break;
        }
        parallel_for(agents.size(), options.threads,
                     [&](std::size_t i) { update_local(agents[i], algorithm, alpha); });
    }
    result.report = monitor.take_report();
    result.report.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    result.log = net.take_log();
    return result;
}

}  // namespace camnet
