#include "camnet/energy.hpp"

#include "camnet/error.hpp"

#include <algorithm>
#include <map>
#include <sstream>

namespace camnet {

namespace {

void require_cover(const LinkingConfig& config, const CandidateLinkSet& links) {
    if (config.x.size() != links.link_count()) {
        std::ostringstream os;
        os << "linking configuration has " << config.x.size() << " entries for "
           << links.link_count() << " links";
        throw InputError(os.str());
    }
    if (config.pairs) {
        for (const LinkPair& pair : *config.pairs) {
            if (!links.pair_observation(pair)) {
                std::ostringstream os;
                os << "pair (" << pair.in << ", " << pair.out << ") is not a candidate pair";
                throw InputError(os.str());
            }
        }
    }
}

}  // namespace

double EnergyModel::pair_cost(const CandidateLinkSet& links, LinkPair pair) const {
    auto obs = links.pair_observation(pair);
    if (!obs) {
        throw InputError("pair is not a member of any B(y)");
    }
    const Link& p = links.link(pair.in);
    const Link& q = links.link(pair.out);
    return pair_cost(*obs, p.in_slot, q.out_slot, links.outgoing(*obs).size());
}

EnergyModel EnergyModel::zero_pairs(const CandidateLinkSet& links, std::vector<double> theta) {
    EnergyModel model;
    model.theta = std::move(theta);
    model.theta_pair.resize(links.observation_count());
    for (std::size_t i = 0; i < links.observation_count(); ++i) {
        model.theta_pair[i].assign(links.pair_count(static_cast<int>(i)), 0.0);
    }
    return model;
}

void EnergyModel::validate(const CandidateLinkSet& links) const {
    if (theta.size() != links.link_count()) {
        throw InputError("energy model does not cover every link");
    }
    if (theta_pair.size() != links.observation_count()) {
        throw InputError("energy model does not cover every observation's pairs");
    }
    for (std::size_t i = 0; i < links.observation_count(); ++i) {
        if (theta_pair[i].size() != links.pair_count(static_cast<int>(i))) {
            throw InputError("energy model pair table has the wrong size");
        }
    }
}

LinkingConfig all_virtual(const CandidateLinkSet& links) {
    LinkingConfig config;
    config.x.assign(links.link_count(), 0);
    for (const Link& l : links.links()) {
        if (l.is_virtual()) {
            config.x[static_cast<std::size_t>(l.id)] = 1;
        }
    }
    return config;
}

void complete_pairs(LinkingConfig& config, const CandidateLinkSet& links) {
    require_cover(LinkingConfig{config.x, std::nullopt}, links);
    std::set<LinkPair> active;
    for (std::size_t i = 0; i < links.observation_count(); ++i) {
        const int obs = static_cast<int>(i);
        for (LinkId p : links.incoming(obs)) {
            if (!config.active(p)) {
                continue;
            }
            for (LinkId q : links.outgoing(obs)) {
                if (config.active(q)) {
                    active.insert(LinkPair{p, q});
                }
            }
        }
    }
    config.pairs = std::move(active);
}

bool is_feasible_linear(const LinkingConfig& config, const CandidateLinkSet& links) {
    require_cover(config, links);
    for (std::size_t i = 0; i < links.observation_count(); ++i) {
        const int obs = static_cast<int>(i);
        int in = 0;
        int out = 0;
        for (LinkId p : links.incoming(obs)) {
            in += config.x[static_cast<std::size_t>(p)];
        }
        for (LinkId q : links.outgoing(obs)) {
            out += config.x[static_cast<std::size_t>(q)];
        }
        if (in != 1 || out != 1) {
            return false;
        }
    }
    for (std::uint8_t v : config.x) {
        if (v > 1) {
            return false;
        }
    }
    return true;
}

bool is_feasible_quadratic(const LinkingConfig& config, const CandidateLinkSet& links) {
    if (!config.pairs) {
        throw InputError("quadratic feasibility needs pair variables");
    }
    if (!is_feasible_linear(config, links)) {
        return false;
    }
    // Every active pair needs both members active, and every product of
    // active members must be an active pair.
    for (const LinkPair& pair : *config.pairs) {
        if (!config.active(pair.in) || !config.active(pair.out)) {
            return false;
        }
    }
    for (std::size_t i = 0; i < links.observation_count(); ++i) {
        const int obs = static_cast<int>(i);
        for (LinkId p : links.incoming(obs)) {
            if (!config.active(p)) {
                continue;
            }
            for (LinkId q : links.outgoing(obs)) {
                if (config.active(q) && !config.pairs->contains(LinkPair{p, q})) {
                    return false;
                }
            }
        }
    }
    return true;
}

double energy_linear(const LinkingConfig& config, const EnergyModel& model) {
    if (config.x.size() != model.theta.size()) {
        throw InputError("linking configuration and energy model differ in size");
    }
    double total = 0.0;
    for (std::size_t q = 0; q < config.x.size(); ++q) {
        if (config.x[q] != 0) {
            total += model.theta[q];
        }
    }
    return total;
}

double energy_quadratic(const LinkingConfig& config, const CandidateLinkSet& links,
                        const EnergyModel& model) {
    require_cover(config, links);
    double total = energy_linear(config, model);
    if (config.pairs) {
        for (const LinkPair& pair : *config.pairs) {
            total += model.pair_cost(links, pair);
        }
        return total;
    }
    for (std::size_t i = 0; i < links.observation_count(); ++i) {
        const int obs = static_cast<int>(i);
        const auto& in = links.incoming(obs);
        const auto& out = links.outgoing(obs);
        for (std::size_t a = 0; a < in.size(); ++a) {
            if (!config.active(in[a])) {
                continue;
            }
            for (std::size_t b = 0; b < out.size(); ++b) {
                if (config.active(out[b])) {
                    total += model.pair_cost(obs, static_cast<int>(a), static_cast<int>(b),
                                             out.size());
                }
            }
        }
    }
    return total;
}

Partition linking_to_partition(const LinkingConfig& config, const CandidateLinkSet& links) {
    if (!is_feasible_linear(config, links)) {
        throw FeasibilityError("linking configuration violates the uniqueness constraint");
    }
    Partition partition;
    const int n = static_cast<int>(links.observation_count());
    for (int head = 0; head < n; ++head) {
        if (!config.active(links.source_link(head))) {
            continue;
        }
        std::vector<ObservationId> track;
        int current = head;
        while (true) {
            track.push_back(links.observation_id(current));
            int next = kSink;
            for (LinkId q : links.outgoing(current)) {
                if (config.active(q)) {
                    next = links.link(q).to;
                    break;
                }
            }
            if (next == kSink) {
                break;
            }
            current = next;
        }
        partition.tracks.push_back(std::move(track));
    }
    return partition;
}

LinkingConfig partition_to_linking(const Partition& partition, const CandidateLinkSet& links) {
    LinkingConfig config;
    config.x.assign(links.link_count(), 0);
    std::vector<std::uint8_t> covered(links.observation_count(), 0);
    for (const auto& track : partition.tracks) {
        if (track.empty()) {
            throw InputError("partition contains an empty track");
        }
        int previous = kSource;
        for (ObservationId id : track) {
            auto index = links.index_of(id);
            if (!index) {
                std::ostringstream os;
                os << "partition references unknown observation " << id;
                throw InputError(os.str());
            }
            if (covered[static_cast<std::size_t>(*index)] != 0) {
                std::ostringstream os;
                os << "observation " << id << " appears in more than one track";
                throw InputError(os.str());
            }
            covered[static_cast<std::size_t>(*index)] = 1;
            auto link = links.find(previous, *index);
            if (!link) {
                std::ostringstream os;
                os << "no candidate link " << links.observation_id(previous) << " -> " << id;
                throw EncodingError(os.str());
            }
            config.x[static_cast<std::size_t>(*link)] = 1;
            previous = *index;
        }
        config.x[static_cast<std::size_t>(links.sink_link(previous))] = 1;
    }
    if (std::find(covered.begin(), covered.end(), 0) != covered.end()) {
        throw InputError("partition does not cover every observation");
    }
    return config;
}

double observation_energy_term(const LinkingConfig& config, const CandidateLinkSet& links,
                               const EnergyModel& model, int obs, bool with_pairs) {
    const auto& in = links.incoming(obs);
    const auto& out = links.outgoing(obs);
    double term = 0.0;
    for (LinkId p : in) {
        if (config.active(p)) {
            term += model.theta[static_cast<std::size_t>(p)];
        }
    }
    const LinkId sink = out.back();
    if (config.active(sink)) {
        term += model.theta[static_cast<std::size_t>(sink)];
    }
    if (with_pairs) {
        for (std::size_t a = 0; a < in.size(); ++a) {
            if (!config.active(in[a])) {
                continue;
            }
            for (std::size_t b = 0; b < out.size(); ++b) {
                if (config.active(out[b])) {
                    term += model.pair_cost(obs, static_cast<int>(a), static_cast<int>(b),
                                            out.size());
                }
            }
        }
    }
    return term;
}

}  // namespace camnet
