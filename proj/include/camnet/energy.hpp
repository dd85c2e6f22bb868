#pragma once

#include "camnet/model.hpp"

#include <cstdint>
#include <optional>
#include <set>
#include <vector>

namespace camnet {

/// Link costs theta_q (indexed by link id) and pair costs theta_pq (per
/// observation, row-major over incoming slot x outgoing slot).
struct EnergyModel {
    std::vector<double> theta;
    std::vector<std::vector<double>> theta_pair;

    double pair_cost(int obs, int in_slot, int out_slot, std::size_t out_count) const {
        return theta_pair[static_cast<std::size_t>(obs)]
                         [static_cast<std::size_t>(in_slot) * out_count +
                          static_cast<std::size_t>(out_slot)];
    }
    double pair_cost(const CandidateLinkSet& links, LinkPair pair) const;

    /// Model with every theta_pq set to zero.
    static EnergyModel zero_pairs(const CandidateLinkSet& links, std::vector<double> theta);

    /// Throws InputError when the tables do not cover `links`.
    void validate(const CandidateLinkSet& links) const;
};

/// Binary state of every link, optionally with pair variables. Pair
/// variables are sparse: the set lists the active pairs, everything else
/// reads as 0.
struct LinkingConfig {
    std::vector<std::uint8_t> x;
    std::optional<std::set<LinkPair>> pairs;

    bool active(LinkId q) const { return x[static_cast<std::size_t>(q)] != 0; }
    friend bool operator==(const LinkingConfig&, const LinkingConfig&) = default;
};

struct Partition {
    std::vector<std::vector<ObservationId>> tracks;

    friend bool operator==(const Partition&, const Partition&) = default;
};

/// Every observation a singleton track.
LinkingConfig all_virtual(const CandidateLinkSet& links);

/// Sets pair variables to the products x_p * x_q over every B(y).
void complete_pairs(LinkingConfig& config, const CandidateLinkSet& links);

bool is_feasible_linear(const LinkingConfig& config, const CandidateLinkSet& links);
bool is_feasible_quadratic(const LinkingConfig& config, const CandidateLinkSet& links);

double energy_linear(const LinkingConfig& config, const EnergyModel& model);

/// E2 over the linear part plus the active pair variables. A configuration
/// without pair variables is scored with the products x_p * x_q.
double energy_quadratic(const LinkingConfig& config, const CandidateLinkSet& links,
                        const EnergyModel& model);

Partition linking_to_partition(const LinkingConfig& config, const CandidateLinkSet& links);
LinkingConfig partition_to_linking(const Partition& partition, const CandidateLinkSet& links);

/// Energy contribution of one observation: its incoming links, its sink
/// link and, when `with_pairs`, the pair through it. Summed per camera and
/// then across cameras this gives the primal energy reported by the
/// dual-decomposition runs, in the same order whether executed centrally or
/// on simulated cameras.
double observation_energy_term(const LinkingConfig& config, const CandidateLinkSet& links,
                               const EnergyModel& model, int obs, bool with_pairs);

}  // namespace camnet
