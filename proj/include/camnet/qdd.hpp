#pragma once

#include "camnet/dd.hpp"
#include "camnet/energy.hpp"
#include "camnet/ldd.hpp"
#include "camnet/model.hpp"

#include <vector>

namespace camnet {

/// Per-observation subproblem of the quadratic decomposition: pick one
/// incoming and one outgoing link minimizing node weights plus the pair
/// weight. Pair weights are copied from the model and never change.
struct ObservationSlave {
    int observation = 0;
    CameraId camera = 0;
    std::vector<LinkId> incoming;
    std::vector<LinkId> outgoing;
    std::vector<double> initial_in_weights;
    std::vector<double> initial_out_weights;
    std::vector<double> in_weights;
    std::vector<double> out_weights;
    std::vector<double> edge_weights;  // incoming slot x outgoing slot, row-major
    int chosen_in = 0;
    int chosen_out = 0;
    double value = 0.0;

    LinkPair chosen() const {
        return LinkPair{incoming[static_cast<std::size_t>(chosen_in)],
                        outgoing[static_cast<std::size_t>(chosen_out)]};
    }
    std::size_t search_space() const { return incoming.size() * outgoing.size(); }
};

struct QddDecomposition {
    std::vector<CameraId> cameras;
    std::vector<ObservationSlave> slaves;  // one per observation, by index
    std::vector<std::vector<int>> observations_by_camera;
};

ObservationSlave make_observation_slave(const CandidateLinkSet& links, const EnergyModel& model,
                                        int obs);

QddDecomposition build_observation_slaves(const CandidateLinkSet& links,
                                          const EnergyModel& model,
                                          const CameraTopology& topology);

/// Direct search over B(y). Ties go to the smallest (incoming, outgoing)
/// link-id pair.
double solve_observation_slave(ObservationSlave& slave);

/// Consensus step on node weights of every ordinary link; returns the
/// number of disagreeing links.
int update_node_weights(QddDecomposition& decomposition, const CandidateLinkSet& links,
                        double alpha);

int count_conflicts(const QddDecomposition& decomposition, const CandidateLinkSet& links);

/// Agreed links kept, conflicted links replaced by the virtual link on each
/// affected side, pair variables set to products.
LinkingConfig extract_primal_quadratic(const QddDecomposition& decomposition,
                                       const CandidateLinkSet& links, bool with_pairs = true);

double qdd_dual_value(const QddDecomposition& decomposition);

DdResult run_qdd(const CandidateLinkSet& links, const EnergyModel& model,
                 const CameraTopology& topology, const DdOptions& options = {});

}  // namespace camnet
