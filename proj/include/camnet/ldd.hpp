#pragma once

#include "camnet/dd.hpp"
#include "camnet/energy.hpp"
#include "camnet/model.hpp"

#include <cstdint>
#include <vector>

namespace camnet {

enum class SlaveSide { predecessor, successor };

/// One per-camera assignment subproblem of the linear decomposition.
///
/// Rows are the owner's observations; columns are the candidate partner
/// observations (each usable once) plus one virtual column (source for the
/// predecessor side, sink for the successor side) usable by every row.
/// Scope entries are the links of the rows in row order, each slot order.
struct SlaveProblem {
    CameraId owner_camera = 0;
    SlaveSide side = SlaveSide::predecessor;
    std::vector<int> rows;
    std::vector<int> columns;
    std::vector<LinkId> scope;
    std::vector<int> entry_row;
    std::vector<int> entry_col;  // columns.size() marks the virtual column
    std::vector<double> initial_weights;
    std::vector<double> weights;
    std::vector<std::uint8_t> labels;
    double value = 0.0;

    int virtual_column() const { return static_cast<int>(columns.size()); }
};

struct SlaveSlot {
    int slave = -1;
    int entry = -1;
};

struct LddDecomposition {
    std::vector<CameraId> cameras;    // ascending
    std::vector<SlaveProblem> slaves; // 2 per camera: predecessor, successor
    std::vector<SlaveSlot> predecessor_slot;  // by link id
    std::vector<SlaveSlot> successor_slot;    // by link id
    std::vector<std::vector<int>> observations_by_camera;
};

/// Builds the subproblem of `camera` on one side. Ordinary weights start at
/// theta/2, virtual weights at theta.
SlaveProblem make_slave(const CandidateLinkSet& links, const EnergyModel& model, CameraId camera,
                        SlaveSide side);

LddDecomposition build_slaves(const CandidateLinkSet& links, const EnergyModel& model,
                              const CameraTopology& topology);

/// Solves the assignment with the current weights, stores the labels and
/// returns the subproblem value g.
double solve_slave(SlaveProblem& slave);

/// Applies the consensus step to every ordinary link and returns the number
/// of links whose two labels disagree. Virtual weights never change.
int update_weights(LddDecomposition& decomposition, double alpha);

int count_conflicts(const LddDecomposition& decomposition);

/// Keeps ordinary links labelled 1 by both owners and activates the source
/// (sink) link of every observation left without an incoming (outgoing) link.
LinkingConfig extract_primal(const LddDecomposition& decomposition,
                             const CandidateLinkSet& links);

/// Sum over cameras (ascending) of the predecessor plus successor values.
double ldd_dual_value(const LddDecomposition& decomposition);

/// Sum over cameras (ascending) of the per-observation energy terms.
double camera_grouped_energy(const LinkingConfig& config, const CandidateLinkSet& links,
                             const EnergyModel& model,
                             const std::vector<std::vector<int>>& observations_by_camera,
                             bool with_pairs);

struct DdResult {
    LinkingConfig config;
    RunReport report;
};

DdResult run_ldd(const CandidateLinkSet& links, const EnergyModel& model,
                 const CameraTopology& topology, const DdOptions& options = {});

}  // namespace camnet
