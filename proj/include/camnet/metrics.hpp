#pragma once

#include "camnet/energy.hpp"
#include "camnet/model.hpp"

#include <map>

namespace camnet {

struct Evaluation {
    double precision = 0.0;
    double recall = 0.0;
    double f_measure = 0.0;
    int estimated_tracks = 0;
    int true_tracks = 0;
};

using GroundTruth = std::map<ObservationId, int>;

/// Precision averages, over estimated tracks, the largest share of the track
/// owned by one person; recall averages, over true tracks, the largest share
/// of the person captured by one estimated track. Throws InputError unless
/// the partition covers exactly the observations in `truth`, once each.
Evaluation evaluate(const Partition& partition, const GroundTruth& truth);

/// Tracks of the ground truth, ordered by first observation.
Partition truth_partition(const GroundTruth& truth);

}  // namespace camnet
