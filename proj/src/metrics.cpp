#include "camnet/metrics.hpp"

#include "camnet/error.hpp"

#include <algorithm>
#include <string>

namespace camnet {

Evaluation evaluate(const Partition& partition, const GroundTruth& truth) {
    std::map<ObservationId, int> track_of;
    for (std::size_t k = 0; k < partition.tracks.size(); ++k) {
        if (partition.tracks[k].empty()) {
            throw InputError("partition contains an empty track");
        }
        for (ObservationId id : partition.tracks[k]) {
            if (!truth.contains(id)) {
                throw InputError("observation " + std::to_string(id) + " has no ground truth");
            }
            if (!track_of.emplace(id, static_cast<int>(k)).second) {
                throw InputError("observation " + std::to_string(id) + " appears twice");
            }
        }
    }
    if (track_of.size() != truth.size()) {
        throw InputError("partition does not cover every observation in the ground truth");
    }

    // overlap[(track, person)] = |Y_i ∩ Y*_j|
    std::map<std::pair<int, int>, int> overlap;
    std::map<int, int> person_size;
    for (const auto& [id, person] : truth) {
        ++overlap[{track_of.at(id), person}];
        ++person_size[person];
    }
    std::vector<int> best_in_track(partition.tracks.size(), 0);
    std::map<int, int> best_in_person;
    for (const auto& [key, count] : overlap) {
        auto& t = best_in_track[static_cast<std::size_t>(key.first)];
        t = std::max(t, count);
        auto& p = best_in_person[key.second];
        p = std::max(p, count);
    }

    Evaluation e;
    e.estimated_tracks = static_cast<int>(partition.tracks.size());
    e.true_tracks = static_cast<int>(person_size.size());
    if (e.estimated_tracks > 0) {
        double sum = 0.0;
        for (std::size_t k = 0; k < partition.tracks.size(); ++k) {
            sum += static_cast<double>(best_in_track[k]) /
                   static_cast<double>(partition.tracks[k].size());
        }
        e.precision = sum / e.estimated_tracks;
    }
    if (e.true_tracks > 0) {
        double sum = 0.0;
        for (const auto& [person, size] : person_size) {
            sum += static_cast<double>(best_in_person[person]) / static_cast<double>(size);
        }
        e.recall = sum / e.true_tracks;
    }
    const double denom = e.precision + e.recall;
    e.f_measure = denom > 0.0 ? 2.0 * e.precision * e.recall / denom : 0.0;
    return e;
}

Partition truth_partition(const GroundTruth& truth) {
    std::map<int, std::vector<ObservationId>> by_person;
    for (const auto& [id, person] : truth) {
        by_person[person].push_back(id);
    }
    Partition p;
    for (auto& [person, ids] : by_person) {
        p.tracks.push_back(std::move(ids));
    }
    std::sort(p.tracks.begin(), p.tracks.end(),
              [](const auto& a, const auto& b) { return a.front() < b.front(); });
    return p;
}

}  // namespace camnet
