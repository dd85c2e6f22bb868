#pragma once

#include "camnet/energy.hpp"
#include "camnet/model.hpp"

#include <array>
#include <map>
#include <span>
#include <utility>
#include <vector>

namespace camnet {

enum class AppearanceMode { direct, cbtf };

struct AffinityConfig {
    AppearanceMode appearance_mode = AppearanceMode::direct;
    double floor_epsilon = 1e-6;
    double virtual_link_cost = 25.0;
    bool use_markov2 = false;

    void validate() const;
};

/// Cumulative brightness transfer function for one ordered camera pair: per
/// slice, a monotone map from a source bin to a target bin.
struct CbtfMap {
    std::array<std::vector<int>, kSlices> maps;

    int bins() const { return static_cast<int>(maps[0].size()); }
    static CbtfMap identity(int bins);
    friend bool operator==(const CbtfMap&, const CbtfMap&) = default;
};

class CbtfTable {
public:
    void set(CameraId from, CameraId to, CbtfMap map);
    const CbtfMap* find(CameraId from, CameraId to) const;
    const std::map<std::pair<CameraId, CameraId>, CbtfMap>& entries() const { return entries_; }
    bool empty() const { return entries_.empty(); }

private:
    std::map<std::pair<CameraId, CameraId>, CbtfMap> entries_;
};

/// Sum over bins of sqrt(h1[b] * h2[b]).
double bhattacharyya_coefficient(std::span<const double> h1, std::span<const double> h2);

/// sqrt(1 - BC) averaged over the six slices, in [0, 1].
double bhattacharyya_distance(const AppearanceHistogram& a, const AppearanceHistogram& b);

double appearance_similarity_direct(const AppearanceHistogram& a, const AppearanceHistogram& b);

/// Learns the map for one camera pair from (histogram on u, histogram on v)
/// training pairs of the same objects.
CbtfMap learn_cbtf(std::span<const std::pair<AppearanceHistogram, AppearanceHistogram>> pairs);

/// Pushes histogram mass through the map and renormalizes each slice.
AppearanceHistogram apply_cbtf(const AppearanceHistogram& h, const CbtfMap& map);

/// 1 - Bhatt(a, b mapped to a's camera)/2 - Bhatt(a mapped to b's camera, b)/2.
/// A missing entry for a same-camera pair reads as the identity map; any
/// other missing entry is a ConfigError.
double appearance_similarity_cbtf(const Observation& a, const Observation& b,
                                  const CbtfTable& table);

/// 1 when t_enter(to) - t_leave(from) lies inside the travel window.
int travel_time_factor(const CameraTopology& topology, const Observation& from,
                       const Observation& to);

double spatio_temporal_factor(const CameraTopology& topology, const Observation& from,
                              const Observation& to);

/// Computes link and pair costs from observations. Holds references; the
/// topology, observations and table must outlive it.
class AffinityModel {
public:
    AffinityModel(const CameraTopology& topology, std::span<const Observation> observations,
                  AffinityConfig config, const CbtfTable* cbtf = nullptr);

    const AffinityConfig& config() const { return config_; }

    double appearance(const Observation& a, const Observation& b) const;

    /// theta for a link of `links`, whose endpoints index `observations`.
    double link_cost(const CandidateLinkSet& links, LinkId q) const;
    double pair_cost(const CandidateLinkSet& links, LinkId p, LinkId q) const;

    EnergyModel build(const CandidateLinkSet& links) const;

private:
    double cost_from_similarity(double phi) const;

    const CameraTopology& topology_;
    std::span<const Observation> observations_;
    AffinityConfig config_;
    const CbtfTable* cbtf_;
};

EnergyModel build_energy_model(const CameraTopology& topology,
                               std::span<const Observation> observations,
                               const CandidateLinkSet& links, const AffinityConfig& config,
                               const CbtfTable* cbtf = nullptr);

}  // namespace camnet
