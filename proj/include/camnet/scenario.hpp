#pragma once

#include "camnet/affinity.hpp"
#include "camnet/metrics.hpp"
#include "camnet/model.hpp"

#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <string_view>
#include <vector>

namespace camnet {

struct ScenarioEdge {
    CameraId u = 0;
    CameraId v = 0;
    double mean_travel = 0.0;  // seconds
};

struct ScenarioSpec {
    std::vector<CameraId> cameras;
    std::vector<ScenarioEdge> edges;
    int persons = 10;
    double duration = 1400.0;
    double start_spread = 30.0;  // persons enter within [0, start_spread)
    double dwell_min = 2.0;
    double dwell_max = 8.0;
    double appearance_separation = 1.0;
    std::map<CameraId, int> brightness_shift;
    double noise = 0.3;
    double direction_noise = 0.1;
    int bins = kDefaultBins;
    int training_persons = 40;
    std::uint64_t seed = 1;

    /// Throws ConfigError for an invalid spec, naming the offending camera
    /// when an unknown camera is referenced.
    void validate() const;
};

/// Named presets: "paper-scale", "tiny", "shifted".
ScenarioSpec scenario_preset(std::string_view name);
std::vector<std::string> scenario_preset_names();

struct Scenario {
    CameraTopology topology;
    std::vector<Observation> observations;
    GroundTruth truth;
    CbtfTable cbtf;
};

/// Random walk per person over the camera graph. Travel windows are
/// [0.25, 4] x mean travel per edge and travel times are uniform inside
/// them; next cameras are uniform over neighbors; leave and enter
/// directions follow a per-edge canonical direction except with
/// probability `direction_noise`. Each visit emits one observation whose
/// histogram is the person's base histogram shifted by the camera's
/// brightness offset, perturbed by noise and renormalized. CBTF maps are
/// learned from a separate training draw for camera pairs at most two hops
/// apart. Ids follow enter time.
Scenario generate_scenario(const ScenarioSpec& spec);

/// Base appearance of one person: one Gaussian bump per slice.
AppearanceHistogram person_histogram(std::mt19937_64& rng, int bins, double separation);

/// Moves mass `shift` bins up (negative: down), piling up at the ends.
AppearanceHistogram shift_histogram(const AppearanceHistogram& h, int shift);

}  // namespace camnet
