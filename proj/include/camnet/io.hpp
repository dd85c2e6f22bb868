#pragma once

#include "camnet/affinity.hpp"
#include "camnet/dd.hpp"
#include "camnet/energy.hpp"
#include "camnet/metrics.hpp"
#include "camnet/model.hpp"
#include "camnet/scenario.hpp"

#include <json.hpp>

#include <optional>
#include <string>
#include <vector>

namespace camnet {

using json = nlohmann::ordered_json;

struct Dataset {
    CameraTopology topology;
    std::vector<Observation> observations;
    CbtfTable cbtf;
    std::optional<GroundTruth> truth;
};

Dataset dataset_from_scenario(Scenario scenario);

json dataset_to_json(const Dataset& dataset);

/// Parses and validates a dataset. Unknown cameras raise ConfigError naming
/// the camera; malformed documents raise InputError.
Dataset dataset_from_json(const json& doc);

void write_dataset(const std::string& path, const Dataset& dataset);
Dataset read_dataset(const std::string& path);

json scenario_spec_to_json(const ScenarioSpec& spec);

/// Accepts either a full spec or {"preset": name, ...overrides}.
ScenarioSpec scenario_spec_from_json(const json& doc);

/// Endpoint encoding used in result files: observation id, or the strings
/// "source" / "sink" for virtual endpoints.
json link_endpoints(const CandidateLinkSet& links, LinkId q);

json partition_to_json(const Partition& partition);
Partition partition_from_json(const json& doc);

json evaluation_to_json(const Evaluation& evaluation);

json run_report_summary(const RunReport& report);

json read_json(const std::string& path);

/// Writes `doc` with two-space indentation and a trailing newline.
void write_json(const std::string& path, const json& doc);

}  // namespace camnet
