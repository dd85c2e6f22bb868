#pragma once

#include "camnet/affinity.hpp"
#include "camnet/dd.hpp"
#include "camnet/io.hpp"
#include "camnet/simnet.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace camnet {

enum class SolverKind {
    ldd,
    qdd,
    oracle_assignment,
    oracle_brute_linear,
    oracle_brute_quadratic,
    oracle_lrmcf,
};

enum class Execution { centralized, distributed };

std::string to_string(SolverKind kind);
std::string to_string(Execution execution);
SolverKind parse_solver(std::string_view name);
Execution parse_execution(std::string_view name);
AppearanceMode parse_affinity(std::string_view name);
std::string to_string(AppearanceMode mode);

struct RunConfig {
    SolverKind algorithm = SolverKind::qdd;
    Execution execution = Execution::centralized;
    double step_scale = 5.0;
    double virtual_cost = 25.0;
    double tolerance = 1e-6;
    int window = 10;
    int max_iterations = 5000;
    std::uint64_t seed = 0;  // recorded; the solvers are deterministic
    AppearanceMode affinity = AppearanceMode::direct;
    int threads = 1;

    /// Throws ConfigError; distributed execution needs ldd or qdd.
    void validate() const;
    DdOptions dd_options() const;
    AffinityConfig affinity_config() const;
};

json run_config_to_json(const RunConfig& config);

struct SolveOutput {
    json result;
    std::optional<RunReport> report;      // ldd / qdd
    std::vector<double> lrmcf_duals;      // oracle-lrmcf
    std::optional<MessageLog> messages;   // distributed
};

/// Builds links and costs from the dataset and runs the configured solver.
/// The result document holds the run config, the active links, the
/// partition and both energies (LR-MCF: the lower bound only).
SolveOutput solve_dataset(const Dataset& dataset, const RunConfig& config);

/// Scores the partition of `result` against the dataset truth and stores it
/// under "evaluation", replacing any earlier block. Throws InputError when
/// the truth or the partition is missing or the observation sets differ.
Evaluation evaluate_result(json& result, const Dataset& dataset);

/// t,alpha,dual,best_dual for the LR-MCF bound sequence.
void write_lrmcf_csv(std::ostream& os, const std::vector<double>& duals,
                     const StepSchedule& schedule);

}  // namespace camnet
