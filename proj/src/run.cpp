#include "camnet/run.hpp"

#include "camnet/error.hpp"
#include "camnet/ldd.hpp"
#include "camnet/oracle.hpp"
#include "camnet/qdd.hpp"

#include <algorithm>
#include <array>
#include <ostream>
#include <utility>

namespace camnet {

namespace {

constexpr std::array<std::pair<SolverKind, std::string_view>, 6> kSolverNames{{
    {SolverKind::ldd, "ldd"},
    {SolverKind::qdd, "qdd"},
    {SolverKind::oracle_assignment, "oracle-assignment"},
    {SolverKind::oracle_brute_linear, "oracle-brute-linear"},
    {SolverKind::oracle_brute_quadratic, "oracle-brute-quadratic"},
    {SolverKind::oracle_lrmcf, "oracle-lrmcf"},
}};

constexpr const char* kResultFormat = "camnet-result";

json active_links(const LinkingConfig& config, const CandidateLinkSet& links) {
    json out = json::array();
    for (std::size_t q = 0; q < config.x.size(); ++q) {
        if (config.x[q] != 0) {
            out.push_back(link_endpoints(links, static_cast<LinkId>(q)));
        }
    }
    return out;
}

}  // namespace

std::string to_string(SolverKind kind) {
    for (const auto& [k, name] : kSolverNames) {
        if (k == kind) {
            return std::string(name);
        }
    }
    return "unknown";
}

std::string to_string(Execution execution) {
    return execution == Execution::centralized ? "centralized" : "distributed";
}

std::string to_string(AppearanceMode mode) {
    return mode == AppearanceMode::direct ? "direct" : "cbtf";
}

SolverKind parse_solver(std::string_view name) {
    for (const auto& [k, n] : kSolverNames) {
        if (n == name) {
            return k;
        }
    }
    throw ConfigError("unknown algorithm '" + std::string(name) + "'");
}

Execution parse_execution(std::string_view name) {
    if (name == "centralized") {
        return Execution::centralized;
    }
    if (name == "distributed") {
        return Execution::distributed;
    }
    throw ConfigError("unknown execution mode '" + std::string(name) + "'");
}

AppearanceMode parse_affinity(std::string_view name) {
    if (name == "direct") {
        return AppearanceMode::direct;
    }
    if (name == "cbtf") {
        return AppearanceMode::cbtf;
    }
    throw ConfigError("unknown affinity mode '" + std::string(name) + "'");
}

void RunConfig::validate() const {
    dd_options().schedule.validate();
    dd_options().stop.validate();
    affinity_config().validate();
    if (threads < 1) {
        throw ConfigError("threads must be at least 1");
    }
    if (execution == Execution::distributed && algorithm != SolverKind::ldd &&
        algorithm != SolverKind::qdd) {
        throw ConfigError("distributed execution supports ldd and qdd only");
    }
}

DdOptions RunConfig::dd_options() const {
    DdOptions o;
    o.schedule.scale = step_scale;
    o.stop.tolerance = tolerance;
    o.stop.agreement_window = window;
    o.stop.max_iterations = max_iterations;
    o.threads = threads;
    return o;
}

AffinityConfig RunConfig::affinity_config() const {
    AffinityConfig a;
    a.appearance_mode = affinity;
    a.virtual_link_cost = virtual_cost;
    return a;
}

json run_config_to_json(const RunConfig& c) {
    return json{{"algo", to_string(c.algorithm)},
                {"exec", to_string(c.execution)},
                {"step_scale", c.step_scale},
                {"virtual_cost", c.virtual_cost},
                {"tol", c.tolerance},
                {"window", c.window},
                {"max_iters", c.max_iterations},
                {"seed", c.seed},
                {"affinity", to_string(c.affinity)}};
}

SolveOutput solve_dataset(const Dataset& dataset, const RunConfig& config) {
    config.validate();
    const AffinityConfig affinity = config.affinity_config();
    const CbtfTable* cbtf = dataset.cbtf.empty() ? nullptr : &dataset.cbtf;
    const CandidateLinkSet links = build_candidate_links(dataset.topology, dataset.observations);
    const EnergyModel model =
        build_energy_model(dataset.topology, dataset.observations, links, affinity, cbtf);
    const DdOptions options = config.dd_options();

    SolveOutput out;
    json& doc = out.result;
    doc["format"] = kResultFormat;
    doc["version"] = 1;
    doc["config"] = run_config_to_json(config);
    doc["observations"] = links.observation_ids();

    if (config.algorithm == SolverKind::oracle_lrmcf) {
        LrmcfResult r = lrmcf_lower_bound(links, model, options.schedule, config.max_iterations);
        doc["lower_bound"] = r.best_dual;
        doc["iterations"] = r.duals.size();
        out.lrmcf_duals = std::move(r.duals);
        return out;
    }

    LinkingConfig solution;
    switch (config.algorithm) {
        case SolverKind::ldd:
        case SolverKind::qdd: {
            const bool quadratic = config.algorithm == SolverKind::qdd;
            if (config.execution == Execution::distributed) {
                DistributedResult r =
                    run_distributed(quadratic ? Algorithm::qdd : Algorithm::ldd, dataset.topology,
                                    dataset.observations, affinity, cbtf, options);
                solution = std::move(r.config);
                out.report = std::move(r.report);
                out.messages = std::move(r.log);
            } else {
                DdResult r = quadratic ? run_qdd(links, model, dataset.topology, options)
                                       : run_ldd(links, model, dataset.topology, options);
                solution = std::move(r.config);
                out.report = std::move(r.report);
            }
            doc["run"] = run_report_summary(*out.report);
            break;
        }
        case SolverKind::oracle_assignment:
            solution = exact_linear_assignment(links, model).config;
            break;
        case SolverKind::oracle_brute_linear:
            solution = brute_force_linear(links, model).config;
            break;
        case SolverKind::oracle_brute_quadratic:
            solution = brute_force_quadratic(links, model).config;
            break;
        case SolverKind::oracle_lrmcf:
            break;
    }
    if (!solution.pairs) {
        complete_pairs(solution, links);
    }
    doc["links"] = active_links(solution, links);
    doc["partition"] = partition_to_json(linking_to_partition(solution, links));
    doc["energy"] = json{{"linear", energy_linear(solution, model)},
                         {"quadratic", energy_quadratic(solution, links, model)}};
    return out;
}

Evaluation evaluate_result(json& result, const Dataset& dataset) {
    if (!dataset.truth) {
        throw InputError("dataset has no ground truth");
    }
    if (!result.is_object() || !result.contains("partition")) {
        throw InputError("result has no partition");
    }
    const Evaluation e = evaluate(partition_from_json(result["partition"]), *dataset.truth);
    result["evaluation"] = evaluation_to_json(e);
    return e;
}

void write_lrmcf_csv(std::ostream& os, const std::vector<double>& duals,
                     const StepSchedule& schedule) {
    const auto precision = os.precision(17);
    os << "t,alpha,dual,best_dual\n";
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < duals.size(); ++i) {
        const int t = static_cast<int>(i) + 1;
        best = std::max(best, duals[i]);
        os << t << ',' << schedule.alpha(t) << ',' << duals[i] << ',' << best << '\n';
    }
    os.precision(precision);
}

}  // namespace camnet
