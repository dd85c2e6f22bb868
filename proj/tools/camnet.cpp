#include "camnet/error.hpp"
#include "camnet/io.hpp"
#include "camnet/run.hpp"
#include "camnet/scenario.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

namespace {

using namespace camnet;

std::string sibling(const std::string& out, const std::string& suffix) {
    std::filesystem::path p(out);
    p.replace_extension(suffix);
    return p.string();
}

std::ofstream open_output(const std::string& path) {
    std::ofstream os(path);
    if (!os) {
        throw InputError("cannot write '" + path + "'");
    }
    return os;
}

struct GenerateArgs {
    std::string spec_path;
    std::string preset;
    std::optional<std::uint64_t> seed;
    std::string out;
};

int cmd_generate(const GenerateArgs& a) {
    if (a.spec_path.empty() == a.preset.empty()) {
        throw ConfigError("give exactly one of a spec file or --preset");
    }
    ScenarioSpec spec = a.preset.empty() ? scenario_spec_from_json(read_json(a.spec_path))
                                         : scenario_preset(a.preset);
    if (a.seed) {
        spec.seed = *a.seed;
    }
    const Dataset d = dataset_from_scenario(generate_scenario(spec));
    write_dataset(a.out, d);
    std::cerr << "wrote " << d.observations.size() << " observations on "
              << d.topology.cameras().size() << " cameras to " << a.out << '\n';
    return 0;
}

struct SolveArgs {
    std::string dataset;
    std::string algo = "qdd";
    std::string exec = "centralized";
    std::string affinity = "direct";
    RunConfig config;
    std::string out;
};

int cmd_solve(SolveArgs a) {
    a.config.algorithm = parse_solver(a.algo);
    a.config.execution = parse_execution(a.exec);
    a.config.affinity = parse_affinity(a.affinity);
    const Dataset d = read_dataset(a.dataset);
    SolveOutput r = solve_dataset(d, a.config);
    write_json(a.out, r.result);
    if (r.report) {
        std::ofstream os = open_output(sibling(a.out, ".report.csv"));
        write_report_csv(os, *r.report);
    } else if (!r.lrmcf_duals.empty()) {
        std::ofstream os = open_output(sibling(a.out, ".report.csv"));
        write_lrmcf_csv(os, r.lrmcf_duals, a.config.dd_options().schedule);
    }
    if (r.messages) {
        std::ofstream os = open_output(sibling(a.out, ".messages.csv"));
        write_message_log_csv(os, *r.messages);
    }
    if (r.report) {
        std::cerr << to_string(r.report->status) << " after " << r.report->iterations.size()
                  << " iterations, best dual " << r.report->best_dual << ", best primal "
                  << r.report->best_primal << '\n';
    }
    return 0;
}

int cmd_eval(const std::string& result_path, const std::string& dataset_path) {
    json result = read_json(result_path);
    const Dataset d = read_dataset(dataset_path);
    const Evaluation e = evaluate_result(result, d);
    write_json(result_path, result);
    std::printf("P=%.6f R=%.6f F=%.6f K=%d K*=%d\n", e.precision, e.recall, e.f_measure,
                e.estimated_tracks, e.true_tracks);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Multi-camera data association by dual decomposition"};
    app.require_subcommand(1);

    GenerateArgs gen;
    CLI::App* generate = app.add_subcommand("generate", "Generate a synthetic dataset");
    generate->add_option("spec", gen.spec_path, "Scenario spec JSON");
    generate->add_option("--preset", gen.preset, "Named preset")
        ->check(CLI::IsMember(scenario_preset_names()));
    generate->add_option("--seed", gen.seed, "Override the scenario seed");
    generate->add_option("--out", gen.out, "Dataset output path")->required();

    SolveArgs sol;
    CLI::App* solve = app.add_subcommand("solve", "Solve a dataset");
    solve->add_option("dataset", sol.dataset, "Dataset JSON")->required();
    solve->add_option("--algo", sol.algo)
        ->check(CLI::IsMember({"ldd", "qdd", "oracle-assignment", "oracle-brute-linear",
                               "oracle-brute-quadratic", "oracle-lrmcf"}))
        ->capture_default_str();
    solve->add_option("--exec", sol.exec)
        ->check(CLI::IsMember({"centralized", "distributed"}))
        ->capture_default_str();
    solve->add_option("--seed", sol.config.seed)->capture_default_str();
    solve->add_option("--step-scale", sol.config.step_scale)->capture_default_str();
    solve->add_option("--virtual-cost", sol.config.virtual_cost)->capture_default_str();
    solve->add_option("--tol", sol.config.tolerance)->capture_default_str();
    solve->add_option("--window", sol.config.window, "Agreement window W")->capture_default_str();
    solve->add_option("--max-iters", sol.config.max_iterations)->capture_default_str();
    solve->add_option("--affinity", sol.affinity)
        ->check(CLI::IsMember({"direct", "cbtf"}))
        ->capture_default_str();
    solve->add_option("--threads", sol.config.threads)->capture_default_str();
    solve->add_option("--out", sol.out, "Result JSON path")->required();

    std::string eval_result;
    std::string eval_dataset;
    CLI::App* eval = app.add_subcommand("eval", "Score a result against the dataset truth");
    eval->add_option("result", eval_result)->required();
    eval->add_option("dataset", eval_dataset)->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        // Help and version requests exit 0; every usage error exits 2.
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (generate->parsed()) {
            return cmd_generate(gen);
        }
        if (solve->parsed()) {
            return cmd_solve(sol);
        }
        return cmd_eval(eval_result, eval_dataset);
    } catch (const camnet::SizeError& e) {
        std::cerr << "size error: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
