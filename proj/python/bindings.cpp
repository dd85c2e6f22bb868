// Python bindings. Documents cross the boundary as JSON text; the camnet
// package wraps these calls with dict conversion.

#include "camnet/assign.hpp"
#include "camnet/error.hpp"
#include "camnet/io.hpp"
#include "camnet/run.hpp"
#include "camnet/scenario.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <tuple>

namespace py = pybind11;
using namespace camnet;

namespace {

std::string dump(const json& doc) { return doc.dump(); }

json parse(const std::string& text) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw InputError(std::string("invalid JSON: ") + e.what());
    }
}

RunConfig config_from_kwargs(const py::dict& kw) {
    RunConfig c;
    for (auto [key, value] : kw) {
        const auto name = key.cast<std::string>();
        if (name == "algo") {
            c.algorithm = parse_solver(value.cast<std::string>());
        } else if (name == "exec") {
            c.execution = parse_execution(value.cast<std::string>());
        } else if (name == "step_scale") {
            c.step_scale = value.cast<double>();
        } else if (name == "virtual_cost") {
            c.virtual_cost = value.cast<double>();
        } else if (name == "tol") {
            c.tolerance = value.cast<double>();
        } else if (name == "window") {
            c.window = value.cast<int>();
        } else if (name == "max_iters") {
            c.max_iterations = value.cast<int>();
        } else if (name == "seed") {
            c.seed = value.cast<std::uint64_t>();
        } else if (name == "affinity") {
            c.affinity = parse_affinity(value.cast<std::string>());
        } else if (name == "threads") {
            c.threads = value.cast<int>();
        } else {
            throw ConfigError("unknown solve option '" + name + "'");
        }
    }
    c.validate();
    return c;
}

using IterationRow = std::tuple<int, double, double, double, double, double, int>;
using MessageRow = std::tuple<int, int, int, std::string, std::size_t>;

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "camnet core bindings";

    auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
    py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
    py::register_exception<InputError>(m, "InputError", base.ptr());
    py::register_exception<SizeError>(m, "SizeError", base.ptr());
    py::register_exception<InfeasibleProblemError>(m, "InfeasibleProblemError", base.ptr());
    py::register_exception<FeasibilityError>(m, "FeasibilityError", base.ptr());

    m.def("preset_names", &scenario_preset_names);

    m.def(
        "generate",
        [](const std::string& spec_json) {
            const ScenarioSpec spec = scenario_spec_from_json(parse(spec_json));
            return dump(dataset_to_json(dataset_from_scenario(generate_scenario(spec))));
        },
        py::arg("spec_json"), "Generate a dataset from a scenario spec; returns dataset JSON.");

    m.def(
        "solve",
        [](const std::string& dataset_json, const py::kwargs& kw) {
            const Dataset d = dataset_from_json(parse(dataset_json));
            const RunConfig config = config_from_kwargs(kw);
            SolveOutput out;
            {
                py::gil_scoped_release release;
                out = solve_dataset(d, config);
            }
            std::vector<IterationRow> iterations;
            if (out.report) {
                for (const IterationRecord& r : out.report->iterations) {
                    iterations.emplace_back(r.t, r.alpha, r.dual, r.best_dual, r.primal,
                                            r.best_primal, r.conflicts);
                }
            }
            std::optional<std::vector<MessageRow>> messages;
            if (out.messages) {
                messages.emplace();
                for (const AgentMessage& msg : out.messages->messages()) {
                    messages->emplace_back(msg.iteration, msg.sender, msg.receiver,
                                           to_string(msg.kind), msg.bytes);
                }
            }
            return std::make_tuple(dump(out.result), iterations, messages, out.lrmcf_duals);
        },
        py::arg("dataset_json"),
        "Solve a dataset; returns (result JSON, iterations, messages, lrmcf duals).");

    m.def(
        "evaluate",
        [](const std::string& result_json, const std::string& dataset_json) {
            json result = parse(result_json);
            evaluate_result(result, dataset_from_json(parse(dataset_json)));
            return dump(result);
        },
        py::arg("result_json"), py::arg("dataset_json"),
        "Score a result against the dataset truth; returns the result JSON with its evaluation.");

    m.def(
        "solve_assignment",
        [](int rows, int cols, const std::vector<std::tuple<int, int, double>>& cells,
           const std::set<int>& replicable) {
            AssignmentProblem p;
            p.rows = rows;
            p.cols = cols;
            for (const auto& [r, c, cost] : cells) {
                p.cells.push_back(AssignmentCell{r, c, cost});
            }
            p.replicable_cols = replicable;
            const AssignmentResult r = solve_assignment(p);
            return std::make_pair(r.assignment, r.total_cost);
        },
        py::arg("rows"), py::arg("cols"), py::arg("cells"), py::arg("replicable") = std::set<int>{},
        "Minimum-cost assignment over admissible (row, col, cost) cells.");
}
