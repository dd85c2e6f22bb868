#pragma once

#include "camnet/dd.hpp"
#include "camnet/energy.hpp"
#include "camnet/model.hpp"

#include <cstdint>
#include <functional>
#include <limits>
#include <vector>

namespace camnet {

inline constexpr std::size_t kBruteForceLinearCap = 10;
inline constexpr std::size_t kBruteForceQuadraticCap = 8;
inline constexpr std::size_t kLrmcfCap = 8;

struct OracleResult {
    LinkingConfig config;
    double energy = 0.0;
};

/// Calls `visit` once for every configuration in X, generated by giving each
/// observation (in index order) a predecessor whose successor slot is still
/// free. Sink links are filled in last.
void for_each_linking(const CandidateLinkSet& links,
                      const std::function<void(const LinkingConfig&)>& visit);

std::uint64_t count_linkings(const CandidateLinkSet& links);

/// Exhaustive minimum of the linear energy. Equal energies are broken by the
/// lexicographically smallest x. Throws SizeError above `cap` observations.
OracleResult brute_force_linear(const CandidateLinkSet& links, const EnergyModel& model,
                                std::size_t cap = kBruteForceLinearCap);

/// One global assignment: every observation picks a predecessor (another
/// observation, each usable once, or the shared source).
OracleResult exact_linear_assignment(const CandidateLinkSet& links, const EnergyModel& model);

/// Exhaustive minimum of the quadratic energy with pair variables set to
/// products. Throws SizeError above `cap` observations.
OracleResult brute_force_quadratic(const CandidateLinkSet& links, const EnergyModel& model,
                                   std::size_t cap = kBruteForceQuadraticCap);

/// Every p-s pair of the instance, grouped by observation in index order.
struct PairIndex {
    std::vector<LinkPair> pairs;
    std::vector<int> observation;  // owning observation index per pair
};

PairIndex index_pairs(const CandidateLinkSet& links);

/// c_pq = theta_p/2 + theta_q/2 + theta_pq, with a virtual member counted in
/// full. Same order as index_pairs.
std::vector<double> flow_costs(const CandidateLinkSet& links, const EnergyModel& model);

struct FlowSolution {
    std::vector<std::uint8_t> z;  // per pair, index_pairs order
    double value = 0.0;           // sum of arc costs over used arcs
};

/// min over M (binary z with conservation at every ordinary link) of
/// sum(arc_cost * z), solved as min-cost flow on the link graph by
/// successive shortest paths.
FlowSolution solve_flow_subproblem(const CandidateLinkSet& links, const PairIndex& index,
                                   const std::vector<double>& arc_cost);

/// Same minimum by enumerating M. Intended for micro-instances only; throws
/// SizeError above `max_pairs` pairs.
FlowSolution enumerate_flow_subproblem(const CandidateLinkSet& links, const PairIndex& index,
                                       const std::vector<double>& arc_cost,
                                       std::size_t max_pairs = 22);

std::uint64_t count_flows(const CandidateLinkSet& links, std::size_t max_pairs = 22);

struct LrmcfResult {
    double best_dual = 0.0;
    std::vector<double> duals;
    std::vector<double> lambda;
};

/// Lagrangian relaxation of the uniqueness constraints with the min-cost
/// flow subproblem; lambda starts at 0 and follows the same step schedule
/// as the decompositions. Runs `iterations` steps, or fewer once the best
/// bound reaches `stop_at` (a known feasible energy, which certifies the
/// bound optimal). Throws SizeError above `cap` observations.
LrmcfResult lrmcf_lower_bound(const CandidateLinkSet& links, const EnergyModel& model,
                              const StepSchedule& schedule, int iterations,
                              double stop_at = std::numeric_limits<double>::infinity(),
                              std::size_t cap = kLrmcfCap);

}  // namespace camnet
