#pragma once

#include "pvgame/abstraction.hpp"
#include "pvgame/conts.hpp"

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace pvgame {

/// Walk ending in a cycle: `stem` edges then `cycle` edges, consecutive
/// edges chained head to tail and the cycle closing on itself.
struct Execution {
    std::vector<std::size_t> stem;
    std::vector<std::size_t> cycle;

    std::size_t start(const ConTSGraph& g) const;
};

/// Closed form: cycle value B / (1 - prod(beta * p)), then the stem unwound.
PayoffPair eval_payoff(const Execution& exec, const ConTSGraph& g, double beta);

/// Same recursion over social weights (attacker + |defender| per edge).
double eval_social(const Execution& exec, const ConTSGraph& g, double beta);

/// Reference: the payoff recursion unrolled for `steps` edges from the start.
PayoffPair truncated_payoff(const Execution& exec, const ConTSGraph& g, double beta, std::size_t steps);

/// Execution from `start` following one chosen edge per vertex.
Execution execution_from(const ConTSGraph& g, const std::vector<std::size_t>& choice, std::size_t start);

/// Exact values of a choice of one edge per vertex, for every vertex.
std::vector<PayoffPair> policy_payoffs(const ConTSGraph& g, const std::vector<std::size_t>& choice, double beta);
std::vector<double> policy_social(const ConTSGraph& g, const std::vector<std::size_t>& choice, double beta);

/// Edge-indexed label pair per edge.
using PairLabels = std::vector<PayoffPair>;
using ScalarLabels = std::vector<double>;

/// Defender filter within each attacker-action group, then attacker argmax.
/// Returns every edge within `tol` of the optimum at both steps.
std::vector<std::size_t> back_ind(const ConTSGraph& g, std::size_t vertex, const PairLabels& labels,
                                  double tol = 1e-6);

/// Argmin of social labels with the same tie rule.
std::vector<std::size_t> loc_so_op(const ConTSGraph& g, std::size_t vertex, const ScalarLabels& labels,
                                   double tol = 1e-6);

/// L_{n+1}(e) = w(e) + beta * p(e) * Pp_n(dst) for every non-frozen edge at
/// `vertex`; frozen edges keep their value.
void ref_n(const ConTSGraph& g, std::size_t vertex, const std::vector<PayoffPair>& pp, double beta,
           const std::vector<bool>& frozen, PairLabels& labels);
void ref_s(const ConTSGraph& g, std::size_t vertex, const std::vector<double>& ps, double beta,
           const std::vector<bool>& frozen, ScalarLabels& labels);

struct SolverOptions {
    double epsilon_fix = 1e-9;
    std::size_t max_iter = 10000;
    std::size_t tie_cap = 64;
    double tie_tolerance = 1e-6;
    /// Slack in the contraction check Delta_{k+1} <= beta * Delta_k + slack.
    double contraction_slack = 1e-9;
    bool abort_on_contraction_violation = false;
    /// Bound on tie combinations tried per component and branch.
    std::size_t max_combinations = 1'000'000;
};

/// Diagnostics of one value-iteration run.
struct IterationRecord {
    std::size_t component = 0;
    std::string mode; // "nes" or "sos"
    std::size_t iterations = 0;
    std::vector<double> delta_attacker; // sup-norm change per iteration
    std::vector<double> delta_defender; // empty for sos runs
    std::size_t contraction_violations = 0;
    std::size_t iteration_bound = 0; // from the first delta; 0 if not applicable
    bool converged = false;

    bool within_bound() const { return iteration_bound == 0 || iterations <= iteration_bound; }
};

/// Upper bound ceil(log(eps / delta0) / log(beta)) + 1 on the number of
/// iterations, or 0 when delta0 <= eps.
std::size_t iteration_bound(double delta0, double eps, double beta);

struct StrategyMap {
    std::vector<std::size_t> choice; // chosen edge per vertex
    std::vector<PayoffPair> payoff;  // exact execution values
    std::vector<double> social;      // discounted social-weight values
    std::string lineage;

    bool operator==(const StrategyMap& other) const { return choice == other.choice; }
};

struct SolveResult {
    std::vector<StrategyMap> strategies;
    std::vector<IterationRecord> runs;
    bool truncated = false;
    std::vector<std::string> warnings;
};

/// Canonical representative of a choice: edges that are indistinguishable
/// in reports (same attacker index, defender name, target, probability and
/// weight) are replaced by the least such edge.
std::vector<std::size_t> canonical_choice(const ConTSGraph& g, std::vector<std::size_t> choice);

/// What a report shows of a choice: per vertex the action names, target,
/// probability and weight. Choices with equal keys are reported once.
std::string strategy_key(const ConTSGraph& g, const std::vector<std::size_t>& choice);

/// Exit edges of a component absorb their successor's value and stop being
/// refreshed. Returns the initial labels; `frozen` marks the exit edges.
PairLabels pre_pro(const ConTSGraph& g, const AbsDag& abs, std::size_t component,
                   const std::vector<std::optional<PayoffPair>>& solved, double beta, std::vector<bool>& frozen);
ScalarLabels pre_pro_s(const ConTSGraph& g, const AbsDag& abs, std::size_t component,
                       const std::vector<std::optional<double>>& solved, double beta, std::vector<bool>& frozen);

/// A component solution: chosen edges and values for its members.
struct LocalStrategy {
    std::vector<std::size_t> choice; // by position in the component's member list
    std::vector<PayoffPair> payoff;
    std::vector<double> social;
};

struct LocalResult {
    std::vector<LocalStrategy> strategies;
    IterationRecord record;
    bool truncated = false;
};

/// Value iteration over a component whose exit edges are already frozen
/// (or absent); every certified tie combination at the fixpoint.
LocalResult nes_in_leave(const ConTSGraph& g, const AbsDag& abs, std::size_t component, PairLabels labels,
                         const std::vector<bool>& frozen, double beta, const SolverOptions& opts);
LocalResult nes_in_non_leave(const ConTSGraph& g, const AbsDag& abs, std::size_t component,
                             const std::vector<std::optional<PayoffPair>>& solved, double beta,
                             const SolverOptions& opts);
LocalResult sos_in_leave(const ConTSGraph& g, const AbsDag& abs, std::size_t component, ScalarLabels labels,
                         const std::vector<bool>& frozen, double beta, const SolverOptions& opts);
LocalResult sos_in_non_leave(const ConTSGraph& g, const AbsDag& abs, std::size_t component,
                             const std::vector<std::optional<double>>& solved, double beta,
                             const SolverOptions& opts);

/// Components in processing order; tie branches combined across
/// components (at most tie_cap global strategies), deduplicated.
SolveResult alg_nes(const AbsDag& abs, const ConTSGraph& g, double beta, const SolverOptions& opts = {});
SolveResult alg_sos(const AbsDag& abs, const ConTSGraph& g, double beta, const SolverOptions& opts = {});

/// Every chosen edge lies in the back_ind (resp. loc_so_op) tie set of the
/// labels built from the strategy's own exact values.
bool certify_nes(const ConTSGraph& g, const std::vector<std::size_t>& choice, double beta, double tol = 1e-6);
bool certify_sos(const ConTSGraph& g, const std::vector<std::size_t>& choice, double beta, double tol = 1e-6);

} // namespace pvgame
