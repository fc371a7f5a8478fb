#pragma once

#include "pvgame/conts.hpp"

#include <cstddef>
#include <functional>
#include <vector>

namespace pvgame {

struct OracleOptions {
    double tolerance = 1e-6;
    /// Refuse graphs whose number of pure strategies exceeds this.
    double max_strategies = 1e7;
};

/// Product of out-degrees.
double count_strategies(const ConTSGraph& g);

/// Calls visit(choice) for every map vertex -> outgoing edge. Throws
/// CapExceeded when count_strategies(g) > cap.
void for_each_strategy(const ConTSGraph& g, double cap, const std::function<void(const std::vector<std::size_t>&)>& visit);

/// Values of following `choice` forever, from the linear system
/// (I - beta P) V = w.
std::vector<PayoffPair> strategy_values(const ConTSGraph& g, const std::vector<std::size_t>& choice, double beta);
std::vector<double> strategy_social_values(const ConTSGraph& g, const std::vector<std::size_t>& choice, double beta);

/// Equilibrium condition at every vertex: the chosen edge is a defender best
/// response within its attacker group and attains the attacker maximum over
/// all such best responses, both measured against the strategy's own values.
bool check_nee(const ConTSGraph& g, const std::vector<std::size_t>& choice, double beta,
               const OracleOptions& opts = {});

/// The chosen edge minimises social weight plus the discounted social value
/// of its successor under the strategy.
bool check_soe(const ConTSGraph& g, const std::vector<std::size_t>& choice, double beta,
               const OracleOptions& opts = {});

/// All strategies passing the check, one canonical choice per report key
/// (the least), sorted.
std::vector<std::vector<std::size_t>> oracle_nes(const ConTSGraph& g, double beta, const OracleOptions& opts = {});
std::vector<std::vector<std::size_t>> oracle_sos(const ConTSGraph& g, double beta, const OracleOptions& opts = {});

} // namespace pvgame
