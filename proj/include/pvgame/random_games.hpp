#pragma once

#include "pvgame/conts.hpp"
#include "pvgame/game_spec.hpp"

#include <cstdint>
#include <random>

namespace pvgame {

struct RandomSpecOptions {
    std::size_t max_states = 6;
    std::size_t max_actions = 3;
    /// Chance that a state is a copy of an earlier one (to create merges).
    double duplicate_rate = 0.3;
    /// Chance that an action pair has no transitions.
    double dead_rate = 0.1;
    /// Chance that a live row is left sub-stochastic before completion.
    double deficit_rate = 0.2;
};

/// Random game with small integer payoffs and probabilities in quarters.
/// Residual mass is completed, so the result is ready for both pipelines.
GameSpec random_game_spec(std::mt19937_64& rng, const RandomSpecOptions& options = {});

struct RandomGraphOptions {
    std::size_t min_vertices = 2;
    std::size_t max_vertices = 5;
    std::size_t max_actions = 2;
    /// Bound on the product of out-degrees.
    double max_strategies = 1e5;
    /// Continuous weights and probabilities make exact ties unlikely.
    bool continuous = false;
};

/// Random ConTS in which every vertex has at least one live action pair and
/// every pair's distribution sums to 1. Strategy-space size is bounded.
ConTSGraph random_conts(std::mt19937_64& rng, const RandomGraphOptions& options = {});

} // namespace pvgame
