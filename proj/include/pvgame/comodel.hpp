#pragma once

#include "pvgame/bisim.hpp"
#include "pvgame/conts.hpp"
#include "pvgame/game_spec.hpp"
#include "pvgame/semantics.hpp"

namespace pvgame {

/// Per-state attacker / defender / environment processes of a game.
struct ComModelProcesses {
    struct Names {
        std::string attacker, defender, environment, round, state;
    };

    DefinitionEnv env;
    std::vector<Names> names;  // by state index
    std::vector<Term> roots;   // unfolded body of each state process
};

/// Channels hidden inside every state process.
const std::vector<std::string>& hidden_channels();

/// Atoms used as action values: attacker action k (0-based) is `@a{k+1}`,
/// defender action k is `@d{k+1}`. Names are not unique across states, so
/// the indices are what the processes exchange.
Value attacker_atom(std::size_t k);
Value defender_atom(std::size_t k);

/// Requires every transition row to sum to 0 or 1 (complete residual mass
/// first); throws ValidationError otherwise.
ComModelProcesses build_processes(const GameSpec& spec);

struct ComModelTs {
    ExploredLts lts;
    std::size_t num_game_states = 0; // LTS states 0..n-1 are the game states
};

/// Reachable transition system of all state processes. `max_states` caps
/// the explored state count (CapExceeded beyond it).
ComModelTs build_ts(const ComModelProcesses& procs, std::size_t max_states = 1'000'000);

/// Reads one edge per live round off `ts`, between the game-state blocks of
/// `partition`. Throws InvariantViolation on an unexpected path shape or if
/// a block mixes game and intermediate states.
ConTSGraph contract_to_conts(const ComModelTs& ts, const Partition& partition, const GameSpec& spec);

/// Coarsest bisimulation computed directly on the game data.
Partition game_bisimulation(const GameSpec& spec);

/// ConTS over the blocks of a partition of state indices. Vertices are
/// ordered by least member id; each takes its representative's edges.
ConTSGraph conts_from_partition(const GameSpec& spec, const Partition& partition);

/// conts_from_partition(spec, game_bisimulation(spec)).
ConTSGraph build_conts_direct(const GameSpec& spec);

struct SemanticPipeline {
    ComModelProcesses processes;
    ComModelTs ts;
    Partition partition;
    ConTSGraph graph;
};

/// build_processes, build_ts, coarsest_bisimulation, contract_to_conts.
SemanticPipeline build_conts_semantic(const GameSpec& spec, std::size_t max_states = 1'000'000);

/// Groups of state ids merged into one ConTS vertex (only groups of size >= 2).
std::vector<std::vector<int>> merged_states(const ConTSGraph& g);

} // namespace pvgame
