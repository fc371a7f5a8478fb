#include "pvgame/random_games.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace pvgame {

namespace {

std::size_t pick(std::mt19937_64& rng, std::size_t lo, std::size_t hi)
{
    return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

bool chance(std::mt19937_64& rng, double p)
{
    return std::uniform_real_distribution<double>(0.0, 1.0)(rng) < p;
}

// Splits `quarters` quarter-units of mass over up to `k` distinct targets.
std::vector<std::pair<std::size_t, double>> split_mass(std::mt19937_64& rng, int quarters, std::size_t n)
{
    std::vector<std::pair<std::size_t, double>> out;
    while (quarters > 0) {
        const int q = static_cast<int>(pick(rng, 1, static_cast<std::size_t>(quarters)));
        out.emplace_back(pick(rng, 0, n - 1), q * 0.25);
        quarters -= q;
    }
    return out;
}

} // namespace

GameSpec random_game_spec(std::mt19937_64& rng, const RandomSpecOptions& o)
{
    GameSpec spec;
    const std::size_t n = pick(rng, 1, o.max_states);
    spec.beta = 0.5 + 0.05 * static_cast<double>(pick(rng, 0, 8));
    for (std::size_t i = 0; i < n; ++i) {
        if (i > 0 && chance(rng, o.duplicate_rate)) {
            GameState copy = spec.states[pick(rng, 0, i - 1)];
            copy.id = static_cast<int>(i + 1);
            copy.name = "s" + std::to_string(i + 1);
            spec.states.push_back(std::move(copy));
            continue;
        }
        GameState s;
        s.id = static_cast<int>(i + 1);
        s.name = "s" + std::to_string(i + 1);
        const std::size_t na = pick(rng, 1, o.max_actions);
        const std::size_t nd = pick(rng, 1, o.max_actions);
        for (std::size_t u = 0; u < na; ++u)
            s.attacker_actions.push_back("att" + std::to_string(u + 1));
        for (std::size_t v = 0; v < nd; ++v)
            s.defender_actions.push_back("def" + std::to_string(v + 1));
        s.payoff.assign(na, std::vector<PayoffPair>(nd));
        s.transitions.assign(na, std::vector<std::vector<Outcome>>(nd));
        for (std::size_t u = 0; u < na; ++u) {
            for (std::size_t v = 0; v < nd; ++v) {
                const double a = static_cast<double>(pick(rng, 0, 3)) * 5.0;
                s.payoff[u][v] = {a, -a};
                if (chance(rng, o.dead_rate))
                    continue;
                const int quarters = chance(rng, o.deficit_rate) ? static_cast<int>(pick(rng, 1, 3)) : 4;
                for (const auto& [t, p] : split_mass(rng, quarters, n))
                    add_outcome(s, u, v, t, p);
            }
        }
        // Keep at least one live pair.
        bool live = false;
        for (const auto& row : s.transitions)
            for (const auto& cell : row)
                live = live || !cell.empty();
        if (!live)
            add_outcome(s, 0, 0, i, 1.0);
        spec.states.push_back(std::move(s));
    }
    // Copies may point at targets beyond their own index only if those
    // exist; all targets were drawn from [0, n) so that holds.
    complete_residual_mass(spec);
    return spec;
}

ConTSGraph random_conts(std::mt19937_64& rng, const RandomGraphOptions& o)
{
    while (true) {
        ConTSGraph g;
        const std::size_t n = pick(rng, o.min_vertices, o.max_vertices);
        for (std::size_t i = 0; i < n; ++i) {
            ConTSGraph::Vertex v;
            v.id = static_cast<int>(i + 1);
            v.name = "v" + std::to_string(i + 1);
            v.members = {v.id};
            const std::size_t na = pick(rng, 1, o.max_actions);
            const std::size_t nd = pick(rng, 1, o.max_actions);
            for (std::size_t u = 0; u < na; ++u)
                v.attacker_actions.push_back("a" + std::to_string(u + 1));
            for (std::size_t d = 0; d < nd; ++d)
                v.defender_actions.push_back("d" + std::to_string(d + 1));
            g.add_vertex(std::move(v));
        }
        double product = 1.0;
        for (std::size_t i = 0; i < n; ++i) {
            const auto& vx = g.vertex(i);
            bool any = false;
            for (std::size_t u = 0; u < vx.attacker_actions.size(); ++u) {
                for (std::size_t d = 0; d < vx.defender_actions.size(); ++d) {
                    const bool last = u + 1 == vx.attacker_actions.size() && d + 1 == vx.defender_actions.size();
                    if (chance(rng, 0.2) && !(last && !any))
                        continue;
                    any = true;
                    PayoffPair w;
                    if (o.continuous) {
                        w.attacker = std::uniform_real_distribution<double>(0.0, 20.0)(rng);
                        w.defender = -std::uniform_real_distribution<double>(0.0, 20.0)(rng);
                    } else {
                        w.attacker = static_cast<double>(pick(rng, 0, 10));
                        w.defender = -static_cast<double>(pick(rng, 0, 10));
                    }
                    std::map<std::size_t, double> mass;
                    if (o.continuous && chance(rng, 0.5)) {
                        const double p = std::uniform_real_distribution<double>(0.1, 0.9)(rng);
                        mass[pick(rng, 0, n - 1)] += p;
                        mass[pick(rng, 0, n - 1)] += 1.0 - p;
                    } else {
                        for (const auto& [t, p] : split_mass(rng, 4, n))
                            mass[t] += p;
                    }
                    for (const auto& [t, p] : mass)
                        g.add_edge({i, t, u, d, p, w});
                }
            }
            product *= static_cast<double>(g.out_edges(i).size());
        }
        if (product <= o.max_strategies)
            return g;
    }
}

} // namespace pvgame
