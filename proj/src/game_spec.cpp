#include "pvgame/game_spec.hpp"

#include "pvgame/errors.hpp"
#include "pvgame/value.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

namespace pvgame {

double PayoffPair::social() const
{
    return attacker + std::fabs(defender);
}

double GameState::mass(std::size_t u, std::size_t v) const
{
    double q = 0.0;
    for (const auto& o : transitions.at(u).at(v))
        q += o.prob;
    return q;
}

std::size_t GameSpec::index_of(int id) const
{
    for (std::size_t i = 0; i < states.size(); ++i)
        if (states[i].id == id)
            return i;
    throw std::out_of_range("no state with id " + std::to_string(id));
}

std::vector<std::string> check_game_spec(const GameSpec& spec, bool require_stochastic)
{
    std::vector<std::string> d;
    const double eps = spec.options.epsilon_sum;
    if (!(spec.beta > 0.0 && spec.beta < 1.0))
        d.push_back("beta: must lie in (0,1), got " + format_number(spec.beta));
    if (spec.states.empty())
        d.push_back("states: at least one state is required");
    std::set<int> ids;
    for (std::size_t i = 0; i < spec.states.size(); ++i) {
        const auto& s = spec.states[i];
        const std::string at = "states[" + std::to_string(i) + "]";
        if (!ids.insert(s.id).second)
            d.push_back(at + ".id: duplicate state id " + std::to_string(s.id));
        if (s.attacker_actions.empty())
            d.push_back(at + ".attacker_actions: must not be empty");
        if (s.defender_actions.empty())
            d.push_back(at + ".defender_actions: must not be empty");
        const std::size_t na = s.num_attacker();
        const std::size_t nd = s.num_defender();
        if (s.payoff.size() != na) {
            d.push_back(at + ".payoff: expected " + std::to_string(na) + " attacker rows, got "
                        + std::to_string(s.payoff.size()));
        } else {
            for (std::size_t u = 0; u < na; ++u)
                if (s.payoff[u].size() != nd)
                    d.push_back(at + ".payoff[" + std::to_string(u) + "]: expected " + std::to_string(nd)
                                + " defender columns, got " + std::to_string(s.payoff[u].size()));
        }
        if (s.transitions.size() != na) {
            d.push_back(at + ".transitions: expected " + std::to_string(na) + " attacker rows");
            continue;
        }
        for (std::size_t u = 0; u < na; ++u) {
            if (s.transitions[u].size() != nd) {
                d.push_back(at + ".transitions[" + std::to_string(u) + "]: expected " + std::to_string(nd)
                            + " defender columns");
                continue;
            }
            for (std::size_t v = 0; v < nd; ++v) {
                const std::string cell = at + " (" + s.attacker_actions[u] + ", " + s.defender_actions[v] + ")";
                double q = 0.0;
                for (const auto& o : s.transitions[u][v]) {
                    if (o.target >= spec.states.size())
                        d.push_back(cell + ": target index " + std::to_string(o.target) + " out of range");
                    if (!(o.prob > 0.0) || o.prob > 1.0 + eps)
                        d.push_back(cell + ": probability " + format_number(o.prob) + " outside (0,1]");
                    q += o.prob;
                }
                if (q > 1.0 + eps)
                    d.push_back(cell + ": outgoing probabilities sum to " + format_number(q) + " > 1");
                else if (require_stochastic && q > 0.0 && q < 1.0 - eps)
                    d.push_back(cell + ": outgoing probabilities sum to " + format_number(q)
                                + " < 1 and residual completion is off");
            }
        }
    }
    return d;
}

void validate_game_spec(const GameSpec& spec, bool require_stochastic)
{
    auto d = check_game_spec(spec, require_stochastic);
    if (!d.empty())
        throw ValidationError(std::move(d));
}

void add_outcome(GameState& s, std::size_t u, std::size_t v, std::size_t target, double p)
{
    auto& row = s.transitions.at(u).at(v);
    auto it = std::lower_bound(row.begin(), row.end(), target,
                               [](const Outcome& o, std::size_t t) { return o.target < t; });
    if (it != row.end() && it->target == target)
        it->prob += p;
    else
        row.insert(it, Outcome{target, p});
}

void complete_residual_mass(GameSpec& spec)
{
    const double eps = spec.options.epsilon_sum;
    for (std::size_t i = 0; i < spec.states.size(); ++i) {
        auto& s = spec.states[i];
        for (std::size_t u = 0; u < s.transitions.size(); ++u) {
            for (std::size_t v = 0; v < s.transitions[u].size(); ++v) {
                const double q = s.mass(u, v);
                if (q > 0.0 && q < 1.0 - eps)
                    add_outcome(s, u, v, i, 1.0 - q);
            }
        }
    }
}

} // namespace pvgame
