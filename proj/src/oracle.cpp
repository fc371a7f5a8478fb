#include "pvgame/oracle.hpp"

#include "pvgame/errors.hpp"
#include "pvgame/solver.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace pvgame {

namespace {

// Dense Gaussian elimination with partial pivoting; solves A x = b in place.
std::vector<double> gauss(std::vector<std::vector<double>> a, std::vector<double> b)
{
    const std::size_t n = b.size();
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t piv = c;
        for (std::size_t r = c + 1; r < n; ++r) {
            if (std::abs(a[r][c]) > std::abs(a[piv][c]))
                piv = r;
        }
        if (std::abs(a[piv][c]) < 1e-14)
            throw InvariantViolation("singular strategy system");
        std::swap(a[c], a[piv]);
        std::swap(b[c], b[piv]);
        for (std::size_t r = 0; r < n; ++r) {
            if (r == c || a[r][c] == 0.0)
                continue;
            const double f = a[r][c] / a[c][c];
            for (std::size_t k = c; k < n; ++k)
                a[r][k] -= f * a[c][k];
            b[r] -= f * b[c];
        }
    }
    for (std::size_t r = 0; r < n; ++r)
        b[r] /= a[r][r];
    return b;
}

template <class W>
std::vector<double> linear_values(const ConTSGraph& g, const std::vector<std::size_t>& choice, double beta, W weight)
{
    const std::size_t n = g.num_vertices();
    if (choice.size() != n)
        throw std::invalid_argument("strategy must choose one edge per vertex");
    std::vector<std::vector<double>> a(n, std::vector<double>(n, 0.0));
    std::vector<double> b(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const auto& e = g.edge(choice[i]);
        if (e.src != i)
            throw std::invalid_argument("strategy edge does not leave its vertex");
        a[i][i] += 1.0;
        a[i][e.dst] -= beta * e.prob;
        b[i] = weight(e);
    }
    return gauss(std::move(a), std::move(b));
}

std::vector<std::vector<std::size_t>> collect(const ConTSGraph& g, double cap,
                                              const std::function<bool(const std::vector<std::size_t>&)>& keep)
{
    // Least choice per report key.
    std::map<std::string, std::vector<std::size_t>> best;
    for_each_strategy(g, cap, [&](const std::vector<std::size_t>& choice) {
        if (!keep(choice))
            return;
        auto c = canonical_choice(g, choice);
        auto [it, fresh] = best.emplace(strategy_key(g, c), c);
        if (!fresh && c < it->second)
            it->second = std::move(c);
    });
    std::vector<std::vector<std::size_t>> out;
    for (auto& [k, c] : best)
        out.push_back(std::move(c));
    std::sort(out.begin(), out.end());
    return out;
}

} // namespace

double count_strategies(const ConTSGraph& g)
{
    double n = 1.0;
    for (std::size_t v = 0; v < g.num_vertices(); ++v)
        n *= static_cast<double>(g.out_edges(v).size());
    return n;
}

void for_each_strategy(const ConTSGraph& g, double cap, const std::function<void(const std::vector<std::size_t>&)>& visit)
{
    const double total = count_strategies(g);
    if (total > cap)
        throw CapExceeded("graph has " + std::to_string(total) + " strategies, more than the oracle cap");
    if (total == 0.0)
        return;
    const std::size_t n = g.num_vertices();
    std::vector<std::size_t> digit(n, 0);
    std::vector<std::size_t> choice(n);
    while (true) {
        for (std::size_t v = 0; v < n; ++v)
            choice[v] = g.out_edges(v)[digit[v]];
        visit(choice);
        std::size_t v = 0;
        while (v < n && ++digit[v] == g.out_edges(v).size())
            digit[v++] = 0;
        if (v == n)
            return;
    }
}

std::vector<PayoffPair> strategy_values(const ConTSGraph& g, const std::vector<std::size_t>& choice, double beta)
{
    const auto a = linear_values(g, choice, beta, [](const ConTSGraph::Edge& e) { return e.weight.attacker; });
    const auto d = linear_values(g, choice, beta, [](const ConTSGraph::Edge& e) { return e.weight.defender; });
    std::vector<PayoffPair> out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i)
        out[i] = {a[i], d[i]};
    return out;
}

std::vector<double> strategy_social_values(const ConTSGraph& g, const std::vector<std::size_t>& choice, double beta)
{
    return linear_values(g, choice, beta, [](const ConTSGraph::Edge& e) { return e.social_weight(); });
}

bool check_nee(const ConTSGraph& g, const std::vector<std::size_t>& choice, double beta, const OracleOptions& opts)
{
    const auto pf = strategy_values(g, choice, beta);
    const double tol = opts.tolerance;
    for (std::size_t i = 0; i < g.num_vertices(); ++i) {
        const auto& out = g.out_edges(i);
        auto q = [&](std::size_t e) {
            const auto& edge = g.edge(e);
            return PayoffPair{edge.weight.attacker + beta * edge.prob * pf[edge.dst].attacker,
                              edge.weight.defender + beta * edge.prob * pf[edge.dst].defender};
        };
        auto group_best = [&](std::size_t attacker) {
            double best = -INFINITY;
            for (std::size_t e : out) {
                if (g.edge(e).attacker == attacker)
                    best = std::max(best, q(e).defender);
            }
            return best;
        };
        // PF^d(pi_i) against the defender's alternatives for the same attacker action.
        const std::size_t chosen = choice[i];
        if (std::abs(pf[i].defender - group_best(g.edge(chosen).attacker)) > tol)
            return false;
        // PF^a(pi_i) against the attacker's best among defender best responses.
        double best_a = -INFINITY;
        for (std::size_t e : out) {
            if (q(e).defender >= group_best(g.edge(e).attacker) - tol)
                best_a = std::max(best_a, q(e).attacker);
        }
        if (std::abs(pf[i].attacker - best_a) > tol)
            return false;
    }
    return true;
}

bool check_soe(const ConTSGraph& g, const std::vector<std::size_t>& choice, double beta, const OracleOptions& opts)
{
    const auto pf = strategy_social_values(g, choice, beta);
    for (std::size_t i = 0; i < g.num_vertices(); ++i) {
        double best = INFINITY;
        for (std::size_t e : g.out_edges(i)) {
            const auto& edge = g.edge(e);
            best = std::min(best, edge.social_weight() + beta * edge.prob * pf[edge.dst]);
        }
        if (std::abs(pf[i] - best) > opts.tolerance)
            return false;
    }
    return true;
}

std::vector<std::vector<std::size_t>> oracle_nes(const ConTSGraph& g, double beta, const OracleOptions& opts)
{
    return collect(g, opts.max_strategies,
                   [&](const std::vector<std::size_t>& c) { return check_nee(g, c, beta, opts); });
}

std::vector<std::vector<std::size_t>> oracle_sos(const ConTSGraph& g, double beta, const OracleOptions& opts)
{
    return collect(g, opts.max_strategies,
                   [&](const std::vector<std::size_t>& c) { return check_soe(g, c, beta, opts); });
}

} // namespace pvgame
