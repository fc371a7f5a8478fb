#include "pvgame/conts.hpp"

#include "pvgame/value.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <stdexcept>
#include <tuple>

namespace pvgame {

std::size_t ConTSGraph::add_vertex(Vertex v)
{
    vertices_.push_back(std::move(v));
    out_.emplace_back();
    return vertices_.size() - 1;
}

std::size_t ConTSGraph::add_edge(Edge e)
{
    if (e.src >= vertices_.size() || e.dst >= vertices_.size())
        throw std::out_of_range("ConTSGraph::add_edge: vertex out of range");
    if (e.attacker >= vertices_[e.src].attacker_actions.size()
        || e.defender >= vertices_[e.src].defender_actions.size())
        throw std::out_of_range("ConTSGraph::add_edge: action index out of range");
    const std::size_t id = edges_.size();
    edges_.push_back(e);
    auto& out = out_[e.src];
    auto key = [&](std::size_t i) {
        const auto& x = edges_[i];
        return std::make_tuple(x.attacker, x.defender, x.dst);
    };
    out.insert(std::upper_bound(out.begin(), out.end(), id,
                                [&](std::size_t a, std::size_t b) { return key(a) < key(b); }),
               id);
    return id;
}

std::size_t ConTSGraph::find_vertex(int id) const
{
    for (std::size_t i = 0; i < vertices_.size(); ++i)
        if (vertices_[i].id == id)
            return i;
    throw std::out_of_range("no ConTS vertex with id " + std::to_string(id));
}

std::vector<std::string> check_conts(const ConTSGraph& g, double eps)
{
    std::vector<std::string> d;
    for (std::size_t v = 0; v < g.num_vertices(); ++v) {
        const auto& vx = g.vertex(v);
        const std::string at = "vertex G" + std::to_string(vx.id);
        if (g.out_edges(v).empty())
            d.push_back(at + ": no outgoing edges");
        std::map<std::pair<std::size_t, std::size_t>, double> mass;
        for (std::size_t ei : g.out_edges(v)) {
            const auto& e = g.edge(ei);
            if (!(e.prob > 0.0) || e.prob > 1.0 + eps)
                d.push_back(at + ": edge probability " + format_number(e.prob) + " outside (0,1]");
            mass[{e.attacker, e.defender}] += e.prob;
        }
        for (const auto& [key, q] : mass)
            if (std::fabs(q - 1.0) > eps)
                d.push_back(at + " (" + vx.attacker_actions[key.first] + ", " + vx.defender_actions[key.second]
                            + "): outgoing mass " + format_number(q) + " != 1");
    }
    return d;
}

std::vector<std::string> weight_convention_warnings(const ConTSGraph& g, std::size_t limit)
{
    std::vector<std::string> out;
    std::size_t count = 0;
    const auto& es = g.edges();
    auto describe = [&](const ConTSGraph::Edge& e) {
        return "G" + std::to_string(g.vertex(e.src).id) + "(" + g.attacker_name(e) + ", " + g.defender_name(e)
            + ") r=(" + format_number(e.weight.attacker) + ", " + format_number(e.weight.defender) + ")";
    };
    for (std::size_t i = 0; i < es.size(); ++i) {
        for (std::size_t j = 0; j < es.size(); ++j) {
            if (es[i].weight.attacker > es[j].weight.attacker && !(es[i].weight.defender < es[j].weight.defender)) {
                if (count < limit)
                    out.push_back("weight convention: " + describe(es[i]) + " vs " + describe(es[j]));
                ++count;
            }
        }
    }
    if (count > 0)
        out.push_back("weight convention: " + std::to_string(count) + " violating edge pair(s) in total");
    return out;
}

namespace {

using EdgeKey = std::tuple<std::size_t, std::size_t, double, double, double>;

std::vector<EdgeKey> edges_between(const ConTSGraph& g, std::size_t a, std::size_t b)
{
    std::vector<EdgeKey> out;
    for (std::size_t ei : g.out_edges(a)) {
        const auto& e = g.edge(ei);
        if (e.dst == b)
            out.emplace_back(e.attacker, e.defender, e.prob, e.weight.attacker, e.weight.defender);
    }
    std::sort(out.begin(), out.end());
    return out;
}

bool same_edges(const std::vector<EdgeKey>& x, const std::vector<EdgeKey>& y, double eps)
{
    if (x.size() != y.size())
        return false;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (std::get<0>(x[i]) != std::get<0>(y[i]) || std::get<1>(x[i]) != std::get<1>(y[i]))
            return false;
        if (std::fabs(std::get<2>(x[i]) - std::get<2>(y[i])) > eps
            || std::fabs(std::get<3>(x[i]) - std::get<3>(y[i])) > eps
            || std::fabs(std::get<4>(x[i]) - std::get<4>(y[i])) > eps)
            return false;
    }
    return true;
}

std::vector<std::tuple<std::size_t, std::size_t, std::size_t, std::size_t>> invariants(const ConTSGraph& g)
{
    std::vector<std::size_t> indeg(g.num_vertices(), 0);
    for (const auto& e : g.edges())
        ++indeg[e.dst];
    std::vector<std::tuple<std::size_t, std::size_t, std::size_t, std::size_t>> inv;
    for (std::size_t v = 0; v < g.num_vertices(); ++v)
        inv.emplace_back(g.vertex(v).attacker_actions.size(), g.vertex(v).defender_actions.size(),
                         g.out_edges(v).size(), indeg[v]);
    return inv;
}

} // namespace

std::optional<std::vector<std::size_t>> find_isomorphism(const ConTSGraph& lhs, const ConTSGraph& rhs, double eps)
{
    const std::size_t n = lhs.num_vertices();
    if (n != rhs.num_vertices() || lhs.num_edges() != rhs.num_edges())
        return std::nullopt;
    const auto il = invariants(lhs);
    const auto ir = invariants(rhs);

    std::vector<std::size_t> map(n, n);
    std::vector<bool> used(n, false);

    // Edges between v and every already mapped vertex (and v itself) agree.
    auto consistent = [&](std::size_t v) {
        for (std::size_t u = 0; u < n; ++u) {
            if (map[u] == n)
                continue;
            if (!same_edges(edges_between(lhs, u, v), edges_between(rhs, map[u], map[v]), eps)
                || !same_edges(edges_between(lhs, v, u), edges_between(rhs, map[v], map[u]), eps))
                return false;
        }
        return true;
    };

    // Identity by vertex id first: both construction routes name vertices
    // by their least member, so this almost always succeeds.
    {
        bool ok = true;
        for (std::size_t v = 0; v < n && ok; ++v) {
            std::size_t w = n;
            for (std::size_t k = 0; k < n; ++k)
                if (rhs.vertex(k).id == lhs.vertex(v).id)
                    w = k;
            if (w == n || used[w] || il[v] != ir[w]) {
                ok = false;
                break;
            }
            map[v] = w;
            used[w] = true;
            ok = consistent(v);
        }
        if (ok)
            return map;
        std::fill(map.begin(), map.end(), n);
        std::fill(used.begin(), used.end(), false);
    }

    std::function<bool(std::size_t)> assign = [&](std::size_t v) {
        if (v == n)
            return true;
        for (std::size_t w = 0; w < n; ++w) {
            if (used[w] || il[v] != ir[w])
                continue;
            map[v] = w;
            used[w] = true;
            if (consistent(v) && assign(v + 1))
                return true;
            map[v] = n;
            used[w] = false;
        }
        return false;
    };
    if (assign(0))
        return map;
    return std::nullopt;
}

} // namespace pvgame
