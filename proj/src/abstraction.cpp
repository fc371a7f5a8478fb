#include "pvgame/abstraction.hpp"

#include "pvgame/errors.hpp"

#include <algorithm>
#include <limits>

namespace pvgame {

namespace {

// Iterative Tarjan, so deep graphs do not exhaust the stack.
std::vector<std::vector<std::size_t>> tarjan(const ConTSGraph& g)
{
    const std::size_t n = g.num_vertices();
    constexpr std::size_t unvisited = std::numeric_limits<std::size_t>::max();
    std::vector<std::size_t> index(n, unvisited), low(n, 0);
    std::vector<bool> on_stack(n, false);
    std::vector<std::size_t> stack;
    std::vector<std::vector<std::size_t>> sccs;
    std::size_t counter = 0;

    struct Frame {
        std::size_t v;
        std::size_t next_edge;
    };
    for (std::size_t root = 0; root < n; ++root) {
        if (index[root] != unvisited)
            continue;
        std::vector<Frame> call{{root, 0}};
        index[root] = low[root] = counter++;
        stack.push_back(root);
        on_stack[root] = true;
        while (!call.empty()) {
            Frame& f = call.back();
            const auto& out = g.out_edges(f.v);
            if (f.next_edge < out.size()) {
                const std::size_t w = g.edge(out[f.next_edge++]).dst;
                if (index[w] == unvisited) {
                    index[w] = low[w] = counter++;
                    stack.push_back(w);
                    on_stack[w] = true;
                    call.push_back({w, 0});
                } else if (on_stack[w]) {
                    low[f.v] = std::min(low[f.v], index[w]);
                }
                continue;
            }
            const std::size_t v = f.v;
            call.pop_back();
            if (!call.empty())
                low[call.back().v] = std::min(low[call.back().v], low[v]);
            if (low[v] == index[v]) {
                std::vector<std::size_t> scc;
                std::size_t w;
                do {
                    w = stack.back();
                    stack.pop_back();
                    on_stack[w] = false;
                    scc.push_back(w);
                } while (w != v);
                std::sort(scc.begin(), scc.end());
                sccs.push_back(std::move(scc));
            }
        }
    }
    return sccs;
}

} // namespace

AbsDag condense_scc(const ConTSGraph& g)
{
    auto sccs = tarjan(g);
    std::sort(sccs.begin(), sccs.end(), [](const auto& a, const auto& b) { return a.front() < b.front(); });
    AbsDag abs;
    abs.component_of.assign(g.num_vertices(), 0);
    for (std::size_t c = 0; c < sccs.size(); ++c) {
        for (std::size_t v : sccs[c])
            abs.component_of[v] = c;
        AbsDag::Component comp;
        comp.members = std::move(sccs[c]);
        abs.components.push_back(std::move(comp));
    }
    for (const auto& e : g.edges()) {
        const std::size_t a = abs.component_of[e.src];
        const std::size_t b = abs.component_of[e.dst];
        if (a != b)
            abs.components[a].successors.push_back(b);
        else if (e.src == e.dst)
            abs.components[a].has_cycle = true;
    }
    for (auto& c : abs.components) {
        std::sort(c.successors.begin(), c.successors.end());
        c.successors.erase(std::unique(c.successors.begin(), c.successors.end()), c.successors.end());
        if (c.members.size() > 1)
            c.has_cycle = true;
        c.kind = c.successors.empty() ? AbsDag::Kind::leave : AbsDag::Kind::non_leave;
    }
    return abs;
}

void compute_priorities(AbsDag& abs)
{
    const int n = static_cast<int>(abs.size());
    // Reverse topological sweep: Kahn's algorithm on the reversed DAG.
    std::vector<std::size_t> pending(abs.size());
    std::vector<std::vector<std::size_t>> preds(abs.size());
    for (std::size_t c = 0; c < abs.size(); ++c) {
        pending[c] = abs.components[c].successors.size();
        for (std::size_t s : abs.components[c].successors)
            preds[s].push_back(c);
    }
    std::vector<std::size_t> ready;
    for (std::size_t c = 0; c < abs.size(); ++c)
        if (pending[c] == 0)
            ready.push_back(c);
    std::size_t done = 0;
    while (!ready.empty()) {
        const std::size_t c = ready.back();
        ready.pop_back();
        ++done;
        auto& comp = abs.components[c];
        if (comp.successors.empty()) {
            comp.priority = n;
        } else {
            int p = std::numeric_limits<int>::max();
            for (std::size_t s : comp.successors)
                p = std::min(p, abs.components[s].priority - 1);
            comp.priority = p;
        }
        for (std::size_t pc : preds[c])
            if (--pending[pc] == 0)
                ready.push_back(pc);
    }
    if (done != abs.size())
        throw InvariantViolation("component graph has a cycle");
}

std::vector<std::size_t> processing_order(const AbsDag& abs, const ConTSGraph& g)
{
    std::vector<std::size_t> order(abs.size());
    for (std::size_t c = 0; c < abs.size(); ++c)
        order[c] = c;
    auto least_id = [&](std::size_t c) {
        int id = std::numeric_limits<int>::max();
        for (std::size_t v : abs.components[c].members)
            id = std::min(id, g.vertex(v).id);
        return id;
    };
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const int pa = abs.components[a].priority;
        const int pb = abs.components[b].priority;
        if (pa != pb)
            return pa > pb;
        return least_id(a) < least_id(b);
    });
    return order;
}

bool respects_dependencies(const AbsDag& abs, const std::vector<std::size_t>& order)
{
    std::vector<std::size_t> position(abs.size());
    for (std::size_t i = 0; i < order.size(); ++i)
        position[order[i]] = i;
    for (std::size_t i = 0; i < order.size(); ++i) {
        // Everything reachable from order[i] must come before it.
        std::vector<bool> seen(abs.size(), false);
        std::vector<std::size_t> todo{order[i]};
        while (!todo.empty()) {
            const std::size_t c = todo.back();
            todo.pop_back();
            for (std::size_t s : abs.components[c].successors) {
                if (seen[s])
                    continue;
                seen[s] = true;
                if (position[s] >= i)
                    return false;
                todo.push_back(s);
            }
        }
    }
    return true;
}

AbsDag build_abstraction(const ConTSGraph& g)
{
    AbsDag abs = condense_scc(g);
    compute_priorities(abs);
    return abs;
}

} // namespace pvgame
