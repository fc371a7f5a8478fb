#include "doctest.h"

#include "graph_helpers.hpp"

#include "pvgame/abstraction.hpp"
#include "pvgame/random_games.hpp"

#include <set>

using namespace pvgame;
using testing_helpers::from_edges;

namespace {

std::vector<std::vector<bool>> reachability(const ConTSGraph& g)
{
    const std::size_t n = g.num_vertices();
    std::vector<std::vector<bool>> r(n, std::vector<bool>(n, false));
    for (std::size_t s = 0; s < n; ++s) {
        std::vector<std::size_t> todo{s};
        r[s][s] = true;
        while (!todo.empty()) {
            const std::size_t v = todo.back();
            todo.pop_back();
            for (std::size_t ei : g.out_edges(v)) {
                const std::size_t w = g.edge(ei).dst;
                if (!r[s][w]) {
                    r[s][w] = true;
                    todo.push_back(w);
                }
            }
        }
    }
    return r;
}

} // namespace

TEST_CASE("single vertex with a self-loop is one Leave")
{
    ConTSGraph g = from_edges(1, {{0, 0}});
    AbsDag abs = build_abstraction(g);
    REQUIRE(abs.size() == 1);
    CHECK(abs.components[0].kind == AbsDag::Kind::leave);
    CHECK(abs.components[0].has_cycle);
    CHECK(abs.components[0].priority == 1);
    CHECK(processing_order(abs, g) == std::vector<std::size_t>{0});
}

TEST_CASE("mutual edges form one component")
{
    ConTSGraph g = from_edges(2, {{0, 1}, {1, 0}});
    AbsDag abs = condense_scc(g);
    CHECK(abs.size() == 1);
    CHECK(abs.components[0].members == std::vector<std::size_t>{0, 1});
}

TEST_CASE("A<->B -> C<->D")
{
    ConTSGraph g = from_edges(4, {{0, 1}, {1, 0}, {1, 2}, {2, 3}, {3, 2}});
    AbsDag abs = build_abstraction(g);
    REQUIRE(abs.size() == 2);
    CHECK(abs.components[0].members == std::vector<std::size_t>{0, 1});
    CHECK(abs.components[0].kind == AbsDag::Kind::non_leave);
    CHECK(abs.components[1].members == std::vector<std::size_t>{2, 3});
    CHECK(abs.components[1].kind == AbsDag::Kind::leave);
}

TEST_CASE("chain priorities")
{
    ConTSGraph g = from_edges(3, {{0, 1}, {1, 2}, {2, 2}});
    AbsDag abs = build_abstraction(g);
    REQUIRE(abs.size() == 3);
    CHECK(abs.components[0].priority == 1);
    CHECK(abs.components[1].priority == 2);
    CHECK(abs.components[2].priority == 3);
    CHECK_FALSE(abs.components[0].has_cycle);
    CHECK(processing_order(abs, g) == std::vector<std::size_t>{2, 1, 0});
}

TEST_CASE("two leaves share a predecessor")
{
    ConTSGraph g = from_edges(3, {{0, 1}, {0, 2}, {1, 1}, {2, 2}});
    AbsDag abs = build_abstraction(g);
    CHECK(abs.components[1].priority == 3);
    CHECK(abs.components[2].priority == 3);
    CHECK(abs.components[0].priority == 2);
}

TEST_CASE("diamond priorities and tie order")
{
    ConTSGraph g = from_edges(4, {{0, 1}, {0, 2}, {1, 3}, {2, 3}, {3, 3}});
    AbsDag abs = build_abstraction(g);
    CHECK(abs.components[3].priority == 4);
    CHECK(abs.components[1].priority == 3);
    CHECK(abs.components[2].priority == 3);
    CHECK(abs.components[0].priority == 2);
    CHECK(processing_order(abs, g) == std::vector<std::size_t>{3, 1, 2, 0});
}

TEST_CASE("property: condensation on random graphs")
{
    std::mt19937_64 rng(17);
    RandomGraphOptions opts;
    opts.max_vertices = 8;
    for (int round = 0; round < 200; ++round) {
        ConTSGraph g = random_conts(rng, opts);
        AbsDag abs = build_abstraction(g);
        const auto r = reachability(g);
        const std::size_t n = g.num_vertices();
        // Same component iff mutually reachable.
        for (std::size_t a = 0; a < n; ++a)
            for (std::size_t b = 0; b < n; ++b)
                CHECK((abs.component_of[a] == abs.component_of[b]) == (r[a][b] && r[b][a]));
        // Members partition the vertex set.
        std::set<std::size_t> seen;
        for (const auto& c : abs.components)
            for (std::size_t v : c.members)
                CHECK(seen.insert(v).second);
        CHECK(seen.size() == n);
        // Leave iff out-degree zero; there is at least one.
        bool any_leave = false;
        for (const auto& c : abs.components) {
            CHECK((c.kind == AbsDag::Kind::leave) == c.successors.empty());
            any_leave = any_leave || c.kind == AbsDag::Kind::leave;
            for (std::size_t s : c.successors)
                CHECK(c.priority < abs.components[s].priority);
            if (c.kind == AbsDag::Kind::leave)
                CHECK(c.priority == static_cast<int>(abs.size()));
        }
        CHECK(any_leave);
        CHECK(respects_dependencies(abs, processing_order(abs, g)));
    }
}

TEST_CASE("dependency check rejects a bad order")
{
    ConTSGraph g = from_edges(3, {{0, 1}, {1, 2}, {2, 2}});
    AbsDag abs = build_abstraction(g);
    CHECK_FALSE(respects_dependencies(abs, {0, 1, 2}));
    CHECK(respects_dependencies(abs, {2, 1, 0}));
}
