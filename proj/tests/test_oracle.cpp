#include "doctest.h"

#include "graph_helpers.hpp"

#include "pvgame/errors.hpp"
#include "pvgame/oracle.hpp"
#include "pvgame/random_games.hpp"

#include <algorithm>
#include <cmath>
#include <set>

using namespace pvgame;
using testing_helpers::edge;
using testing_helpers::vertices;

namespace {

// A: self-loop under a1 (3,-3); A->B under a2 (1,-1). B->A (2,-2).
struct TwoCycle {
    ConTSGraph g = vertices(2, 2, 1);
    std::size_t self, ab, ba;

    TwoCycle()
    {
        self = edge(g, 0, 0, 0, 0, 1.0, 3, -3);
        ab = edge(g, 0, 1, 1, 0, 1.0, 1, -1);
        ba = edge(g, 1, 0, 0, 0, 1.0, 2, -2);
    }
};

} // namespace

TEST_CASE("strategy enumeration counts")
{
    ConTSGraph one = vertices(1, 2, 1);
    edge(one, 0, 0, 0, 0, 1.0, 1, -1);
    edge(one, 0, 0, 1, 0, 1.0, 2, -2);
    CHECK(count_strategies(one) == 2);
    std::size_t n = 0;
    for_each_strategy(one, 1e7, [&](const std::vector<std::size_t>&) { ++n; });
    CHECK(n == 2);

    ConTSGraph g = vertices(3, 3, 1);
    for (std::size_t u = 0; u < 2; ++u)
        edge(g, 0, 1, u, 0, 1.0, 0, 0);
    for (std::size_t u = 0; u < 3; ++u)
        edge(g, 1, 2, u, 0, 1.0, 0, 0);
    edge(g, 2, 2, 0, 0, 1.0, 0, 0);
    CHECK(count_strategies(g) == 6);
    std::set<std::vector<std::size_t>> seen;
    for_each_strategy(g, 1e7, [&](const std::vector<std::size_t>& c) {
        for (std::size_t v = 0; v < c.size(); ++v)
            CHECK(g.edge(c[v]).src == v);
        seen.insert(c);
    });
    CHECK(seen.size() == 6);

    CHECK_THROWS_AS(for_each_strategy(g, 5, [](const std::vector<std::size_t>&) {}), CapExceeded);
}

TEST_CASE("linear-system values")
{
    // Self-loop (10,-10), p = 0.9, beta 0.5: 10 / (1 - 0.45).
    ConTSGraph g = vertices(2, 1, 1);
    const std::size_t loop = edge(g, 0, 0, 0, 0, 0.9, 10, -10);
    const std::size_t stem = edge(g, 1, 0, 0, 0, 1.0, 5, -1);
    auto v = strategy_values(g, {loop, stem}, 0.5);
    CHECK(v[0].attacker == doctest::Approx(10.0 / 0.55).epsilon(1e-12));
    CHECK(v[0].defender == doctest::Approx(-10.0 / 0.55).epsilon(1e-12));
    CHECK(v[1].attacker == doctest::Approx(5 + 0.5 * 10.0 / 0.55).epsilon(1e-12));
    auto s = strategy_social_values(g, {loop, stem}, 0.5);
    CHECK(s[0] == doctest::Approx(20.0 / 0.55).epsilon(1e-12));
    CHECK(s[1] == doctest::Approx(6 + 0.5 * 20.0 / 0.55).epsilon(1e-12));
}

TEST_CASE("single self-loop is an equilibrium of both kinds")
{
    ConTSGraph g = vertices(1, 1, 1);
    const std::size_t e = edge(g, 0, 0, 0, 0, 1.0, 10, -10);
    CHECK(check_nee(g, {e}, 0.5));
    CHECK(check_soe(g, {e}, 0.5));
    CHECK(oracle_nes(g, 0.5) == std::vector<std::vector<std::size_t>>{{e}});
    CHECK(oracle_sos(g, 0.5) == std::vector<std::vector<std::size_t>>{{e}});
}

TEST_CASE("two-cycle with self-loop: only the self-loop is an NES")
{
    TwoCycle t;
    // Self-loop worth 3 / 0.5 = 6 at A; the 2-cycle from A is worth
    // (1 + 0.5 * 2) / 0.75.
    CHECK(check_nee(t.g, {t.self, t.ba}, 0.5));
    CHECK_FALSE(check_nee(t.g, {t.ab, t.ba}, 0.5));
    CHECK(oracle_nes(t.g, 0.5) == std::vector<std::vector<std::size_t>>{{t.self, t.ba}});
}

TEST_CASE("social check mirrors the examples")
{
    TwoCycle t;
    // Social weights 6, 2, 4. Self-loop: 12 at A. 2-cycle: (2 + 0.5*4)/0.75.
    CHECK_FALSE(check_soe(t.g, {t.self, t.ba}, 0.5));
    CHECK(check_soe(t.g, {t.ab, t.ba}, 0.5));
    CHECK(oracle_sos(t.g, 0.5) == std::vector<std::vector<std::size_t>>{{t.ab, t.ba}});
}

TEST_CASE("defender filter decides within an attacker group")
{
    // Same attacker action: the defender prefers the smaller loss even
    // though the attacker would gain more on the other edge.
    ConTSGraph g = vertices(1, 1, 2);
    const std::size_t big = edge(g, 0, 0, 0, 0, 1.0, 10, -8);
    const std::size_t small = edge(g, 0, 0, 0, 1, 1.0, 2, -1);
    CHECK(oracle_nes(g, 0.5) == std::vector<std::vector<std::size_t>>{{small}});
    CHECK_FALSE(check_nee(g, {big}, 0.5));
}

TEST_CASE("checks are independent of enumeration order")
{
    std::mt19937_64 rng(5);
    for (int round = 0; round < 30; ++round) {
        ConTSGraph g = random_conts(rng);
        std::vector<std::vector<std::size_t>> all;
        for_each_strategy(g, 1e6, [&](const std::vector<std::size_t>& c) { all.push_back(c); });
        std::vector<bool> fwd, bwd;
        for (const auto& c : all)
            fwd.push_back(check_nee(g, c, 0.8));
        for (std::size_t k = all.size(); k-- > 0;)
            bwd.push_back(check_nee(g, all[k], 0.8));
        std::reverse(bwd.begin(), bwd.end());
        CHECK(fwd == bwd);
    }
}

TEST_CASE("property: the social optimum always exists")
{
    std::mt19937_64 rng(11);
    RandomGraphOptions opts;
    opts.min_vertices = 4;
    opts.max_vertices = 4;
    for (int round = 0; round < 100; ++round) {
        ConTSGraph g = random_conts(rng, opts);
        CHECK_FALSE(oracle_sos(g, 0.9).empty());
    }
}

TEST_CASE("property: values solve the one-step recursion")
{
    std::mt19937_64 rng(3);
    RandomGraphOptions opts;
    opts.continuous = true;
    for (int round = 0; round < 50; ++round) {
        ConTSGraph g = random_conts(rng, opts);
        std::vector<std::size_t> c(g.num_vertices());
        for (std::size_t v = 0; v < c.size(); ++v)
            c[v] = g.out_edges(v)[rng() % g.out_edges(v).size()];
        const auto pf = strategy_values(g, c, 0.7);
        for (std::size_t v = 0; v < c.size(); ++v) {
            const auto& e = g.edge(c[v]);
            CHECK(std::abs(pf[v].attacker - (e.weight.attacker + 0.7 * e.prob * pf[e.dst].attacker)) < 1e-9);
            CHECK(std::abs(pf[v].defender - (e.weight.defender + 0.7 * e.prob * pf[e.dst].defender)) < 1e-9);
        }
    }
}
