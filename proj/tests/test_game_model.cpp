#include "doctest.h"

#include "pvgame/comodel.hpp"
#include "pvgame/errors.hpp"
#include "pvgame/random_games.hpp"

#include <cmath>

using namespace pvgame;

namespace {

GameState make_state(int id, std::size_t na, std::size_t nd)
{
    GameState s;
    s.id = id;
    s.name = "s" + std::to_string(id);
    for (std::size_t u = 0; u < na; ++u)
        s.attacker_actions.push_back("att" + std::to_string(u + 1));
    for (std::size_t v = 0; v < nd; ++v)
        s.defender_actions.push_back("def" + std::to_string(v + 1));
    s.payoff.assign(na, std::vector<PayoffPair>(nd));
    s.transitions.assign(na, std::vector<std::vector<Outcome>>(nd));
    return s;
}

GameSpec one_state()
{
    GameSpec spec;
    GameState s = make_state(1, 1, 1);
    s.payoff[0][0] = {10, -10};
    add_outcome(s, 0, 0, 0, 1.0);
    spec.states.push_back(s);
    return spec;
}

} // namespace

TEST_CASE("payoff pair social value")
{
    CHECK(PayoffPair{10, -10}.social() == 20);
    CHECK(PayoffPair{3, 2}.social() == 5);
}

TEST_CASE("smallest game: one round is a six-state cycle")
{
    GameSpec spec = one_state();
    ComModelProcesses procs = build_processes(spec);
    CHECK(procs.env.size() == 5);
    ComModelTs ts = build_ts(procs);
    const Lts& lts = ts.lts.lts;
    CHECK(lts.num_states() == 6);
    CHECK(lts.transitions().size() == 6);

    std::vector<std::string> trace;
    std::size_t s = 0;
    for (int k = 0; k < 6; ++k) {
        REQUIRE(lts.outgoing(s).size() == 1);
        const auto& t = lts.transitions()[lts.outgoing(s).front()];
        CHECK(t.prob == 1.0);
        trace.push_back(lts.label_name(t.label));
        s = t.target;
    }
    CHECK(s == 0);
    CHECK(trace == std::vector<std::string>{"tau", "tau", "tau", "tau", "'Log((@a1, @d1))", "'Rec((10, -10))"});

    SemanticPipeline pipe = build_conts_semantic(spec);
    REQUIRE(pipe.graph.num_vertices() == 1);
    REQUIRE(pipe.graph.num_edges() == 1);
    const auto& e = pipe.graph.edge(0);
    CHECK(e.src == 0);
    CHECK(e.dst == 0);
    CHECK(e.prob == 1.0);
    CHECK(e.weight == PayoffPair{10, -10});
    CHECK(find_isomorphism(pipe.graph, build_conts_direct(spec)).has_value());
}

TEST_CASE("templates print in the documented grammar")
{
    GameSpec spec;
    GameState s = make_state(1, 2, 1);
    s.payoff[0][0] = {10, -10};
    s.payoff[1][0] = {0, 0};
    add_outcome(s, 0, 0, 0, 1.0);
    add_outcome(s, 1, 0, 0, 1.0);
    spec.states.push_back(s);
    ComModelProcesses procs = build_processes(spec);
    CHECK(to_string(procs.env.find("PA_1")->body) == "'Attc(@a1).Tell_a(y).Nil + 'Attc(@a2).Tell_a(y).Nil");
    CHECK(to_string(procs.env.find("PD_1")->body) == "Tell_d(x).'Defd(@d1).Nil");
    CHECK(to_string(procs.env.find("PN_1")->body) == "Attc(x).'Tell_d(x).Defd(y).'Tell_a(y).Tr_1(x, y)");
    CHECK(to_string(procs.env.find("G_1")->body) == "(PA_1 | PD_1 | PN_1)\\{Attc, Defd, Tell_a, Tell_d}");
    CHECK(to_string(procs.env.find("Tr_1")->body).find(
              "'Log((@a1, @d1)).(if (x, y) = (@a1, @d1) then 'Rec((10, -10)).(PA_1 | PD_1 | PN_1) else Nil)")
          != std::string::npos);
}

TEST_CASE("empty action set is rejected")
{
    GameSpec spec = one_state();
    spec.states[0].attacker_actions.clear();
    spec.states[0].payoff.clear();
    spec.states[0].transitions.clear();
    CHECK_THROWS_AS(build_processes(spec), ValidationError);
    CHECK_THROWS_AS(build_conts_direct(spec), ValidationError);
}

TEST_CASE("dead action pair ends in Nil and yields no edge")
{
    GameSpec spec;
    GameState s = make_state(1, 2, 1);
    add_outcome(s, 0, 0, 0, 1.0); // (att2, def1) left empty
    spec.states.push_back(s);
    SemanticPipeline pipe = build_conts_semantic(spec);
    CHECK(pipe.graph.num_edges() == 1);
    // Dead ends (guard mismatches and the empty pair) are all equivalent.
    std::vector<std::size_t> dead;
    for (std::size_t st = 0; st < pipe.ts.lts.lts.num_states(); ++st)
        if (pipe.ts.lts.lts.outgoing(st).empty())
            dead.push_back(st);
    REQUIRE(dead.size() >= 2);
    for (std::size_t st : dead)
        CHECK(pipe.partition.block_of(st) == pipe.partition.block_of(dead.front()));
    CHECK(find_isomorphism(pipe.graph, build_conts_direct(spec)).has_value());
}

TEST_CASE("residual mass becomes a self-loop")
{
    GameSpec spec;
    GameState a = make_state(1, 1, 2);
    GameState b = make_state(2, 1, 1);
    add_outcome(a, 0, 0, 1, 1.0 / 3);
    add_outcome(a, 0, 0, 0, 1.0 / 3); // 2/3 assigned
    add_outcome(a, 0, 1, 1, 0.5);
    add_outcome(b, 0, 0, 1, 1.0);
    spec.states = {a, b};
    CHECK_FALSE(check_game_spec(spec, true).empty());
    CHECK_THROWS_AS(build_processes(spec), ValidationError);
    CHECK(check_game_spec(spec, false).empty());
    complete_residual_mass(spec);
    CHECK(check_game_spec(spec, true).empty());
    const auto& row = spec.states[0].transitions[0][0];
    REQUIRE(row.size() == 2);
    CHECK(row[0].target == 0);
    CHECK(row[0].prob == doctest::Approx(2.0 / 3));
    CHECK(spec.states[0].transitions[0][1][0].target == 0);
    CHECK(spec.states[0].transitions[0][1][0].prob == doctest::Approx(0.5));
    ConTSGraph g = build_conts_direct(spec);
    CHECK(check_conts(g).empty());
}

TEST_CASE("game-state merges and least-member naming")
{
    GameSpec spec;
    GameState a = make_state(1, 1, 1);
    GameState b = make_state(2, 2, 1);
    GameState c = make_state(3, 2, 1);
    a.payoff[0][0] = {1, -1};
    add_outcome(a, 0, 0, 1, 0.5);
    add_outcome(a, 0, 0, 2, 0.5);
    for (GameState* s : {&b, &c}) {
        s->payoff[0][0] = {4, -2};
        s->payoff[1][0] = {2, -4};
        add_outcome(*s, 0, 0, 0, 1.0);
        add_outcome(*s, 1, 0, 0, 1.0);
    }
    c.attacker_actions = {"other1", "other2"}; // names do not matter
    spec.states = {a, b, c};
    SemanticPipeline pipe = build_conts_semantic(spec);
    CHECK(merged_states(pipe.graph) == std::vector<std::vector<int>>{{2, 3}});
    REQUIRE(pipe.graph.num_vertices() == 2);
    CHECK(pipe.graph.vertex(1).id == 2);
    CHECK(pipe.graph.vertex(1).attacker_actions[0] == "att1");
    // The split edge from state 1 is merged into a single edge of mass 1.
    REQUIRE(pipe.graph.out_edges(0).size() == 1);
    CHECK(pipe.graph.edge(pipe.graph.out_edges(0)[0]).prob == doctest::Approx(1.0));
    ConTSGraph direct = build_conts_direct(spec);
    CHECK(find_isomorphism(pipe.graph, direct).has_value());
    CHECK(game_bisimulation(spec).num_blocks() == 2);
}

TEST_CASE("isomorphism respects labels")
{
    GameSpec spec = one_state();
    GameState b = make_state(2, 1, 1);
    b.payoff[0][0] = {5, -5};
    add_outcome(b, 0, 0, 0, 1.0);
    spec.states.push_back(b);
    spec.states[0].transitions[0][0].clear();
    add_outcome(spec.states[0], 0, 0, 1, 1.0);
    ConTSGraph g = build_conts_direct(spec);
    CHECK(find_isomorphism(g, g).has_value());
    GameSpec other = spec;
    other.states[1].payoff[0][0] = {5, -6};
    CHECK_FALSE(find_isomorphism(g, build_conts_direct(other)).has_value());
    // Renumbered ids still match through the backtracking search.
    GameSpec renamed = spec;
    renamed.states[0].id = 20;
    renamed.states[1].id = 10;
    CHECK(find_isomorphism(g, build_conts_direct(renamed)).has_value());
}

TEST_CASE("property: direct and semantic pipelines agree on random games")
{
    std::mt19937_64 rng(11);
    int merges = 0;
    for (int round = 0; round < 40; ++round) {
        GameSpec spec = random_game_spec(rng);
        CAPTURE(round);
        REQUIRE(check_game_spec(spec, true).empty());
        SemanticPipeline pipe = build_conts_semantic(spec);
        ConTSGraph direct = build_conts_direct(spec);
        CHECK(check_conts(direct).empty());
        CHECK(check_conts(pipe.graph).empty());
        CHECK(find_isomorphism(pipe.graph, direct).has_value());
        CHECK(merged_states(pipe.graph) == merged_states(direct));
        merges += static_cast<int>(merged_states(direct).size());
    }
    CHECK(merges > 5);
}

TEST_CASE("weight convention warnings")
{
    GameSpec spec;
    GameState s = make_state(1, 2, 1);
    s.payoff[0][0] = {10, -10};
    s.payoff[1][0] = {5, -5}; // higher attacker weight, lower defender weight: fine
    add_outcome(s, 0, 0, 0, 1.0);
    add_outcome(s, 1, 0, 0, 1.0);
    spec.states.push_back(s);
    CHECK(weight_convention_warnings(build_conts_direct(spec)).empty());
    spec.states[0].payoff[1][0] = {5, -20};
    auto w = weight_convention_warnings(build_conts_direct(spec));
    CHECK(w.size() == 2);
}

TEST_CASE("exploration cap")
{
    std::mt19937_64 rng(1);
    GameSpec spec = random_game_spec(rng);
    CHECK_THROWS_AS(build_ts(build_processes(spec), 3), CapExceeded);
}
