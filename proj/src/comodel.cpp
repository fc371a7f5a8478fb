#include "pvgame/comodel.hpp"

#include "pvgame/errors.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

namespace pvgame {

namespace {

std::string suffix(int id)
{
    return id < 0 ? "m" + std::to_string(-id) : std::to_string(id);
}

Term body_of(const ComModelProcesses::Names& n)
{
    return restrict(parallel(parallel(call(n.attacker), call(n.defender)), call(n.environment)), hidden_channels());
}

std::size_t decode_index(const Value& v, char prefix)
{
    if (v.kind() != Value::Kind::atom)
        throw InvariantViolation("expected an action atom, got " + v.to_string());
    const std::string& s = v.as_atom();
    if (s.size() < 2 || s[0] != prefix)
        throw InvariantViolation("unexpected action atom @" + s);
    return static_cast<std::size_t>(std::stoul(s.substr(1))) - 1;
}

} // namespace

const std::vector<std::string>& hidden_channels()
{
    static const std::vector<std::string> r = {"Attc", "Defd", "Tell_a", "Tell_d"};
    return r;
}

Value attacker_atom(std::size_t k)
{
    return Value::atom("a" + std::to_string(k + 1));
}

Value defender_atom(std::size_t k)
{
    return Value::atom("d" + std::to_string(k + 1));
}

ComModelProcesses build_processes(const GameSpec& spec)
{
    validate_game_spec(spec, true);
    ComModelProcesses out;
    for (const auto& s : spec.states) {
        const std::string k = suffix(s.id);
        out.names.push_back({"PA_" + k, "PD_" + k, "PN_" + k, "Tr_" + k, "G_" + k});
    }
    for (std::size_t i = 0; i < spec.states.size(); ++i) {
        const auto& s = spec.states[i];
        const auto& n = out.names[i];

        std::vector<Group> attacks;
        for (std::size_t u = 0; u < s.num_attacker(); ++u)
            attacks.push_back({ActionLabel::output("Attc", attacker_atom(u)),
                               {{1.0, prefix(ActionLabel::input("Tell_a", "y"), nil())}}});
        out.env.define(n.attacker, {}, sum(std::move(attacks)));

        std::vector<Group> defences;
        for (std::size_t v = 0; v < s.num_defender(); ++v)
            defences.push_back({ActionLabel::output("Defd", defender_atom(v)), {{1.0, nil()}}});
        out.env.define(n.defender, {}, prefix(ActionLabel::input("Tell_d", "x"), sum(std::move(defences))));

        const ValueExpr x = ValueExpr::variable("x");
        const ValueExpr y = ValueExpr::variable("y");
        out.env.define(n.environment, {},
                       prefix(ActionLabel::input("Attc", "x"),
                              prefix(ActionLabel::output("Tell_d", x),
                                     prefix(ActionLabel::input("Defd", "y"),
                                            prefix(ActionLabel::output("Tell_a", y), call(n.round, {x, y}))))));

        std::vector<Group> logs;
        for (std::size_t u = 0; u < s.num_attacker(); ++u) {
            for (std::size_t v = 0; v < s.num_defender(); ++v) {
                const Value pair = Value::tuple({attacker_atom(u), defender_atom(v)});
                Term then_branch = nil();
                if (!s.transitions[u][v].empty()) {
                    const auto& r = s.payoff[u][v];
                    Group rec{ActionLabel::output("Rec", Value::pair(r.attacker, r.defender)), {}};
                    for (const auto& o : s.transitions[u][v]) {
                        const auto& m = out.names[o.target];
                        rec.branches.push_back(
                            {o.prob, parallel(parallel(call(m.attacker), call(m.defender)), call(m.environment))});
                    }
                    then_branch = sum({std::move(rec)});
                }
                Term branch = conditional(BoolExpr::equal(ValueExpr::tuple({x, y}), pair), then_branch, nil());
                logs.push_back({ActionLabel::output("Log", pair), {{1.0, branch}}});
            }
        }
        out.env.define(n.round, {"x", "y"}, sum(std::move(logs)));

        Term body = body_of(n);
        out.env.define(n.state, {}, body);
        out.roots.push_back(body);
    }
    return out;
}

ComModelTs build_ts(const ComModelProcesses& procs, std::size_t max_states)
{
    ExploreOptions opts;
    opts.max_states = max_states;
    opts.normalize_targets = true;
    ComModelTs out;
    out.lts = explore(procs.roots, procs.env, {}, opts);
    out.num_game_states = procs.roots.size();
    return out;
}

namespace {

struct LiveRound {
    std::size_t u, v;
    PayoffPair weight;
    std::map<std::size_t, double> mass; // target block -> probability
};

class Contractor {
public:
    Contractor(const ComModelTs& ts, const Partition& p) : ts_(ts), lts_(ts.lts.lts), p_(p) {}

    std::vector<LiveRound> rounds_from(std::size_t state)
    {
        std::vector<LiveRound> out;
        walk(state, 0, out);
        return out;
    }

private:
    const Label& label(std::size_t id) const { return ts_.lts.labels.at(id); }

    [[noreturn]] void fail(std::size_t state, const std::string& what) const
    {
        throw InvariantViolation("unexpected round shape at " + to_string(ts_.lts.states[state]) + ": " + what);
    }

    void walk(std::size_t s, int depth, std::vector<LiveRound>& out)
    {
        const auto& outgoing = lts_.outgoing(s);
        if (outgoing.empty())
            fail(s, "no transitions after " + std::to_string(depth) + " internal steps");
        for (std::size_t idx : outgoing) {
            const auto& t = lts_.transitions()[idx];
            const Label& l = label(t.label);
            if (depth < 4) {
                if (l.kind != Label::Kind::tau)
                    fail(s, "expected an internal step, got " + l.to_string());
                if (std::fabs(t.prob - 1.0) > epsilon_sum)
                    fail(s, "internal step with probability " + format_number(t.prob));
                walk(t.target, depth + 1, out);
                continue;
            }
            if (l.kind != Label::Kind::output || l.channel != "Log")
                fail(s, "expected a Log output, got " + l.to_string());
            if (std::fabs(t.prob - 1.0) > epsilon_sum)
                fail(s, "Log with probability " + format_number(t.prob));
            read_record(t.target, l, out);
        }
    }

    void read_record(std::size_t s, const Label& log, std::vector<LiveRound>& out)
    {
        const auto& outgoing = lts_.outgoing(s);
        if (outgoing.empty())
            return; // guard mismatch or a pair without transitions
        const auto& pair = log.value;
        if (pair.kind() != Value::Kind::tuple || pair.elements().size() != 2)
            fail(s, "malformed Log value " + pair.to_string());
        LiveRound r{decode_index(pair.elements()[0], 'a'), decode_index(pair.elements()[1], 'd'), {}, {}};
        std::optional<Value> rec;
        for (std::size_t idx : outgoing) {
            const auto& t = lts_.transitions()[idx];
            const Label& l = label(t.label);
            if (l.kind != Label::Kind::output || l.channel != "Rec")
                fail(s, "expected a Rec output, got " + l.to_string());
            if (rec && !(*rec == l.value))
                fail(s, "two different Rec values in one round");
            rec = l.value;
            if (t.target >= ts_.num_game_states && !game_block(t.target))
                fail(s, "Rec does not lead to a game state");
            r.mass[p_.block_of(t.target)] += t.prob;
        }
        const auto& w = rec->elements();
        if (w.size() != 2 || w[0].kind() != Value::Kind::number || w[1].kind() != Value::Kind::number)
            fail(s, "malformed Rec value " + rec->to_string());
        r.weight = {w[0].as_number(), w[1].as_number()};
        out.push_back(std::move(r));
    }

    bool game_block(std::size_t state) const
    {
        for (std::size_t m : p_.members(p_.block_of(state)))
            if (m < ts_.num_game_states)
                return true;
        return false;
    }

    const ComModelTs& ts_;
    const Lts& lts_;
    const Partition& p_;
};

void add_vertices(ConTSGraph& g, const GameSpec& spec, const std::vector<std::vector<std::size_t>>& groups)
{
    for (const auto& members : groups) {
        const auto& rep = spec.states[members.front()];
        ConTSGraph::Vertex v;
        v.id = rep.id;
        v.name = rep.name;
        v.attacker_actions = rep.attacker_actions;
        v.defender_actions = rep.defender_actions;
        for (std::size_t m : members)
            v.members.push_back(spec.states[m].id);
        std::sort(v.members.begin(), v.members.end());
        g.add_vertex(std::move(v));
    }
}

// Groups of state indices ordered by least id, each sorted so that the
// least-id member comes first.
std::vector<std::vector<std::size_t>> ordered_groups(const GameSpec& spec, std::vector<std::vector<std::size_t>> groups)
{
    auto id = [&](std::size_t i) { return spec.states[i].id; };
    for (auto& g : groups)
        std::sort(g.begin(), g.end(), [&](std::size_t a, std::size_t b) { return id(a) < id(b); });
    std::sort(groups.begin(), groups.end(),
              [&](const auto& a, const auto& b) { return id(a.front()) < id(b.front()); });
    return groups;
}

} // namespace

ConTSGraph contract_to_conts(const ComModelTs& ts, const Partition& partition, const GameSpec& spec)
{
    const std::size_t n = ts.num_game_states;
    if (n != spec.states.size() || partition.num_states() != ts.lts.lts.num_states())
        throw std::invalid_argument("contract_to_conts: sizes do not match");
    std::map<std::size_t, std::vector<std::size_t>> by_block;
    for (std::size_t s = 0; s < n; ++s)
        by_block[partition.block_of(s)].push_back(s);
    std::vector<std::vector<std::size_t>> groups;
    for (const auto& [b, members] : by_block) {
        for (std::size_t m : partition.members(b))
            if (m >= n)
                throw InvariantViolation("a bisimulation block mixes game states and intermediate states");
        groups.push_back(members);
    }
    groups = ordered_groups(spec, std::move(groups));

    ConTSGraph g;
    add_vertices(g, spec, groups);
    std::map<std::size_t, std::size_t> vertex_of_block;
    for (std::size_t k = 0; k < groups.size(); ++k)
        vertex_of_block[partition.block_of(groups[k].front())] = k;

    Contractor c(ts, partition);
    for (std::size_t k = 0; k < groups.size(); ++k) {
        std::set<std::pair<std::size_t, std::size_t>> seen;
        for (auto& r : c.rounds_from(groups[k].front())) {
            if (!seen.insert({r.u, r.v}).second)
                throw InvariantViolation("two live rounds for one action pair");
            for (const auto& [block, p] : r.mass)
                g.add_edge({k, vertex_of_block.at(block), r.u, r.v, p, r.weight});
        }
    }
    return g;
}

Partition game_bisimulation(const GameSpec& spec)
{
    const std::size_t n = spec.states.size();
    using Row = std::tuple<std::size_t, std::size_t, double, double, std::vector<std::pair<std::size_t, long long>>>;
    using Sig = std::tuple<std::size_t, std::size_t, std::size_t, std::vector<Row>>;
    std::vector<std::size_t> block(n, 0);
    std::size_t count = 1;
    while (true) {
        std::map<Sig, std::size_t> ids;
        std::vector<std::size_t> next(n);
        for (std::size_t i = 0; i < n; ++i) {
            const auto& s = spec.states[i];
            std::vector<Row> rows;
            for (std::size_t u = 0; u < s.num_attacker(); ++u) {
                for (std::size_t v = 0; v < s.num_defender(); ++v) {
                    if (s.transitions[u][v].empty())
                        continue;
                    std::map<std::size_t, double> mass;
                    for (const auto& o : s.transitions[u][v])
                        mass[block[o.target]] += o.prob;
                    std::vector<std::pair<std::size_t, long long>> dist;
                    for (const auto& [b, p] : mass)
                        dist.emplace_back(b, std::llround(p * 1e12));
                    rows.emplace_back(u, v, s.payoff[u][v].attacker, s.payoff[u][v].defender, std::move(dist));
                }
            }
            Sig sig{block[i], s.num_attacker(), s.num_defender(), std::move(rows)};
            next[i] = ids.emplace(std::move(sig), ids.size()).first->second;
        }
        Partition p(next);
        for (std::size_t i = 0; i < n; ++i)
            block[i] = p.block_of(i);
        if (p.num_blocks() == count)
            return p;
        count = p.num_blocks();
    }
}

ConTSGraph conts_from_partition(const GameSpec& spec, const Partition& partition)
{
    auto groups = ordered_groups(spec, partition.blocks());
    ConTSGraph g;
    add_vertices(g, spec, groups);
    std::vector<std::size_t> vertex_of(spec.states.size());
    for (std::size_t k = 0; k < groups.size(); ++k)
        for (std::size_t m : groups[k])
            vertex_of[m] = k;
    for (std::size_t k = 0; k < groups.size(); ++k) {
        const auto& s = spec.states[groups[k].front()];
        for (std::size_t u = 0; u < s.num_attacker(); ++u) {
            for (std::size_t v = 0; v < s.num_defender(); ++v) {
                std::map<std::size_t, double> mass;
                for (const auto& o : s.transitions[u][v])
                    mass[vertex_of[o.target]] += o.prob;
                for (const auto& [dst, p] : mass)
                    g.add_edge({k, dst, u, v, p, s.payoff[u][v]});
            }
        }
    }
    return g;
}

ConTSGraph build_conts_direct(const GameSpec& spec)
{
    validate_game_spec(spec, true);
    return conts_from_partition(spec, game_bisimulation(spec));
}

SemanticPipeline build_conts_semantic(const GameSpec& spec, std::size_t max_states)
{
    SemanticPipeline out;
    out.processes = build_processes(spec);
    out.ts = build_ts(out.processes, max_states);
    out.partition = coarsest_bisimulation(out.ts.lts.lts);
    out.graph = contract_to_conts(out.ts, out.partition, spec);
    return out;
}

std::vector<std::vector<int>> merged_states(const ConTSGraph& g)
{
    std::vector<std::vector<int>> out;
    for (const auto& v : g.vertices())
        if (v.members.size() >= 2)
            out.push_back(v.members);
    return out;
}

} // namespace pvgame
