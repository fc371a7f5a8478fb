#include "pvgame/solver.hpp"

#include "pvgame/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <set>
#include <stdexcept>
#include <type_traits>

namespace pvgame {

namespace {

constexpr std::size_t npos = std::numeric_limits<std::size_t>::max();

// value(i) = gain(i) + factor(i) * value(next(i)), or gain(i) when next(i)
// is npos. Every path either ends or enters a cycle, solved in closed form.
template <class Next, class Gain, class Factor>
std::vector<double> solve_functional(std::size_t n, Next next, Gain gain, Factor factor)
{
    enum : char { unseen, on_path, done };
    std::vector<double> value(n, 0.0);
    std::vector<char> state(n, unseen);
    std::vector<std::size_t> path;
    for (std::size_t s = 0; s < n; ++s) {
        if (state[s] == done)
            continue;
        path.clear();
        std::size_t cur = s;
        while (cur != npos && state[cur] == unseen) {
            state[cur] = on_path;
            path.push_back(cur);
            cur = next(cur);
        }
        std::size_t stem_end = path.size();
        if (cur != npos && state[cur] == on_path) {
            const auto first = static_cast<std::size_t>(std::find(path.begin(), path.end(), cur) - path.begin());
            double b = 0.0;
            double f = 1.0;
            for (std::size_t k = first; k < path.size(); ++k) {
                b += f * gain(path[k]);
                f *= factor(path[k]);
            }
            if (f >= 1.0)
                throw InvariantViolation("cycle without discounting");
            value[cur] = b / (1.0 - f);
            state[cur] = done;
            for (std::size_t k = path.size(); k-- > first + 1;) {
                const std::size_t v = path[k];
                value[v] = gain(v) + factor(v) * value[next(v)];
                state[v] = done;
            }
            stem_end = first;
        }
        for (std::size_t k = stem_end; k-- > 0;) {
            const std::size_t v = path[k];
            const std::size_t nx = next(v);
            value[v] = nx == npos ? gain(v) : gain(v) + factor(v) * value[nx];
            state[v] = done;
        }
    }
    return value;
}

void check_choice(const ConTSGraph& g, const std::vector<std::size_t>& choice)
{
    if (choice.size() != g.num_vertices())
        throw std::invalid_argument("strategy must choose one edge per vertex");
    for (std::size_t i = 0; i < choice.size(); ++i) {
        if (choice[i] >= g.num_edges() || g.edge(choice[i]).src != i)
            throw std::invalid_argument("strategy edge does not leave its vertex");
    }
}

bool same_class(const ConTSGraph& g, const ConTSGraph::Edge& a, const ConTSGraph::Edge& b)
{
    return a.src == b.src && a.attacker == b.attacker && g.defender_name(a) == g.defender_name(b) && a.dst == b.dst &&
           a.prob == b.prob && a.weight == b.weight;
}

std::size_t canonical_edge(const ConTSGraph& g, std::size_t e)
{
    const auto& edge = g.edge(e);
    for (std::size_t o : g.out_edges(edge.src)) {
        if (o == e)
            return e;
        if (same_class(g, g.edge(o), edge))
            return std::min(o, e);
    }
    return e;
}

std::vector<std::size_t> reduce_ties(const ConTSGraph& g, const std::vector<std::size_t>& ties)
{
    std::vector<std::size_t> out;
    for (std::size_t e : ties) {
        const std::size_t c = canonical_edge(g, e);
        if (std::find(out.begin(), out.end(), c) == out.end())
            out.push_back(c);
    }
    std::sort(out.begin(), out.end());
    return out;
}

// Iteration picks use the tie tolerance too: with exact comparisons,
// rounding noise between tied labels can flip the pick forever.
std::size_t first_back_ind(const ConTSGraph& g, std::size_t vertex, const PairLabels& labels, double tol)
{
    return back_ind(g, vertex, labels, tol).front();
}

// The social value is a plain minimum, so it needs no tie rule; a tolerant
// pick would move it by up to the tolerance and break contraction.
double min_label(const ConTSGraph& g, std::size_t vertex, const ScalarLabels& labels)
{
    return labels[loc_so_op(g, vertex, labels, 0.0).front()];
}

// Local index of each member, npos elsewhere.
std::vector<std::size_t> local_index(const ConTSGraph& g, const AbsDag::Component& c)
{
    std::vector<std::size_t> pos(g.num_vertices(), npos);
    for (std::size_t k = 0; k < c.members.size(); ++k)
        pos[c.members[k]] = k;
    return pos;
}

// Exact values of a local choice; frozen edges end the recursion with their label.
std::vector<double> local_solve(const ConTSGraph& g, const AbsDag::Component& c, const std::vector<std::size_t>& pos,
                                const std::vector<std::size_t>& choice, const std::vector<bool>& frozen, double beta,
                                const std::vector<double>& frozen_value, const std::vector<double>& weight)
{
    return solve_functional(
        c.members.size(),
        [&](std::size_t k) {
            const std::size_t e = choice[k];
            return frozen[e] ? npos : pos[g.edge(e).dst];
        },
        [&](std::size_t k) {
            const std::size_t e = choice[k];
            return frozen[e] ? frozen_value[e] : weight[e];
        },
        [&](std::size_t k) { return beta * g.edge(choice[k]).prob; });
}

std::vector<double> project(const PairLabels& labels, bool attacker)
{
    std::vector<double> out(labels.size());
    for (std::size_t e = 0; e < labels.size(); ++e)
        out[e] = attacker ? labels[e].attacker : labels[e].defender;
    return out;
}

std::vector<double> attacker_weights(const ConTSGraph& g)
{
    std::vector<double> w(g.num_edges());
    for (std::size_t e = 0; e < g.num_edges(); ++e)
        w[e] = g.edge(e).weight.attacker;
    return w;
}

std::vector<double> defender_weights(const ConTSGraph& g)
{
    std::vector<double> w(g.num_edges());
    for (std::size_t e = 0; e < g.num_edges(); ++e)
        w[e] = g.edge(e).weight.defender;
    return w;
}

std::vector<double> social_weights(const ConTSGraph& g)
{
    std::vector<double> w(g.num_edges());
    for (std::size_t e = 0; e < g.num_edges(); ++e)
        w[e] = g.edge(e).social_weight();
    return w;
}

// Mixed-radix walk over the tie sets; calls visit(choice) for each
// combination. Returns false if the product exceeded `limit`.
template <class Visit>
bool for_each_combination(const std::vector<std::vector<std::size_t>>& ties, std::size_t limit, Visit visit)
{
    double product = 1.0;
    for (const auto& t : ties)
        product *= static_cast<double>(t.size());
    if (product == 0.0)
        return true;
    std::vector<std::size_t> digit(ties.size(), 0);
    std::vector<std::size_t> choice(ties.size());
    std::size_t count = 0;
    while (true) {
        if (count++ >= limit)
            return false;
        for (std::size_t k = 0; k < ties.size(); ++k)
            choice[k] = ties[k][digit[k]];
        visit(choice);
        std::size_t k = 0;
        while (k < ties.size() && ++digit[k] == ties[k].size())
            digit[k++] = 0;
        if (k == ties.size())
            return true;
    }
}

void monitor(IterationRecord& rec, const std::vector<double>& deltas, double beta, double slack)
{
    const std::size_t n = deltas.size();
    if (n >= 2 && deltas[n - 1] > beta * deltas[n - 2] + slack)
        ++rec.contraction_violations;
}

[[noreturn]] void fail_contraction(const IterationRecord& rec)
{
    throw InvariantViolation("value iteration on component " + std::to_string(rec.component) +
                             " is not contracting (iteration " + std::to_string(rec.iterations) + ")");
}

[[noreturn]] void fail_convergence(const IterationRecord& rec)
{
    throw InvariantViolation("value iteration on component " + std::to_string(rec.component) +
                             " did not converge within " + std::to_string(rec.iterations) + " iterations");
}

} // namespace

std::size_t Execution::start(const ConTSGraph& g) const
{
    if (!stem.empty())
        return g.edge(stem.front()).src;
    if (!cycle.empty())
        return g.edge(cycle.front()).src;
    throw std::invalid_argument("empty execution");
}

namespace {

template <class W>
double eval_execution(const Execution& exec, const ConTSGraph& g, double beta, W weight)
{
    if (exec.cycle.empty())
        throw std::invalid_argument("execution must end in a cycle");
    double b = 0.0;
    double f = 1.0;
    for (std::size_t e : exec.cycle) {
        b += f * weight(g.edge(e));
        f *= beta * g.edge(e).prob;
    }
    if (f >= 1.0)
        throw InvariantViolation("cycle without discounting");
    double v = b / (1.0 - f);
    for (std::size_t k = exec.stem.size(); k-- > 0;) {
        const auto& e = g.edge(exec.stem[k]);
        v = weight(e) + beta * e.prob * v;
    }
    return v;
}

} // namespace

PayoffPair eval_payoff(const Execution& exec, const ConTSGraph& g, double beta)
{
    return {eval_execution(exec, g, beta, [](const ConTSGraph::Edge& e) { return e.weight.attacker; }),
            eval_execution(exec, g, beta, [](const ConTSGraph::Edge& e) { return e.weight.defender; })};
}

double eval_social(const Execution& exec, const ConTSGraph& g, double beta)
{
    return eval_execution(exec, g, beta, [](const ConTSGraph::Edge& e) { return e.social_weight(); });
}

PayoffPair truncated_payoff(const Execution& exec, const ConTSGraph& g, double beta, std::size_t steps)
{
    if (exec.cycle.empty())
        throw std::invalid_argument("execution must end in a cycle");
    PayoffPair v;
    double f = 1.0;
    for (std::size_t k = 0; k < steps; ++k) {
        const std::size_t idx = k < exec.stem.size() ? exec.stem[k]
                                                     : exec.cycle[(k - exec.stem.size()) % exec.cycle.size()];
        const auto& e = g.edge(idx);
        v.attacker += f * e.weight.attacker;
        v.defender += f * e.weight.defender;
        f *= beta * e.prob;
    }
    return v;
}

Execution execution_from(const ConTSGraph& g, const std::vector<std::size_t>& choice, std::size_t start)
{
    check_choice(g, choice);
    std::vector<std::size_t> seen_at(g.num_vertices(), npos);
    std::vector<std::size_t> walk;
    std::size_t cur = start;
    while (seen_at[cur] == npos) {
        seen_at[cur] = walk.size();
        walk.push_back(choice[cur]);
        cur = g.edge(choice[cur]).dst;
    }
    Execution exec;
    exec.stem.assign(walk.begin(), walk.begin() + static_cast<std::ptrdiff_t>(seen_at[cur]));
    exec.cycle.assign(walk.begin() + static_cast<std::ptrdiff_t>(seen_at[cur]), walk.end());
    return exec;
}

std::vector<PayoffPair> policy_payoffs(const ConTSGraph& g, const std::vector<std::size_t>& choice, double beta)
{
    check_choice(g, choice);
    auto next = [&](std::size_t i) { return g.edge(choice[i]).dst; };
    auto factor = [&](std::size_t i) { return beta * g.edge(choice[i]).prob; };
    const auto a = solve_functional(
        g.num_vertices(), next, [&](std::size_t i) { return g.edge(choice[i]).weight.attacker; }, factor);
    const auto d = solve_functional(
        g.num_vertices(), next, [&](std::size_t i) { return g.edge(choice[i]).weight.defender; }, factor);
    std::vector<PayoffPair> out(g.num_vertices());
    for (std::size_t i = 0; i < out.size(); ++i)
        out[i] = {a[i], d[i]};
    return out;
}

std::vector<double> policy_social(const ConTSGraph& g, const std::vector<std::size_t>& choice, double beta)
{
    check_choice(g, choice);
    return solve_functional(
        g.num_vertices(), [&](std::size_t i) { return g.edge(choice[i]).dst; },
        [&](std::size_t i) { return g.edge(choice[i]).social_weight(); },
        [&](std::size_t i) { return beta * g.edge(choice[i]).prob; });
}

std::vector<std::size_t> back_ind(const ConTSGraph& g, std::size_t vertex, const PairLabels& labels, double tol)
{
    const auto& out = g.out_edges(vertex);
    if (out.empty())
        throw InvariantViolation("vertex " + std::to_string(g.vertex(vertex).id) + " has no outgoing edge");
    const std::size_t na = g.vertex(vertex).attacker_actions.size();
    std::vector<double> best_d(na, -std::numeric_limits<double>::infinity());
    for (std::size_t e : out)
        best_d[g.edge(e).attacker] = std::max(best_d[g.edge(e).attacker], labels[e].defender);
    std::vector<std::size_t> survivors;
    for (std::size_t e : out) {
        if (labels[e].defender >= best_d[g.edge(e).attacker] - tol)
            survivors.push_back(e);
    }
    double best_a = -std::numeric_limits<double>::infinity();
    for (std::size_t e : survivors)
        best_a = std::max(best_a, labels[e].attacker);
    std::vector<std::size_t> ties;
    for (std::size_t e : survivors) {
        if (labels[e].attacker >= best_a - tol)
            ties.push_back(e);
    }
    return ties;
}

std::vector<std::size_t> loc_so_op(const ConTSGraph& g, std::size_t vertex, const ScalarLabels& labels, double tol)
{
    const auto& out = g.out_edges(vertex);
    if (out.empty())
        throw InvariantViolation("vertex " + std::to_string(g.vertex(vertex).id) + " has no outgoing edge");
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t e : out)
        best = std::min(best, labels[e]);
    std::vector<std::size_t> ties;
    for (std::size_t e : out) {
        if (labels[e] <= best + tol)
            ties.push_back(e);
    }
    return ties;
}

void ref_n(const ConTSGraph& g, std::size_t vertex, const std::vector<PayoffPair>& pp, double beta,
           const std::vector<bool>& frozen, PairLabels& labels)
{
    for (std::size_t e : g.out_edges(vertex)) {
        if (frozen[e])
            continue;
        const auto& edge = g.edge(e);
        const double f = beta * edge.prob;
        labels[e] = {edge.weight.attacker + f * pp[edge.dst].attacker,
                     edge.weight.defender + f * pp[edge.dst].defender};
    }
}

void ref_s(const ConTSGraph& g, std::size_t vertex, const std::vector<double>& ps, double beta,
           const std::vector<bool>& frozen, ScalarLabels& labels)
{
    for (std::size_t e : g.out_edges(vertex)) {
        if (frozen[e])
            continue;
        const auto& edge = g.edge(e);
        labels[e] = edge.social_weight() + beta * edge.prob * ps[edge.dst];
    }
}

std::size_t iteration_bound(double delta0, double eps, double beta)
{
    if (!(delta0 > eps) || !(beta > 0.0) || !(beta < 1.0))
        return 0;
    return static_cast<std::size_t>(std::ceil(std::log(eps / delta0) / std::log(beta))) + 1;
}

std::vector<std::size_t> canonical_choice(const ConTSGraph& g, std::vector<std::size_t> choice)
{
    for (auto& e : choice)
        e = canonical_edge(g, e);
    return choice;
}

std::string strategy_key(const ConTSGraph& g, const std::vector<std::size_t>& choice)
{
    std::string key;
    char buf[96];
    for (std::size_t e : choice) {
        const auto& edge = g.edge(e);
        std::snprintf(buf, sizeof buf, "|%zu>%zu:%.17g:%.17g:%.17g|", edge.src, edge.dst, edge.prob,
                      edge.weight.attacker, edge.weight.defender);
        key += g.attacker_name(edge);
        key += '/';
        key += g.defender_name(edge);
        key += buf;
    }
    return key;
}

namespace {

// Report key restricted to a component's members; certified local
// strategies with equal keys are interchangeable.
bool fresh_local(const ConTSGraph& g, std::set<std::string>& seen, const std::vector<std::size_t>& choice)
{
    return seen.insert(strategy_key(g, canonical_choice(g, choice))).second;
}

} // namespace

PairLabels pre_pro(const ConTSGraph& g, const AbsDag& abs, std::size_t component,
                   const std::vector<std::optional<PayoffPair>>& solved, double beta, std::vector<bool>& frozen)
{
    PairLabels labels(g.num_edges());
    frozen.assign(g.num_edges(), false);
    for (std::size_t v : abs.components.at(component).members) {
        for (std::size_t e : g.out_edges(v)) {
            const auto& edge = g.edge(e);
            labels[e] = edge.weight;
            if (abs.component_of[edge.dst] == component)
                continue;
            const auto& succ = solved.at(edge.dst);
            if (!succ)
                throw InvariantViolation("successor vertex " + std::to_string(g.vertex(edge.dst).id) +
                                         " processed after its predecessor");
            const double f = beta * edge.prob;
            labels[e] = {edge.weight.attacker + f * succ->attacker, edge.weight.defender + f * succ->defender};
            frozen[e] = true;
        }
    }
    return labels;
}

ScalarLabels pre_pro_s(const ConTSGraph& g, const AbsDag& abs, std::size_t component,
                       const std::vector<std::optional<double>>& solved, double beta, std::vector<bool>& frozen)
{
    ScalarLabels labels(g.num_edges(), 0.0);
    frozen.assign(g.num_edges(), false);
    for (std::size_t v : abs.components.at(component).members) {
        for (std::size_t e : g.out_edges(v)) {
            const auto& edge = g.edge(e);
            labels[e] = edge.social_weight();
            if (abs.component_of[edge.dst] == component)
                continue;
            const auto& succ = solved.at(edge.dst);
            if (!succ)
                throw InvariantViolation("successor vertex " + std::to_string(g.vertex(edge.dst).id) +
                                         " processed after its predecessor");
            labels[e] = edge.social_weight() + beta * edge.prob * *succ;
            frozen[e] = true;
        }
    }
    return labels;
}

LocalResult nes_in_leave(const ConTSGraph& g, const AbsDag& abs, std::size_t component, PairLabels labels,
                         const std::vector<bool>& frozen, double beta, const SolverOptions& opts)
{
    const auto& comp = abs.components.at(component);
    LocalResult res;
    res.record.component = component;
    res.record.mode = "nes";
    std::vector<PayoffPair> pp(g.num_vertices());
    std::vector<PayoffPair> next(g.num_vertices());
    while (true) {
        if (res.record.iterations >= opts.max_iter)
            fail_convergence(res.record);
        for (std::size_t v : comp.members)
            ref_n(g, v, pp, beta, frozen, labels);
        double da = 0.0;
        double dd = 0.0;
        for (std::size_t v : comp.members) {
            next[v] = labels[first_back_ind(g, v, labels, opts.tie_tolerance)];
            da = std::max(da, std::abs(next[v].attacker - pp[v].attacker));
            dd = std::max(dd, std::abs(next[v].defender - pp[v].defender));
        }
        ++res.record.iterations;
        res.record.delta_attacker.push_back(da);
        res.record.delta_defender.push_back(dd);
        const std::size_t before = res.record.contraction_violations;
        monitor(res.record, res.record.delta_attacker, beta, opts.contraction_slack);
        monitor(res.record, res.record.delta_defender, beta, opts.contraction_slack);
        if (res.record.contraction_violations > before)
            res.record.contraction_violations = before + 1;
        if (res.record.contraction_violations > 0 && opts.abort_on_contraction_violation)
            fail_contraction(res.record);
        for (std::size_t v : comp.members)
            pp[v] = next[v];
        if (da < opts.epsilon_fix && dd < opts.epsilon_fix)
            break;
    }
    res.record.converged = true;
    res.record.iteration_bound = iteration_bound(
        std::max(res.record.delta_attacker.front(), res.record.delta_defender.front()), opts.epsilon_fix, beta);

    for (std::size_t v : comp.members)
        ref_n(g, v, pp, beta, frozen, labels);
    std::vector<std::vector<std::size_t>> ties;
    for (std::size_t v : comp.members)
        ties.push_back(reduce_ties(g, back_ind(g, v, labels, opts.tie_tolerance)));

    const auto pos = local_index(g, comp);
    const auto fa = project(labels, true);
    const auto fd = project(labels, false);
    const auto wa = attacker_weights(g);
    const auto wd = defender_weights(g);
    PairLabels q = labels;
    std::set<std::string> seen;
    const bool complete = for_each_combination(ties, opts.max_combinations, [&](const std::vector<std::size_t>& ch) {
        const auto va = local_solve(g, comp, pos, ch, frozen, beta, fa, wa);
        const auto vd = local_solve(g, comp, pos, ch, frozen, beta, fd, wd);
        std::vector<PayoffPair> exact(g.num_vertices());
        for (std::size_t k = 0; k < comp.members.size(); ++k)
            exact[comp.members[k]] = {va[k], vd[k]};
        for (std::size_t v : comp.members)
            ref_n(g, v, exact, beta, frozen, q);
        for (std::size_t k = 0; k < comp.members.size(); ++k) {
            const auto t = back_ind(g, comp.members[k], q, opts.tie_tolerance);
            if (std::find(t.begin(), t.end(), ch[k]) == t.end())
                return;
        }
        if (!fresh_local(g, seen, ch))
            return;
        LocalStrategy s;
        s.choice = ch;
        for (std::size_t k = 0; k < comp.members.size(); ++k)
            s.payoff.push_back({va[k], vd[k]});
        s.social.assign(comp.members.size(), 0.0);
        res.strategies.push_back(std::move(s));
    });
    res.truncated = !complete;
    return res;
}

LocalResult nes_in_non_leave(const ConTSGraph& g, const AbsDag& abs, std::size_t component,
                             const std::vector<std::optional<PayoffPair>>& solved, double beta,
                             const SolverOptions& opts)
{
    std::vector<bool> frozen;
    PairLabels labels = pre_pro(g, abs, component, solved, beta, frozen);
    return nes_in_leave(g, abs, component, std::move(labels), frozen, beta, opts);
}

LocalResult sos_in_leave(const ConTSGraph& g, const AbsDag& abs, std::size_t component, ScalarLabels labels,
                         const std::vector<bool>& frozen, double beta, const SolverOptions& opts)
{
    const auto& comp = abs.components.at(component);
    LocalResult res;
    res.record.component = component;
    res.record.mode = "sos";
    std::vector<double> ps(g.num_vertices(), 0.0);
    std::vector<double> next(g.num_vertices(), 0.0);
    while (true) {
        if (res.record.iterations >= opts.max_iter)
            fail_convergence(res.record);
        for (std::size_t v : comp.members)
            ref_s(g, v, ps, beta, frozen, labels);
        double d = 0.0;
        for (std::size_t v : comp.members) {
            next[v] = min_label(g, v, labels);
            d = std::max(d, std::abs(next[v] - ps[v]));
        }
        ++res.record.iterations;
        res.record.delta_attacker.push_back(d);
        monitor(res.record, res.record.delta_attacker, beta, opts.contraction_slack);
        if (res.record.contraction_violations > 0 && opts.abort_on_contraction_violation)
            fail_contraction(res.record);
        for (std::size_t v : comp.members)
            ps[v] = next[v];
        if (d < opts.epsilon_fix)
            break;
    }
    res.record.converged = true;
    res.record.iteration_bound = iteration_bound(res.record.delta_attacker.front(), opts.epsilon_fix, beta);

    for (std::size_t v : comp.members)
        ref_s(g, v, ps, beta, frozen, labels);
    std::vector<std::vector<std::size_t>> ties;
    for (std::size_t v : comp.members)
        ties.push_back(reduce_ties(g, loc_so_op(g, v, labels, opts.tie_tolerance)));

    const auto pos = local_index(g, comp);
    const auto ws = social_weights(g);
    ScalarLabels q = labels;
    std::set<std::string> seen;
    const bool complete = for_each_combination(ties, opts.max_combinations, [&](const std::vector<std::size_t>& ch) {
        const auto vs = local_solve(g, comp, pos, ch, frozen, beta, labels, ws);
        std::vector<double> exact(g.num_vertices(), 0.0);
        for (std::size_t k = 0; k < comp.members.size(); ++k)
            exact[comp.members[k]] = vs[k];
        for (std::size_t v : comp.members)
            ref_s(g, v, exact, beta, frozen, q);
        for (std::size_t k = 0; k < comp.members.size(); ++k) {
            const auto t = loc_so_op(g, comp.members[k], q, opts.tie_tolerance);
            if (std::find(t.begin(), t.end(), ch[k]) == t.end())
                return;
        }
        if (!fresh_local(g, seen, ch))
            return;
        LocalStrategy s;
        s.choice = ch;
        s.social = vs;
        s.payoff.assign(comp.members.size(), {});
        res.strategies.push_back(std::move(s));
    });
    res.truncated = !complete;
    return res;
}

LocalResult sos_in_non_leave(const ConTSGraph& g, const AbsDag& abs, std::size_t component,
                             const std::vector<std::optional<double>>& solved, double beta,
                             const SolverOptions& opts)
{
    std::vector<bool> frozen;
    ScalarLabels labels = pre_pro_s(g, abs, component, solved, beta, frozen);
    return sos_in_leave(g, abs, component, std::move(labels), frozen, beta, opts);
}

namespace {

template <class Value, class Solve>
SolveResult solve_all(const AbsDag& abs, const ConTSGraph& g, double beta, const SolverOptions& opts, Solve solve)
{
    if (!(beta > 0.0 && beta < 1.0))
        throw std::invalid_argument("discount factor must lie in (0, 1)");
    struct Branch {
        std::vector<std::size_t> choice;
        std::vector<std::optional<Value>> value;
        std::string lineage;
    };
    SolveResult out;
    std::vector<Branch> branches(1);
    branches[0].choice.assign(g.num_vertices(), npos);
    branches[0].value.assign(g.num_vertices(), std::nullopt);
    for (std::size_t c : processing_order(abs, g)) {
        const auto& comp = abs.components[c];
        std::vector<Branch> grown;
        bool full = false;
        for (const auto& b : branches) {
            LocalResult local = solve(c, b.value);
            out.runs.push_back(local.record);
            if (local.truncated) {
                out.truncated = true;
                out.warnings.push_back("tie combinations on component D" + std::to_string(c) + " exceed " +
                                       std::to_string(opts.max_combinations));
            }
            if (local.strategies.empty())
                out.warnings.push_back("no certified strategy on component D" + std::to_string(c));
            for (std::size_t j = 0; j < local.strategies.size(); ++j) {
                if (grown.size() >= opts.tie_cap) {
                    full = true;
                    break;
                }
                Branch nb = b;
                const auto& ls = local.strategies[j];
                for (std::size_t k = 0; k < comp.members.size(); ++k) {
                    const std::size_t v = comp.members[k];
                    nb.choice[v] = ls.choice[k];
                    if constexpr (std::is_same_v<Value, double>)
                        nb.value[v] = ls.social[k];
                    else
                        nb.value[v] = ls.payoff[k];
                }
                if (!nb.lineage.empty())
                    nb.lineage += ",";
                nb.lineage += "D" + std::to_string(c) + ":" + std::to_string(j);
                grown.push_back(std::move(nb));
            }
            if (full)
                break;
        }
        if (full) {
            out.truncated = true;
            out.warnings.push_back("strategy branches truncated at tie cap " + std::to_string(opts.tie_cap));
        }
        branches = std::move(grown);
    }
    std::set<std::string> seen;
    for (const auto& b : branches) {
        StrategyMap s;
        s.choice = canonical_choice(g, b.choice);
        if (!seen.insert(strategy_key(g, s.choice)).second)
            continue;
        s.payoff = policy_payoffs(g, s.choice, beta);
        s.social = policy_social(g, s.choice, beta);
        s.lineage = b.lineage;
        out.strategies.push_back(std::move(s));
    }
    return out;
}

} // namespace

SolveResult alg_nes(const AbsDag& abs, const ConTSGraph& g, double beta, const SolverOptions& opts)
{
    return solve_all<PayoffPair>(
        abs, g, beta, opts,
        [&](std::size_t c, const std::vector<std::optional<PayoffPair>>& solved) {
            return nes_in_non_leave(g, abs, c, solved, beta, opts);
        });
}

SolveResult alg_sos(const AbsDag& abs, const ConTSGraph& g, double beta, const SolverOptions& opts)
{
    return solve_all<double>(
        abs, g, beta, opts,
        [&](std::size_t c, const std::vector<std::optional<double>>& solved) {
            return sos_in_non_leave(g, abs, c, solved, beta, opts);
        });
}

bool certify_nes(const ConTSGraph& g, const std::vector<std::size_t>& choice, double beta, double tol)
{
    check_choice(g, choice);
    const auto pp = policy_payoffs(g, choice, beta);
    PairLabels q(g.num_edges());
    const std::vector<bool> none(g.num_edges(), false);
    for (std::size_t v = 0; v < g.num_vertices(); ++v)
        ref_n(g, v, pp, beta, none, q);
    for (std::size_t v = 0; v < g.num_vertices(); ++v) {
        const auto t = back_ind(g, v, q, tol);
        if (std::find(t.begin(), t.end(), choice[v]) == t.end())
            return false;
    }
    return true;
}

bool certify_sos(const ConTSGraph& g, const std::vector<std::size_t>& choice, double beta, double tol)
{
    check_choice(g, choice);
    const auto ps = policy_social(g, choice, beta);
    ScalarLabels q(g.num_edges(), 0.0);
    const std::vector<bool> none(g.num_edges(), false);
    for (std::size_t v = 0; v < g.num_vertices(); ++v)
        ref_s(g, v, ps, beta, none, q);
    for (std::size_t v = 0; v < g.num_vertices(); ++v) {
        const auto t = loc_so_op(g, v, q, tol);
        if (std::find(t.begin(), t.end(), choice[v]) == t.end())
            return false;
    }
    return true;
}

} // namespace pvgame
