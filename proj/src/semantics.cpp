#include "pvgame/semantics.hpp"

#include "pvgame/errors.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <stdexcept>

namespace pvgame {

std::string Label::to_string() const
{
    switch (kind) {
    case Kind::tau:
        return "tau";
    case Kind::input:
        return value.is_unit() ? channel : channel + "(" + value.to_string() + ")";
    case Kind::output:
        return value.is_unit() ? "'" + channel : "'" + channel + "(" + value.to_string() + ")";
    }
    return {};
}

namespace {

// Input transitions stay symbolic until a value is supplied, so that [Com]
// can instantiate them with the partner's output.
struct PendingInput {
    std::string channel;
    double prob;
    std::function<Term(const Value&)> resume;
};

struct Step {
    std::vector<Transition> concrete; // outputs and taus
    std::vector<PendingInput> inputs;
};

class Deriver {
public:
    Deriver(const DefinitionEnv& env, const SemanticsOptions& opts) : env_(env), opts_(opts) {}

    Step derive(const Term& t, std::size_t depth)
    {
        using K = ProcessNode::Kind;
        Step out;
        switch (t->kind()) {
        case K::nil:
            break;
        case K::sum:
            for (const auto& g : t->sum().groups) {
                for (const auto& b : g.branches) {
                    switch (g.action.kind()) {
                    case ActionLabel::Kind::tau:
                        out.concrete.push_back({t, Label::tau(), b.prob, b.next});
                        break;
                    case ActionLabel::Kind::output:
                        out.concrete.push_back(
                            {t, Label::output(g.action.channel(), g.action.value().evaluate()), b.prob, b.next});
                        break;
                    case ActionLabel::Kind::input: {
                        Term next = b.next;
                        std::string var = g.action.variable();
                        out.inputs.push_back({g.action.channel(), b.prob, [next, var](const Value& v) {
                                                  return substitute(next, var, v);
                                              }});
                        break;
                    }
                    }
                }
            }
            break;
        case K::parallel: {
            const Term& l = t->parallel().left;
            const Term& r = t->parallel().right;
            Step ls = derive(l, depth);
            Step rs = derive(r, depth);
            for (const auto& tr : ls.concrete)
                out.concrete.push_back({t, tr.label, tr.prob, parallel(tr.target, r)});
            for (const auto& tr : rs.concrete)
                out.concrete.push_back({t, tr.label, tr.prob, parallel(l, tr.target)});
            for (const auto& in : ls.inputs) {
                auto resume = in.resume;
                out.inputs.push_back(
                    {in.channel, in.prob, [resume, r](const Value& v) { return parallel(resume(v), r); }});
            }
            for (const auto& in : rs.inputs) {
                auto resume = in.resume;
                out.inputs.push_back(
                    {in.channel, in.prob, [resume, l](const Value& v) { return parallel(l, resume(v)); }});
            }
            // [Com]: an output on one side meets an input on the same channel.
            for (const auto& o : ls.concrete) {
                if (o.label.kind != Label::Kind::output)
                    continue;
                for (const auto& in : rs.inputs) {
                    if (in.channel == o.label.channel)
                        out.concrete.push_back(
                            {t, Label::tau(), o.prob * in.prob, parallel(o.target, in.resume(o.label.value))});
                }
            }
            for (const auto& o : rs.concrete) {
                if (o.label.kind != Label::Kind::output)
                    continue;
                for (const auto& in : ls.inputs) {
                    if (in.channel == o.label.channel)
                        out.concrete.push_back(
                            {t, Label::tau(), o.prob * in.prob, parallel(in.resume(o.label.value), o.target)});
                }
            }
            break;
        }
        case K::restrict: {
            const auto& res = t->restriction();
            auto hidden = [&](const std::string& c) {
                return std::binary_search(res.channels.begin(), res.channels.end(), c);
            };
            Step inner = derive(res.body, depth);
            const auto chans = res.channels;
            for (const auto& tr : inner.concrete) {
                if (tr.label.kind != Label::Kind::tau && hidden(tr.label.channel))
                    continue;
                out.concrete.push_back({t, tr.label, tr.prob, restrict(tr.target, chans)});
            }
            for (const auto& in : inner.inputs) {
                if (hidden(in.channel))
                    continue;
                auto resume = in.resume;
                out.inputs.push_back(
                    {in.channel, in.prob, [resume, chans](const Value& v) { return restrict(resume(v), chans); }});
            }
            break;
        }
        case K::conditional: {
            const auto& c = t->conditional();
            Step inner = derive(c.guard.evaluate() ? c.then_branch : c.else_branch, depth);
            for (auto& tr : inner.concrete)
                tr.source = t;
            out = std::move(inner);
            break;
        }
        case K::call: {
            const auto& c = t->call();
            const Definition* d = env_.find(c.name);
            if (d == nullptr)
                throw SemanticError("call to undefined identifier '" + c.name + "'");
            if (d->params.size() != c.args.size())
                throw SemanticError("identifier '" + c.name + "' called with wrong number of arguments");
            if (depth >= opts_.max_unfold_depth)
                throw SemanticError("unguarded recursion through '" + c.name + "'");
            Substitution s;
            for (std::size_t i = 0; i < c.args.size(); ++i)
                s[d->params[i]] = c.args[i].evaluate();
            Step inner = derive(substitute(d->body, s), depth + 1);
            for (auto& tr : inner.concrete)
                tr.source = t;
            out = std::move(inner);
            break;
        }
        }
        return out;
    }

private:
    const DefinitionEnv& env_;
    const SemanticsOptions& opts_;
};

bool is_nil(const Term& t)
{
    return t->kind() == ProcessNode::Kind::nil;
}

} // namespace

std::vector<Transition> derive_transitions(const Term& term, const DefinitionEnv& env, std::span<const Value> stimuli,
                                           const SemanticsOptions& options)
{
    Deriver d(env, options);
    Step s = d.derive(term, 0);
    std::vector<Transition> out = std::move(s.concrete);
    for (const auto& in : s.inputs) {
        for (const auto& v : stimuli)
            out.push_back({term, Label::input(in.channel, v), in.prob, in.resume(v)});
    }
    for (auto& t : out)
        t.source = term;
    return out;
}

double mu(const Term& term, const DefinitionEnv& env, const Label& label, std::span<const Term> targets,
          std::span<const Value> stimuli, const SemanticsOptions& options)
{
    std::vector<std::string> keys;
    keys.reserve(targets.size());
    for (const auto& t : targets)
        keys.push_back(canonical_key(t));
    double total = 0.0;
    for (const auto& tr : derive_transitions(term, env, stimuli, options)) {
        if (!(tr.label == label))
            continue;
        const std::string k = canonical_key(tr.target);
        if (std::find(keys.begin(), keys.end(), k) != keys.end())
            total += tr.prob;
    }
    return total;
}

Term normalize(const Term& t)
{
    using K = ProcessNode::Kind;
    switch (t->kind()) {
    case K::parallel: {
        Term l = normalize(t->parallel().left);
        Term r = normalize(t->parallel().right);
        if (is_nil(l))
            return r;
        if (is_nil(r))
            return l;
        if (l == t->parallel().left && r == t->parallel().right)
            return t;
        return parallel(l, r);
    }
    case K::restrict: {
        Term b = normalize(t->restriction().body);
        if (is_nil(b))
            return b;
        if (b == t->restriction().body)
            return t;
        return restrict(b, t->restriction().channels);
    }
    default:
        return t;
    }
}

ExploredLts explore(std::span<const Term> roots, const DefinitionEnv& env, std::span<const Value> stimuli,
                    const ExploreOptions& options)
{
    ExploredLts out;
    std::deque<std::size_t> queue;
    auto intern = [&](Term t) -> std::size_t {
        if (options.normalize_targets)
            t = normalize(t);
        std::string key = canonical_key(t);
        auto it = out.index.find(key);
        if (it != out.index.end())
            return it->second;
        if (out.states.size() >= options.max_states)
            throw CapExceeded("reachable state count exceeds cap of " + std::to_string(options.max_states));
        const std::size_t id = out.lts.add_state();
        out.states.push_back(std::move(t));
        out.index.emplace(std::move(key), id);
        queue.push_back(id);
        return id;
    };
    for (std::size_t i = 0; i < roots.size(); ++i) {
        if (intern(roots[i]) != i)
            throw std::invalid_argument("explore: roots must be pairwise distinct");
    }
    while (!queue.empty()) {
        const std::size_t s = queue.front();
        queue.pop_front();
        const Term src = out.states[s];
        for (auto& tr : derive_transitions(src, env, stimuli, options.semantics)) {
            const std::size_t dst = intern(tr.target);
            const std::size_t label = out.lts.intern_label(tr.label.to_string());
            if (label == out.labels.size())
                out.labels.push_back(tr.label);
            out.lts.add_transition(s, label, tr.prob, dst);
        }
    }
    return out;
}

} // namespace pvgame
