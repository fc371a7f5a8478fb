#include "pvgame/process.hpp"

#include "pvgame/errors.hpp"

#include <algorithm>
#include <cmath>

namespace pvgame {

// ---------------------------------------------------------------------------
// ActionLabel

ActionLabel ActionLabel::input(std::string channel, std::string variable)
{
    ActionLabel a;
    a.kind_ = Kind::input;
    a.channel_ = std::move(channel);
    a.variable_ = std::move(variable);
    return a;
}

ActionLabel ActionLabel::output(std::string channel, ValueExpr value)
{
    ActionLabel a;
    a.kind_ = Kind::output;
    a.channel_ = std::move(channel);
    a.value_ = std::move(value);
    return a;
}

ActionLabel ActionLabel::tau()
{
    return ActionLabel{};
}

ChannelName ActionLabel::channel_name() const
{
    return {channel_, kind_ == Kind::output ? ChannelName::Polarity::co : ChannelName::Polarity::plain};
}

std::string ActionLabel::to_string(const std::map<std::string, std::string>* bound) const
{
    switch (kind_) {
    case Kind::tau:
        return "tau";
    case Kind::input: {
        std::string var = variable_;
        if (bound != nullptr) {
            auto it = bound->find(variable_);
            if (it != bound->end())
                var = it->second;
        }
        return channel_ + "(" + var + ")";
    }
    case Kind::output:
        if (value_.is_constant() && value_.constant().is_unit())
            return "'" + channel_;
        if (value_.is_tuple())
            return "'" + channel_ + "(" + value_.to_string(bound) + ")";
        return "'" + channel_ + "(" + value_.to_string(bound) + ")";
    }
    return {};
}

// ---------------------------------------------------------------------------
// Constructors

namespace {

Term make(ProcessNode::Node n)
{
    return std::make_shared<const ProcessNode>(std::move(n));
}

const Term& nil_singleton()
{
    static const Term t = make(ProcessNode::Nil{});
    return t;
}

} // namespace

Term nil()
{
    return nil_singleton();
}

Term sum(std::vector<Group> groups)
{
    std::vector<std::string> problems;
    for (std::size_t i = 0; i < groups.size(); ++i) {
        const auto& g = groups[i];
        const std::string where = "summand group " + std::to_string(i) + " (" + g.action.to_string() + ")";
        if (g.branches.empty()) {
            problems.push_back(where + ": group has no branches");
            continue;
        }
        double total = 0.0;
        for (const auto& b : g.branches) {
            if (!(b.prob > 0.0) || b.prob > 1.0 + epsilon_sum)
                problems.push_back(where + ": probability " + format_number(b.prob) + " outside (0,1]");
            if (!b.next)
                problems.push_back(where + ": null continuation");
            total += b.prob;
        }
        if (std::fabs(total - 1.0) > epsilon_sum)
            problems.push_back(where + ": probability-sum violation, branches sum to " + format_number(total));
        for (std::size_t j = 0; j < i; ++j) {
            if (groups[j].action == g.action)
                problems.push_back(where + ": duplicate action prefix");
        }
    }
    if (!problems.empty())
        throw ValidationError(std::move(problems));
    if (groups.empty())
        return nil();
    return make(ProcessNode::Sum{std::move(groups)});
}

Term prefix(ActionLabel action, Term next)
{
    return sum({Group{std::move(action), {Branch{1.0, std::move(next)}}}});
}

Term parallel(Term left, Term right)
{
    return make(ProcessNode::Parallel{std::move(left), std::move(right)});
}

Term restrict(Term body, std::vector<std::string> channels)
{
    std::sort(channels.begin(), channels.end());
    channels.erase(std::unique(channels.begin(), channels.end()), channels.end());
    return make(ProcessNode::Restrict{std::move(body), std::move(channels)});
}

Term conditional(BoolExpr guard, Term then_branch, Term else_branch)
{
    return make(ProcessNode::Conditional{std::move(guard), std::move(then_branch), std::move(else_branch)});
}

Term call(std::string name, std::vector<ValueExpr> args)
{
    return make(ProcessNode::Call{std::move(name), std::move(args)});
}

// ---------------------------------------------------------------------------
// Equality

bool structurally_equal(const Term& lhs, const Term& rhs)
{
    if (lhs == rhs)
        return true;
    if (!lhs || !rhs || lhs->kind() != rhs->kind())
        return false;
    using K = ProcessNode::Kind;
    switch (lhs->kind()) {
    case K::nil:
        return true;
    case K::sum: {
        const auto& a = lhs->sum().groups;
        const auto& b = rhs->sum().groups;
        if (a.size() != b.size())
            return false;
        for (std::size_t i = 0; i < a.size(); ++i) {
            if (!(a[i].action == b[i].action) || a[i].branches.size() != b[i].branches.size())
                return false;
            for (std::size_t j = 0; j < a[i].branches.size(); ++j) {
                if (a[i].branches[j].prob != b[i].branches[j].prob
                    || !structurally_equal(a[i].branches[j].next, b[i].branches[j].next))
                    return false;
            }
        }
        return true;
    }
    case K::parallel:
        return structurally_equal(lhs->parallel().left, rhs->parallel().left)
            && structurally_equal(lhs->parallel().right, rhs->parallel().right);
    case K::restrict:
        return lhs->restriction().channels == rhs->restriction().channels
            && structurally_equal(lhs->restriction().body, rhs->restriction().body);
    case K::conditional:
        return lhs->conditional().guard == rhs->conditional().guard
            && structurally_equal(lhs->conditional().then_branch, rhs->conditional().then_branch)
            && structurally_equal(lhs->conditional().else_branch, rhs->conditional().else_branch);
    case K::call:
        return lhs->call().name == rhs->call().name && lhs->call().args == rhs->call().args;
    }
    return false;
}

// ---------------------------------------------------------------------------
// Printing

namespace {

class Printer {
public:
    explicit Printer(bool canonical) : canonical_(canonical) {}

    std::string process(const Term& t) { return print_par(t); }

private:
    using K = ProcessNode::Kind;

    const std::map<std::string, std::string>* bound() const { return canonical_ ? &bound_ : nullptr; }

    static bool single_prefix(const Term& t)
    {
        return t->kind() == K::sum && t->sum().groups.size() == 1 && t->sum().groups[0].branches.size() == 1
            && t->sum().groups[0].branches[0].prob == 1.0;
    }

    std::string print_par(const Term& t)
    {
        if (t->kind() == K::parallel) {
            const auto& p = t->parallel();
            std::string right = print_restr(p.right);
            if (p.right->kind() == K::parallel)
                right = "(" + right + ")";
            return print_par(p.left) + " | " + right;
        }
        return print_restr(t);
    }

    std::string print_restr(const Term& t)
    {
        if (t->kind() == K::restrict) {
            const auto& r = t->restriction();
            std::string body;
            const auto bk = r.body->kind();
            if (bk == K::nil || bk == K::call || bk == K::restrict)
                body = print_restr(r.body);
            else
                body = "(" + print_par(r.body) + ")";
            std::string chans;
            for (std::size_t i = 0; i < r.channels.size(); ++i)
                chans += (i ? ", " : "") + r.channels[i];
            return body + "\\{" + chans + "}";
        }
        return print_prim(t);
    }

    std::string print_prim(const Term& t)
    {
        switch (t->kind()) {
        case K::nil:
            return "Nil";
        case K::call:
            return print_call(t->call());
        case K::sum:
            return print_sum(t->sum());
        case K::conditional: {
            const auto& c = t->conditional();
            return "if " + c.guard.to_string(bound()) + " then " + print_cont(c.then_branch) + " else "
                + print_cont(c.else_branch);
        }
        case K::parallel:
        case K::restrict:
            return "(" + print_par(t) + ")";
        }
        return {};
    }

    std::string print_cont(const Term& t)
    {
        const auto k = t->kind();
        if (k == K::nil || k == K::call || single_prefix(t))
            return print_prim(t);
        return "(" + print_par(t) + ")";
    }

    std::string print_call(const ProcessNode::Call& c)
    {
        if (c.args.empty())
            return c.name;
        std::string out = c.name + "(";
        for (std::size_t i = 0; i < c.args.size(); ++i)
            out += (i ? ", " : "") + c.args[i].to_string(bound());
        return out + ")";
    }

    std::string print_sum(const ProcessNode::Sum& s)
    {
        std::string out;
        bool first = true;
        for (const auto& g : s.groups) {
            const bool bracket = !(g.branches.size() == 1 && g.branches[0].prob == 1.0);
            for (const auto& b : g.branches) {
                if (!first)
                    out += " + ";
                first = false;
                if (bracket)
                    out += "[" + format_number(b.prob) + "]";
                out += print_summand(g.action, b.next);
            }
        }
        return out;
    }

    std::string print_summand(const ActionLabel& a, const Term& next)
    {
        if (a.kind() != ActionLabel::Kind::input || !canonical_)
            return a.to_string(bound()) + "." + print_cont(next);
        // Rename the binder to its depth so alpha-equivalent terms agree.
        const std::string fresh = "%" + std::to_string(depth_);
        auto saved = bound_.find(a.variable());
        std::optional<std::string> previous;
        if (saved != bound_.end())
            previous = saved->second;
        bound_[a.variable()] = fresh;
        ++depth_;
        std::string out = a.channel() + "(" + fresh + ")." + print_cont(next);
        --depth_;
        if (previous)
            bound_[a.variable()] = *previous;
        else
            bound_.erase(a.variable());
        return out;
    }

    bool canonical_;
    std::map<std::string, std::string> bound_;
    int depth_ = 0;
};

} // namespace

std::string to_string(const Term& t)
{
    return Printer(false).process(t);
}

std::string canonical_key(const Term& t)
{
    return Printer(true).process(t);
}

bool alpha_equivalent(const Term& lhs, const Term& rhs)
{
    return canonical_key(lhs) == canonical_key(rhs);
}

// ---------------------------------------------------------------------------
// Substitution

Term substitute(const Term& t, const Substitution& s)
{
    if (s.empty())
        return t;
    using K = ProcessNode::Kind;
    switch (t->kind()) {
    case K::nil:
        return t;
    case K::sum: {
        std::vector<Group> groups;
        groups.reserve(t->sum().groups.size());
        for (const auto& g : t->sum().groups) {
            Group out{g.action, {}};
            const Substitution* inner = &s;
            Substitution shadowed;
            if (g.action.kind() == ActionLabel::Kind::input && s.count(g.action.variable())) {
                shadowed = s;
                shadowed.erase(g.action.variable());
                inner = &shadowed;
            } else if (g.action.kind() == ActionLabel::Kind::output) {
                out.action = ActionLabel::output(g.action.channel(), g.action.value().substitute(s));
            }
            for (const auto& b : g.branches)
                out.branches.push_back({b.prob, substitute(b.next, *inner)});
            groups.push_back(std::move(out));
        }
        return sum(std::move(groups));
    }
    case K::parallel:
        return parallel(substitute(t->parallel().left, s), substitute(t->parallel().right, s));
    case K::restrict:
        return restrict(substitute(t->restriction().body, s), t->restriction().channels);
    case K::conditional: {
        const auto& c = t->conditional();
        return conditional(c.guard.substitute(s), substitute(c.then_branch, s), substitute(c.else_branch, s));
    }
    case K::call: {
        std::vector<ValueExpr> args;
        for (const auto& a : t->call().args)
            args.push_back(a.substitute(s));
        return call(t->call().name, std::move(args));
    }
    }
    return t;
}

Term substitute(const Term& t, const std::string& var, const Value& value)
{
    return substitute(t, Substitution{{var, value}});
}

namespace {

void collect_free(const ValueExpr& e, const std::set<std::string>& bound, std::set<std::string>& out)
{
    if (e.is_variable()) {
        if (!bound.count(e.variable_name()))
            out.insert(e.variable_name());
    } else if (e.is_tuple()) {
        for (const auto& x : e.elements())
            collect_free(x, bound, out);
    }
}

void collect_free(const BoolExpr& b, const std::set<std::string>& bound, std::set<std::string>& out)
{
    using Op = BoolExpr::Op;
    switch (b.op()) {
    case Op::literal:
        return;
    case Op::eq:
    case Op::ne:
        collect_free(b.lhs_value(), bound, out);
        collect_free(b.rhs_value(), bound, out);
        return;
    case Op::not_:
        collect_free(b.lhs(), bound, out);
        return;
    case Op::and_:
    case Op::or_:
        collect_free(b.lhs(), bound, out);
        collect_free(b.rhs(), bound, out);
        return;
    }
}

void collect_free(const Term& t, std::set<std::string>& bound, std::set<std::string>& out)
{
    using K = ProcessNode::Kind;
    switch (t->kind()) {
    case K::nil:
        return;
    case K::sum:
        for (const auto& g : t->sum().groups) {
            const bool binds = g.action.kind() == ActionLabel::Kind::input;
            if (g.action.kind() == ActionLabel::Kind::output)
                collect_free(g.action.value(), bound, out);
            const bool fresh = binds && bound.insert(g.action.variable()).second;
            for (const auto& b : g.branches)
                collect_free(b.next, bound, out);
            if (fresh)
                bound.erase(g.action.variable());
        }
        return;
    case K::parallel:
        collect_free(t->parallel().left, bound, out);
        collect_free(t->parallel().right, bound, out);
        return;
    case K::restrict:
        collect_free(t->restriction().body, bound, out);
        return;
    case K::conditional:
        collect_free(t->conditional().guard, bound, out);
        collect_free(t->conditional().then_branch, bound, out);
        collect_free(t->conditional().else_branch, bound, out);
        return;
    case K::call:
        for (const auto& a : t->call().args)
            collect_free(a, bound, out);
        return;
    }
}

void check_calls(const Term& t, const DefinitionEnv& env, std::vector<std::string>& problems)
{
    using K = ProcessNode::Kind;
    switch (t->kind()) {
    case K::nil:
        return;
    case K::sum:
        for (const auto& g : t->sum().groups)
            for (const auto& b : g.branches)
                check_calls(b.next, env, problems);
        return;
    case K::parallel:
        check_calls(t->parallel().left, env, problems);
        check_calls(t->parallel().right, env, problems);
        return;
    case K::restrict:
        check_calls(t->restriction().body, env, problems);
        return;
    case K::conditional:
        check_calls(t->conditional().then_branch, env, problems);
        check_calls(t->conditional().else_branch, env, problems);
        return;
    case K::call: {
        const auto& c = t->call();
        const Definition* d = env.find(c.name);
        if (d == nullptr)
            problems.push_back("call to undefined identifier '" + c.name + "'");
        else if (d->params.size() != c.args.size())
            problems.push_back("identifier '" + c.name + "' takes " + std::to_string(d->params.size())
                               + " argument(s), " + std::to_string(c.args.size()) + " given");
        return;
    }
    }
}

} // namespace

std::set<std::string> free_variables(const Term& t)
{
    std::set<std::string> bound;
    std::set<std::string> out;
    collect_free(t, bound, out);
    return out;
}

// ---------------------------------------------------------------------------
// DefinitionEnv

void DefinitionEnv::define(const std::string& name, std::vector<std::string> params, Term body)
{
    if (defs_.count(name))
        throw ValidationError("definition " + name, "identifier defined twice");
    std::set<std::string> allowed(params.begin(), params.end());
    if (allowed.size() != params.size())
        throw ValidationError("definition " + name, "repeated formal parameter");
    for (const auto& v : free_variables(body)) {
        if (!allowed.count(v))
            throw ValidationError("definition " + name, "free variable '" + v + "' is not a parameter");
    }
    defs_.emplace(name, Definition{std::move(params), std::move(body)});
}

const Definition* DefinitionEnv::find(const std::string& name) const
{
    auto it = defs_.find(name);
    return it == defs_.end() ? nullptr : &it->second;
}

std::string DefinitionEnv::to_string() const
{
    std::string out;
    for (const auto& [name, d] : defs_) {
        out += name;
        if (!d.params.empty()) {
            out += "(";
            for (std::size_t i = 0; i < d.params.size(); ++i)
                out += (i ? ", " : "") + d.params[i];
            out += ")";
        }
        out += " := " + pvgame::to_string(d.body) + ";\n";
    }
    return out;
}

void check_calls_resolve(const Term& t, const DefinitionEnv& env)
{
    std::vector<std::string> problems;
    check_calls(t, env, problems);
    if (!problems.empty())
        throw ValidationError(std::move(problems));
}

} // namespace pvgame
