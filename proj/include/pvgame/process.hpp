#pragma once

#include "pvgame/value.hpp"

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace pvgame {

/// Probability-sum tolerance used wherever branch masses are compared.
inline constexpr double epsilon_sum = 1e-9;

/// A channel name `a` or its co-name `'a`.
struct ChannelName {
    enum class Polarity { plain, co };

    std::string name;
    Polarity polarity = Polarity::plain;

    ChannelName co() const
    {
        return {name, polarity == Polarity::plain ? Polarity::co : Polarity::plain};
    }
    std::string to_string() const { return polarity == Polarity::co ? "'" + name : name; }

    auto operator<=>(const ChannelName&) const = default;
};

/// Action prefix: input `a(x)` binding x, output `'a(e)`, or `tau`.
class ActionLabel {
public:
    enum class Kind { input, output, tau };

    static ActionLabel input(std::string channel, std::string variable);
    static ActionLabel output(std::string channel, ValueExpr value = ValueExpr());
    static ActionLabel tau();

    Kind kind() const noexcept { return kind_; }
    const std::string& channel() const noexcept { return channel_; }
    /// The channel with the polarity implied by the action kind.
    ChannelName channel_name() const;
    const std::string& variable() const { return variable_; }
    const ValueExpr& value() const { return value_; }

    std::string to_string(const std::map<std::string, std::string>* bound = nullptr) const;

    friend bool operator==(const ActionLabel& lhs, const ActionLabel& rhs)
    {
        return lhs.kind_ == rhs.kind_ && lhs.channel_ == rhs.channel_ && lhs.variable_ == rhs.variable_
            && lhs.value_ == rhs.value_;
    }

private:
    Kind kind_ = Kind::tau;
    std::string channel_;
    std::string variable_;
    ValueExpr value_;
};

class ProcessNode;
using Term = std::shared_ptr<const ProcessNode>;

struct Branch {
    double prob;
    Term next;
};

/// All branches sharing one action prefix: `[p1]a.P1 + [p2]a.P2`.
struct Group {
    ActionLabel action;
    std::vector<Branch> branches;
};

class ProcessNode {
public:
    enum class Kind { nil, sum, parallel, restrict, conditional, call };

    struct Nil {};
    struct Sum {
        std::vector<Group> groups;
    };
    struct Parallel {
        Term left, right;
    };
    struct Restrict {
        Term body;
        std::vector<std::string> channels; // sorted, unique
    };
    struct Conditional {
        BoolExpr guard;
        Term then_branch, else_branch;
    };
    struct Call {
        std::string name;
        std::vector<ValueExpr> args;
    };

    using Node = std::variant<Nil, Sum, Parallel, Restrict, Conditional, Call>;

    explicit ProcessNode(Node n) : node_(std::move(n)) {}

    Kind kind() const noexcept { return static_cast<Kind>(node_.index()); }
    const Sum& sum() const { return std::get<Sum>(node_); }
    const Parallel& parallel() const { return std::get<Parallel>(node_); }
    const Restrict& restriction() const { return std::get<Restrict>(node_); }
    const Conditional& conditional() const { return std::get<Conditional>(node_); }
    const Call& call() const { return std::get<Call>(node_); }

private:
    Node node_;
};

// Constructors. `sum` validates the summation invariants and throws
// ValidationError on a probability-sum violation or a duplicate prefix.
Term nil();
Term sum(std::vector<Group> groups);
Term prefix(ActionLabel action, Term next);
Term parallel(Term left, Term right);
Term restrict(Term body, std::vector<std::string> channels);
Term conditional(BoolExpr guard, Term then_branch, Term else_branch);
Term call(std::string name, std::vector<ValueExpr> args = {});

/// Structural equality on ASTs (bound variable names must match).
bool structurally_equal(const Term& lhs, const Term& rhs);

/// Key that identifies a term up to renaming of input-bound variables.
std::string canonical_key(const Term& t);

/// Terms are equal when their canonical keys are.
bool alpha_equivalent(const Term& lhs, const Term& rhs);

/// Pretty-printer emitting the documented concrete grammar.
std::string to_string(const Term& t);

/// Capture-avoiding substitution P{e/x}; `value` must be closed.
Term substitute(const Term& t, const std::string& var, const Value& value);
Term substitute(const Term& t, const Substitution& s);

std::set<std::string> free_variables(const Term& t);

/// Process definition `A(x1, ..., xk) := P`.
struct Definition {
    std::vector<std::string> params;
    Term body;
};

class DefinitionEnv {
public:
    /// Adds a definition; throws ValidationError if `name` is already
    /// defined or the body has free variables outside `params`.
    void define(const std::string& name, std::vector<std::string> params, Term body);

    const Definition* find(const std::string& name) const;
    bool empty() const noexcept { return defs_.empty(); }
    std::size_t size() const noexcept { return defs_.size(); }
    const std::map<std::string, Definition>& definitions() const noexcept { return defs_; }

    /// `A(x) := P;` lines in definition order of the map (sorted by name).
    std::string to_string() const;

private:
    std::map<std::string, Definition> defs_;
};

/// Checks that every Call in `t` resolves in `env` with matching arity.
void check_calls_resolve(const Term& t, const DefinitionEnv& env);

} // namespace pvgame
