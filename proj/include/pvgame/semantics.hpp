#pragma once

#include "pvgame/lts.hpp"
#include "pvgame/process.hpp"

#include <span>

namespace pvgame {

/// Concrete transition label: `a(v)`, `'a(v)` or `tau`.
struct Label {
    enum class Kind { input, output, tau };

    Kind kind = Kind::tau;
    std::string channel;
    Value value;

    static Label tau() { return {}; }
    static Label input(std::string channel, Value v = Value::unit()) { return {Kind::input, std::move(channel), std::move(v)}; }
    static Label output(std::string channel, Value v = Value::unit())
    {
        return {Kind::output, std::move(channel), std::move(v)};
    }

    std::string to_string() const;
    bool operator==(const Label&) const = default;
};

struct Transition {
    Term source;
    Label label;
    double prob;
    Term target;
};

struct SemanticsOptions {
    /// Bound on nested identifier unfoldings while deriving one step.
    std::size_t max_unfold_depth = 256;
};

/// All transitions derivable by the reactive rules. Input prefixes are
/// instantiated once per value in `stimuli`; with no stimuli they produce
/// nothing on their own but still take part in communication.
std::vector<Transition> derive_transitions(const Term& term, const DefinitionEnv& env,
                                           std::span<const Value> stimuli = {},
                                           const SemanticsOptions& options = {});

/// Total probability of `label`-transitions from `term` into `targets`
/// (targets compared up to alpha-renaming).
double mu(const Term& term, const DefinitionEnv& env, const Label& label, std::span<const Term> targets,
          std::span<const Value> stimuli = {}, const SemanticsOptions& options = {});

/// Drops Nil operands of parallel compositions and collapses `Nil\R` to Nil.
Term normalize(const Term& t);

struct ExploreOptions {
    std::size_t max_states = 1'000'000;
    bool normalize_targets = true;
    SemanticsOptions semantics;
};

/// Reachable fragment of the transition relation from `roots`. Root i is
/// state i; further states are numbered in discovery order.
struct ExploredLts {
    Lts lts;
    std::vector<Term> states;
    std::vector<Label> labels; // by Lts label id
    std::map<std::string, std::size_t> index; // canonical key -> state
};

ExploredLts explore(std::span<const Term> roots, const DefinitionEnv& env, std::span<const Value> stimuli = {},
                    const ExploreOptions& options = {});

} // namespace pvgame
