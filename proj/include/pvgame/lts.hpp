#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <vector>

namespace pvgame {

/// Labelled probabilistic transition system over dense state ids.
/// Parallel derivations with the same (source, label, target) are merged by
/// summing their probabilities.
class Lts {
public:
    struct Transition {
        std::size_t source;
        std::size_t label;
        double prob;
        std::size_t target;
    };

    std::size_t add_state();
    std::size_t add_states(std::size_t n);
    std::size_t intern_label(const std::string& label);
    void add_transition(std::size_t source, std::size_t label, double prob, std::size_t target);
    void add_transition(std::size_t source, const std::string& label, double prob, std::size_t target)
    {
        add_transition(source, intern_label(label), prob, target);
    }

    std::size_t num_states() const noexcept { return out_.size(); }
    std::size_t num_labels() const noexcept { return labels_.size(); }
    const std::vector<std::string>& labels() const noexcept { return labels_; }
    const std::string& label_name(std::size_t id) const { return labels_.at(id); }
    const std::vector<Transition>& transitions() const noexcept { return transitions_; }

    /// Indices into transitions() leaving `state`.
    const std::vector<std::size_t>& outgoing(std::size_t state) const { return out_.at(state); }

    /// Total probability of `label`-transitions from `state` to `target`.
    double mu(std::size_t state, std::size_t label, std::size_t target) const;

private:
    std::vector<std::string> labels_;
    std::map<std::string, std::size_t> label_ids_;
    std::vector<Transition> transitions_;
    std::vector<std::vector<std::size_t>> out_;
};

} // namespace pvgame
