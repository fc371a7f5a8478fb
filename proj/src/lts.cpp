#include "pvgame/lts.hpp"

#include <stdexcept>

namespace pvgame {

std::size_t Lts::add_state()
{
    out_.emplace_back();
    return out_.size() - 1;
}

std::size_t Lts::add_states(std::size_t n)
{
    const std::size_t first = out_.size();
    out_.resize(first + n);
    return first;
}

std::size_t Lts::intern_label(const std::string& label)
{
    auto [it, inserted] = label_ids_.emplace(label, labels_.size());
    if (inserted)
        labels_.push_back(label);
    return it->second;
}

void Lts::add_transition(std::size_t source, std::size_t label, double prob, std::size_t target)
{
    if (source >= out_.size() || target >= out_.size() || label >= labels_.size())
        throw std::out_of_range("Lts::add_transition: id out of range");
    for (std::size_t idx : out_[source]) {
        auto& t = transitions_[idx];
        if (t.label == label && t.target == target) {
            t.prob += prob;
            return;
        }
    }
    out_[source].push_back(transitions_.size());
    transitions_.push_back({source, label, prob, target});
}

double Lts::mu(std::size_t state, std::size_t label, std::size_t target) const
{
    double p = 0.0;
    for (std::size_t idx : out_.at(state)) {
        const auto& t = transitions_[idx];
        if (t.label == label && t.target == target)
            p += t.prob;
    }
    return p;
}

} // namespace pvgame
