#include "pvgame/bisim.hpp"

#include "pvgame/errors.hpp"
#include "pvgame/process.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <tuple>

namespace pvgame {

Partition::Partition(const std::vector<std::size_t>& labels)
{
    std::map<std::size_t, std::size_t> renumber;
    block_of_.resize(labels.size());
    for (std::size_t s = 0; s < labels.size(); ++s) {
        auto [it, fresh] = renumber.emplace(labels[s], blocks_.size());
        if (fresh)
            blocks_.emplace_back();
        block_of_[s] = it->second;
        blocks_[it->second].push_back(s);
    }
}

Partition Partition::discrete(std::size_t n)
{
    std::vector<std::size_t> ids(n);
    for (std::size_t i = 0; i < n; ++i)
        ids[i] = i;
    return Partition(ids);
}

bool Partition::refines(const Partition& coarser) const
{
    if (coarser.num_states() != num_states())
        return false;
    for (const auto& b : blocks_) {
        for (std::size_t s : b)
            if (coarser.block_of(s) != coarser.block_of(b.front()))
                return false;
    }
    return true;
}

namespace {

using Signature = std::vector<std::tuple<std::size_t, std::size_t, long long>>;

// Mass per (label, target block), rounded to 12 decimals so that
// floating-point noise cannot split a block.
Signature signature(const Lts& lts, std::size_t s, const std::vector<std::size_t>& block_of)
{
    std::map<std::pair<std::size_t, std::size_t>, double> mass;
    for (std::size_t idx : lts.outgoing(s)) {
        const auto& t = lts.transitions()[idx];
        mass[{t.label, block_of[t.target]}] += t.prob;
    }
    Signature sig;
    sig.reserve(mass.size());
    for (const auto& [key, p] : mass)
        sig.emplace_back(key.first, key.second, std::llround(p * 1e12));
    return sig;
}

std::vector<std::size_t> enabled_labels(const Lts& lts, std::size_t s)
{
    std::vector<std::size_t> out;
    for (std::size_t idx : lts.outgoing(s))
        out.push_back(lts.transitions()[idx].label);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

} // namespace

Partition coarsest_bisimulation(const Lts& lts)
{
    std::map<std::vector<std::size_t>, std::size_t> ids;
    std::vector<std::size_t> labels(lts.num_states());
    for (std::size_t s = 0; s < lts.num_states(); ++s)
        labels[s] = ids.emplace(enabled_labels(lts, s), ids.size()).first->second;
    return coarsest_bisimulation(lts, Partition(labels));
}

Partition coarsest_bisimulation(const Lts& lts, const Partition& initial)
{
    if (initial.num_states() != lts.num_states())
        throw std::invalid_argument("coarsest_bisimulation: partition size mismatch");
    std::vector<std::size_t> block_of(lts.num_states());
    for (std::size_t s = 0; s < lts.num_states(); ++s)
        block_of[s] = initial.block_of(s);
    std::size_t count = initial.num_blocks();
    while (true) {
        std::map<std::pair<std::size_t, Signature>, std::size_t> ids;
        std::vector<std::size_t> next(lts.num_states());
        for (std::size_t s = 0; s < lts.num_states(); ++s) {
            auto key = std::make_pair(block_of[s], signature(lts, s, block_of));
            next[s] = ids.emplace(std::move(key), ids.size()).first->second;
        }
        const std::size_t new_count = ids.size();
        Partition p(next);
        for (std::size_t s = 0; s < lts.num_states(); ++s)
            block_of[s] = p.block_of(s);
        if (new_count == count)
            return p;
        count = new_count;
    }
}

bool is_bisimulation(const Lts& lts, const Partition& p)
{
    if (p.num_states() != lts.num_states())
        return false;
    auto mass = [&](std::size_t s) {
        std::map<std::pair<std::size_t, std::size_t>, double> m;
        for (std::size_t idx : lts.outgoing(s)) {
            const auto& t = lts.transitions()[idx];
            m[{t.label, p.block_of(t.target)}] += t.prob;
        }
        return m;
    };
    for (const auto& block : p.blocks()) {
        const auto ref = mass(block.front());
        for (std::size_t k = 1; k < block.size(); ++k) {
            const auto other = mass(block[k]);
            for (const auto& [key, q] : ref) {
                auto it = other.find(key);
                if (std::fabs(q - (it == other.end() ? 0.0 : it->second)) > epsilon_sum)
                    return false;
            }
            for (const auto& [key, q] : other) {
                if (!ref.count(key) && std::fabs(q) > epsilon_sum)
                    return false;
            }
        }
    }
    return true;
}

Lts quotient(const Lts& lts, const Partition& p)
{
    if (!is_bisimulation(lts, p))
        throw InvariantViolation("quotient: partition is not a bisimulation");
    Lts q;
    q.add_states(p.num_blocks());
    for (const auto& l : lts.labels())
        q.intern_label(l);
    for (std::size_t b = 0; b < p.num_blocks(); ++b) {
        for (std::size_t idx : lts.outgoing(p.members(b).front())) {
            const auto& t = lts.transitions()[idx];
            q.add_transition(b, t.label, t.prob, p.block_of(t.target));
        }
    }
    return q;
}

} // namespace pvgame
