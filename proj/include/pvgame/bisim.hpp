#pragma once

#include "pvgame/lts.hpp"

#include <cstddef>
#include <vector>

namespace pvgame {

/// Equivalence on the states of an Lts. Blocks are numbered by their least
/// member, so two equal partitions have identical representations.
class Partition {
public:
    Partition() = default;
    /// Builds from a block label per state; labels need not be dense.
    explicit Partition(const std::vector<std::size_t>& labels);

    static Partition discrete(std::size_t n);

    std::size_t num_states() const noexcept { return block_of_.size(); }
    std::size_t num_blocks() const noexcept { return blocks_.size(); }
    std::size_t block_of(std::size_t state) const { return block_of_.at(state); }
    const std::vector<std::size_t>& members(std::size_t block) const { return blocks_.at(block); }
    const std::vector<std::vector<std::size_t>>& blocks() const noexcept { return blocks_; }

    /// True when every block of *this lies inside a block of `coarser`.
    bool refines(const Partition& coarser) const;

    bool operator==(const Partition& other) const { return block_of_ == other.block_of_; }

private:
    std::vector<std::size_t> block_of_;
    std::vector<std::vector<std::size_t>> blocks_;
};

/// Coarsest probabilistic bisimulation, by signature refinement starting
/// from the partition by enabled label sets.
Partition coarsest_bisimulation(const Lts& lts);

/// Same, starting from `initial` (the result refines it).
Partition coarsest_bisimulation(const Lts& lts, const Partition& initial);

/// Direct check of the bisimulation condition: members of one block give
/// equal mass (within epsilon_sum) to every block under every label.
bool is_bisimulation(const Lts& lts, const Partition& p);

/// One state per block, transitions summed into target blocks. Throws
/// InvariantViolation if `p` is not a bisimulation.
Lts quotient(const Lts& lts, const Partition& p);

} // namespace pvgame
