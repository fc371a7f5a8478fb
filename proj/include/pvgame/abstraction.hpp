#pragma once

#include "pvgame/conts.hpp"

#include <cstddef>
#include <vector>

namespace pvgame {

/// Condensation of a ConTS into its strongly connected components.
struct AbsDag {
    enum class Kind { leave, non_leave };

    struct Component {
        std::vector<std::size_t> members; // ConTS vertex indices, ascending
        Kind kind = Kind::leave;
        bool has_cycle = false; // more than one member, or a self-loop
        int priority = 0;
        std::vector<std::size_t> successors; // distinct, ascending component ids
    };

    std::vector<Component> components;
    std::vector<std::size_t> component_of; // per ConTS vertex

    std::size_t size() const noexcept { return components.size(); }
};

/// Tarjan's algorithm. Components are numbered by their least member;
/// kinds and successor lists are filled, priorities are not.
AbsDag condense_scc(const ConTSGraph& g);

/// Leave = |components|; otherwise min over direct successors minus one.
void compute_priorities(AbsDag& abs);

/// Descending priority, ties by least member vertex id.
std::vector<std::size_t> processing_order(const AbsDag& abs, const ConTSGraph& g);

/// True when no component later in `order` is reachable from an earlier one.
bool respects_dependencies(const AbsDag& abs, const std::vector<std::size_t>& order);

/// condense_scc + compute_priorities.
AbsDag build_abstraction(const ConTSGraph& g);

} // namespace pvgame
