#pragma once

#include "pvgame/game_spec.hpp"

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace pvgame {

/// Contracted game graph: one vertex per (quotient) game state, one edge per
/// (attacker action, defender action, successor).
class ConTSGraph {
public:
    struct Vertex {
        int id = 0; // least member state id
        std::string name;
        std::vector<std::string> attacker_actions;
        std::vector<std::string> defender_actions;
        std::vector<int> members; // ascending state ids
    };

    struct Edge {
        std::size_t src;
        std::size_t dst;
        std::size_t attacker; // index into src's attacker_actions
        std::size_t defender;
        double prob;
        PayoffPair weight;

        double social_weight() const { return weight.social(); }
    };

    std::size_t add_vertex(Vertex v);
    /// Edges leaving one vertex are kept sorted by (attacker, defender, dst).
    std::size_t add_edge(Edge e);

    std::size_t num_vertices() const noexcept { return vertices_.size(); }
    std::size_t num_edges() const noexcept { return edges_.size(); }
    const Vertex& vertex(std::size_t i) const { return vertices_.at(i); }
    const std::vector<Vertex>& vertices() const noexcept { return vertices_; }
    const Edge& edge(std::size_t i) const { return edges_.at(i); }
    const std::vector<Edge>& edges() const noexcept { return edges_; }
    const std::vector<std::size_t>& out_edges(std::size_t v) const { return out_.at(v); }

    /// Vertex whose `id` equals `id`; throws std::out_of_range.
    std::size_t find_vertex(int id) const;

    const std::string& attacker_name(const Edge& e) const { return vertices_[e.src].attacker_actions[e.attacker]; }
    const std::string& defender_name(const Edge& e) const { return vertices_[e.src].defender_actions[e.defender]; }

private:
    std::vector<Vertex> vertices_;
    std::vector<Edge> edges_;
    std::vector<std::vector<std::size_t>> out_;
};

/// Structural problems: out-of-range ids, probabilities outside (0,1],
/// per-(src, u, v) mass not equal to 1, vertices without outgoing edges.
std::vector<std::string> check_conts(const ConTSGraph& g, double eps = 1e-9);

/// Pairs of edges breaking the "higher attacker weight means lower defender
/// weight" convention. Returns at most `limit` examples followed by a count.
std::vector<std::string> weight_convention_warnings(const ConTSGraph& g, std::size_t limit = 5);

/// Label-respecting isomorphism (actions by index, probabilities and
/// weights within `eps`). Returns the vertex map lhs -> rhs if one exists.
std::optional<std::vector<std::size_t>> find_isomorphism(const ConTSGraph& lhs, const ConTSGraph& rhs,
                                                         double eps = 1e-9);

} // namespace pvgame
