#pragma once

// Labeled simple graphs: enumeration, connectivity, articulation points, blocks
// and signed sums over connected spanning subgraphs.

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace canex {

using Label = int;
using Edge = std::pair<Label, Label>;

/// Dense adjacency over vertices 0..order-1 (order <= 32), one bitmask row per vertex.
struct BitGraph {
    int order = 0;
    std::array<std::uint32_t, 32> adj{};

    [[nodiscard]] std::uint32_t all() const { return order == 32 ? ~0u : ((1u << order) - 1u); }
    void add_edge(int i, int j) {
        adj[i] |= 1u << j;
        adj[j] |= 1u << i;
    }
    [[nodiscard]] bool has_edge(int i, int j) const { return (adj[i] >> j) & 1u; }
    [[nodiscard]] int edge_count() const;
};

namespace bits {
/// True iff the vertices in `subset` induce a connected subgraph (empty set counts as connected).
bool connected(const BitGraph& g, std::uint32_t subset);
/// Sum over connected spanning subgraphs H of g of (-1)^|E(H)|, by recursion over vertex subsets.
std::int64_t signed_connected_spanning_sum(const BitGraph& g);
}  // namespace bits

/// A simple undirected graph on positive integer labels.
///
/// Vertices are kept sorted; edges are stored as (i, j) with i < j, sorted
/// lexicographically. Construction rejects self-loops, duplicate edges and
/// edges whose endpoints are not declared vertices.
class LabeledGraph {
public:
    LabeledGraph() = default;
    LabeledGraph(std::vector<Label> vertices, std::vector<Edge> edges);

    /// Complete graph on labels first..first+k-1.
    static LabeledGraph complete(int k, Label first = 1);
    /// Path first - first+1 - ... - first+k-1.
    static LabeledGraph path(int k, Label first = 1);
    /// Parses the canonical text form produced by to_string().
    static LabeledGraph parse(std::string_view text);

    [[nodiscard]] const std::vector<Label>& vertices() const { return vertices_; }
    [[nodiscard]] const std::vector<Edge>& edges() const { return edges_; }
    /// |g|: number of vertices.
    [[nodiscard]] std::size_t order() const { return vertices_.size(); }
    [[nodiscard]] std::size_t edge_count() const { return edges_.size(); }
    [[nodiscard]] bool empty() const { return vertices_.empty(); }
    [[nodiscard]] bool has_vertex(Label v) const;
    [[nodiscard]] bool has_edge(Label i, Label j) const;
    /// Index of a label in the sorted vertex list.
    [[nodiscard]] int index_of(Label v) const;

    [[nodiscard]] LabeledGraph without_vertex(Label v) const;
    /// Union of vertex and edge sets.
    [[nodiscard]] LabeledGraph united(const LabeledGraph& other) const;
    /// Bitmask over the first 32 labels of the vertex set (label l -> bit l-1).
    [[nodiscard]] std::uint64_t support_mask() const;

    /// Dense copy with vertices relabeled by their rank in the sorted vertex list.
    [[nodiscard]] BitGraph dense() const;

    /// Canonical text: "1 2 3 | 1-2 2-3". Edge part is empty for edgeless graphs ("1 |").
    [[nodiscard]] std::string to_string() const;

    friend bool operator==(const LabeledGraph&, const LabeledGraph&) = default;
    friend auto operator<=>(const LabeledGraph&, const LabeledGraph&) = default;

private:
    std::vector<Label> vertices_;
    std::vector<Edge> edges_;
};

/// Blocks (maximal 2-connected subgraphs) glued at cut vertices.
struct BlockTree {
    std::vector<LabeledGraph> blocks;
    std::vector<Label> cut_vertices;
    /// (block index, cut vertex) pairs for every cut vertex lying in a block.
    std::vector<std::pair<std::size_t, Label>> incidence;
};

inline constexpr int kMaxEnumerationOrder = 8;

/// Visits every labeled simple graph on {1..n} once, ordered by the bitmask over
/// lexicographically ordered vertex pairs. Requires 1 <= n <= 8.
void for_each_graph(int n, const std::function<void(const LabeledGraph&)>& visit);
/// Visits every labeled tree on {1..n} once, decoded from Pruefer sequences in
/// lexicographic order. Requires 1 <= n <= 8.
void for_each_tree(int n, const std::function<void(const LabeledGraph&)>& visit);

bool is_connected(const LabeledGraph& g);
/// Connected, at least two vertices, and no articulation point. K2 qualifies.
bool is_two_connected(const LabeledGraph& g);
bool is_tree(const LabeledGraph& g);

/// Number of connected labeled graphs on n vertices, 1 <= n <= 8.
std::int64_t count_connected(int n);
/// Number of 2-connected labeled graphs on n vertices, 2 <= n <= 8 (exhaustive scan).
std::int64_t count_two_connected(int n);

/// Articulation points by removing each vertex and retesting connectivity.
std::vector<Label> articulation_points(const LabeledGraph& g);
/// Articulation points from a depth-first lowpoint computation.
std::vector<Label> articulation_points_lowpoint(const LabeledGraph& g);
BlockTree block_decomposition(const LabeledGraph& g);

/// Sum over connected spanning subgraphs H of g of (-1)^|E(H)|. Returns 0 for
/// disconnected g. Computed by inclusion-exclusion over vertex subsets.
std::int64_t signed_connected_spanning_sum(const LabeledGraph& g);
/// Same quantity by direct enumeration of edge subsets, pruning branches whose
/// remaining edges can no longer span connectedly. At most 21 edges.
std::int64_t signed_connected_spanning_sum_direct(const LabeledGraph& g);

/// Isomorphism-invariant key: order plus the smallest edge bitmask over all relabelings.
struct IsoKey {
    int order = 0;
    std::uint64_t edges = 0;
    friend auto operator<=>(const IsoKey&, const IsoKey&) = default;
};
/// Canonical form under label permutation (order <= 8).
IsoKey canonical_form(const LabeledGraph& g);
/// Graph on {1..order} realising an IsoKey.
LabeledGraph from_iso_key(const IsoKey& key);

}  // namespace canex
