#include "canex/graph.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <numeric>
#include <sstream>

#include "canex/errors.hpp"

namespace canex {

namespace {

void check_enumeration_order(int n, int lo) {
    if (n < lo || n > kMaxEnumerationOrder) {
        throw SizeLimitError("graph order " + std::to_string(n) + " outside [" + std::to_string(lo) + ", " +
                             std::to_string(kMaxEnumerationOrder) + "]");
    }
}

// Vertex pairs (i, j), i < j, in lexicographic order; bit k of an edge mask is pairs[k].
std::vector<std::pair<int, int>> vertex_pairs(int n) {
    std::vector<std::pair<int, int>> pairs;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) pairs.emplace_back(i, j);
    return pairs;
}

BitGraph from_mask(int n, const std::vector<std::pair<int, int>>& pairs, std::uint64_t mask) {
    BitGraph g;
    g.order = n;
    for (std::size_t k = 0; k < pairs.size(); ++k)
        if ((mask >> k) & 1u) g.add_edge(pairs[k].first, pairs[k].second);
    return g;
}

LabeledGraph to_labeled(const BitGraph& g) {
    std::vector<Label> vs(g.order);
    std::iota(vs.begin(), vs.end(), 1);
    std::vector<Edge> es;
    for (int i = 0; i < g.order; ++i)
        for (int j = i + 1; j < g.order; ++j)
            if (g.has_edge(i, j)) es.emplace_back(i + 1, j + 1);
    return LabeledGraph(std::move(vs), std::move(es));
}

bool two_connected_bits(const BitGraph& g) {
    if (g.order < 2 || !bits::connected(g, g.all())) return false;
    for (int v = 0; v < g.order; ++v)
        if (!bits::connected(g, g.all() & ~(1u << v))) return false;
    return true;
}

}  // namespace

int BitGraph::edge_count() const {
    int twice = 0;
    for (int i = 0; i < order; ++i) twice += std::popcount(adj[i]);
    return twice / 2;
}

namespace bits {

bool connected(const BitGraph& g, std::uint32_t subset) {
    if (subset == 0) return true;
    std::uint32_t seen = subset & (~subset + 1u);
    std::uint32_t frontier = seen;
    while (frontier) {
        int v = std::countr_zero(frontier);
        frontier &= frontier - 1;
        std::uint32_t next = g.adj[v] & subset & ~seen;
        seen |= next;
        frontier |= next;
    }
    return seen == subset;
}

std::int64_t signed_connected_spanning_sum(const BitGraph& g) {
    const int n = g.order;
    if (n == 0) return 0;
    if (n > 20) throw SizeLimitError("signed spanning sum limited to 20 vertices");
    const std::uint32_t full = g.all();
    // edgeless[S] = 1 iff S induces no edge; that is the signed sum over all
    // spanning subgraphs of g[S], since each edge contributes a factor (1 - 1).
    std::vector<std::int64_t> conn(std::size_t{1} << n, 0);
    auto edgeless = [&](std::uint32_t s) {
        for (std::uint32_t r = s; r; r &= r - 1)
            if (g.adj[std::countr_zero(r)] & s) return false;
        return true;
    };
    for (std::uint32_t s = 1; s <= full; ++s) {
        std::uint32_t low = s & (~s + 1u);
        std::int64_t value = edgeless(s) ? 1 : 0;
        // Subtract splits into the connected part containing the lowest vertex
        // and an arbitrary remainder.
        std::uint32_t rest = s & ~low;
        for (std::uint32_t t = rest; t; t = (t - 1) & rest) {
            std::uint32_t comp = s & ~t;  // contains low, proper subset of s
            if (conn[comp] != 0 && edgeless(t)) value -= conn[comp];
        }
        conn[s] = value;
    }
    return conn[full];
}

}  // namespace bits

LabeledGraph::LabeledGraph(std::vector<Label> vertices, std::vector<Edge> edges)
    : vertices_(std::move(vertices)), edges_(std::move(edges)) {
    std::sort(vertices_.begin(), vertices_.end());
    if (std::adjacent_find(vertices_.begin(), vertices_.end()) != vertices_.end())
        throw DomainError("duplicate vertex label");
    for (Label v : vertices_)
        if (v <= 0) throw DomainError("vertex labels must be positive");
    for (auto& [i, j] : edges_) {
        if (i == j) throw DomainError("self-loop on vertex " + std::to_string(i));
        if (i > j) std::swap(i, j);
        if (!has_vertex(i) || !has_vertex(j))
            throw DomainError("edge " + std::to_string(i) + "-" + std::to_string(j) + " has an undeclared endpoint");
    }
    std::sort(edges_.begin(), edges_.end());
    if (std::adjacent_find(edges_.begin(), edges_.end()) != edges_.end()) throw DomainError("multiple edge");
}

LabeledGraph LabeledGraph::complete(int k, Label first) {
    std::vector<Label> vs(k);
    std::iota(vs.begin(), vs.end(), first);
    std::vector<Edge> es;
    for (int i = 0; i < k; ++i)
        for (int j = i + 1; j < k; ++j) es.emplace_back(first + i, first + j);
    return LabeledGraph(std::move(vs), std::move(es));
}

LabeledGraph LabeledGraph::path(int k, Label first) {
    std::vector<Label> vs(k);
    std::iota(vs.begin(), vs.end(), first);
    std::vector<Edge> es;
    for (int i = 0; i + 1 < k; ++i) es.emplace_back(first + i, first + i + 1);
    return LabeledGraph(std::move(vs), std::move(es));
}

LabeledGraph LabeledGraph::parse(std::string_view text) {
    auto bar = text.find('|');
    if (bar == std::string_view::npos) throw DomainError("graph text lacks '|' separator");
    std::vector<Label> vs;
    std::vector<Edge> es;
    std::istringstream vin{std::string(text.substr(0, bar))};
    for (std::string tok; vin >> tok;) {
        Label v = 0;
        auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
        if (ec != std::errc{} || p != tok.data() + tok.size()) throw DomainError("bad vertex token '" + tok + "'");
        vs.push_back(v);
    }
    std::istringstream ein{std::string(text.substr(bar + 1))};
    for (std::string tok; ein >> tok;) {
        auto dash = tok.find('-');
        if (dash == std::string::npos) throw DomainError("bad edge token '" + tok + "'");
        Label i = 0, j = 0;
        auto r1 = std::from_chars(tok.data(), tok.data() + dash, i);
        auto r2 = std::from_chars(tok.data() + dash + 1, tok.data() + tok.size(), j);
        if (r1.ec != std::errc{} || r2.ec != std::errc{} || r1.ptr != tok.data() + dash ||
            r2.ptr != tok.data() + tok.size())
            throw DomainError("bad edge token '" + tok + "'");
        es.emplace_back(i, j);
    }
    return LabeledGraph(std::move(vs), std::move(es));
}

bool LabeledGraph::has_vertex(Label v) const { return std::binary_search(vertices_.begin(), vertices_.end(), v); }

bool LabeledGraph::has_edge(Label i, Label j) const {
    if (i > j) std::swap(i, j);
    return std::binary_search(edges_.begin(), edges_.end(), Edge{i, j});
}

int LabeledGraph::index_of(Label v) const {
    auto it = std::lower_bound(vertices_.begin(), vertices_.end(), v);
    if (it == vertices_.end() || *it != v) throw DomainError("label " + std::to_string(v) + " not in graph");
    return static_cast<int>(it - vertices_.begin());
}

LabeledGraph LabeledGraph::without_vertex(Label v) const {
    std::vector<Label> vs;
    for (Label u : vertices_)
        if (u != v) vs.push_back(u);
    std::vector<Edge> es;
    for (const auto& e : edges_)
        if (e.first != v && e.second != v) es.push_back(e);
    return LabeledGraph(std::move(vs), std::move(es));
}

LabeledGraph LabeledGraph::united(const LabeledGraph& other) const {
    std::vector<Label> vs;
    std::set_union(vertices_.begin(), vertices_.end(), other.vertices_.begin(), other.vertices_.end(),
                   std::back_inserter(vs));
    std::vector<Edge> es;
    std::set_union(edges_.begin(), edges_.end(), other.edges_.begin(), other.edges_.end(), std::back_inserter(es));
    return LabeledGraph(std::move(vs), std::move(es));
}

std::uint64_t LabeledGraph::support_mask() const {
    std::uint64_t m = 0;
    for (Label v : vertices_) {
        if (v > 64) throw SizeLimitError("support mask covers labels 1..64 only");
        m |= std::uint64_t{1} << (v - 1);
    }
    return m;
}

BitGraph LabeledGraph::dense() const {
    if (order() > 32) throw SizeLimitError("dense graphs hold at most 32 vertices");
    BitGraph g;
    g.order = static_cast<int>(order());
    for (const auto& [i, j] : edges_) g.add_edge(index_of(i), index_of(j));
    return g;
}

std::string LabeledGraph::to_string() const {
    std::string out;
    for (std::size_t k = 0; k < vertices_.size(); ++k) {
        if (k) out += ' ';
        out += std::to_string(vertices_[k]);
    }
    out += " |";
    for (const auto& [i, j] : edges_) {
        out += ' ';
        out += std::to_string(i);
        out += '-';
        out += std::to_string(j);
    }
    return out;
}

void for_each_graph(int n, const std::function<void(const LabeledGraph&)>& visit) {
    check_enumeration_order(n, 1);
    const auto pairs = vertex_pairs(n);
    const std::uint64_t count = std::uint64_t{1} << pairs.size();
    for (std::uint64_t mask = 0; mask < count; ++mask) visit(to_labeled(from_mask(n, pairs, mask)));
}

void for_each_tree(int n, const std::function<void(const LabeledGraph&)>& visit) {
    check_enumeration_order(n, 1);
    if (n <= 2) {
        visit(LabeledGraph::complete(n));
        return;
    }
    const int len = n - 2;
    std::vector<int> seq(len, 0);
    std::vector<int> degree(n);
    while (true) {
        // Decode the Pruefer sequence.
        std::fill(degree.begin(), degree.end(), 1);
        for (int s : seq) ++degree[s];
        std::vector<Edge> es;
        for (int s : seq) {
            int leaf = 0;
            while (degree[leaf] != 1) ++leaf;
            es.emplace_back(leaf + 1, s + 1);
            --degree[leaf];
            --degree[s];
        }
        int u = -1, w = -1;
        for (int v = 0; v < n; ++v)
            if (degree[v] == 1) (u < 0 ? u : w) = v;
        es.emplace_back(u + 1, w + 1);
        std::vector<Label> vs(n);
        std::iota(vs.begin(), vs.end(), 1);
        visit(LabeledGraph(std::move(vs), std::move(es)));

        int k = len - 1;
        while (k >= 0 && seq[k] == n - 1) seq[k--] = 0;
        if (k < 0) break;
        ++seq[k];
    }
}

bool is_connected(const LabeledGraph& g) {
    if (g.empty()) throw DomainError("connectivity of the empty graph is undefined");
    const BitGraph d = g.dense();
    return bits::connected(d, d.all());
}

bool is_two_connected(const LabeledGraph& g) {
    if (g.empty()) throw DomainError("2-connectivity of the empty graph is undefined");
    return two_connected_bits(g.dense());
}

bool is_tree(const LabeledGraph& g) { return is_connected(g) && g.edge_count() + 1 == g.order(); }

std::int64_t count_connected(int n) {
    check_enumeration_order(n, 1);
    // c_n = 2^C(n,2) - sum_{k<n} C(n-1,k-1) c_k 2^C(n-k,2)
    std::vector<std::int64_t> c(n + 1, 0);
    auto binom = [](int a, int b) {
        std::int64_t r = 1;
        for (int i = 1; i <= b; ++i) r = r * (a - b + i) / i;
        return r;
    };
    auto all_graphs = [](int m) { return std::int64_t{1} << (m * (m - 1) / 2); };
    for (int m = 1; m <= n; ++m) {
        std::int64_t value = all_graphs(m);
        for (int k = 1; k < m; ++k) value -= binom(m - 1, k - 1) * c[k] * all_graphs(m - k);
        c[m] = value;
    }
    return c[n];
}

std::int64_t count_two_connected(int n) {
    check_enumeration_order(n, 2);
    const auto pairs = vertex_pairs(n);
    const std::uint64_t count = std::uint64_t{1} << pairs.size();
    std::int64_t total = 0;
    for (std::uint64_t mask = 0; mask < count; ++mask)
        if (two_connected_bits(from_mask(n, pairs, mask))) ++total;
    return total;
}

std::vector<Label> articulation_points(const LabeledGraph& g) {
    if (g.order() < 2) throw DomainError("articulation points need at least two vertices");
    if (!is_connected(g)) throw DomainError("articulation points need a connected graph");
    const BitGraph d = g.dense();
    std::vector<Label> out;
    for (int v = 0; v < d.order; ++v)
        if (!bits::connected(d, d.all() & ~(1u << v))) out.push_back(g.vertices()[v]);
    return out;
}

namespace {

// Hopcroft-Tarjan biconnected components over a dense graph.
struct LowpointSearch {
    const BitGraph& g;
    std::vector<int> disc, low;
    std::vector<bool> cut;
    std::vector<std::pair<int, int>> stack;
    std::vector<std::vector<std::pair<int, int>>> components;
    int clock = 0;

    explicit LowpointSearch(const BitGraph& graph)
        : g(graph), disc(graph.order, -1), low(graph.order, 0), cut(graph.order, false) {}

    void visit(int u, int parent) {
        disc[u] = low[u] = clock++;
        int children = 0;
        for (std::uint32_t r = g.adj[u]; r; r &= r - 1) {
            int w = std::countr_zero(r);
            if (disc[w] < 0) {
                ++children;
                stack.emplace_back(u, w);
                visit(w, u);
                low[u] = std::min(low[u], low[w]);
                if ((parent < 0 && children > 1) || (parent >= 0 && low[w] >= disc[u])) cut[u] = true;
                if (low[w] >= disc[u]) {
                    std::vector<std::pair<int, int>> comp;
                    while (true) {
                        auto e = stack.back();
                        stack.pop_back();
                        comp.push_back(e);
                        if (e == std::pair{u, w}) break;
                    }
                    components.push_back(std::move(comp));
                }
            } else if (w != parent && disc[w] < disc[u]) {
                stack.emplace_back(u, w);
                low[u] = std::min(low[u], disc[w]);
            }
        }
    }
};

}  // namespace

std::vector<Label> articulation_points_lowpoint(const LabeledGraph& g) {
    if (g.order() < 2) throw DomainError("articulation points need at least two vertices");
    if (!is_connected(g)) throw DomainError("articulation points need a connected graph");
    const BitGraph d = g.dense();
    LowpointSearch search(d);
    search.visit(0, -1);
    std::vector<Label> out;
    for (int v = 0; v < d.order; ++v)
        if (search.cut[v]) out.push_back(g.vertices()[v]);
    return out;
}

BlockTree block_decomposition(const LabeledGraph& g) {
    if (!is_connected(g)) throw DomainError("block decomposition needs a connected graph");
    BlockTree tree;
    if (g.order() == 1) {
        tree.blocks.push_back(g);
        return tree;
    }
    const BitGraph d = g.dense();
    LowpointSearch search(d);
    search.visit(0, -1);
    const auto& labels = g.vertices();
    for (const auto& comp : search.components) {
        std::vector<Label> vs;
        std::vector<Edge> es;
        for (auto [a, b] : comp) {
            vs.push_back(labels[a]);
            vs.push_back(labels[b]);
            es.emplace_back(std::min(labels[a], labels[b]), std::max(labels[a], labels[b]));
        }
        std::sort(vs.begin(), vs.end());
        vs.erase(std::unique(vs.begin(), vs.end()), vs.end());
        tree.blocks.emplace_back(std::move(vs), std::move(es));
    }
    std::sort(tree.blocks.begin(), tree.blocks.end());
    for (int v = 0; v < d.order; ++v)
        if (search.cut[v]) tree.cut_vertices.push_back(labels[v]);
    for (std::size_t b = 0; b < tree.blocks.size(); ++b)
        for (Label c : tree.cut_vertices)
            if (tree.blocks[b].has_vertex(c)) tree.incidence.emplace_back(b, c);
    return tree;
}

std::int64_t signed_connected_spanning_sum(const LabeledGraph& g) {
    if (g.order() > kMaxEnumerationOrder)
        throw SizeLimitError("signed spanning sum limited to " + std::to_string(kMaxEnumerationOrder) + " vertices");
    return bits::signed_connected_spanning_sum(g.dense());
}

std::int64_t signed_connected_spanning_sum_direct(const LabeledGraph& g) {
    if (g.edge_count() > 21) throw SizeLimitError("direct spanning enumeration limited to 21 edges");
    if (g.empty()) return 0;
    const BitGraph d = g.dense();
    std::vector<std::pair<int, int>> es;
    for (const auto& [i, j] : g.edges()) es.emplace_back(g.index_of(i), g.index_of(j));
    const int m = static_cast<int>(es.size());

    std::int64_t total = 0;
    BitGraph available = d;  // included edges plus undecided ones
    std::function<void(int, int)> walk = [&](int k, int included) {
        if (k == m) {
            total += (included % 2 == 0) ? 1 : -1;
            return;
        }
        auto [a, b] = es[k];
        walk(k + 1, included + 1);
        available.adj[a] &= ~(1u << b);
        available.adj[b] &= ~(1u << a);
        if (bits::connected(available, available.all())) walk(k + 1, included);
        available.add_edge(a, b);
    };
    if (bits::connected(available, available.all())) walk(0, 0);
    return total;
}

IsoKey canonical_form(const LabeledGraph& g) {
    const int n = static_cast<int>(g.order());
    if (n > kMaxEnumerationOrder) throw SizeLimitError("canonical form limited to 8 vertices");
    const BitGraph d = g.dense();
    std::vector<int> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    // bit index of pair (i, j), i < j, in lexicographic order
    auto pair_index = [n](int i, int j) { return i * n - i * (i + 1) / 2 + (j - i - 1); };
    std::uint64_t best = ~std::uint64_t{0};
    do {
        std::uint64_t mask = 0;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j)
                if (d.has_edge(i, j)) {
                    int a = std::min(perm[i], perm[j]), b = std::max(perm[i], perm[j]);
                    mask |= std::uint64_t{1} << pair_index(a, b);
                }
        best = std::min(best, mask);
    } while (std::next_permutation(perm.begin(), perm.end()));
    return IsoKey{n, n == 0 ? 0 : best};
}

LabeledGraph from_iso_key(const IsoKey& key) {
    return to_labeled(from_mask(key.order, vertex_pairs(key.order), key.edges));
}

}  // namespace canex
