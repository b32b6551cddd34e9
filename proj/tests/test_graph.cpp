#include <map>
#include <random>
#include <set>

#include "canex/errors.hpp"
#include "canex/graph.hpp"
#include "doctest.h"

using namespace canex;

namespace {

// Oracles that only use the LabeledGraph surface: breadth-first reachability and
// remove-and-retest, independent of the bitmask routines under test.
bool reach_all(const LabeledGraph& g) {
    if (g.empty()) return true;
    std::set<Label> seen{g.vertices().front()};
    bool grew = true;
    while (grew) {
        grew = false;
        for (const auto& [i, j] : g.edges()) {
            if (seen.count(i) != seen.count(j)) {
                seen.insert(i);
                seen.insert(j);
                grew = true;
            }
        }
    }
    return seen.size() == g.order();
}

bool two_connected_oracle(const LabeledGraph& g) {
    if (g.order() < 2 || !reach_all(g)) return false;
    for (Label v : g.vertices())
        if (!reach_all(g.without_vertex(v))) return false;
    return true;
}

LabeledGraph bowtie() { return LabeledGraph({1, 2, 3, 4, 5}, {{1, 2}, {1, 3}, {2, 3}, {3, 4}, {3, 5}, {4, 5}}); }

LabeledGraph random_connected(std::mt19937& rng, int n, double p) {
    while (true) {
        std::vector<Edge> es;
        std::bernoulli_distribution coin(p);
        for (int i = 1; i <= n; ++i)
            for (int j = i + 1; j <= n; ++j)
                if (coin(rng)) es.emplace_back(i, j);
        std::vector<Label> vs;
        for (int i = 1; i <= n; ++i) vs.push_back(i);
        LabeledGraph g(vs, es);
        if (reach_all(g)) return g;
    }
}

std::int64_t factorial(int k) { return k <= 1 ? 1 : k * factorial(k - 1); }

}  // namespace

TEST_CASE("construction rejects invalid graphs") {
    CHECK_THROWS_AS(LabeledGraph({1, 2}, {{1, 1}}), DomainError);
    CHECK_THROWS_AS(LabeledGraph({1, 2}, {{1, 2}, {2, 1}}), DomainError);
    CHECK_THROWS_AS(LabeledGraph({1, 2}, {{1, 3}}), DomainError);
    CHECK_THROWS_AS(LabeledGraph({0, 1}, {}), DomainError);
}

TEST_CASE("canonical text round trip") {
    const auto g = bowtie();
    CHECK(g.to_string() == "1 2 3 4 5 | 1-2 1-3 2-3 3-4 3-5 4-5");
    CHECK(LabeledGraph::parse(g.to_string()) == g);
    CHECK(LabeledGraph::parse("7 |").order() == 1);
    CHECK_THROWS_AS(LabeledGraph::parse("1 2 1-2"), DomainError);
}

TEST_CASE("enumerate_graphs sizes and determinism") {
    std::map<int, int> expected{{1, 1}, {3, 8}, {4, 64}};
    for (auto [n, count] : expected) {
        int seen = 0;
        for_each_graph(n, [&](const LabeledGraph&) { ++seen; });
        CHECK(seen == count);
    }
    std::vector<std::string> a, b;
    for_each_graph(4, [&](const LabeledGraph& g) { a.push_back(g.to_string()); });
    for_each_graph(4, [&](const LabeledGraph& g) { b.push_back(g.to_string()); });
    CHECK(a == b);
    CHECK(std::set<std::string>(a.begin(), a.end()).size() == a.size());
    CHECK_THROWS_AS(for_each_graph(0, [](const LabeledGraph&) {}), SizeLimitError);
    CHECK_THROWS_AS(for_each_graph(9, [](const LabeledGraph&) {}), SizeLimitError);
}

TEST_CASE("is_connected examples") {
    CHECK(is_connected(LabeledGraph::complete(3)));
    CHECK_FALSE(is_connected(LabeledGraph({1, 2, 3}, {{1, 2}})));
    CHECK(is_connected(LabeledGraph::path(4)));
    CHECK_THROWS_AS(is_connected(LabeledGraph()), DomainError);
}

TEST_CASE("connected and 2-connected counts match remove-and-test over all graphs") {
    for (int n = 1; n <= 6; ++n) {
        std::int64_t conn = 0, two = 0;
        for_each_graph(n, [&](const LabeledGraph& g) {
            if (reach_all(g)) ++conn;
            if (two_connected_oracle(g)) ++two;
        });
        CHECK(count_connected(n) == conn);
        if (n >= 2) CHECK(count_two_connected(n) == two);
    }
    CHECK(count_connected(3) == 4);
    CHECK(count_connected(4) == 38);
    CHECK(count_two_connected(2) == 1);
    CHECK(count_two_connected(4) == 10);
    CHECK_THROWS_AS(count_two_connected(1), SizeLimitError);
    CHECK_THROWS_AS(count_connected(9), SizeLimitError);
}

TEST_CASE("articulation points") {
    CHECK(articulation_points(LabeledGraph::path(3)) == std::vector<Label>{2});
    CHECK(articulation_points(LabeledGraph::complete(3)).empty());
    CHECK(articulation_points(bowtie()) == std::vector<Label>{3});
    CHECK_THROWS_AS(articulation_points(LabeledGraph({1, 2, 3}, {{1, 2}})), DomainError);

    // lowpoint variant agrees with remove-and-test on every connected graph on 5 vertices
    for_each_graph(5, [](const LabeledGraph& g) {
        if (reach_all(g)) CHECK(articulation_points_lowpoint(g) == articulation_points(g));
    });
}

TEST_CASE("block decomposition examples") {
    auto tri = block_decomposition(LabeledGraph::complete(3));
    CHECK(tri.blocks.size() == 1);
    CHECK(tri.cut_vertices.empty());

    auto path = block_decomposition(LabeledGraph::path(3));
    REQUIRE(path.blocks.size() == 2);
    CHECK(path.blocks[0].to_string() == "1 2 | 1-2");
    CHECK(path.blocks[1].to_string() == "2 3 | 2-3");
    CHECK(path.cut_vertices == std::vector<Label>{2});

    auto bt = block_decomposition(bowtie());
    REQUIRE(bt.blocks.size() == 2);
    CHECK(bt.blocks[0] == LabeledGraph::complete(3));
    CHECK(bt.blocks[1] == LabeledGraph::complete(3, 3));
    CHECK(bt.cut_vertices == std::vector<Label>{3});
}

TEST_CASE("block decomposition properties on random connected graphs") {
    std::mt19937 rng(12345);
    for (int trial = 0; trial < 200; ++trial) {
        const int n = 2 + trial % 6;
        const auto g = random_connected(rng, n, 0.35);
        const auto bt = block_decomposition(g);
        LabeledGraph un = bt.blocks.front();
        std::map<Label, int> membership;
        for (const auto& b : bt.blocks) {
            un = un.united(b);
            CHECK(two_connected_oracle(b));
            for (Label v : b.vertices()) ++membership[v];
        }
        CHECK(un == g);
        std::vector<Label> multi;
        for (auto [v, count] : membership)
            if (count >= 2) multi.push_back(v);
        CHECK(multi == bt.cut_vertices);
        CHECK(multi == articulation_points(g));
        for (std::size_t i = 0; i < bt.blocks.size(); ++i)
            for (std::size_t j = i + 1; j < bt.blocks.size(); ++j) {
                int shared = 0;
                for (Label v : bt.blocks[i].vertices()) shared += bt.blocks[j].has_vertex(v);
                CHECK(shared <= 1);
            }
    }
}

TEST_CASE("trees: n^(n-2) distinct labeled trees") {
    CHECK_THROWS_AS(for_each_tree(9, [](const LabeledGraph&) {}), SizeLimitError);
    for (int n = 1; n <= 7; ++n) {
        std::set<std::string> seen;
        std::int64_t count = 0;
        for_each_tree(n, [&](const LabeledGraph& t) {
            ++count;
            CHECK(is_tree(t));
            seen.insert(t.to_string());
        });
        std::int64_t expected = 1;
        for (int k = 0; k < n - 2; ++k) expected *= n;
        CHECK(count == expected);
        CHECK(static_cast<std::int64_t>(seen.size()) == count);
    }
    std::int64_t four = 0;
    for_each_tree(4, [&](const LabeledGraph&) { ++four; });
    CHECK(four == 16);
    // trees on 5 vertices are exactly the connected graphs with 4 edges
    std::int64_t by_scan = 0;
    for_each_graph(5, [&](const LabeledGraph& g) { by_scan += (g.edge_count() == 4 && reach_all(g)); });
    CHECK(by_scan == 125);
}

TEST_CASE("signed connected spanning sums") {
    CHECK(signed_connected_spanning_sum(LabeledGraph::complete(2)) == -1);
    CHECK(signed_connected_spanning_sum(LabeledGraph::complete(3)) == 2);
    CHECK(signed_connected_spanning_sum(LabeledGraph::path(3)) == 1);
    CHECK(signed_connected_spanning_sum(LabeledGraph({1, 2, 3}, {{1, 2}})) == 0);
    CHECK(signed_connected_spanning_sum(LabeledGraph({4}, {})) == 1);

    for (int k = 1; k <= 7; ++k) {
        const std::int64_t sign = (k - 1) % 2 == 0 ? 1 : -1;
        const auto kk = LabeledGraph::complete(k);
        CHECK(signed_connected_spanning_sum(kk) == sign * factorial(k - 1));
        if (k <= 5) CHECK(signed_connected_spanning_sum_direct(kk) == sign * factorial(k - 1));
    }
    CHECK(signed_connected_spanning_sum(LabeledGraph::complete(8)) == -factorial(7));

    // both routes agree on every graph with 5 vertices
    for_each_graph(5, [](const LabeledGraph& g) {
        CHECK(signed_connected_spanning_sum(g) == signed_connected_spanning_sum_direct(g));
    });
}

TEST_CASE("canonical form is a label-permutation invariant") {
    std::map<IsoKey, int> classes;
    for_each_graph(4, [&](const LabeledGraph& g) { ++classes[canonical_form(g)]; });
    CHECK(classes.size() == 11);  // unlabeled graphs on 4 vertices
    int connected_classes = 0;
    for (auto& [key, count] : classes) connected_classes += is_connected(from_iso_key(key));
    CHECK(connected_classes == 6);
    const auto a = LabeledGraph({1, 2, 3, 4}, {{1, 2}, {2, 3}, {3, 4}});
    const auto b = LabeledGraph({1, 2, 3, 4}, {{3, 1}, {1, 4}, {4, 2}});
    CHECK(canonical_form(a) == canonical_form(b));
}
