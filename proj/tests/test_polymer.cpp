#include <cmath>
#include <map>
#include <random>
#include <set>

#include "canex/errors.hpp"
#include "canex/polymer.hpp"
#include "doctest.h"

using namespace canex;

namespace {

using Monomial = std::vector<int>;
using Poly = std::map<Monomial, Rational>;

int degree(const Monomial& m) {
    int d = 0;
    for (int e : m) d += e;
    return d;
}

Poly multiply(const Poly& a, const Poly& b, int max_degree) {
    Poly out;
    for (const auto& [ma, ca] : a)
        for (const auto& [mb, cb] : b) {
            Monomial m(ma.size());
            for (std::size_t i = 0; i < m.size(); ++i) m[i] = ma[i] + mb[i];
            if (degree(m) > max_degree) continue;
            out[m] += ca * cb;
        }
    return out;
}

// log Z as a truncated power series in the formal weights: Z is the multilinear
// polynomial sum over compatible collections, and log(1 + P) is expanded term by term.
Poly log_partition_series(const PolymerSpace& space, int max_degree) {
    const std::size_t n = space.size();
    Poly p;
    for (std::uint32_t s = 1; s < (1u << n); ++s) {
        bool ok = true;
        for (std::size_t i = 0; i < n && ok; ++i)
            for (std::size_t j = i + 1; j < n && ok; ++j)
                if (((s >> i) & 1u) && ((s >> j) & 1u) && space.incompatible(i, j)) ok = false;
        if (!ok) continue;
        Monomial m(n, 0);
        for (std::size_t i = 0; i < n; ++i) m[i] = (s >> i) & 1u;
        if (degree(m) <= max_degree) p[m] += 1;
    }
    Poly out;
    Poly power = p;
    for (int k = 1; k <= max_degree; ++k) {
        const Rational coeff(k % 2 ? 1 : -1, k);
        for (const auto& [m, c] : power) out[m] += coeff * c;
        power = multiply(power, p, max_degree);
    }
    return out;
}

PolymerSpace space_from_mask(int n, std::uint32_t mask) {
    std::vector<std::string> names;
    for (int i = 0; i < n; ++i) names.push_back("g" + std::to_string(i + 1));
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    int bit = 0;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j, ++bit)
            if ((mask >> bit) & 1u) pairs.emplace_back(i, j);
    return PolymerSpace(names, pairs);
}

PolymerSpace complete_space(int k) { return space_from_mask(k, (1u << (k * (k - 1) / 2)) - 1u); }

void for_each_multi_index(std::size_t n, int max_total, const std::function<void(const MultiIndex&)>& fn) {
    std::vector<int> m(n, 0);
    std::function<void(std::size_t, int)> rec = [&](std::size_t k, int left) {
        if (k == n) {
            std::vector<std::pair<std::size_t, int>> entries;
            for (std::size_t i = 0; i < n; ++i)
                if (m[i]) entries.emplace_back(i, m[i]);
            if (!entries.empty()) fn(MultiIndex(entries));
            return;
        }
        for (int e = 0; e <= left; ++e) {
            m[k] = e;
            rec(k + 1, left - e);
        }
        m[k] = 0;
    };
    rec(0, max_total);
}

}  // namespace

TEST_CASE("polymer space construction") {
    PolymerSpace s({"a", "b", "c"}, {{0, 1}});
    CHECK(s.incompatible(0, 0));
    CHECK(s.incompatible(1, 0));
    CHECK_FALSE(s.incompatible(0, 2));
    CHECK(s.neighbours(0) == std::vector<std::size_t>{1});
    CHECK(s.index_of("c") == 2);
    CHECK_THROWS_AS((void)s.index_of("zz"), DomainError);
    CHECK_THROWS_AS(PolymerSpace({"a", "a"}, {}), DomainError);
    CHECK_THROWS_AS(PolymerSpace({"a"}, {{0, 3}}), DomainError);
    CHECK_THROWS_AS(PolymerSystem<double>(s, {0.1, NAN, 0.0}), DomainError);
    CHECK_THROWS_AS(PolymerSystem<double>(s, {0.1}), DomainError);

    auto sup = PolymerSpace::from_supports({"x", "y", "z"}, {0b011, 0b110, 0b1000});
    CHECK(sup.incompatible(0, 1));
    CHECK_FALSE(sup.incompatible(0, 2));
    CHECK(sup.polymer_size(1) == 2);
    MultiIndex idx({{0, 2}, {2, 1}});
    CHECK(idx.norm(sup) == 5);
    CHECK(idx.union_size(sup) == 3);
    CHECK_THROWS_AS((void)idx.union_size(s), DomainError);
    CHECK_THROWS_AS(MultiIndex({{0, 0}}), DomainError);
}

TEST_CASE("expanded incompatibility graph") {
    PolymerSpace s({"a", "b", "c"}, {{0, 1}});
    CHECK(expanded_incompatibility_graph(MultiIndex({{0, 1}}), s).to_string() == "1 |");
    CHECK(expanded_incompatibility_graph(MultiIndex({{0, 2}}), s) == LabeledGraph::complete(2));
    CHECK(expanded_incompatibility_graph(MultiIndex({{0, 1}, {1, 1}}), s) == LabeledGraph::complete(2));
    CHECK(expanded_incompatibility_graph(MultiIndex({{0, 1}, {2, 1}}), s).edge_count() == 0);
    CHECK_THROWS_AS(expanded_incompatibility_graph(MultiIndex({{7, 1}}), s), DomainError);
}

TEST_CASE("ursell coefficient examples") {
    PolymerSpace s = complete_space(3);
    CHECK(ursell_coefficient(MultiIndex({{0, 1}}), s) == 1);
    CHECK(ursell_coefficient(MultiIndex({{0, 1}, {1, 1}}), s) == -1);
    CHECK(ursell_coefficient(MultiIndex({{0, 2}}), s) == Rational(-1, 2));
    CHECK(ursell_coefficient(MultiIndex({{0, 1}, {1, 1}, {2, 1}}), s) == 2);
    PolymerSpace loose({"a", "b"}, {});
    CHECK(ursell_coefficient(MultiIndex({{0, 1}, {1, 1}}), loose) == 0);
    CHECK_THROWS_AS(ursell_coefficient(MultiIndex({{0, 9}}), s), SizeLimitError);
}

TEST_CASE("complete incompatibility identity") {
    Rational factorial = 1;
    for (int k = 1; k <= 6; ++k) {
        if (k > 1) factorial *= (k - 1);
        PolymerSpace s = complete_space(k);
        std::vector<std::pair<std::size_t, int>> e;
        for (int i = 0; i < k; ++i) e.emplace_back(i, 1);
        const Rational expected = (k % 2 ? 1 : -1) * factorial;
        CHECK(ursell_coefficient(MultiIndex(e), s) == expected);
    }
    // a single polymer repeated k times gives the log(1+w) coefficient
    PolymerSpace one({"a"}, {});
    for (int k = 1; k <= 8; ++k)
        CHECK(ursell_coefficient(MultiIndex({{0, k}}), one) == Rational(k % 2 ? 1 : -1, k));
}

TEST_CASE("ursell coefficient equals the log-derivative route on every small system") {
    int systems = 0;
    for (int n = 1; n <= 4; ++n) {
        const int pairs = n * (n - 1) / 2;
        for (std::uint32_t mask = 0; mask < (1u << pairs); ++mask) {
            PolymerSpace s = space_from_mask(n, mask);
            const Poly log_z = log_partition_series(s, 4);
            for_each_multi_index(s.size(), 4, [&](const MultiIndex& idx) {
                Monomial m(n, 0);
                for (auto [p, k] : idx.entries()) m[p] = k;
                const auto it = log_z.find(m);
                const Rational expected = it == log_z.end() ? Rational(0) : it->second;
                CHECK(ursell_coefficient(idx, s) == expected);
            });
            ++systems;
        }
    }
    CHECK(systems == 1 + 2 + 8 + 64);
}

TEST_CASE("cluster enumeration visits exactly the connected-support multi-indices") {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 40; ++trial) {
        const int n = 2 + trial % 4;
        const std::uint32_t mask = std::uniform_int_distribution<std::uint32_t>(0, (1u << (n * (n - 1) / 2)) - 1)(rng);
        PolymerSpace s = space_from_mask(n, mask);
        std::vector<int> cost(n);
        for (auto& c : cost) c = 1 + int(rng() % 2);
        const int budget = 4;
        std::set<MultiIndex> seen;
        for_each_cluster(s, cost, budget, [&](const MultiIndex& idx) { CHECK(seen.insert(idx).second); });
        std::set<MultiIndex> expected;
        for_each_multi_index(n, budget, [&](const MultiIndex& idx) {
            int spent = 0;
            for (auto [p, k] : idx.entries()) spent += k * cost[p];
            if (spent > budget) return;
            if (ursell_coefficient(idx, s) != 0) expected.insert(idx);
        });
        for (const auto& idx : expected) CHECK(seen.count(idx) == 1);
        // everything visited has a connected support
        for (const auto& idx : seen) {
            std::vector<std::size_t> sup = idx.support();
            MultiIndex simple([&] {
                std::vector<std::pair<std::size_t, int>> e;
                for (auto p : sup) e.emplace_back(p, 1);
                return e;
            }());
            CHECK(ursell_coefficient(simple, s) != 0);
        }
    }
}

TEST_CASE("direct partition function") {
    PolymerSpace one({"a"}, {});
    CHECK(partition_function_direct(PolymerSystem<Rational>(one, {Rational(1, 3)})) == Rational(4, 3));
    PolymerSpace comp({"a", "b"}, {});
    CHECK(partition_function_direct(PolymerSystem<Rational>(comp, {2, 3})) == 12);
    PolymerSpace inc({"a", "b"}, {{0, 1}});
    CHECK(partition_function_direct(PolymerSystem<Rational>(inc, {2, 3})) == 6);
    std::vector<std::string> many;
    for (int i = 0; i < 21; ++i) many.push_back("p" + std::to_string(i));
    CHECK_THROWS_AS(partition_function_direct(PolymerSystem<double>(PolymerSpace(many, {}), std::vector<double>(21, 0.1))),
                    SizeLimitError);
}

TEST_CASE("cluster log sum") {
    PolymerSpace one({"a"}, {});
    const Rational w(1, 10);
    auto sum = cluster_log_sum(PolymerSystem<Rational>(one, {w}), 6);
    Rational power = 1;
    for (int k = 1; k <= 6; ++k) {
        power *= w;
        CHECK(sum.by_order[k] == Rational(k % 2 ? 1 : -1, k) * power);
    }

    PolymerSpace inc({"a", "b"}, {{0, 1}});
    auto pair = cluster_log_sum(PolymerSystem<double>(inc, {0.01, 0.01}), 4);
    CHECK(std::abs(pair.total - std::log(1.02)) < 1e-9);

    PolymerSpace comp({"a", "b"}, {});
    auto split = cluster_log_sum(PolymerSystem<Rational>(comp, {Rational(1, 5), Rational(1, 7)}), 5);
    auto a = cluster_log_sum(PolymerSystem<Rational>(one, {Rational(1, 5)}), 5);
    auto b = cluster_log_sum(PolymerSystem<Rational>(one, {Rational(1, 7)}), 5);
    for (int k = 1; k <= 5; ++k) CHECK(split.by_order[k] == a.by_order[k] + b.by_order[k]);
}

TEST_CASE("exponentiated cluster sum converges to the partition function") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> weight(-0.05, 0.05);
    for (int trial = 0; trial < 20; ++trial) {
        const int n = 2 + trial % 5;
        const std::uint32_t mask = std::uniform_int_distribution<std::uint32_t>(0, (1u << (n * (n - 1) / 2)) - 1)(rng);
        std::vector<double> w(n);
        for (auto& x : w) x = weight(rng);
        PolymerSystem<double> sys(space_from_mask(n, mask), w);
        const double exact = std::log(partition_function_direct(sys));
        double previous = INFINITY;
        for (int m = 2; m <= 8; m += 2) {
            const double err = std::abs(cluster_log_sum(sys, m).total - exact);
            CHECK(err <= previous + 1e-15);
            previous = err;
        }
        CHECK(previous < 1e-9);

        std::vector<double> a(n, 0.2), c(n, 0.2);
        const auto cert = kp_condition_check(sys, a, c, 0.06);
        if (cert.holds) {
            const int m = 5;
            CHECK(std::abs(cluster_log_sum(sys, m).total - exact) <= cluster_tail_bound(sys, a, c, 0.06, m));
        }
    }
}

TEST_CASE("convergence certificate") {
    PolymerSpace one({"a"}, {});
    const std::vector<double> a{0.1}, c{0.1};
    auto zero = kp_condition_check(PolymerSystem<double>(one, {0.0}), a, c, 0.06);
    CHECK(zero.holds);
    CHECK(zero.sum_margin[0] == doctest::Approx(0.1 / kp_constant(0.06)));

    PolymerSystem<double> sys(one, {0.05});
    auto cert = kp_condition_check(sys, a, c, 0.06);
    CHECK(cert.holds);
    // hand arithmetic: 0.05 e^0.2 = 0.0610701 <= 0.1 / L(0.06) = 0.0969393
    CHECK(cert.sum_margin[0] == doctest::Approx(0.1 / (-std::log(0.94) / 0.06) - 0.05 * std::exp(0.2)));
    CHECK(cert.smallness_margin[0] == doctest::Approx(0.06 - 0.05 * std::exp(0.1)));

    auto big = kp_condition_check(PolymerSystem<double>(one, {0.5}), a, c, 0.06);
    CHECK_FALSE(big.holds);
    CHECK(big.failed_hypothesis == "smallness");

    CHECK_THROWS_AS(kp_condition_check(sys, a, c, 1.0), DomainError);
    CHECK_THROWS_AS(kp_condition_check(sys, a, c, 0.0), DomainError);
    CHECK(kp_constant(1e-6) == doctest::Approx(1.0).epsilon(1e-5));
}

TEST_CASE("pinned cluster bound") {
    PolymerSpace one({"a"}, {});
    const std::vector<double> a{0.1}, c{0.1};
    PolymerSystem<double> sys(one, {0.05});
    const double rhs = pinned_cluster_bound(sys, 0, a, c, 0.06);
    CHECK(rhs == doctest::Approx(kp_constant(0.06) * 0.05 * std::exp(0.2)));
    const double lhs = pinned_cluster_sum(sys, 0, c, 6);
    // single polymer: sum_k w^k e^{0.1 k} / k = -log(1 - 0.05 e^0.1) truncated
    double series = 0.0;
    for (int k = 1; k <= 6; ++k) series += std::pow(0.05 * std::exp(0.1), k) / k;
    CHECK(lhs == doctest::Approx(series));
    CHECK(lhs <= rhs);

    PolymerSystem<double> zero(one, {0.0});
    CHECK(pinned_cluster_bound(zero, 0, a, c, 0.06) == 0.0);
    CHECK(pinned_cluster_sum(zero, 0, c, 6) == 0.0);

    PolymerSpace inc({"a", "b"}, {{0, 1}});
    PolymerSystem<double> pair(inc, {0.02, 0.02});
    const std::vector<double> a2{0.1, 0.1}, c2{0.1, 0.1};
    CHECK(pinned_cluster_bound(pair, 0, a2, c2, 0.06) == pinned_cluster_bound(pair, 1, a2, c2, 0.06));
    CHECK(pinned_cluster_sum(pair, 0, c2, 6) <= pinned_cluster_bound(pair, 0, a2, c2, 0.06));

    CHECK_THROWS_AS(pinned_cluster_bound(PolymerSystem<double>(one, {0.5}), 0, a, c, 0.06), DomainError);
}

TEST_CASE("product structure") {
    SUBCASE("compatible base pair") {
        PolymerSpace s({"b1", "b2"}, {});
        PolymerSystem<Rational> sys(s, {Rational(1, 3), Rational(-1, 4)});
        ProductStructure ps{{0, 1}, {{{0}, 0}, {{1}, 1}}};
        for (const auto& row : product_structure_cancellation(sys, ps, 6)) CHECK(row.residual == 0);
    }
    SUBCASE("incompatible pair with a merged polymer") {
        // g12 conflicts with everything the pair touches
        PolymerSpace s({"b1", "b2", "g12"}, {{0, 1}, {0, 2}, {1, 2}});
        const Rational x(1, 3), y(-2, 5);
        PolymerSystem<Rational> sys(s, {x, y, x * y});
        ProductStructure ps{{0, 1}, {{{0}, 0}, {{1}, 1}, {{0, 1}, 2}}};
        auto rows = product_structure_cancellation(sys, ps, 6);
        CHECK(rows.size() == 6);
        for (const auto& row : rows) CHECK(row.residual == 0);
        CHECK(rows[1].rhs == -(x * x + y * y) / 2);
    }
    SUBCASE("three-block chain") {
        // b1 ~ b3 compatible, b1 !~ b2, b2 !~ b3; images for {b1,b2}, {b2,b3}, {b1,b2,b3}
        const std::vector<std::string> names{"b1", "b2", "b3", "g12", "g23", "g123"};
        auto subsets = std::vector<std::vector<std::size_t>>{{0}, {1}, {2}, {0, 1}, {1, 2}, {0, 1, 2}};
        std::vector<std::pair<std::size_t, std::size_t>> pairs;
        for (std::size_t i = 0; i < subsets.size(); ++i)
            for (std::size_t j = i + 1; j < subsets.size(); ++j) {
                bool touch = false;
                for (auto u : subsets[i])
                    for (auto v : subsets[j])
                        if (u == v || (u == 1 && v != 1) || (v == 1 && u != 1)) touch = true;
                if (touch) pairs.emplace_back(i, j);
            }
        PolymerSpace s(names, pairs);
        const Rational x(1, 2), y(1, 3), z(-1, 7);
        PolymerSystem<Rational> sys(s, {x, y, z, x * y, y * z, x * y * z});
        ProductStructure ps{{0, 1, 2}, {{{0}, 0}, {{1}, 1}, {{2}, 2}, {{0, 1}, 3}, {{1, 2}, 4}, {{0, 1, 2}, 5}}};
        for (const auto& row : product_structure_cancellation(sys, ps, 6)) CHECK(row.residual == 0);

        PolymerSystem<Rational> broken(s, {x, y, z, x * y + 1, y * z, x * y * z});
        try {
            product_structure_cancellation(broken, ps, 6);
            FAIL("factorization violation not reported");
        } catch (const DomainError& e) {
            CHECK(std::string(e.what()).find("{b1,b2}") != std::string::npos);
        }
        ProductStructure missing = ps;
        missing.phi.erase({0, 1, 2});
        CHECK_THROWS_AS(verify_product_structure(sys, missing), DomainError);
        ProductStructure not_identity = ps;
        not_identity.phi[{0}] = 3;
        CHECK_THROWS_AS(verify_product_structure(sys, not_identity), DomainError);
    }
}
