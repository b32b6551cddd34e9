#include <cmath>
#include <random>

#include "canex/integrals.hpp"
#include "doctest.h"

using namespace canex;

namespace {

ClusterIntegrator rods(double sigma, double L, IntegrationOptions opt = {}) {
    return ClusterIntegrator(periodize(PairPotential::hard_core(sigma), BoxGeometry(1, L), 1), 1.0, opt);
}

// Midpoint-grid value of the triangle integral for hard rods: the fraction of (x2, x3)
// with all three pairwise distances below sigma, times (-1)^3.
double triangle_grid(double sigma, double L, int m) {
    const double h = 2 * sigma / m;
    double count = 0;
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) {
            const double a = -sigma + (i + 0.5) * h, b = -sigma + (j + 0.5) * h;
            if (std::abs(b - a) < sigma) count += 1;
        }
    return -count * h * h / (L * L);
}

}  // namespace

TEST_CASE("graph activities of hard rods") {
    auto zi = rods(0.1, 10.0);
    const auto k2 = zi.zeta_tilde(LabeledGraph::complete(2));
    CHECK(k2.value == doctest::Approx(-0.02).epsilon(1e-12));
    CHECK(k2.method == Method::quadrature);
    CHECK(zi.zeta_tilde(LabeledGraph::path(3)).value == doctest::Approx(4e-4).epsilon(1e-12));
    // triangle: -(3/4)(2 sigma)^2 / L^2, exactly
    const double tri = zi.zeta_tilde(LabeledGraph::complete(3)).value;
    CHECK(tri == doctest::Approx(-0.75 * 0.04 / 100).epsilon(1e-12));
    CHECK(tri == doctest::Approx(triangle_grid(0.1, 10.0, 2000)).epsilon(1e-3));
    CHECK(zi.cache_size() == 3);
    // labels do not matter
    CHECK(zi.zeta_tilde(LabeledGraph::parse("2 5 9 | 2-9 5-9")).value == doctest::Approx(4e-4).epsilon(1e-12));
    CHECK(zi.cache_size() == 3);
    CHECK_THROWS_AS(zi.zeta_tilde(LabeledGraph::parse("1 2 3 | 1-2")), DomainError);
}

TEST_CASE("trees agree with the product closed form") {
    for (auto v : {PairPotential::hard_core(0.1), PairPotential::square_well(0.1, 0.7, 1.6),
                   PairPotential::gaussian(0.6, 3.0)}) {
        ClusterIntegrator zi(periodize(v, BoxGeometry(1, 3.0), 3), 1.2);
        for_each_tree(4, [&](const LabeledGraph& t) {
            const auto r = zi.zeta_tilde_with(t, Method::quadrature);
            CHECK(r.method == Method::quadrature);
            CHECK(r.value == doctest::Approx(zi.tree_weight_closed_form(t)).epsilon(1e-8));
        });
        for_each_tree(5, [&](const LabeledGraph& t) {
            CHECK(zi.zeta_tilde(t).value == doctest::Approx(zi.tree_weight_closed_form(t)).epsilon(1e-12));
        });
    }
}

TEST_CASE("two routes to the polymer activity") {
    for (auto v : {PairPotential::hard_core(0.2), PairPotential::square_well(0.1, 0.5, 1.5),
                   PairPotential::gaussian(0.4, 4.0)}) {
        ClusterIntegrator zi(periodize(v, BoxGeometry(1, 2.0), 3), 1.0);
        for (int n = 2; n <= 3; ++n) {
            const auto a = zi.zeta_vertex(n, ClusterIntegrator::VertexRoute::graph_sum);
            const auto b = zi.zeta_vertex(n, ClusterIntegrator::VertexRoute::inclusion_exclusion);
            CHECK(a.value == doctest::Approx(b.value).epsilon(1e-10).scale(1e-12));
        }
    }
}

TEST_CASE("connected class tables") {
    std::int64_t total = 0;
    for (const auto& [key, count] : connected_class_counts(4)) total += count;
    CHECK(total == 38);
    total = 0;
    for (const auto& [key, count] : connected_class_counts(5)) total += count;
    CHECK(total == 728);
    CHECK(connected_class_counts(5).size() == 21);
    total = 0;
    for (const auto& [key, count] : two_connected_class_counts(4)) total += count;
    CHECK(total == 10);
    CHECK(two_connected_class_counts(4).size() == 3);
}

TEST_CASE("tree-graph bound") {
    auto zi = rods(0.1, 10.0);
    const double bound = zi.tree_graph_bound(2, 1.0);
    CHECK(bound == doctest::Approx(std::exp(2.0) * 0.02).epsilon(1e-12));
    for (int n = 2; n <= 4; ++n) CHECK(std::abs(zi.zeta_vertex(n).value) <= zi.tree_graph_bound(n, 0.0));
}

TEST_CASE("connected sums b_n") {
    // hard rods: second cluster integral -sigma in the box when L > 2 sigma
    auto zi = rods(0.1, 10.0);
    CHECK(zi.b_n_connected(1).value == 1.0);
    CHECK(zi.b_n_connected(2).value == doctest::Approx(-0.1).epsilon(1e-12));
    CHECK_THROWS_AS(zi.b_n_connected(6), SizeLimitError);
}

TEST_CASE("irreducible coefficients of hard rods") {
    const auto rod = PairPotential::hard_core(0.3);
    CHECK(beta_n(1, rod, 1.0, 1).value == doctest::Approx(-0.6).epsilon(1e-12));
    CHECK(beta_n(2, rod, 1.0, 1).value == doctest::Approx(-1.5 * 0.09).epsilon(1e-10));
    // pressure series 1/(1 - rho sigma) gives beta_k = -(k+1)/k sigma^k
    CHECK(beta_n(3, rod, 1.0, 1).value == doctest::Approx(-4.0 / 3.0 * 0.027).epsilon(1e-10));
}

TEST_CASE("hard-sphere beta_1 by Monte Carlo") {
    const double sigma = 0.5;
    IntegrationOptions opt;
    opt.method = Method::monte_carlo;
    opt.samples = 200000;
    opt.seed = 11;
    const auto r = beta_n(1, PairPotential::hard_core(sigma), 1.0, 3, opt, 1.0);
    const double exact = -4.0 * M_PI / 3.0 * sigma * sigma * sigma;
    CHECK(r.method == Method::monte_carlo);
    CHECK(std::abs(r.value - exact) < 3 * r.error);
    CHECK(beta_n(1, PairPotential::hard_core(sigma), 1.0, 3).value == doctest::Approx(exact).epsilon(1e-10));
}

TEST_CASE("Monte Carlo determinism and scaling") {
    IntegrationOptions opt;
    opt.method = Method::monte_carlo;
    opt.samples = 50000;
    opt.seed = 5;
    const auto cycle = LabeledGraph::complete(3);
    auto run = [&](IntegrationOptions o) {
        ClusterIntegrator zi(periodize(PairPotential::square_well(0.2, 0.5, 1.5), BoxGeometry(2, 1.0), 1), 1.0, o);
        return zi.zeta_tilde_with(cycle, o.method);
    };
    const auto a = run(opt);
    auto threaded = opt;
    threaded.workers = 4;
    const auto b = run(threaded);
    CHECK(a.value == b.value);
    CHECK(a.error == b.error);
    CHECK(a.record() == b.record());
    auto other = opt;
    other.seed = 6;
    CHECK(run(other).value != a.value);

    auto big = opt;
    big.samples = 4 * opt.samples;
    const double ratio = a.error / run(big).error;
    CHECK(ratio > 1.6);
    CHECK(ratio < 2.6);

    // importance sampling agrees with uniform sampling
    auto imp = opt;
    imp.method = Method::importance;
    const auto c = run(imp);
    CHECK(c.method == Method::importance);
    CHECK(std::abs(c.value - a.value) < 4 * std::hypot(a.error, c.error));
    CHECK(c.error < a.error);
}

TEST_CASE("square-well 2D tree uses the closed form") {
    ClusterIntegrator zi(periodize(PairPotential::square_well(0.1, 0.5, 1.5), BoxGeometry(2, 1.0), 1), 1.0);
    const auto r = zi.zeta_tilde(LabeledGraph::path(3));
    CHECK(r.value == doctest::Approx(zi.tree_weight_closed_form(LabeledGraph::path(3))).epsilon(1e-12));
    CHECK(to_string(Method::monte_carlo) == "monte-carlo");
    CHECK(parse_method("mc") == Method::monte_carlo);
    CHECK_THROWS_AS(parse_method("simpson"), DomainError);
}
