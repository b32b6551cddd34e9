#include <cmath>

#include "canex/oracle.hpp"
#include "doctest.h"

using namespace canex;

TEST_CASE("trivial partition functions") {
    const BoxGeometry box(1, 10.0);
    CHECK(brute_force_Z(1, box, PairPotential::hard_core(0.1), 1.0).value == doctest::Approx(10.0).epsilon(1e-15));
    CHECK(brute_force_Z(0, box, PairPotential::hard_core(0.1), 1.0).value == 1.0);
    const auto ideal = brute_force_Z(4, BoxGeometry(3, 2.0), PairPotential::zero(), 1.0);
    CHECK(ideal.value == doctest::Approx(std::pow(8.0, 4) / 24).epsilon(1e-14));
    CHECK(ideal.method == OracleMethod::exact_formula);
    CHECK(ideal.error_estimate == 0.0);
}

TEST_CASE("hard rods on a ring") {
    const BoxGeometry box(1, 10.0);
    const auto rod = PairPotential::hard_core(0.1);
    // two rods: the second avoids an arc of length 2 sigma around the first
    CHECK(brute_force_Z(2, box, rod, 1.0).value == doctest::Approx(49.0).epsilon(1e-13));
    CHECK(tonks_exact_Z(2, 10.0, 0.1).value == doctest::Approx(49.0).epsilon(1e-14));
    CHECK(tonks_exact_Z(3, 10.0, 0.1).value == doctest::Approx(10.0 * 9.7 * 9.7 / 6).epsilon(1e-14));
    CHECK(tonks_exact_Z(1, 10.0, 0.1).value == doctest::Approx(10.0).epsilon(1e-15));
    for (int N = 2; N <= 4; ++N) {
        const auto q = brute_force_Z(N, box, rod, 1.0);
        CHECK(std::abs(q.value / tonks_exact_Z(N, 10.0, 0.1).value - 1.0) < 1e-8);
        CHECK(q.error_estimate < 1e-8 * q.value);
    }
    // a tight ring exercises the wrap-around of the exclusion zones
    CHECK(brute_force_Z(3, BoxGeometry(1, 1.0), PairPotential::hard_core(0.3), 1.0).value ==
          doctest::Approx(tonks_exact_Z(3, 1.0, 0.3).value).epsilon(1e-10));
    CHECK_THROWS_AS(tonks_exact_Z(100, 10.0, 0.1), DomainError);
    CHECK_THROWS_AS(brute_force_Z(6, box, rod, 1.0), SizeLimitError);
    CHECK_THROWS_AS(brute_force_Z(5, box, rod, 1.0, OracleMethod::monte_carlo), SizeLimitError);
}

TEST_CASE("quadrature against Monte Carlo and closed forms") {
    const BoxGeometry box(1, 3.0);
    // N = 2: Z = (L/2) times the integral of the Boltzmann factor of one pair
    const auto g = PairPotential::gaussian(0.5, 2.0);
    const int m = 200000;
    double pair = 0.0;
    for (int i = 0; i < m; ++i) {
        const double x = -1.5 + (i + 0.5) * 3.0 / m;
        double e = 0.0;
        for (int k = -3; k <= 3; ++k) e += g.energy(x + 3.0 * k);
        pair += std::exp(-e) * 3.0 / m;
    }
    CHECK(brute_force_Z(2, box, g, 1.0).value == doctest::Approx(1.5 * pair).epsilon(1e-9));

    OracleOptions mc;
    mc.samples = 400000;
    mc.seed = 4;
    const auto sw = PairPotential::square_well(0.2, 0.8, 1.5);
    const auto q = brute_force_Z(3, box, sw, 1.0);
    const auto r = brute_force_Z(3, box, sw, 1.0, OracleMethod::monte_carlo, mc);
    CHECK(std::abs(q.value - r.value) < 4 * r.error_estimate);

    // hard discs, two particles: the second avoids a disc of radius sigma
    const BoxGeometry square(2, 2.0);
    const auto disc = brute_force_Z(2, square, PairPotential::hard_core(0.3), 1.0, OracleMethod::monte_carlo, mc);
    CHECK(std::abs(disc.value - 0.5 * 4.0 * (4.0 - M_PI * 0.09)) < 4 * disc.error_estimate);
}

TEST_CASE("Monte Carlo oracle is deterministic") {
    OracleOptions o;
    o.samples = 40000;
    o.seed = 9;
    const auto sw = PairPotential::square_well(0.2, 0.8, 1.5);
    const auto a = brute_force_Z(3, BoxGeometry(2, 2.0), sw, 1.0, OracleMethod::monte_carlo, o);
    auto threaded = o;
    threaded.workers = 3;
    const auto b = brute_force_Z(3, BoxGeometry(2, 2.0), sw, 1.0, OracleMethod::monte_carlo, threaded);
    CHECK(a.record() == b.record());
    o.seed = 10;
    CHECK(brute_force_Z(3, BoxGeometry(2, 2.0), sw, 1.0, OracleMethod::monte_carlo, o).value != a.value);
}

TEST_CASE("grand-canonical sums") {
    const BoxGeometry box(1, 10.0);
    const auto rod = PairPotential::hard_core(0.1);
    CHECK(brute_force_Xi(0.0, 3, box, rod, 1.0).xi.value == 1.0);

    // ideal gas: partial sums of exp(z |Lambda|)
    const auto ideal = brute_force_Xi(0.1, 5, box, PairPotential::zero(), 1.0);
    CHECK(std::abs(ideal.xi.value / std::exp(1.0) - 1.0) < 1e-3);
    CHECK(ideal.remainder_flagged);
    double previous = 0.0;
    for (int n = 1; n <= 5; ++n) {
        const double gap = std::abs(brute_force_Xi(0.1, n, box, PairPotential::zero(), 1.0).xi.value - std::exp(1.0));
        if (n > 1) CHECK(gap < previous);
        previous = gap;
    }

    // log Xi / |Lambda| against the connected sums b_n
    const double z = 0.05;
    const auto xi = brute_force_Xi(z, 5, box, rod, 1.0);
    ClusterIntegrator zi(periodize(rod, box, 1), 1.0);
    const double series = pressure_activity_series(z, 5, zi).value;
    CHECK(std::abs(xi.log_per_volume(10.0) - series) <= xi.remainder_bound / xi.xi.value / 10.0 + 1e-9);

    const auto exact = tonks_exact_Xi(0.1, 99, 10.0, 0.1);
    CHECK_FALSE(exact.remainder_flagged);
    CHECK(std::abs(exact.log_per_volume(10.0) - pressure_activity_series(0.1, 3, zi).value) < 1e-4);
    CHECK(tonks_exact_Xi(z, 5, 10.0, 0.1).xi.value == doctest::Approx(xi.xi.value).epsilon(1e-12));
}

TEST_CASE("expansion audits") {
    ExpansionParams p;
    p.N = 3;
    p.box = BoxGeometry(1, 10.0);
    p.potential = PairPotential::zero();
    p.n_max = 2;
    p.M = 6;
    const auto ideal = compare_expansion_vs_oracle(p);
    CHECK(ideal.discrepancy == 0.0);
    CHECK(ideal.pass);

    p.potential = PairPotential::hard_core(0.1);
    const auto run = compare_expansion_vs_oracle(p);
    CHECK(run.pass);
    CHECK(run.discrepancy <= 1e-3);
    CHECK(run.oracle_method == OracleMethod::exact_formula);
    CHECK(run.to_records().rfind("audit;result=PASS", 0) == 0);

    p.M = 3;
    const auto coarse = compare_expansion_vs_oracle(p);
    CHECK(coarse.pass);
    CHECK(coarse.discrepancy > run.discrepancy);
    CHECK(coarse.budget > run.budget);

    // discrepancy shrinks along M = 2 n_max, which keeps every tree-like cluster up to order n_max
    for (int N = 3; N <= 5; ++N) {
        p.N = N;
        double previous = INFINITY;
        for (int n_max = 1; n_max < N; ++n_max) {
            p.n_max = n_max;
            p.M = 2 * n_max;
            const double d = compare_expansion_vs_oracle(p).discrepancy;
            CHECK(d < previous);
            previous = d;
        }
    }

    // square well against quadrature
    p.potential = PairPotential::square_well(0.1, 0.5, 1.5);
    p.N = 3;
    p.n_max = 2;
    p.M = 6;
    const auto sw = compare_expansion_vs_oracle(p);
    CHECK(sw.oracle_method == OracleMethod::quadrature);
    CHECK(sw.discrepancy < 1e-5);
}
