import math
from fractions import Fraction

import pytest

import canex


def test_graph_counts():
    assert len(canex.graphs("trees", 4)) == 16
    assert len(canex.graphs("two-connected", 4)) == 10
    assert canex.graphs("connected", 3)[0] == "1 2 3 | 1-2 1-3"
    assert [canex.count_connected(n) for n in range(1, 6)] == [1, 1, 4, 38, 728]


def test_exact_coefficients():
    complete = [(i, j) for i in range(4) for j in range(i)]
    assert canex.ursell_coefficient([(i, 1) for i in range(4)], 4, complete) == Fraction(-6)
    assert canex.restricted_cluster_sum("1 2 3 | 1-2 2-3", 6) == 0
    assert canex.restricted_cluster_sum("1 2 3 | 1-2 1-3 2-3", 3) != 0


def test_hard_rod_expansion_matches_tonks():
    p = canex.ExpansionParams()
    p.N = 3
    p.box = canex.BoxGeometry(1, 10.0)
    p.potential = canex.PairPotential.hard_core(0.1)
    p.n_max = 2
    p.M = 8
    report = canex.log_Z_canonical(p)
    assert report.certificate == "analytic"
    assert len(report.rows) == 2
    exact = canex.tonks_exact_Z(3, 10.0, 0.1) / 10.0
    assert abs(report.log_Z_per_volume - exact) < 1e-6


def test_quadrature_oracle_and_virial():
    rod = canex.PairPotential.hard_core(0.1)
    z2 = canex.brute_force_Z(2, canex.BoxGeometry(1, 10.0), rod, 1.0)
    assert z2 == pytest.approx(49.0, rel=1e-12)
    b1 = canex.beta_n(1, rod, 1.0, 1)
    assert b1.value == pytest.approx(-0.2, abs=1e-12)
    assert canex.virial_coefficients([b1.value])[0] == pytest.approx(0.1)
    assert canex.virial_pressure(0.5, [0.0], 1) == 0.5


def test_errors_are_typed():
    with pytest.raises(canex.DomainError):
        canex.PairPotential.hard_core(-1.0)
    p = canex.ExpansionParams()
    p.N = 0
    with pytest.raises(canex.CanexError):
        p.validate()
