"""Python interface to the canonical cluster expansion core."""

from fractions import Fraction

from ._canex import (
    BoxGeometry,
    CanexError,
    ConvergenceError,
    DomainError,
    ExpansionParams,
    IntegrationOptions,
    PairPotential,
    SizeLimitError,
    beta_n,
    brute_force_Z,
    count_connected,
    count_two_connected,
    free_energy_density,
    graphs,
    log_Z_canonical,
    p_factor,
    tonks_exact_Z,
    virial_coefficients,
    virial_pressure,
)
from . import _canex


def ursell_coefficient(entries, polymers, incompatible):
    """Exact c_I for a multi-index given as (polymer, multiplicity) pairs."""
    return Fraction(_canex.ursell_coefficient_text(list(entries), polymers, list(incompatible)))


def restricted_cluster_sum(graph, M):
    """Restricted block-cluster sum of a graph in canonical text form, as a Fraction."""
    return Fraction(_canex.restricted_cluster_sum_text(graph, M))


__all__ = [name for name in dir() if not name.startswith("_")]
