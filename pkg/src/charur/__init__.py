"""Characteristic uncertainty relations for sets of quantum observables.

The order-r relation compares the characteristic coefficients (sums of
order-r principal minors) of the uncertainty matrix sigma and of the
mean-commutator matrix C: C_r(sigma) >= C_r(C) for r = 1..n.
"""

from .algebra import (
    ObservableSet,
    RepSpec,
    build_observables,
    fock_quadratures,
    su11_generators,
    su2_generators,
)
from .matcore import char_coeffs_faddeev, char_coeffs_minors, principal_minor, williamson
from .moments import MomentPair, moment_pair
from .mussearch import SearchSpec, minimize_gap, sweep
from .states import QuantumState, make_state
from .urengine import characteristic_ur, pairwise_schrodinger, trace_ur

__all__ = [
    "MomentPair",
    "ObservableSet",
    "QuantumState",
    "RepSpec",
    "SearchSpec",
    "build_observables",
    "char_coeffs_faddeev",
    "char_coeffs_minors",
    "characteristic_ur",
    "fock_quadratures",
    "make_state",
    "minimize_gap",
    "moment_pair",
    "pairwise_schrodinger",
    "principal_minor",
    "su11_generators",
    "su2_generators",
    "sweep",
    "trace_ur",
    "williamson",
]
