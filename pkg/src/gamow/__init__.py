"""Resonance (Gamow) functionals on a Paley-Wiener energy representation.

Energy-space wave functions are entire functions of compact-support Fourier
type, stored as samples of their tau-space preimage (:mod:`gamow.zrep`).
Observables compatible with the free Hamiltonian live in :mod:`gamow.algebra`,
states and the pairing ``(rho|O)`` in :mod:`gamow.states`, and time evolution
in :mod:`gamow.dynamics`.
"""

from .algebra import (
    BasisTag,
    DiagonalSymbol,
    KernelSymbol,
    KernelTerm,
    Observable,
    adjoint,
    hamiltonian_power,
    identity,
    is_self_adjoint,
    kernel_observable,
    multiply,
)
from .dynamics import decay_scan, evolve_functional, evolve_observable, survival_curve
from .errors import BasisMismatch, InvalidArgument, RangeGuardError, UnsupportedDegree
from .states import (
    Functional,
    ResonancePole,
    delta_diag,
    delta_kernel,
    gamow,
    mixture,
    pair,
    positivity_audit,
    pure_state,
)
from .zrep import (
    PairingResult,
    PolySymbol,
    QuadratureConfig,
    TauRep,
    halfline_integral,
    make_bump,
    poly_action,
    product,
    wavepacket,
)

__version__ = "0.1.0"

__all__ = [
    "BasisMismatch", "BasisTag", "DiagonalSymbol", "Functional", "InvalidArgument",
    "KernelSymbol", "KernelTerm", "Observable", "PairingResult", "PolySymbol",
    "QuadratureConfig", "RangeGuardError", "ResonancePole", "TauRep", "UnsupportedDegree",
    "adjoint", "decay_scan", "delta_diag", "delta_kernel", "evolve_functional",
    "evolve_observable", "gamow", "halfline_integral", "hamiltonian_power", "identity",
    "is_self_adjoint", "kernel_observable", "make_bump", "mixture", "multiply", "pair",
    "poly_action", "positivity_audit", "product", "pure_state", "survival_curve", "wavepacket",
]
