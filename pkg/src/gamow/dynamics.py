"""Time evolution of observables and functionals, and the Gamow decay law.

Conjugation by ``exp(itH)`` multiplies the kernel symbol by
``exp(it(E - E'))`` and leaves the diagonal symbol alone. On the tau grid
that factor is a pure translation of each kernel factor, so evolved
observables stay in the algebra for every real ``t``.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass, replace

import numpy as np

from .algebra import KernelSymbol, KernelTerm, Observable
from .errors import RangeGuardError
from .states import (
    Functional,
    KernelComponent,
    KernelMass,
    ResonancePole,
    gamow,
    pair,
    pair_diagonal,
    pair_kernel,
)
from .zrep import EXP_GUARD, PairingResult, QuadratureConfig, translate


def evolve_observable(obs: Observable, t: float) -> Observable:
    """Heisenberg picture: ``exp(itH) O exp(-itH)``."""
    if t == 0:
        return obs
    terms = tuple(KernelTerm(w, translate(a, t), translate(b, -t)) for w, a, b in obs.kernel.terms)
    return replace(obs, kernel=KernelSymbol(terms))


def evolve_functional(rho: Functional, t: float) -> Functional:
    """Schroedinger picture: ``rho_EE' -> exp(it(E - E')) rho_EE'``.

    Point masses at complex ``(z_a, z_b)`` pick up ``exp(it(z_a - z_b))``;
    for the Gamow mass this is ``exp(-gamma t)``.
    """
    if t == 0:
        return rho
    masses = []
    for w, za, zb in rho.kernel.point_masses:
        growth = t * (za - zb).imag
        if abs(growth) >= EXP_GUARD:
            raise RangeGuardError(f"|t Im(z_a - z_b)| = {abs(growth):.1f} exceeds {EXP_GUARD}")
        masses.append(KernelMass(w * cmath.exp(1j * t * (za - zb)), za, zb))
    density = tuple(KernelTerm(w, translate(a, t), translate(b, -t)) for w, a, b in rho.kernel.density)
    return replace(rho, kernel=KernelComponent(density, tuple(masses)))


@dataclass
class DecayScan:
    """Gamow functional paired with an evolved observable over a time grid.

    ``values`` come from translating the observable's kernel factors and
    evaluating them at the pole; ``scalar_route`` from evolving the
    functional (a scalar factor on the point mass); ``closed_form`` is
    ``exp(-gamma t) (rho_D|O)``.
    """

    times: np.ndarray
    values: np.ndarray
    closed_form: np.ndarray
    abs_err: np.ndarray
    scalar_route: np.ndarray

    @property
    def route_gap(self) -> np.ndarray:
        return np.abs(self.values - self.scalar_route)


def decay_scan(pole: ResonancePole, obs: Observable, times, cfg: QuadratureConfig | None = None) -> DecayScan:
    times = np.asarray(times, dtype=float)
    rho = gamow(pole, obs.tag)
    base = pair(rho, obs, cfg).value
    values = np.array([pair(rho, evolve_observable(obs, t), cfg).value for t in times], dtype=complex)
    scalar = np.array([pair(evolve_functional(rho, t), obs, cfg).value for t in times], dtype=complex)
    closed = np.exp(-pole.gamma * times) * base
    return DecayScan(times, values, closed, np.abs(values - closed), scalar)


@dataclass
class SurvivalCurve:
    """Mean value ``(rho_t|O)`` split into its invariant and fluctuating parts."""

    times: np.ndarray
    diagonal: PairingResult
    fluctuating: list[PairingResult]

    @property
    def results(self) -> list[PairingResult]:
        return [self.diagonal + f for f in self.fluctuating]

    @property
    def values(self) -> np.ndarray:
        return np.array([r.value for r in self.results], dtype=complex)


def survival_curve(rho: Functional, obs: Observable, times, cfg: QuadratureConfig | None = None) -> SurvivalCurve:
    if rho.tag != obs.tag:
        pair(rho, obs, cfg)  # raises the basis mismatch
    times = np.asarray(times, dtype=float)
    diagonal = pair_diagonal(rho, obs, cfg)
    fluct = [pair_kernel(evolve_functional(rho, t), obs, cfg) for t in times]
    return SurvivalCurve(times, diagonal, fluct)
