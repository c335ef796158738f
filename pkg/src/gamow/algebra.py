"""The involutive algebra of observables compatible with the Hamiltonian.

An observable is ``O = int dE O_E |E)(E| + int int dE dE' O_EE' |E)(E'|`` with
``O_E = polynomial + Z function`` and ``O_EE'`` a finite sum of products of
Z functions. The three spectral bases (free, in, out) carry identical
algebra structure, so the basis is only a tag that operands must share.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field, replace
from typing import NamedTuple

import numpy as np

from .errors import BasisMismatch, UnsupportedDegree
from .zrep import (
    MAX_POLY_DEGREE,
    PolySymbol,
    QuadratureConfig,
    TauRep,
    combine,
    conjugate,
    halfline_integral,
    poly_action,
    product,
)


class BasisTag(str, enum.Enum):
    FREE = "free"
    IN = "in"
    OUT = "out"


class KernelTerm(NamedTuple):
    """``weight * left(E) * right(E')``."""

    weight: complex
    left: TauRep
    right: TauRep


@dataclass(frozen=True)
class DiagonalSymbol:
    """``O_E = poly(E) + zpart(E)``; ``zpart=None`` means no Z part."""

    poly: PolySymbol = field(default_factory=PolySymbol)
    zpart: TauRep | None = None

    @property
    def is_zero(self) -> bool:
        return self.poly.is_zero and (self.zpart is None or self.zpart.is_zero)

    def __call__(self, e):
        val = self.poly(e)
        if self.zpart is not None:
            val = val + self.zpart(e)
        return val

    def act_on(self, phi: TauRep) -> TauRep | None:
        """``O_E * phi(E)`` as a single Z function, or None when ``O_E = 0``."""
        parts = []
        if not self.poly.is_zero:
            parts.append((1.0, poly_action(self.poly, phi)))
        if self.zpart is not None and not self.zpart.is_zero:
            parts.append((1.0, product(self.zpart, phi)))
        if not parts:
            return None
        if len(parts) == 1:
            return parts[0][1]
        return combine(parts)


@dataclass(frozen=True)
class KernelSymbol:
    terms: tuple[KernelTerm, ...] = ()

    @property
    def rank(self) -> int:
        return len(self.terms)

    def __call__(self, e, e2):
        e = np.asarray(e, dtype=complex)
        e2 = np.asarray(e2, dtype=complex)
        val = np.zeros(np.broadcast(e, e2).shape, dtype=complex)
        for w, a, b in self.terms:
            val = val + w * a(e) * b(e2)
        return val[()] if val.ndim == 0 else val


@dataclass(frozen=True)
class Observable:
    """Element of the algebra: basis tag, diagonal symbol and kernel symbol."""

    tag: BasisTag = BasisTag.FREE
    diag: DiagonalSymbol = field(default_factory=DiagonalSymbol)
    kernel: KernelSymbol = field(default_factory=KernelSymbol)

    def __add__(self, other: Observable) -> Observable:
        return add(self, other)

    def __sub__(self, other: Observable) -> Observable:
        return add(self, scale(-1.0, other))

    def __neg__(self) -> Observable:
        return scale(-1.0, self)

    def __mul__(self, other):
        if isinstance(other, Observable):
            return multiply(self, other)
        return scale(other, self)

    def __rmul__(self, other):
        return scale(other, self)


def _check_tags(a, b) -> None:
    if a.tag != b.tag:
        raise BasisMismatch(f"basis tags differ: {a.tag.value} vs {b.tag.value}")


def zero(tag: BasisTag = BasisTag.FREE) -> Observable:
    return Observable(tag)


def identity(tag: BasisTag = BasisTag.FREE) -> Observable:
    return Observable(tag, DiagonalSymbol(PolySymbol.one()))


def hamiltonian_power(n: int, tag: BasisTag = BasisTag.FREE) -> Observable:
    """``H^n = int dE E^n |E)(E|``."""
    if int(n) != n or not 0 <= n <= MAX_POLY_DEGREE:
        raise UnsupportedDegree(f"Hamiltonian power must be in 0..{MAX_POLY_DEGREE}, got {n}")
    return Observable(tag, DiagonalSymbol(PolySymbol.monomial(int(n))))


def kernel_observable(terms, tag: BasisTag = BasisTag.FREE) -> Observable:
    """Kernel-only observable from ``(weight, left, right)`` triples."""
    return Observable(tag, kernel=KernelSymbol(tuple(KernelTerm(complex(w), a, b) for w, a, b in terms)))


def retag(obs: Observable, tag: BasisTag) -> Observable:
    return replace(obs, tag=BasisTag(tag))


def add(a: Observable, b: Observable) -> Observable:
    _check_tags(a, b)
    if a.diag.zpart is None:
        z = b.diag.zpart
    elif b.diag.zpart is None:
        z = a.diag.zpart
    else:
        z = combine([(1.0, a.diag.zpart), (1.0, b.diag.zpart)])
    diag = DiagonalSymbol(a.diag.poly + b.diag.poly, z)
    return Observable(a.tag, diag, KernelSymbol(a.kernel.terms + b.kernel.terms))


def scale(c: complex, obs: Observable) -> Observable:
    c = complex(c)
    if c == 0:
        return zero(obs.tag)
    z = None if obs.diag.zpart is None else obs.diag.zpart.scaled(c)
    terms = tuple(KernelTerm(c * w, l, r) for w, l, r in obs.kernel.terms)
    return Observable(obs.tag, DiagonalSymbol(c * obs.diag.poly, z), KernelSymbol(terms))


def multiply(a: Observable, b: Observable, cfg: QuadratureConfig | None = None) -> Observable:
    """Operator product.

    Diagonal: ``a_E b_E``. Kernel: ``a_E b_EE' + a_EE' b_E'`` plus the
    contraction ``int_0^inf a_EE'' b_E''E' dE''``, which for finite-rank
    symbols reduces to the Gram numbers ``int right_i(E) left_j(E) dE``.
    """
    _check_tags(a, b)
    cfg = cfg or QuadratureConfig()

    zparts = []
    if b.diag.zpart is not None and not a.diag.poly.is_zero:
        zparts.append(poly_action(a.diag.poly, b.diag.zpart))
    if a.diag.zpart is not None and not b.diag.poly.is_zero:
        zparts.append(poly_action(b.diag.poly, a.diag.zpart))
    if a.diag.zpart is not None and b.diag.zpart is not None:
        zparts.append(product(a.diag.zpart, b.diag.zpart))
    z = None
    if zparts:
        z = zparts[0] if len(zparts) == 1 else combine([(1.0, p) for p in zparts])
    diag = DiagonalSymbol(a.diag.poly * b.diag.poly, z)

    terms = []
    for w, left, right in b.kernel.terms:
        new_left = a.diag.act_on(left)
        if new_left is not None:
            terms.append(KernelTerm(w, new_left, right))
    for w, left, right in a.kernel.terms:
        new_right = b.diag.act_on(right)
        if new_right is not None:
            terms.append(KernelTerm(w, left, new_right))
    for w, left, right in a.kernel.terms:
        for w2, left2, right2 in b.kernel.terms:
            gram = halfline_integral(product(right, left2), cfg=cfg).value
            terms.append(KernelTerm(w * w2 * gram, left, right2))
    return Observable(a.tag, diag, KernelSymbol(tuple(terms)))


def adjoint(obs: Observable) -> Observable:
    """``O_E -> conj(O_E)`` and ``O_EE' -> conj(O_E'E)``."""
    z = None if obs.diag.zpart is None else conjugate(obs.diag.zpart)
    terms = tuple(
        KernelTerm(complex(w).conjugate(), conjugate(r), conjugate(l)) for w, l, r in obs.kernel.terms
    )
    return Observable(obs.tag, DiagonalSymbol(obs.diag.poly.conj(), z), KernelSymbol(terms))


def same_samples(a: Observable, b: Observable) -> bool:
    """Exact structural equality (same decomposition, same samples)."""
    if a.tag != b.tag or a.diag.poly != b.diag.poly:
        return False
    za, zb = a.diag.zpart, b.diag.zpart
    if (za is None) != (zb is None) or (za is not None and not za.same_samples(zb)):
        return False
    if a.kernel.rank != b.kernel.rank:
        return False
    return all(
        w1 == w2 and l1.same_samples(l2) and r1.same_samples(r2)
        for (w1, l1, r1), (w2, l2, r2) in zip(a.kernel.terms, b.kernel.terms)
    )


def default_probe_energies(cfg: QuadratureConfig | None = None, n: int = 25) -> np.ndarray:
    cfg = cfg or QuadratureConfig()
    return np.linspace(0.0, min(cfg.e_max, 20.0), n)


def is_self_adjoint(obs: Observable, tol: float = 1e-10, energies=None) -> bool:
    """Compare ``O`` with ``O^dagger`` on the real-energy probe set.

    Decompositions are not unique, so symbols are compared by value:
    polynomial coefficients directly, Z parts and kernels on a grid.
    """
    dag = adjoint(obs)
    e = default_probe_energies() if energies is None else np.asarray(energies, dtype=float)
    dev = 0.0
    dpoly = obs.diag.poly + (-1.0) * dag.diag.poly
    if dpoly.coeffs:
        dev = max(dev, max(abs(c) for c in dpoly.coeffs))
    if obs.diag.zpart is not None:
        dev = max(dev, float(np.max(np.abs(obs.diag.zpart(e) - dag.diag.zpart(e)))))
    if obs.kernel.rank:
        ee, ee2 = np.meshgrid(e, e, indexing="ij")
        dev = max(dev, float(np.max(np.abs(obs.kernel(ee, ee2) - dag.kernel(ee, ee2)))))
    return dev <= tol


def truncate_rank(obs: Observable, threshold: float = 1e-12) -> Observable:
    """Drop kernel terms whose real-axis size ``|w| |left|_inf |right|_inf`` is below ``threshold``."""
    keep = tuple(
        t for t in obs.kernel.terms if abs(t.weight) * t.left.sup_bound * t.right.sup_bound >= threshold
    )
    return replace(obs, kernel=KernelSymbol(keep))
