"""Linear functionals on the observable algebra and the pairing ``(rho|O)``.

A functional has a diagonal component (``rho_E`` as densities and real
point masses) and a kernel component (``rho_EE'`` as finite-rank densities
and complex point masses). Pure states and mixtures have ``rho_E = rho_EE``;
generalized states need not. The Gamow functional is a single kernel point
mass at ``(conj z0, z0)`` and has no diagonal part at all.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

import numpy as np

from .algebra import BasisTag, KernelTerm, Observable, adjoint, multiply
from .errors import BasisMismatch, InvalidArgument
from .sampling import OBSERVABLE_CLASSES, random_observable
from .zrep import (
    PairingResult,
    PolySymbol,
    QuadratureConfig,
    TauRep,
    conjugate,
    halfline_integral,
    overlap,
    product,
)

_EPS = np.finfo(float).eps


@dataclass(frozen=True)
class ResonancePole:
    """Simple pole ``z0 = e_r - i gamma / 2`` in the lower half plane."""

    e_r: float
    gamma: float

    def __post_init__(self):
        if not (math.isfinite(self.e_r) and math.isfinite(self.gamma)):
            raise InvalidArgument("pole parameters must be finite")
        if not self.gamma > 0:
            raise InvalidArgument(f"gamma must be positive, got {self.gamma}")

    @property
    def z0(self) -> complex:
        return complex(self.e_r, -0.5 * self.gamma)


class DensityTerm(NamedTuple):
    """``poly(E) * func(E)`` contribution to ``rho_E``."""

    poly: PolySymbol
    func: TauRep


class DiagonalMass(NamedTuple):
    weight: complex
    e: float


class KernelMass(NamedTuple):
    weight: complex
    z_left: complex
    z_right: complex


@dataclass(frozen=True)
class DiagonalComponent:
    density: tuple[DensityTerm, ...] = ()
    point_masses: tuple[DiagonalMass, ...] = ()

    def __post_init__(self):
        for m in self.point_masses:
            if not (math.isfinite(m.e) and m.e >= 0):
                raise InvalidArgument(f"diagonal point mass at {m.e} is not on [0, inf)")

    @property
    def is_empty(self) -> bool:
        return not self.density and not self.point_masses

    def __call__(self, e):
        """``rho_E`` on real energies, density part only."""
        e = np.asarray(e, dtype=float)
        val = np.zeros(e.shape, dtype=complex)
        for p, f in self.density:
            val = val + p(e) * f(e)
        return val


@dataclass(frozen=True)
class KernelComponent:
    density: tuple[KernelTerm, ...] = ()
    point_masses: tuple[KernelMass, ...] = ()

    @property
    def is_empty(self) -> bool:
        return not self.density and not self.point_masses

    def __call__(self, e, e2):
        """``rho_EE'`` on real energies, density part only."""
        e = np.asarray(e, dtype=float)
        e2 = np.asarray(e2, dtype=float)
        val = np.zeros(np.broadcast(e, e2).shape, dtype=complex)
        for w, a, b in self.density:
            val = val + w * a(e) * b(e2)
        return val


@dataclass(frozen=True)
class Functional:
    tag: BasisTag = BasisTag.FREE
    diag: DiagonalComponent = field(default_factory=DiagonalComponent)
    kernel: KernelComponent = field(default_factory=KernelComponent)

    def __add__(self, other: Functional) -> Functional:
        if self.tag != other.tag:
            raise BasisMismatch(f"basis tags differ: {self.tag.value} vs {other.tag.value}")
        return Functional(
            self.tag,
            DiagonalComponent(self.diag.density + other.diag.density,
                              self.diag.point_masses + other.diag.point_masses),
            KernelComponent(self.kernel.density + other.kernel.density,
                            self.kernel.point_masses + other.kernel.point_masses),
        )

    def __mul__(self, c) -> Functional:
        c = complex(c)
        return Functional(
            self.tag,
            DiagonalComponent(tuple(DensityTerm(c * p, f) for p, f in self.diag.density),
                              tuple(DiagonalMass(c * w, e) for w, e in self.diag.point_masses)),
            KernelComponent(tuple(KernelTerm(c * w, a, b) for w, a, b in self.kernel.density),
                            tuple(KernelMass(c * w, za, zb) for w, za, zb in self.kernel.point_masses)),
        )

    __rmul__ = __mul__


def pair_diagonal(rho: Functional, obs: Observable, cfg: QuadratureConfig | None = None) -> PairingResult:
    """``int_0^inf rho_E O_E dE``; this part is invariant under evolution."""
    cfg = cfg or QuadratureConfig()
    out = PairingResult(0j)
    if obs.diag.is_zero:
        return out
    poly, zpart = obs.diag.poly, obs.diag.zpart
    for p, f in rho.diag.density:
        if not poly.is_zero:
            out = out + halfline_integral(f, p * poly, cfg)
        if zpart is not None:
            if p.degree == 0:
                out = out + overlap(f, zpart, cfg).scaled(p.coeffs[0])
            else:
                out = out + halfline_integral(product(f, zpart), p, cfg)
    for w, e in rho.diag.point_masses:
        val = complex(obs.diag(e))
        out = out + PairingResult(w * val, 4 * _EPS * abs(w * val))
    return out


def pair_kernel(rho: Functional, obs: Observable, cfg: QuadratureConfig | None = None) -> PairingResult:
    """``int int rho_EE' O_EE' dE dE'``, the fluctuating part."""
    cfg = cfg or QuadratureConfig()
    out = PairingResult(0j)
    for lam, a, b in obs.kernel.terms:
        for mu, left, right in rho.kernel.density:
            # the state's factors come first: their overlap tables are reused
            i1 = overlap(left, a, cfg)
            i2 = overlap(right, b, cfg)
            err = abs(i1.value) * i2.quadrature_error + abs(i2.value) * i1.quadrature_error \
                + i1.quadrature_error * i2.quadrature_error
            out = out + PairingResult(i1.value * i2.value, err).scaled(mu * lam)
        for w, za, zb in rho.kernel.point_masses:
            val = w * lam * a(za) * b(zb)
            out = out + PairingResult(val, 8 * _EPS * abs(val))
    return out


def pair(rho: Functional, obs: Observable, cfg: QuadratureConfig | None = None) -> PairingResult:
    """``(rho|O) = int rho_E O_E dE + int int rho_EE' O_EE' dE dE'``.

    Density parts are integrated over ``[0, e_max]``; point masses evaluate
    the symbols, complex locations included. With an empty diagonal on one
    side and an empty kernel on the other the result is exactly zero.
    """
    if rho.tag != obs.tag:
        raise BasisMismatch(f"basis tags differ: {rho.tag.value} vs {obs.tag.value}")
    return pair_diagonal(rho, obs, cfg) + pair_kernel(rho, obs, cfg)


def _normalized(psi: TauRep, cfg: QuadratureConfig) -> TauRep:
    if psi.is_zero:
        raise InvalidArgument("wavefunction is zero")
    norm = halfline_integral(product(conjugate(psi), psi), cfg=cfg).value.real
    if not norm > 0:
        raise InvalidArgument("wavefunction has no weight on [0, e_max]")
    return psi.scaled(1.0 / math.sqrt(norm))


def pure_state(psi: TauRep, tag: BasisTag = BasisTag.FREE, cfg: QuadratureConfig | None = None) -> Functional:
    """``rho_E = |psi(E)|^2``, ``rho_EE' = conj(psi(E)) psi(E')`` after normalizing ``psi``."""
    cfg = cfg or QuadratureConfig()
    psi = _normalized(psi, cfg)
    psi_star = conjugate(psi)
    return Functional(
        BasisTag(tag),
        DiagonalComponent((DensityTerm(PolySymbol.one(), product(psi_star, psi)),)),
        KernelComponent((KernelTerm(1.0 + 0j, psi_star, psi),)),
    )


def mixture(entries: Sequence[tuple[float, TauRep]], tag: BasisTag = BasisTag.FREE,
            cfg: QuadratureConfig | None = None) -> Functional:
    """Convex combination of pure states.

    Orthogonality of the wavefunctions is not checked; with overlapping
    wavefunctions the result is still a positive normalized functional.
    """
    cfg = cfg or QuadratureConfig()
    if not entries:
        raise InvalidArgument("a mixture needs at least one entry")
    weights = [float(w) for w, _ in entries]
    if any(not (w >= 0 and math.isfinite(w)) for w in weights):
        raise InvalidArgument("mixture weights must be non-negative")
    if abs(math.fsum(weights) - 1.0) > 1e-12:
        raise InvalidArgument(f"mixture weights sum to {math.fsum(weights)!r}, not 1")
    out = None
    for w, (_, psi) in zip(weights, entries):
        term = pure_state(psi, tag, cfg) * w
        out = term if out is None else out + term
    return out


def gamow(pole: ResonancePole, tag: BasisTag = BasisTag.IN) -> Functional:
    """Decaying Gamow functional: ``(rho_D|O) = O_EE'`` at ``(conj z0, z0)``."""
    if not isinstance(pole, ResonancePole):
        raise InvalidArgument("gamow() needs a ResonancePole")
    z0 = pole.z0
    return Functional(BasisTag(tag), kernel=KernelComponent(point_masses=(KernelMass(1.0 + 0j, z0.conjugate(), z0),)))


def delta_diag(e: float, tag: BasisTag = BasisTag.FREE) -> Functional:
    """``(E|``: picks ``O_E`` at ``E = e``."""
    if not e >= 0:
        raise InvalidArgument(f"location must be >= 0, got {e}")
    return Functional(BasisTag(tag), DiagonalComponent(point_masses=(DiagonalMass(1.0 + 0j, float(e)),)))


def delta_kernel(e: float, e2: float, tag: BasisTag = BasisTag.FREE) -> Functional:
    """``(EE'|``: picks ``O_EE'`` at ``(e, e2)``."""
    if not (e >= 0 and e2 >= 0):
        raise InvalidArgument(f"locations must be >= 0, got ({e}, {e2})")
    return Functional(BasisTag(tag), kernel=KernelComponent(point_masses=(KernelMass(1.0 + 0j, complex(e), complex(e2)),)))


def generalized_state(tag: BasisTag = BasisTag.FREE, diag_density=(), diag_masses=(),
                      kernel_density=(), kernel_masses=()) -> Functional:
    """Functional with independently chosen diagonal and kernel data.

    Nothing ties ``rho_E`` to ``rho_EE``, so singular-diagonal states (for
    example a diagonal point mass next to a smooth kernel) are expressible.
    """
    return Functional(
        BasisTag(tag),
        DiagonalComponent(tuple(DensityTerm(p, f) for p, f in diag_density),
                          tuple(DiagonalMass(complex(w), float(e)) for w, e in diag_masses)),
        KernelComponent(tuple(KernelTerm(complex(w), a, b) for w, a, b in kernel_density),
                        tuple(KernelMass(complex(w), complex(za), complex(zb)) for w, za, zb in kernel_masses)),
    )


def weakly_equal(a: Observable, b: Observable, probes: Sequence[Functional], tol: float = 1e-8,
                 cfg: QuadratureConfig | None = None) -> bool:
    """Equality of observables tested by pairing against ``probes``."""
    for rho in probes:
        va = pair(rho, a, cfg).value
        vb = pair(rho, b, cfg).value
        if abs(va - vb) > tol * (1.0 + max(abs(va), abs(vb))):
            return False
    return True


@dataclass
class AuditReport:
    """Outcome of :func:`positivity_audit`; it records, it does not assert."""

    observable_class: str
    n_samples: int
    seed: int
    tolerance: float
    min_real: float
    max_abs_imag: float
    violations: list[tuple[int, complex]]

    @property
    def passed(self) -> bool:
        return not self.violations

    def to_dict(self) -> dict:
        return {
            "observable_class": self.observable_class,
            "n_samples": self.n_samples,
            "seed": self.seed,
            "tolerance": self.tolerance,
            "min_real": self.min_real,
            "max_abs_imag": self.max_abs_imag,
            "violations": [{"index": i, "value": [v.real, v.imag]} for i, v in self.violations],
        }


def positivity_audit(rho: Functional, n_samples: int = 1000, seed: int = 0, kind: str = "mixed",
                     tolerance: float = 1e-8, cfg: QuadratureConfig | None = None,
                     workers: int = 1) -> AuditReport:
    """Evaluate ``(rho|O^dagger O)`` for seeded random observables.

    Observables come from :func:`gamow.sampling.random_observable` with the
    given ``kind``. A sample violates positivity when its real part is below
    ``-tolerance`` or its imaginary part exceeds ``tolerance`` in size.
    """
    return positivity_audits([rho], n_samples, seed, kind, tolerance, cfg, workers)[0]


def positivity_audits(functionals: Sequence[Functional], n_samples: int = 1000, seed: int = 0,
                      kind: str = "mixed", tolerance: float = 1e-8, cfg: QuadratureConfig | None = None,
                      workers: int = 1) -> list[AuditReport]:
    """:func:`positivity_audit` for several functionals over one set of draws.

    Each ``O^dagger O`` is formed once and paired with every functional, so
    the reports equal separate audits with the same seed.
    """
    if kind not in OBSERVABLE_CLASSES:
        raise InvalidArgument(f"unknown observable class {kind!r}")
    if not functionals:
        return []
    tag = functionals[0].tag
    if any(f.tag != tag for f in functionals):
        raise BasisMismatch("audited functionals must share a basis tag")
    cfg = cfg or QuadratureConfig()
    rng = np.random.default_rng(seed)
    draws = [random_observable(rng, kind, tag) for _ in range(n_samples)]

    def one(obs: Observable) -> list[complex]:
        sq = multiply(adjoint(obs), obs, cfg)
        return [pair(rho, sq, cfg).value for rho in functionals]

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(one, draws))
    else:
        rows = [one(o) for o in draws]
    return [_report([r[i] for r in rows], kind, n_samples, seed, tolerance) for i in range(len(functionals))]


def _report(values: list[complex], kind: str, n_samples: int, seed: int, tolerance: float) -> AuditReport:
    re = np.array([v.real for v in values])
    im = np.array([v.imag for v in values])
    violations = [(i, v) for i, v in enumerate(values) if v.real < -tolerance or abs(v.imag) > tolerance]
    return AuditReport(
        observable_class=kind,
        n_samples=n_samples,
        seed=seed,
        tolerance=tolerance,
        min_real=float(re.min()) if values else math.nan,
        max_abs_imag=float(np.abs(im).max()) if values else math.nan,
        violations=violations,
    )
