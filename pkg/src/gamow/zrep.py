"""Arithmetic on Z = F(D), the Fourier image of smooth compactly supported functions.

A function ``phi`` in Z is stored through its inverse transform ``phi_hat``,
sampled on a uniform grid covering the compact support::

    phi(z) = integral exp(i z tau) phi_hat(tau) dtau

The integral is evaluated with the uniform-weight trapezoid rule. Because
``phi_hat`` and all its derivatives vanish at the grid edges, this rule is
spectrally accurate, and it turns every operation needed downstream into a
grid operation:

=====================  ===============================
function space         tau grid
=====================  ===============================
``phi(z)``             weighted sum of exponentials
``phi * psi``          convolution of samples
``p(E) phi``           spectral differentiation
``exp(i t E) phi``     shift of ``tau_min`` by ``t``
``phi(E - E0)``        modulation by ``exp(-i E0 tau)``
``conj(phi(conj z))``  reversed, conjugated samples
=====================  ===============================
"""

from __future__ import annotations

import math
import weakref
from functools import lru_cache
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
from scipy import fft as sfft

from .errors import InvalidArgument, RangeGuardError, UnsupportedDegree

DEFAULT_STEP = 1.0 / 128
DEFAULT_BOUNDARY_TOL = 1e-10
MAX_POLY_DEGREE = 8
# |Im z| * |tau| must stay below this for exp(i z tau) to be finite
EXP_GUARD = 700.0

_EPS = np.finfo(float).eps
_ALIGN_TOL = 1e-6
_BLOCK = 64


@dataclass(frozen=True)
class QuadratureConfig:
    """Energy-side quadrature settings.

    Parameters
    ----------
    e_max : float
        Truncation point of integrals over ``[0, inf)``.
    n_nodes : int
        Gauss-Legendre order used for moderate-frequency moments.
    boundary_tol : float
        Relative size allowed for the edge samples of a tau grid.
    """

    e_max: float = 50.0
    n_nodes: int = 32
    boundary_tol: float = DEFAULT_BOUNDARY_TOL

    def __post_init__(self):
        if not (self.e_max > 0 and math.isfinite(self.e_max)):
            raise InvalidArgument(f"e_max must be positive, got {self.e_max}")
        if int(self.n_nodes) != self.n_nodes or self.n_nodes < 16:
            raise InvalidArgument(f"n_nodes must be an integer >= 16, got {self.n_nodes}")
        if not self.boundary_tol >= 0:
            raise InvalidArgument("boundary_tol must be non-negative")


@dataclass(frozen=True)
class PairingResult:
    """A complex value together with an estimate of its quadrature error."""

    value: complex
    quadrature_error: float = 0.0

    def __post_init__(self):
        if not self.quadrature_error >= 0:
            raise InvalidArgument("quadrature_error must be non-negative")

    def __add__(self, other: PairingResult) -> PairingResult:
        return PairingResult(self.value + other.value, self.quadrature_error + other.quadrature_error)

    def scaled(self, c: complex) -> PairingResult:
        return PairingResult(c * self.value, abs(c) * self.quadrature_error)


def _as_complex(c) -> complex:
    if isinstance(c, (list, tuple)) and len(c) == 2:
        return complex(float(c[0]), float(c[1]))
    return complex(c)


@dataclass(frozen=True)
class PolySymbol:
    """Polynomial ``c0 + c1 E + ... + cd E^d`` with complex coefficients.

    Trailing zero coefficients are dropped, so the zero polynomial has an
    empty coefficient tuple.
    """

    coeffs: tuple[complex, ...] = ()

    def __post_init__(self):
        cs = [_as_complex(c) for c in self.coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        object.__setattr__(self, "coeffs", tuple(cs))

    @classmethod
    def one(cls) -> PolySymbol:
        return cls((1.0,))

    @classmethod
    def monomial(cls, n: int) -> PolySymbol:
        return cls((0.0,) * n + (1.0,))

    @property
    def degree(self) -> int:
        """Degree, with -1 for the zero polynomial."""
        return len(self.coeffs) - 1

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    def __call__(self, z):
        if self.is_zero:
            return np.zeros_like(np.asarray(z, dtype=complex))
        return np.polynomial.polynomial.polyval(np.asarray(z, dtype=complex), np.array(self.coeffs))

    def __add__(self, other: PolySymbol) -> PolySymbol:
        n = max(len(self.coeffs), len(other.coeffs))
        a = list(self.coeffs) + [0j] * (n - len(self.coeffs))
        b = list(other.coeffs) + [0j] * (n - len(other.coeffs))
        return PolySymbol(tuple(x + y for x, y in zip(a, b)))

    def __mul__(self, other) -> PolySymbol:
        if isinstance(other, PolySymbol):
            if self.is_zero or other.is_zero:
                return PolySymbol()
            out = np.polynomial.polynomial.polymul(np.array(self.coeffs), np.array(other.coeffs))
            return PolySymbol(tuple(complex(c) for c in out))
        c = complex(other)
        return PolySymbol(tuple(c * x for x in self.coeffs))

    __rmul__ = __mul__

    def conj(self) -> PolySymbol:
        """Coefficient conjugate, i.e. ``conj(p(conj z))``."""
        return PolySymbol(tuple(c.conjugate() for c in self.coeffs))


class TauRep:
    """A Z-space function stored as samples of its compactly supported inverse transform.

    Parameters
    ----------
    tau_min : float
        Left end of the sample grid.
    grid_step : float
        Uniform spacing of the grid.
    samples : array_like
        Complex samples of ``phi_hat`` at ``tau_min + k * grid_step``.
    boundary_tol : float, optional
        Edge samples must satisfy ``|s| <= boundary_tol * max|s|``; grids
        whose edges do not decay are rejected rather than clipped.
    """

    __slots__ = ("tau_min", "grid_step", "samples", "__weakref__")

    def __init__(self, tau_min: float, grid_step: float, samples, *,
                 boundary_tol: float = DEFAULT_BOUNDARY_TOL, _scale: float = 0.0):
        s = np.array(samples, dtype=complex)
        if s.ndim != 1 or s.size < 8:
            raise InvalidArgument("a TauRep needs a 1-d array of at least 8 samples")
        if not (grid_step > 0 and math.isfinite(grid_step) and math.isfinite(tau_min)):
            raise InvalidArgument("grid must have finite tau_min and positive grid_step")
        if not np.all(np.isfinite(s)):
            raise InvalidArgument("samples must be finite")
        peak = max(float(np.max(np.abs(s))), _scale)
        edge = max(abs(s[0]), abs(s[-1]))
        if edge > boundary_tol * peak:
            raise InvalidArgument(
                f"edge samples do not decay: |edge|/max = {edge / peak:.3e} > {boundary_tol:.1e}"
            )
        s.setflags(write=False)
        object.__setattr__(self, "tau_min", float(tau_min))
        object.__setattr__(self, "grid_step", float(grid_step))
        object.__setattr__(self, "samples", s)

    def __setattr__(self, name, value):
        raise AttributeError("TauRep is immutable")

    @classmethod
    def zero(cls, tau_min: float = 0.0, grid_step: float = DEFAULT_STEP, n: int = 8) -> TauRep:
        return cls(tau_min, grid_step, np.zeros(n, dtype=complex))

    @property
    def tau_max(self) -> float:
        return self.tau_min + self.grid_step * (self.samples.size - 1)

    @property
    def tau(self) -> np.ndarray:
        return self.tau_min + self.grid_step * np.arange(self.samples.size)

    @property
    def is_zero(self) -> bool:
        return not np.any(self.samples)

    @property
    def sup_bound(self) -> float:
        """Upper bound for ``|phi(E)|`` on the real axis."""
        return self.grid_step * float(np.sum(np.abs(self.samples)))

    def __len__(self) -> int:
        return self.samples.size

    def __repr__(self) -> str:
        return (f"TauRep(tau_min={self.tau_min:.6g}, tau_max={self.tau_max:.6g}, "
                f"n={self.samples.size}, step={self.grid_step:.6g})")

    def __call__(self, z):
        return eval_at(self, z)

    def __add__(self, other: TauRep) -> TauRep:
        return combine([(1.0, self), (1.0, other)])

    def __sub__(self, other: TauRep) -> TauRep:
        return combine([(1.0, self), (-1.0, other)])

    def __neg__(self) -> TauRep:
        return self.scaled(-1.0)

    def __mul__(self, other):
        if isinstance(other, TauRep):
            return product(self, other)
        return self.scaled(other)

    def __rmul__(self, other):
        return self.scaled(other)

    def scaled(self, c: complex) -> TauRep:
        return TauRep(self.tau_min, self.grid_step, complex(c) * self.samples, boundary_tol=math.inf)

    def same_samples(self, other: TauRep) -> bool:
        """Exact samplewise equality, including the grid."""
        return (self.tau_min == other.tau_min and self.grid_step == other.grid_step
                and np.array_equal(self.samples, other.samples))


def mollifier(u):
    """``exp(-1/(1-u^2))`` on ``|u| < 1``, zero elsewhere."""
    u = np.asarray(u, dtype=float)
    out = np.zeros_like(u)
    inside = np.abs(u) < 1.0
    out[inside] = np.exp(-1.0 / (1.0 - u[inside] ** 2))
    return out


def make_bump(center: float, half_width: float, grid_points: int) -> TauRep:
    """Mollifier scaled to ``[center - half_width, center + half_width]``.

    The grid spans exactly the support, so both edge samples are 0.
    """
    if not half_width > 0:
        raise InvalidArgument(f"half_width must be positive, got {half_width}")
    if int(grid_points) != grid_points or grid_points < 8:
        raise InvalidArgument("grid_points must be an integer >= 8")
    n = int(grid_points)
    step = 2.0 * half_width / (n - 1)
    tau = center - half_width + step * np.arange(n)
    return TauRep(center - half_width, step, mollifier((tau - center) / half_width))


def wavepacket(center: float, half_width: float, energy: float = 0.0, amplitude: complex = 1.0,
               step: float = DEFAULT_STEP) -> TauRep:
    """Modulated bump on the global lattice ``step * Z``.

    The grid is the smallest lattice interval covering the support, so
    packets built with the same ``step`` add without resampling. In energy
    the packet is concentrated near ``energy`` with spread ``~1/half_width``.
    """
    if not half_width > 0:
        raise InvalidArgument(f"half_width must be positive, got {half_width}")
    k0 = math.floor((center - half_width) / step)
    k1 = math.ceil((center + half_width) / step)
    n = max(k1 - k0 + 1, 8)
    tau = step * (k0 + np.arange(n))
    s = mollifier((tau - center) / half_width).astype(complex)
    if energy:
        s = s * np.exp(-1j * energy * tau)
    return TauRep(step * k0, step, complex(amplitude) * s)


def _guard(phi: TauRep, z: np.ndarray) -> None:
    reach = max(abs(phi.tau_min), abs(phi.tau_max))
    worst = float(np.max(np.abs(z.imag))) * reach if z.size else 0.0
    if worst >= EXP_GUARD:
        raise RangeGuardError(f"|Im z| * |tau| = {worst:.1f} exceeds the exponent guard {EXP_GUARD}")


def _phases(z: np.ndarray, tau_min: float, step: float, n: int) -> np.ndarray:
    """``exp(i z_m (tau_min + k step))`` as an ``(len(z), n)`` array.

    Exact exponentials on every ``_BLOCK``-th grid point times a shared
    in-block table; each entry is a product of two correctly rounded
    exponentials.
    """
    nb = -(-n // _BLOCK)
    coarse = np.exp(1j * np.multiply.outer(z, tau_min + step * _BLOCK * np.arange(nb)))
    fine = np.exp(1j * np.multiply.outer(z, step * np.arange(_BLOCK)))
    full = coarse[:, :, None] * fine[:, None, :]
    return full.reshape(z.size, nb * _BLOCK)[:, :n]


def eval_at(phi: TauRep, z):
    """Value of the entire function at complex ``z`` (scalar or array)."""
    za = np.asarray(z, dtype=complex)
    flat = za.reshape(-1)
    _guard(phi, flat)
    n = phi.samples.size
    out = np.empty(flat.size, dtype=complex)
    chunk = max(1, 2 ** 20 // n)
    for i in range(0, flat.size, chunk):
        block = _phases(flat[i:i + chunk], phi.tau_min, phi.grid_step, n)
        # pairwise summation keeps results independent of threading
        out[i:i + chunk] = np.sum(block * phi.samples, axis=1)
    out *= phi.grid_step
    if za.ndim == 0:
        return complex(out[0])
    return out.reshape(za.shape)


def translate(phi: TauRep, t: float) -> TauRep:
    """Multiply by ``exp(i t E)``: the grid moves by ``t``, samples stay."""
    if t == 0:
        return phi
    return TauRep(phi.tau_min + t, phi.grid_step, phi.samples, boundary_tol=math.inf)


def modulate(phi: TauRep, energy: float) -> TauRep:
    """Shift in energy: returns ``z -> phi(z - energy)``."""
    s = phi.samples * np.exp(-1j * energy * phi.tau)
    return TauRep(phi.tau_min, phi.grid_step, s, boundary_tol=math.inf)


def conjugate(phi: TauRep) -> TauRep:
    """``z -> conj(phi(conj z))``; equals ``conj(phi(E))`` for real ``E``."""
    return TauRep(-phi.tau_max, phi.grid_step, np.conj(phi.samples[::-1]), boundary_tol=math.inf)


def _trig_interp(phi: TauRep, points: np.ndarray) -> np.ndarray:
    """Periodic trigonometric interpolant of the samples at arbitrary ``points``."""
    g = phi.samples[:-1]
    m = g.size
    coef = np.fft.fft(g) / m
    omega = 2 * np.pi * np.fft.fftfreq(m, d=phi.grid_step)
    if m % 2 == 0:
        coef[m // 2] = 0  # Nyquist mode; negligible for smooth, edge-decayed data
    keep = np.abs(coef) > 1e-18 * np.max(np.abs(coef), initial=0.0)
    coef, omega = coef[keep], omega[keep]
    x = points - phi.tau_min
    out = np.empty(points.size, dtype=complex)
    chunk = max(1, 2 ** 20 // max(coef.size, 1))
    for i in range(0, points.size, chunk):
        out[i:i + chunk] = np.sum(np.exp(1j * np.outer(x[i:i + chunk], omega)) * coef, axis=1)
    return out


def resample(phi: TauRep, tau_min: float, grid_step: float, n: int) -> TauRep:
    """Samples of ``phi_hat`` on another uniform grid (zero outside the old one)."""
    pts = tau_min + grid_step * np.arange(n)
    vals = np.zeros(n, dtype=complex)
    inside = (pts >= phi.tau_min) & (pts <= phi.tau_max)
    vals[inside] = _trig_interp(phi, pts[inside])
    return TauRep(tau_min, grid_step, vals, boundary_tol=math.inf)


def _offset(phi: TauRep, lo: float, step: float) -> int | None:
    if abs(phi.grid_step - step) > 1e-12 * step:
        return None
    k = (phi.tau_min - lo) / step
    r = round(k)
    return int(r) if abs(k - r) <= _ALIGN_TOL else None


def combine(terms: Iterable[tuple[complex, TauRep]], boundary_tol: float = DEFAULT_BOUNDARY_TOL) -> TauRep:
    """Linear combination ``sum c_k phi_k`` on the union grid at the finest step.

    Operands lying on a common lattice are added exactly; others are
    resampled by trigonometric interpolation first.
    """
    terms = [(complex(c), phi) for c, phi in terms]
    if not terms:
        return TauRep.zero()
    step = min(phi.grid_step for _, phi in terms)
    lo = min(phi.tau_min for _, phi in terms)
    hi = max(phi.tau_max for _, phi in terms)
    n = max(int(math.ceil((hi - lo) / step - 1e-9)) + 1, 8)
    acc = np.zeros(n, dtype=complex)
    scale = 0.0
    for c, phi in terms:
        if c == 0:
            continue
        k = _offset(phi, lo, step)
        if k is None:
            phi = resample(phi, lo, step, n)
            k = 0
        acc[k:k + phi.samples.size] += c * phi.samples
        scale = max(scale, abs(c) * float(np.max(np.abs(phi.samples))))
    return TauRep(lo, step, acc, boundary_tol=boundary_tol, _scale=scale)


def _convolve(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    n = x.size + y.size - 1
    nfft = sfft.next_fast_len(n)
    return sfft.ifft(sfft.fft(x, nfft) * sfft.fft(y, nfft))[:n]


def product(phi: TauRep, psi: TauRep) -> TauRep:
    """Pointwise product ``phi(z) psi(z)``, realized as convolution of the tau samples.

    With a shared step the discrete convolution makes ``eval_at`` exactly
    multiplicative; operands on different steps are first resampled to the
    finer one.
    """
    h = min(phi.grid_step, psi.grid_step)
    if abs(phi.grid_step - h) > 1e-12 * h:
        phi = resample(phi, phi.tau_min, h, int(math.ceil((phi.tau_max - phi.tau_min) / h)) + 1)
    if abs(psi.grid_step - h) > 1e-12 * h:
        psi = resample(psi, psi.tau_min, h, int(math.ceil((psi.tau_max - psi.tau_min) / h)) + 1)
    if phi.is_zero or psi.is_zero:
        return TauRep.zero(phi.tau_min + psi.tau_min, h, phi.samples.size + psi.samples.size - 1)
    conv = h * _convolve(phi.samples, psi.samples)
    scale = h * float(np.sum(np.abs(phi.samples))) * float(np.max(np.abs(psi.samples)))
    return TauRep(phi.tau_min + psi.tau_min, h, conv, _scale=scale)


def poly_action(p: PolySymbol, phi: TauRep, boundary_tol: float = DEFAULT_BOUNDARY_TOL) -> TauRep:
    """Multiply by a polynomial in ``E``.

    ``E phi`` corresponds to ``i d(phi_hat)/dtau``; the derivative is taken
    spectrally on the periodic extension of the grid. Round-off grows like
    ``omega_max ** degree``, hence the degree cap.
    """
    if p.degree > MAX_POLY_DEGREE:
        raise UnsupportedDegree(f"polynomial degree {p.degree} exceeds {MAX_POLY_DEGREE}")
    if p.is_zero:
        return TauRep.zero(phi.tau_min, phi.grid_step, phi.samples.size)
    if p.degree == 0:
        return phi.scaled(p.coeffs[0])
    g = phi.samples[:-1]
    m = g.size
    omega = 2 * np.pi * np.fft.fftfreq(m, d=phi.grid_step)
    out = np.fft.ifft(np.fft.fft(g) * p(-omega))
    out = np.append(out, out[0])
    wmax = math.pi / phi.grid_step
    floor = 8 * _EPS * float(np.max(np.abs(phi.samples))) * sum(abs(c) * wmax ** k for k, c in enumerate(p.coeffs))
    peak = float(np.max(np.abs(out)))
    tol = boundary_tol if peak == 0 else max(boundary_tol, floor / peak)
    return TauRep(phi.tau_min, phi.grid_step, out, boundary_tol=tol)


@lru_cache(maxsize=8)
def _gauss_legendre_unit(n: int) -> tuple[np.ndarray, np.ndarray]:
    u, w = np.polynomial.legendre.leggauss(n)
    return 0.5 * (u + 1.0), 0.5 * w


def _moments(a: np.ndarray, degree: int, n_nodes: int, e: np.ndarray | None = None) -> np.ndarray:
    """``m_n(a) = integral_0^1 u^n exp(i a u) du`` for ``n = 0..degree``.

    Upward recurrence ``m_n = (exp(ia) - n m_{n-1}) / (ia)`` wherever
    ``|a| >= max(1, degree)`` (errors shrink by ``n/|a|`` per step);
    Gauss-Legendre quadrature of order ``max(n_nodes, 2 degree)`` on the rest.
    """
    out = np.empty((degree + 1, a.size), dtype=complex)
    ia = 1j * a
    patch = np.flatnonzero(np.abs(a) < max(1.0, degree))
    ia[patch] = 1.0
    if e is None:
        e = np.exp(1j * a)
    m = (e - 1.0) / ia
    out[0] = m
    for n in range(1, degree + 1):
        m = (e - n * m) / ia
        out[n] = m
    if patch.size:
        u, w = _gauss_legendre_unit(max(n_nodes, 2 * degree))
        phase = np.exp(1j * np.multiply.outer(a[patch], u)) * w
        for n in range(degree + 1):
            out[n, patch] = np.sum(phase * u ** n, axis=1)
    return out


def _halfline_raw(phi: TauRep, coeffs: Sequence[complex], e_max: float, n_nodes: int,
                  with_tail: bool = False):
    """Integral over ``[0, e_max]``; with ``with_tail`` also over ``[0, 2 e_max]``.

    The doubled cutoff reuses the phase table: ``exp(2i e_max tau)`` is the
    square of ``exp(i e_max tau)``.
    """
    degree = len(coeffs) - 1
    n = phi.samples.size
    tau = phi.tau
    phase = _phases(np.array([e_max], dtype=complex), phi.tau_min, phi.grid_step, n)[0]
    c = np.asarray(coeffs, dtype=complex)
    powers = np.arange(degree + 1) + 1
    if not with_tail:
        mom = _moments(e_max * tau, degree, n_nodes, phase)
        inner = np.sum(mom * phi.samples, axis=1)
        return complex(phi.grid_step * np.sum(c * e_max ** powers * inner))
    a = np.concatenate([e_max * tau, 2.0 * e_max * tau])
    mom = _moments(a, degree, n_nodes, np.concatenate([phase, phase * phase]))
    inner = mom.reshape(degree + 1, 2, n) @ phi.samples
    v1 = complex(phi.grid_step * np.sum(c * e_max ** powers * inner[:, 0]))
    v2 = complex(phi.grid_step * np.sum(c * (2.0 * e_max) ** powers * inner[:, 1]))
    return v1, v2


def halfline_integral(phi: TauRep, weight: PolySymbol | None = None,
                      cfg: QuadratureConfig | None = None) -> PairingResult:
    """``integral_0^e_max weight(E) phi(E) dE`` with a truncation estimate.

    Each exponential in the stored sum is integrated in closed form, so the
    only approximations are the truncation at ``e_max`` and round-off. The
    reported error is ``|integral over [e_max, 2 e_max]|`` plus a round-off
    bound.
    """
    cfg = cfg or QuadratureConfig()
    weight = PolySymbol.one() if weight is None else weight
    if weight.is_zero or phi.is_zero:
        return PairingResult(0j, 0.0)
    value, doubled = _halfline_raw(phi, weight.coeffs, cfg.e_max, cfg.n_nodes, with_tail=True)
    tail = doubled - value
    wbound = sum(abs(c) * cfg.e_max ** k for k, c in enumerate(weight.coeffs))
    roundoff = 16 * _EPS * cfg.e_max * wbound * phi.sup_bound
    return PairingResult(value, abs(tail) + roundoff)


_OVERLAP_BLOCK = 1024


class _Overlap:
    """Cached ``integral_0^L f(E) g(E) dE`` for a fixed ``f`` and lattice-aligned ``g``.

    With both grids on the lattice ``step * Z`` the integral is
    ``step^2 sum_k g_k R(P + k)`` where ``P = (tau_min_f + tau_min_g) / step``
    and ``R(p) = sum_j f_j M((p + j) step)``, ``M(s) = integral_0^L exp(iEs) dE``.
    ``R`` is tabulated in fixed blocks of absolute lattice positions, so a
    value never depends on which other overlaps were computed before it.
    """

    def __init__(self, f: TauRep, cfg: QuadratureConfig):
        self.f = f.samples
        self.step = f.grid_step
        self.tau_min = f.tau_min
        self.cfg = cfg
        self.abs_sum = float(np.sum(np.abs(f.samples)))
        self._blocks: dict[tuple[int, int], np.ndarray] = {}

    def _block(self, b: int, doubled: int) -> np.ndarray:
        key = (b, doubled)
        blk = self._blocks.get(key)
        if blk is None:
            n = self.f.size
            cutoff = self.cfg.e_max * (2.0 if doubled else 1.0)
            q = _OVERLAP_BLOCK * b + np.arange(_OVERLAP_BLOCK + n - 1)
            a = cutoff * self.step * q
            m = cutoff * _moments(a, 0, self.cfg.n_nodes, np.exp(1j * a))[0]
            nfft = sfft.next_fast_len(m.size + n - 1)
            full = sfft.ifft(sfft.fft(m, nfft) * sfft.fft(self.f[::-1], nfft))
            blk = full[n - 1:n - 1 + _OVERLAP_BLOCK]
            self._blocks[key] = blk
        return blk

    def _table(self, p0: int, count: int, doubled: int) -> np.ndarray:
        b0, b1 = p0 // _OVERLAP_BLOCK, (p0 + count - 1) // _OVERLAP_BLOCK
        parts = [self._block(b, doubled) for b in range(b0, b1 + 1)]
        table = parts[0] if len(parts) == 1 else np.concatenate(parts)
        start = p0 - b0 * _OVERLAP_BLOCK
        return table[start:start + count]

    def offset(self, g: TauRep) -> int | None:
        if g.grid_step != self.step:
            return None
        p = (self.tau_min + g.tau_min) / self.step
        return int(p) if p.is_integer() else None

    def __call__(self, g: TauRep, p0: int) -> PairingResult:
        n = g.samples.size
        h2 = self.step * self.step
        value = h2 * complex(np.dot(g.samples, self._table(p0, n, 0)))
        doubled = h2 * complex(np.dot(g.samples, self._table(p0, n, 1)))
        roundoff = 16 * _EPS * self.cfg.e_max * h2 * self.abs_sum * float(np.sum(np.abs(g.samples)))
        return PairingResult(value, abs(doubled - value) + roundoff)


_OVERLAPS: weakref.WeakKeyDictionary = weakref.WeakKeyDictionary()


def overlap(f: TauRep, g: TauRep, cfg: QuadratureConfig | None = None) -> PairingResult:
    """``integral_0^e_max f(E) g(E) dE``, the same quantity as ``halfline_integral(product(f, g))``.

    Tables for ``f`` are cached while ``f`` is alive, so put the factor that
    is reused (a state's wavefunction, say) first. Operands off the shared
    lattice fall back to the convolution route.
    """
    cfg = cfg or QuadratureConfig()
    if f.is_zero or g.is_zero:
        return PairingResult(0j, 0.0)
    per_f = _OVERLAPS.get(f)
    if per_f is None:
        per_f = _OVERLAPS.setdefault(f, {})
    ov = per_f.get(cfg)
    if ov is None:
        ov = per_f.setdefault(cfg, _Overlap(f, cfg))
    p0 = ov.offset(g)
    if p0 is None:
        return halfline_integral(product(f, g), cfg=cfg)
    return ov(g, p0)
