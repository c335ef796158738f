"""Shared fixtures and independent reference computations.

The reference helpers here deliberately avoid the package's own evaluation
and integration code: values on the energy axis come from a plain
exponential sum, integrals from scipy's adaptive quadrature or a dense
Gauss-Legendre mesh.
"""

from __future__ import annotations

import numpy as np
import pytest
from scipy import integrate

from gamow.zrep import QuadratureConfig, wavepacket

_CRITERIA: list[tuple[str, bool, str]] = []


def record_criterion(label: str, ok: bool, detail: str = "") -> None:
    """Remember an acceptance outcome for the end-of-run summary."""
    _CRITERIA.append((label, bool(ok), detail))


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for label, ok, detail in _CRITERIA:
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {label}  {detail}")


def direct_eval(phi, z) -> np.ndarray:
    """Plain ``h * sum(s_j exp(i z tau_j))``; no blocking, no chunking."""
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    return phi.grid_step * np.exp(1j * np.outer(z, phi.tau)) @ phi.samples


def quad_complex(f, a: float, b: float, **kw) -> complex:
    kw.setdefault("limit", 2000)
    kw.setdefault("epsabs", 1e-14)
    kw.setdefault("epsrel", 1e-12)
    re = integrate.quad(lambda x: f(x).real, a, b, **kw)[0]
    im = integrate.quad(lambda x: f(x).imag, a, b, **kw)[0]
    return complex(re, im)


def gl_mesh(a: float, b: float, panels: int = 400, order: int = 10) -> tuple[np.ndarray, np.ndarray]:
    """Composite Gauss-Legendre nodes and weights on ``[a, b]``."""
    x, w = np.polynomial.legendre.leggauss(order)
    edges = np.linspace(a, b, panels + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[1:] + edges[:-1])
    nodes = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    weights = (half[:, None] * w[None, :]).ravel()
    return nodes, weights


@pytest.fixture
def cfg() -> QuadratureConfig:
    return QuadratureConfig()


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240917)


@pytest.fixture
def packet():
    return wavepacket(0.3, 6.0, 4.0, 1.0 - 0.5j)


@pytest.fixture
def packet2():
    return wavepacket(-1.0, 5.5, 3.0, 0.7 + 0.2j)
