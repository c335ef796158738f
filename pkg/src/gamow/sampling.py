"""Seeded random draws of wavepackets, observables and states.

The distributions are fixed so that audits and property checks are
reproducible from a seed alone:

* wavepacket: tau-center uniform on [-2, 2], half-width uniform on [5, 8],
  energy centre uniform on [1, 8], complex standard-normal amplitude, all
  on the lattice of :data:`~gamow.zrep.DEFAULT_STEP`.
* observable: kernel rank 1 or 2 with complex standard-normal weights on
  wavepacket factors; for the ``"mixed"`` class additionally a diagonal
  polynomial of degree 0..2 (coefficient ``k`` scaled by ``5**-k``) and,
  with probability 1/2, a wavepacket Z part.
"""

from __future__ import annotations

import numpy as np

from .algebra import BasisTag, DiagonalSymbol, KernelSymbol, KernelTerm, Observable
from .zrep import DEFAULT_STEP, PolySymbol, TauRep, wavepacket

OBSERVABLE_CLASSES = ("kernel", "mixed")


def complex_normal(rng: np.random.Generator) -> complex:
    re, im = rng.standard_normal(2)
    return complex(re, im) / np.sqrt(2.0)


def random_wavepacket(rng: np.random.Generator, step: float = DEFAULT_STEP) -> TauRep:
    center = rng.uniform(-2.0, 2.0)
    half_width = rng.uniform(5.0, 8.0)
    energy = rng.uniform(1.0, 8.0)
    return wavepacket(center, half_width, energy, complex_normal(rng), step=step)


def random_observable(rng: np.random.Generator, kind: str = "mixed",
                      tag: BasisTag = BasisTag.FREE) -> Observable:
    if kind not in OBSERVABLE_CLASSES:
        raise ValueError(f"unknown observable class {kind!r}")
    rank = int(rng.integers(1, 3))
    terms = tuple(
        KernelTerm(complex_normal(rng), random_wavepacket(rng), random_wavepacket(rng)) for _ in range(rank)
    )
    diag = DiagonalSymbol()
    if kind == "mixed":
        degree = int(rng.integers(0, 3))
        poly = PolySymbol(tuple(complex_normal(rng) / 5.0 ** k for k in range(degree + 1)))
        zpart = random_wavepacket(rng) if rng.random() < 0.5 else None
        diag = DiagonalSymbol(poly, zpart)
    return Observable(tag, diag, KernelSymbol(terms))
