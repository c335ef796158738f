"""JSON documents for observables and functionals.

Complex numbers are written as ``[re, im]`` pairs and Z functions as
``{"tau_min", "tau_max", "grid_step", "samples"}``. Floats go through
``repr``, so a dump/load round trip reproduces every sample exactly.
"""

from __future__ import annotations

import json

import numpy as np

from .algebra import BasisTag, DiagonalSymbol, KernelSymbol, KernelTerm, Observable
from .states import (
    DensityTerm,
    DiagonalComponent,
    DiagonalMass,
    Functional,
    KernelComponent,
    KernelMass,
)
from .zrep import PolySymbol, TauRep


def _c(z) -> list[float]:
    z = complex(z)
    return [z.real, z.imag]


def _z(pair) -> complex:
    return complex(float(pair[0]), float(pair[1]))


def taurep_to_dict(phi: TauRep) -> dict:
    return {
        "tau_min": phi.tau_min,
        "tau_max": phi.tau_max,
        "grid_step": phi.grid_step,
        "samples": [[s.real, s.imag] for s in phi.samples.tolist()],
    }


def taurep_from_dict(d: dict) -> TauRep:
    samples = np.array([_z(p) for p in d["samples"]], dtype=complex)
    step = d.get("grid_step")
    if step is None:
        step = (float(d["tau_max"]) - float(d["tau_min"])) / (samples.size - 1)
    return TauRep(float(d["tau_min"]), float(step), samples, boundary_tol=np.inf)


def poly_to_dict(p: PolySymbol) -> dict:
    return {"coeffs": [_c(c) for c in p.coeffs]}


def poly_from_dict(d: dict) -> PolySymbol:
    return PolySymbol(tuple(_z(c) for c in d["coeffs"]))


def _term_to_dict(t: KernelTerm, weight_key: str) -> dict:
    return {weight_key: _c(t.weight), "left": taurep_to_dict(t.left), "right": taurep_to_dict(t.right)}


def _term_from_dict(d: dict, weight_key: str) -> KernelTerm:
    return KernelTerm(_z(d[weight_key]), taurep_from_dict(d["left"]), taurep_from_dict(d["right"]))


def observable_to_dict(obs: Observable) -> dict:
    z = obs.diag.zpart
    return {
        "type": "Observable",
        "tag": obs.tag.value,
        "diag": {"poly": poly_to_dict(obs.diag.poly), "zpart": None if z is None else taurep_to_dict(z)},
        "kernel": {"terms": [_term_to_dict(t, "lambda") for t in obs.kernel.terms]},
    }


def observable_from_dict(d: dict) -> Observable:
    z = d["diag"].get("zpart")
    diag = DiagonalSymbol(poly_from_dict(d["diag"]["poly"]), None if z is None else taurep_from_dict(z))
    terms = tuple(_term_from_dict(t, "lambda") for t in d["kernel"]["terms"])
    return Observable(BasisTag(d["tag"]), diag, KernelSymbol(terms))


def functional_to_dict(rho: Functional) -> dict:
    return {
        "type": "Functional",
        "tag": rho.tag.value,
        "diag": {
            "density": [{"poly": poly_to_dict(p), "func": taurep_to_dict(f)} for p, f in rho.diag.density],
            "point_masses": [{"weight": _c(w), "e": e} for w, e in rho.diag.point_masses],
        },
        "kernel": {
            "density": [_term_to_dict(t, "mu") for t in rho.kernel.density],
            "point_masses": [
                {"weight": _c(w), "z_left": _c(za), "z_right": _c(zb)} for w, za, zb in rho.kernel.point_masses
            ],
        },
    }


def functional_from_dict(d: dict) -> Functional:
    diag = DiagonalComponent(
        tuple(DensityTerm(poly_from_dict(x["poly"]), taurep_from_dict(x["func"])) for x in d["diag"]["density"]),
        tuple(DiagonalMass(_z(x["weight"]), float(x["e"])) for x in d["diag"]["point_masses"]),
    )
    kernel = KernelComponent(
        tuple(_term_from_dict(x, "mu") for x in d["kernel"]["density"]),
        tuple(KernelMass(_z(x["weight"]), _z(x["z_left"]), _z(x["z_right"])) for x in d["kernel"]["point_masses"]),
    )
    return Functional(BasisTag(d["tag"]), diag, kernel)


def dumps(obj: Observable | Functional, indent: int | None = 1) -> str:
    if isinstance(obj, Observable):
        return json.dumps(observable_to_dict(obj), indent=indent)
    if isinstance(obj, Functional):
        return json.dumps(functional_to_dict(obj), indent=indent)
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def loads(text: str) -> Observable | Functional:
    d = json.loads(text)
    kind = d.get("type")
    if kind == "Observable":
        return observable_from_dict(d)
    if kind == "Functional":
        return functional_from_dict(d)
    raise ValueError(f"unknown document type {kind!r}")
