"""Scenario files: YAML documents describing a pole, observables and states.

Every mapping keeps the line it was read from so that schema errors can be
reported against the file. See ``scenarios/decay.yaml`` in the repository
for a commented template.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import yaml

from .algebra import (
    BasisTag,
    DiagonalSymbol,
    KernelSymbol,
    KernelTerm,
    Observable,
    hamiltonian_power,
    identity,
)
from .errors import InvalidArgument
from .sampling import OBSERVABLE_CLASSES, random_observable
from .states import Functional, ResonancePole, delta_diag, delta_kernel, gamow, mixture, pure_state
from .zrep import DEFAULT_STEP, PolySymbol, QuadratureConfig, TauRep, wavepacket


class ScenarioError(ValueError):
    """Malformed scenario; ``line`` is 1-based, or None when unknown."""

    def __init__(self, message: str, line: int | None = None, path: str | None = None):
        self.message = message
        self.line = line
        self.path = path
        super().__init__(self.render())

    def render(self) -> str:
        where = self.path or "<scenario>"
        if self.line is not None:
            where = f"{where}:{self.line}"
        return f"{where}: {self.message}"


class _Map(dict):
    line: int | None = None


class _List(list):
    line: int | None = None


class _Loader(yaml.SafeLoader):
    pass


def _construct_map(loader, node):
    m = _Map(loader.construct_mapping(node, deep=True))
    m.line = node.start_mark.line + 1
    return m


def _construct_seq(loader, node):
    s = _List(loader.construct_sequence(node, deep=True))
    s.line = node.start_mark.line + 1
    return s


_Loader.add_constructor(yaml.resolver.BaseResolver.DEFAULT_MAPPING_TAG, _construct_map)
_Loader.add_constructor(yaml.resolver.BaseResolver.DEFAULT_SEQUENCE_TAG, _construct_seq)


@dataclass
class TimeGrid:
    start: float
    stop: float
    count: int

    @property
    def values(self) -> np.ndarray:
        return np.linspace(self.start, self.stop, self.count)


@dataclass
class Scenario:
    pole: ResonancePole
    quadrature: QuadratureConfig
    times: TimeGrid
    seed: int
    tag: BasisTag
    observables: dict[str, Observable] = field(default_factory=dict)
    states: dict[str, Functional] = field(default_factory=dict)
    state_kinds: dict[str, str] = field(default_factory=dict)
    decay_observable: str | None = None
    reference_state: str | None = None
    audit_samples: int = 1000
    audit_functionals: list[str] = field(default_factory=list)


def _line(node, fallback=None):
    return getattr(node, "line", None) or fallback


def _get(node: dict, key: str, kind, *, default=..., ctx: str = ""):
    if key not in node:
        if default is ...:
            raise ScenarioError(f"missing key '{key}'{ctx}", _line(node))
        return default
    val = node[key]
    if kind is float:
        if isinstance(val, bool) or not isinstance(val, (int, float)):
            raise ScenarioError(f"'{key}' must be a number, got {val!r}", _line(node))
        return float(val)
    if kind is int:
        if isinstance(val, bool) or not isinstance(val, int):
            raise ScenarioError(f"'{key}' must be an integer, got {val!r}", _line(node))
        return int(val)
    if kind is dict and not isinstance(val, dict):
        raise ScenarioError(f"'{key}' must be a mapping", _line(node))
    if kind is list and not isinstance(val, list):
        raise ScenarioError(f"'{key}' must be a list", _line(node))
    if kind is str and not isinstance(val, str):
        raise ScenarioError(f"'{key}' must be a string", _line(node))
    return val


def _complex(val, line) -> complex:
    if isinstance(val, bool):
        raise ScenarioError(f"expected a number or [re, im], got {val!r}", line)
    if isinstance(val, (int, float)):
        return complex(val)
    if isinstance(val, list) and len(val) == 2 and all(isinstance(x, (int, float)) for x in val):
        return complex(float(val[0]), float(val[1]))
    raise ScenarioError(f"expected a number or [re, im], got {val!r}", line)


def _packet(node, ctx: str) -> TauRep:
    if not isinstance(node, dict):
        raise ScenarioError(f"{ctx}: wavepacket must be a mapping with center/half_width", None)
    known = {"center", "half_width", "energy", "amplitude", "step"}
    extra = set(node) - known
    if extra:
        raise ScenarioError(f"{ctx}: unknown wavepacket keys {sorted(extra)}", _line(node))
    center = _get(node, "center", float, ctx=f" in {ctx}")
    half_width = _get(node, "half_width", float, ctx=f" in {ctx}")
    energy = _get(node, "energy", float, default=0.0)
    step = _get(node, "step", float, default=DEFAULT_STEP)
    amp = _complex(node.get("amplitude", 1.0), _line(node))
    try:
        return wavepacket(center, half_width, energy, amp, step=step)
    except InvalidArgument as exc:
        raise ScenarioError(f"{ctx}: {exc}", _line(node)) from None


def _observable(node, tag: BasisTag, rng: np.random.Generator) -> Observable:
    name = node.get("name", "?")
    forms = [k for k in ("identity", "hamiltonian", "random", "diag", "kernel") if k in node]
    if not forms:
        raise ScenarioError(f"observable '{name}' needs one of identity/hamiltonian/random/diag/kernel", _line(node))
    if "identity" in node:
        return identity(tag)
    if "hamiltonian" in node:
        n = _get(node, "hamiltonian", int)
        if n < 0:
            raise ScenarioError(f"observable '{name}': Hamiltonian power must be non-negative", _line(node))
        # degrees above the supported maximum raise UnsupportedDegree (a numeric limit)
        return hamiltonian_power(n, tag)
    if "random" in node:
        kind = _get(node, "random", str)
        if kind not in OBSERVABLE_CLASSES:
            raise ScenarioError(f"observable '{name}': random class must be one of {OBSERVABLE_CLASSES}", _line(node))
        return random_observable(rng, kind, tag)
    poly = PolySymbol()
    zpart = None
    if "diag" in node:
        d = _get(node, "diag", dict)
        coeffs = d.get("poly", [])
        if not isinstance(coeffs, list):
            raise ScenarioError(f"observable '{name}': diag.poly must be a list of coefficients", _line(d))
        poly = PolySymbol(tuple(_complex(c, _line(d)) for c in coeffs))
        if "zpart" in d:
            zpart = _packet(d["zpart"], f"observable '{name}' diag.zpart")
    terms = []
    for t in _get(node, "kernel", list, default=[]):
        if not isinstance(t, dict):
            raise ScenarioError(f"observable '{name}': kernel entries must be mappings", _line(node))
        w = _complex(t.get("lambda", 1.0), _line(t))
        left = _packet(_get(t, "left", dict), f"observable '{name}' kernel.left")
        right = _packet(_get(t, "right", dict), f"observable '{name}' kernel.right")
        terms.append(KernelTerm(w, left, right))
    return Observable(tag, DiagonalSymbol(poly, zpart), KernelSymbol(tuple(terms)))


def _state(node, tag: BasisTag, pole: ResonancePole, cfg: QuadratureConfig) -> tuple[Functional, str]:
    name = node.get("name", "?")
    try:
        if "pure" in node:
            return pure_state(_packet(node["pure"], f"state '{name}'"), tag, cfg), "pure"
        if "mixture" in node:
            entries = []
            for e in _get(node, "mixture", list):
                if not isinstance(e, dict):
                    raise ScenarioError(f"state '{name}': mixture entries must be mappings", _line(node))
                entries.append((_get(e, "weight", float), _packet(_get(e, "packet", dict), f"state '{name}'")))
            return mixture(entries, tag, cfg), "mixture"
        if "gamow" in node:
            return gamow(pole, tag), "gamow"
        if "delta_diag" in node:
            return delta_diag(_get(node, "delta_diag", float), tag), "delta"
        if "delta_kernel" in node:
            loc = _get(node, "delta_kernel", list)
            if len(loc) != 2:
                raise ScenarioError(f"state '{name}': delta_kernel needs [e, e2]", _line(node))
            return delta_kernel(float(loc[0]), float(loc[1]), tag), "delta"
    except InvalidArgument as exc:
        raise ScenarioError(f"state '{name}': {exc}", _line(node)) from None
    raise ScenarioError(f"state '{name}' needs one of pure/mixture/gamow/delta_diag/delta_kernel", _line(node))


def _named(items, what: str) -> list:
    seen = set()
    for it in items:
        if not isinstance(it, dict):
            raise ScenarioError(f"{what} entries must be mappings", _line(items))
        nm = it.get("name")
        if not isinstance(nm, str) or not nm:
            raise ScenarioError(f"{what} entry needs a 'name'", _line(it))
        if nm in seen:
            raise ScenarioError(f"duplicate {what} name '{nm}'", _line(it))
        seen.add(nm)
    return items


def parse_scenario(text: str, path: str | None = None, seed: int | None = None) -> Scenario:
    """Build a :class:`Scenario` from YAML text; ``seed`` overrides the file's seed."""
    try:
        doc = yaml.load(text, Loader=_Loader)
    except yaml.MarkedYAMLError as exc:
        mark = exc.problem_mark or exc.context_mark
        raise ScenarioError(f"YAML syntax error: {exc.problem}", mark.line + 1 if mark else None, path) from None
    try:
        return _build(doc, seed)
    except ScenarioError as exc:
        exc.path = path
        raise ScenarioError(exc.message, exc.line, path) from None


def _build(doc, seed_override) -> Scenario:
    if not isinstance(doc, dict):
        raise ScenarioError("scenario must be a mapping at top level", 1)
    known = {"seed", "tag", "pole", "quadrature", "times", "observables", "states",
             "decay_observable", "reference_state", "audit"}
    extra = set(doc) - known
    if extra:
        raise ScenarioError(f"unknown top-level keys {sorted(extra)}", _line(doc))
    seed = _get(doc, "seed", int, default=0)
    if seed_override is not None:
        seed = int(seed_override)
    try:
        tag = BasisTag(doc.get("tag", "in"))
    except ValueError:
        raise ScenarioError(f"tag must be one of free/in/out, got {doc.get('tag')!r}", _line(doc)) from None

    p = _get(doc, "pole", dict)
    try:
        pole = ResonancePole(_get(p, "e_r", float), _get(p, "gamma", float))
    except InvalidArgument as exc:
        raise ScenarioError(f"pole: {exc}", _line(p)) from None

    q = _get(doc, "quadrature", dict, default=_Map())
    try:
        cfg = QuadratureConfig(
            e_max=_get(q, "e_max", float, default=50.0),
            n_nodes=_get(q, "n_nodes", int, default=32),
            boundary_tol=_get(q, "boundary_tol", float, default=1e-10),
        )
    except InvalidArgument as exc:
        raise ScenarioError(f"quadrature: {exc}", _line(q, _line(doc))) from None

    tnode = _get(doc, "times", dict)
    times = TimeGrid(_get(tnode, "start", float), _get(tnode, "stop", float), _get(tnode, "count", int))
    if times.count < 2:
        raise ScenarioError("times.count must be at least 2", _line(tnode))

    rng = np.random.default_rng(seed)
    observables = {}
    for node in _named(_get(doc, "observables", list), "observable"):
        observables[node["name"]] = _observable(node, tag, rng)

    states, kinds = {}, {}
    for node in _named(_get(doc, "states", list, default=_List()), "state"):
        states[node["name"]], kinds[node["name"]] = _state(node, tag, pole, cfg)

    decay_obs = doc.get("decay_observable")
    if decay_obs is not None and decay_obs not in observables:
        raise ScenarioError(f"decay_observable '{decay_obs}' is not a defined observable", _line(doc))
    ref = doc.get("reference_state")
    if ref is not None and kinds.get(ref) not in ("pure", "mixture"):
        raise ScenarioError(f"reference_state '{ref}' must name a pure state or mixture", _line(doc))

    audit = _get(doc, "audit", dict, default=_Map())
    samples = _get(audit, "samples", int, default=1000)
    if samples < 1:
        raise ScenarioError("audit.samples must be positive", _line(audit))
    audited = _get(audit, "functionals", list, default=None)
    if audited is None:
        audited = [nm for nm, k in kinds.items() if k in ("pure", "mixture", "gamow")]
    for nm in audited:
        if nm not in states:
            raise ScenarioError(f"audit.functionals: unknown state '{nm}'", _line(audited, _line(audit)))

    return Scenario(pole, cfg, times, seed, tag, observables, states, kinds, decay_obs, ref, samples,
                    list(audited))


def load_scenario(path: str | Path, seed: int | None = None) -> Scenario:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ScenarioError(f"cannot read scenario: {exc.strerror}", None, str(path)) from None
    return parse_scenario(text, str(path), seed)
