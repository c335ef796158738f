"""Command-line front end.

Every command reads a YAML scenario (``--config``). Exit codes: 0 on
success, 1 when a checked tolerance fails, 2 for malformed configuration or
unknown names, 3 when a numeric guard trips.
"""

from __future__ import annotations

import csv
import io
import json
import sys
from pathlib import Path

import click

from .algebra import hamiltonian_power, identity
from .dynamics import decay_scan
from .errors import RangeGuardError, UnsupportedDegree
from .scenario import Scenario, ScenarioError, load_scenario
from .states import gamow, pair, positivity_audit

EXIT_TOLERANCE = 1
EXIT_CONFIG = 2
EXIT_NUMERIC = 3


def _fmt(x: float) -> str:
    return "%.17g" % x


def _load(config: Path, seed: int | None) -> Scenario:
    try:
        return load_scenario(config, seed)
    except ScenarioError as exc:
        click.echo(f"error: {exc.render()}", err=True)
        sys.exit(EXIT_CONFIG)


def _emit(text: str, out: Path | None) -> None:
    if out is None:
        click.echo(text, nl=False)
    else:
        # newline="" keeps the bytes identical across platforms
        with open(out, "w", newline="") as fh:
            fh.write(text)


def _numeric_guard(fn):
    """Map numeric guard exceptions to exit code 3."""

    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except (RangeGuardError, UnsupportedDegree) as exc:
            click.echo(f"numeric guard: {exc}", err=True)
            sys.exit(EXIT_NUMERIC)

    wrapper.__name__ = fn.__name__
    wrapper.__doc__ = fn.__doc__
    return wrapper


_config = click.option(
    "--config", "config", required=True, type=click.Path(path_type=Path, dir_okay=False),
    help="Scenario YAML file.",
)
_out = click.option("--out", type=click.Path(path_type=Path, dir_okay=False), default=None,
                    help="Write output here instead of stdout.")
_tol = click.option("--tolerance", type=float, default=1e-8, show_default=True,
                    help="Tolerance for pass/fail checks.")
_seed = click.option("--seed", type=int, default=None, help="Override the scenario seed.")


@click.group()
def main():
    """Resonance functionals on a Paley-Wiener energy representation."""


@main.command()
@_config
@_out
@_tol
@_seed
@_numeric_guard
def decay(config, out, tolerance, seed):
    """Tabulate (rho_D | O_t) against exp(-gamma t) (rho_D | O).

    Exits 1 if any row has abs_err > tolerance * (1 + |closed form|).
    """
    sc = _load(config, seed)
    if sc.decay_observable is None:
        click.echo(f"error: {config}: scenario has no decay_observable", err=True)
        sys.exit(EXIT_CONFIG)
    obs = sc.observables[sc.decay_observable]
    times = sc.times.values
    scan = decay_scan(sc.pole, obs, times, sc.quadrature)

    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["t", "re_value", "im_value", "magnitude", "closed_form_magnitude", "abs_err"])
    ok = True
    for t, v, c, err in zip(times, scan.values, scan.closed_form, scan.abs_err):
        w.writerow([_fmt(t), _fmt(v.real), _fmt(v.imag), _fmt(abs(v)), _fmt(abs(c)), _fmt(err)])
        ok &= bool(err <= tolerance * (1.0 + abs(c)))
    _emit(buf.getvalue(), out)
    if not ok:
        click.echo(f"decay law violated beyond tolerance {tolerance:g}", err=True)
        sys.exit(EXIT_TOLERANCE)


@main.command()
@_config
@_out
@_tol
@_seed
@_numeric_guard
def moments(config, out, tolerance, seed):
    """Energy moments (rho | H^n), n = 0..5, for the Gamow functional and a pure state.

    Gamow rows must be exactly zero; the pure-state n = 0 row must be 1
    within ``tolerance`` (floored at 1e-6).
    """
    sc = _load(config, seed)
    rho_d = gamow(sc.pole, sc.tag)
    rows = []
    ok = True
    for n in range(6):
        v = pair(rho_d, hamiltonian_power(n, sc.tag), sc.quadrature).value
        ok &= v == 0
        rows.append(("gamow", n, v))
    if sc.reference_state is not None:
        ref = sc.states[sc.reference_state]
        for n in range(6):
            v = pair(ref, hamiltonian_power(n, sc.tag), sc.quadrature).value
            rows.append((sc.reference_state, n, v))
        norm = pair(ref, identity(sc.tag), sc.quadrature).value
        ok &= abs(norm - 1) <= max(tolerance, 1e-6)

    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["functional", "n", "re_value", "im_value"])
    for name, n, v in rows:
        w.writerow([name, n, _fmt(v.real), _fmt(v.imag)])
    _emit(buf.getvalue(), out)
    if not ok:
        sys.exit(EXIT_TOLERANCE)


@main.command()
@_config
@_out
@_tol
@_seed
@click.option("--samples", type=int, default=None, help="Override audit.samples.")
@_numeric_guard
def audit(config, out, tolerance, seed, samples):
    """Positivity audit (rho | O^dagger O) >= 0 over seeded random observables.

    Pure states and mixtures use the mixed class; the Gamow functional is
    audited on the kernel-only class (checked) and on the mixed class
    (recorded, never fails the run).
    """
    sc = _load(config, seed)
    n = samples if samples is not None else sc.audit_samples
    entries = []
    ok = True
    for name in sc.audit_functionals:
        rho = sc.states[name]
        kind = sc.state_kinds[name]
        classes = ("kernel", "mixed") if kind == "gamow" else ("mixed",)
        for cls in classes:
            rep = positivity_audit(rho, n, sc.seed, cls, tolerance, sc.quadrature)
            diagnostic = kind == "gamow" and cls == "mixed"
            if not diagnostic:
                ok &= rep.passed
            entries.append({"functional": name, "kind": kind, "diagnostic": diagnostic, **rep.to_dict()})
    text = json.dumps({"seed": sc.seed, "tolerance": tolerance, "audits": entries}, indent=2) + "\n"
    _emit(text, out)
    if not ok:
        sys.exit(EXIT_TOLERANCE)


@main.command(name="pair")
@_config
@click.argument("state")
@click.argument("observable")
@_seed
@_numeric_guard
def pair_cmd(config, state, observable, seed):
    """Print (STATE | OBSERVABLE) and its quadrature error estimate."""
    sc = _load(config, seed)
    for nm, table, what in ((state, sc.states, "state"), (observable, sc.observables, "observable")):
        if nm not in table:
            known = ", ".join(sorted(table)) or "none"
            click.echo(f"error: unknown {what} '{nm}' (defined: {known})", err=True)
            sys.exit(EXIT_CONFIG)
    try:
        res = pair(sc.states[state], sc.observables[observable], sc.quadrature)
    except ValueError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(EXIT_CONFIG)
    click.echo(f"value {_fmt(res.value.real)} {_fmt(res.value.imag)}")
    click.echo(f"error {_fmt(res.quadrature_error)}")


if __name__ == "__main__":
    main()
