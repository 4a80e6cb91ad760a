"""Command-line front end.

Commands
--------
compute  evaluate one measure on a state file (JSON result)
sweep    apply a standard channel over a parameter grid and tabulate a measure
verify   run a named analytic-vs-oracle suite and print a pass/fail table
haar     Monte-Carlo Haar average of coherence
curve    Unruh degradation curve over an acceleration grid

Exit codes: 0 success, 1 verification failure, 2 validation or usage
error, 3 optimizer failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from collections.abc import Callable
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import (
    channels,
    coherence,
    discord,
    min_measures,
    protocols,
    qcore,
    relativistic,
    states,
)
from .exceptions import OptimizerError, QCohereError, ValidationError
from .results import MeasureResult

EXIT_OK, EXIT_FAIL, EXIT_INVALID, EXIT_OPTIMIZER = 0, 1, 2, 3


def fmt(x) -> str:
    """Floats with 12 significant digits; everything else via ``str``."""
    if isinstance(x, (float, np.floating)):
        return f"{float(x):.12g}"
    return "" if x is None else str(x)


# ---------------------------------------------------------------------------
# measure registry
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class MeasureSpec:
    fn: Callable
    applies: Callable
    needs_dims: bool = False
    description: str = ""


def _any(rho, dims):
    return True


def _qubit(rho, dims):
    return rho.shape == (2, 2)


def _two_qubit(rho, dims):
    return rho.shape == (4, 4)


def _qubit_a(rho, dims):
    return dims is not None and dims[0] == 2


def _bipartite(rho, dims):
    return dims is not None and len(dims) == 2


REGISTRY: dict[str, MeasureSpec] = {
    "c_l1": MeasureSpec(lambda r, b, d: coherence.c_l1(r, b), _any),
    "c_rel_entropy": MeasureSpec(lambda r, b, d: coherence.c_rel_entropy(r, b), _any),
    "c_l2": MeasureSpec(lambda r, b, d: coherence.c_l2(r, b), _any),
    "c_trace": MeasureSpec(lambda r, b, d: coherence.c_trace(r, b), _any),
    "c_trace_modified": MeasureSpec(lambda r, b, d: coherence.c_trace_modified(r, b), _any),
    "robustness": MeasureSpec(lambda r, b, d: coherence.robustness(r, b), _any),
    "coherence_weight": MeasureSpec(lambda r, b, d: coherence.coherence_weight(r, b), _any),
    "c_max_relative_entropy": MeasureSpec(lambda r, b, d: coherence.c_max_relative_entropy(r, b), _any),
    "geometric_coherence": MeasureSpec(lambda r, b, d: coherence.geometric_coherence(r, b), _any),
    "tsallis2": MeasureSpec(lambda r, b, d: coherence.tsallis_coherence(r, b, 2.0), _any),
    "c_sk": MeasureSpec(lambda r, b, d: coherence.c_sk(r, b), _any),
    "coherence_of_formation": MeasureSpec(lambda r, b, d: coherence.coherence_of_formation_qubit(r), _qubit),
    "negativity": MeasureSpec(lambda r, b, d: discord.negativity(r, d), _bipartite, True),
    "entropic_discord": MeasureSpec(lambda r, b, d: discord.entropic_discord_2q(r, dims=d, method="auto"),
                                    _qubit_a, True),
    "one_way_deficit": MeasureSpec(lambda r, b, d: discord.one_way_deficit(r, dims=d), _qubit_a, True),
    "hs_discord": MeasureSpec(lambda r, b, d: discord.hs_discord(r, d), _bipartite, True),
    "trace_discord": MeasureSpec(lambda r, b, d: discord.trace_discord(r, d), _two_qubit, True),
    "bures_discord": MeasureSpec(lambda r, b, d: discord.bures_discord(r, d), _qubit_a, True),
    "hellinger_discord": MeasureSpec(lambda r, b, d: discord.hellinger_discord(r, d), _qubit_a, True),
    "lqu": MeasureSpec(lambda r, b, d: discord.lqu(r, d), _qubit_a, True),
    "hs_min": MeasureSpec(lambda r, b, d: min_measures.hs_min(r, d), _bipartite, True),
    "trace_min": MeasureSpec(lambda r, b, d: min_measures.trace_min(r, d), _qubit_a, True),
    "bures_min": MeasureSpec(lambda r, b, d: min_measures.bures_min(r, d), _qubit_a, True),
    "rel_entropy_min": MeasureSpec(lambda r, b, d: min_measures.rel_entropy_min(r, d), _qubit_a, True),
    "skew_min": MeasureSpec(lambda r, b, d: min_measures.skew_min(r, d), _qubit_a, True),
    "uin": MeasureSpec(lambda r, b, d: min_measures.uin(r, d), _qubit_a, True),
}


def _default_dims(n: int):
    for a in (2, 3):
        if n % a == 0 and n // a >= 2:
            return (a, n // a)
    return None


def parse_dims(text, n):
    if text is None:
        return _default_dims(n)
    try:
        dims = tuple(int(x) for x in text.split(","))
    except ValueError as exc:
        raise ValidationError(f"bad --dims {text!r}") from exc
    if int(np.prod(dims)) != n:
        raise ValidationError(f"--dims {text} does not match state dimension {n}")
    return dims


def evaluate(measure: str, rho, basis=None, dims=None) -> MeasureResult:
    """Look up ``measure`` in the registry, check applicability and evaluate it."""
    spec = REGISTRY.get(measure)
    if spec is None:
        raise ValidationError(f"unknown measure {measure!r}; choose from {sorted(REGISTRY)}")
    if not spec.applies(rho, dims):
        raise ValidationError(f"measure {measure!r} does not apply to a state of shape {rho.shape} "
                              f"with dims {dims}")
    out = spec.fn(rho, basis, dims)
    return out if isinstance(out, MeasureResult) else MeasureResult(float(out))


# ---------------------------------------------------------------------------
# file helpers
# ---------------------------------------------------------------------------

def read_state(path) -> np.ndarray:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ValidationError(f"cannot read state file {path}: {exc}") from exc
    return states.state_from_json(text)


def read_basis(path):
    if path is None:
        return None
    try:
        obj = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ValidationError(f"cannot read basis file {path}: {exc}") from exc
    return qcore.ReferenceBasis(qcore.validate_unitary(states.matrix_from_json(obj)))


def read_channel(spec: str):
    """A standard channel kind name, or a path to a channel JSON file."""
    if spec in channels.STANDARD_KINDS:
        return spec
    try:
        return channels.KrausChannel.from_json(Path(spec).read_text())
    except (OSError, json.JSONDecodeError, KeyError, TypeError) as exc:
        raise ValidationError(f"cannot read channel {spec!r}: {exc}") from exc


def parse_grid(text) -> np.ndarray:
    if text is None:
        raise ValidationError("--grid start:stop:steps is required")
    try:
        start, stop, steps = text.split(":")
        start, stop, steps = float(start), float(stop), int(steps)
    except ValueError as exc:
        raise ValidationError(f"bad --grid {text!r}; expected start:stop:steps") from exc
    if steps < 1:
        raise ValidationError("grid is empty")
    return np.linspace(start, stop, steps)


def write_output(text: str, out):
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


def rows_to_text(rows: list, columns: list, fmt_kind: str) -> str:
    if fmt_kind == "json":
        return json.dumps([{c: row[c] for c in columns} for row in rows], sort_keys=True, indent=1) + "\n"
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        w.writerow([fmt(row[c]) for c in columns])
    return buf.getvalue()


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def cmd_compute(args) -> int:
    rho = read_state(args.state)
    if args.channel:
        ch = read_channel(args.channel)
        if isinstance(ch, str):
            raise ValidationError("compute needs a channel JSON file, not a kind name")
        rho = channels.apply(ch, rho, None if ch.dim_in == rho.shape[0] else "A")
    dims = parse_dims(args.dims, rho.shape[0])
    res = evaluate(args.measure, rho, read_basis(args.basis), dims)
    if args.format == "csv":
        text = rows_to_text([{"measure": args.measure, "value": res.value, "method": res.method}],
                            ["measure", "value", "method"], "csv")
    else:
        out = {"measure": args.measure, **res.to_dict()}
        text = json.dumps(out, sort_keys=True) + "\n"
    write_output(text, args.out)
    return EXIT_OK


def _apply_channel(kind, param, rho, on):
    ch = channels.standard_channel(kind, param)
    n = int(round(math.log2(rho.shape[0])))
    if 2 ** n != rho.shape[0]:
        raise ValidationError("sweeps apply qubit channels and need a multi-qubit state")
    if on == "all":
        return channels.apply_each(ch, rho, n)
    k = {"A": 0, "B": 1}.get(on, None)
    if k is None:
        try:
            k = int(on)
        except ValueError as exc:
            raise ValidationError(f"bad --on {on!r}") from exc
    return channels.apply(ch, rho, k, [2] * n)


def cmd_sweep(args) -> int:
    rho = read_state(args.state)
    grid = parse_grid(args.grid)
    kind = read_channel(args.channel) if args.channel else None
    if not isinstance(kind, str):
        raise ValidationError("sweep needs a standard channel kind via --channel")
    rows = []
    for p in np.sort(grid):
        out = _apply_channel(kind, float(p), rho, args.on)
        dims = parse_dims(args.dims, out.shape[0])
        rows.append({"param": float(p), "measure": args.measure,
                     "value": evaluate(args.measure, out, read_basis(args.basis), dims).value})
    write_output(rows_to_text(rows, ["param", "measure", "value"], args.format), args.out)
    return EXIT_OK


def _suite_bell(seed, n):
    rng = qcore.make_rng(seed)
    checks = []
    for k in range(n):
        p = states.random_bell_params(seed=int(rng.integers(2 ** 31)))
        rho = states.bell_diagonal(p)
        a = discord.trace_discord(rho).value
        s = discord.trace_sweep(rho).value
        checks.append((f"trace_discord[{k}]", abs(a - s), 1e-5))
        a = discord.entropic_discord_2q(rho, method="auto").value
        s = discord.entropic_discord_2q(rho).value
        checks.append((f"entropic_discord[{k}]", abs(a - s), 1e-6))
        a = discord.hs_discord_two_qubit(rho)
        s = discord.hs_sweep(rho).value
        checks.append((f"hs_discord[{k}]", abs(a - s), 1e-6))
    return checks


def _suite_haar(seed, n, d):
    checks = []
    for kind in protocols.HAAR_KINDS:
        est = protocols.haar_average_coherence(d, n, seed, kind)
        checks.append((f"haar_{kind}_d{d}", abs(est.z), 4.0))
    return checks


def _suite_coherence(seed, n):
    rng = qcore.make_rng(seed)
    checks = []
    for k in range(n):
        rho = states.random_density(2, seed=int(rng.integers(2 ** 31)))
        checks.append((f"robustness_qubit[{k}]",
                       abs(coherence.robustness(rho, method="numeric").value - coherence.c_l1(rho).value), 1e-4))
    for d in (2, 3, 4):
        psi = states.maximally_coherent(d)
        checks.append((f"trace_pure_mcs_d{d}", abs(coherence.c_trace_pure(psi).value - 2 * (1 - 1 / d)), 1e-12))
    return checks


def _suite_channels(seed, n):
    rng = qcore.make_rng(seed)
    checks = []
    for kind in channels.STANDARD_KINDS:
        ch = channels.standard_channel(kind, float(rng.uniform()))
        T = channels.transfer_matrix(ch)
        dev = 0.0
        for _ in range(n):
            rho = states.random_density(2, seed=int(rng.integers(2 ** 31)))
            dev = max(dev, float(np.max(np.abs(T.evolve(channels.coordinates(rho))
                                               - channels.coordinates(ch(rho))))))
        checks.append((f"transfer_{kind}", dev, 1e-9))
    H = np.array([[1, 1], [1, -1]]) / math.sqrt(2)
    checks.append(("cp_hadamard", abs(channels.cohering_power(channels.unitary_channel(H)) - 1.0), 1e-6))
    return checks


SUITES = {
    "bell-diagonal-suite": lambda a: _suite_bell(a.seed, a.n or 10),
    "haar": lambda a: _suite_haar(a.seed, a.n or 10_000, a.d or 2),
    "coherence-suite": lambda a: _suite_coherence(a.seed, a.n or 10),
    "channels-suite": lambda a: _suite_channels(a.seed, a.n or 20),
}


def cmd_verify(args) -> int:
    if args.suite not in SUITES:
        raise ValidationError(f"unknown suite {args.suite!r}; choose from {sorted(SUITES)}")
    checks = SUITES[args.suite](args)
    rows, failed = [], []
    for name, err, tol in checks:
        ok = bool(err <= tol)
        rows.append({"check": name, "error": float(err), "tol": float(tol), "status": "PASS" if ok else "FAIL"})
        if not ok:
            failed.append(rows[-1])
    write_output(rows_to_text(rows, ["check", "error", "tol", "status"], args.format), args.out)
    if failed:
        sys.stderr.write("failing cases: " + json.dumps(failed, sort_keys=True) + "\n")
        return EXIT_FAIL
    return EXIT_OK


def cmd_haar(args) -> int:
    est = protocols.haar_average_coherence(args.d or 2, args.n or 10_000, args.seed, args.kind)
    if args.format == "csv":
        text = rows_to_text([est.to_dict()], ["kind", "d", "n_samples", "mean", "stderr", "analytic", "z"], "csv")
    else:
        text = json.dumps(est.to_dict(), sort_keys=True) + "\n"
    write_output(text, args.out)
    return EXIT_OK


def cmd_curve(args) -> int:
    grid = parse_grid(args.grid)
    rows = relativistic.degradation_curve(args.kind, args.measure or "negativity", grid, omega=args.omega)
    write_output(rows_to_text(rows, ["acceleration", "r", "measure", "value", "n_max"], args.format), args.out)
    return EXIT_OK


COMMANDS = {"compute": cmd_compute, "sweep": cmd_sweep, "verify": cmd_verify, "haar": cmd_haar, "curve": cmd_curve}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"error: {message}\n")
        raise SystemExit(EXIT_INVALID)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="qcohere", description="Coherence and quantum-correlation quantifiers.")
    p.add_argument("command", choices=sorted(COMMANDS))
    p.add_argument("--state", help="state JSON file {dim, re, im}")
    p.add_argument("--channel", help="standard channel kind (sweep) or channel JSON file (compute)")
    p.add_argument("--measure", help="measure identifier")
    p.add_argument("--basis", help="JSON file with a unitary whose columns form the reference basis")
    p.add_argument("--dims", help="subsystem dimensions, e.g. 2,2")
    p.add_argument("--on", default="all", help="sweep target: all, A, B or a qubit index")
    p.add_argument("--grid", help="start:stop:steps")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", help="output file (default: standard output)")
    p.add_argument("--format", choices=("csv", "json"), default=None)
    p.add_argument("--suite", help="verification suite name")
    p.add_argument("--kind", help="haar: l1|rel_entropy|dephased_trace_distance; curve: fermionic|bosonic")
    p.add_argument("-d", type=int, help="dimension (haar)")
    p.add_argument("-n", type=int, help="sample or case count")
    p.add_argument("--omega", type=float, default=1.0, help="mode frequency for curves")
    return p


_DEFAULT_FORMAT = {"compute": "json", "sweep": "csv", "verify": "csv", "haar": "json", "curve": "csv"}


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:  # usage errors and --help
        return int(exc.code or 0)
    if args.format is None:
        args.format = _DEFAULT_FORMAT[args.command]
    if args.command == "haar" and args.kind is None:
        args.kind = "l1"
    if args.command == "curve" and args.kind is None:
        args.kind = "fermionic"
    try:
        if args.command in ("compute", "sweep") and (not args.state or not args.measure):
            raise ValidationError(f"{args.command} needs --state and --measure")
        if args.command == "verify" and not args.suite:
            raise ValidationError("verify needs --suite")
        return COMMANDS[args.command](args)
    except OptimizerError as exc:
        sys.stderr.write(f"optimizer failure: {exc}\n")
        return EXIT_OPTIMIZER
    except (QCohereError, ValueError, OSError) as exc:
        sys.stderr.write(f"validation error: {exc}\n")
        return EXIT_INVALID


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
