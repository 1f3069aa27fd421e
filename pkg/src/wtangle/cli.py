"""Command-line front end.

Exit codes: 0 success, 1 audit found failures, 2 usage or malformed input,
3 state validation failure, 4 zero-coherence hypothesis failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys
import tempfile
from pathlib import Path

import numpy as np

from .errors import CoherencesNotZero, ValidationError, WTangleError
from .linalg import DEFAULT_CAP, DEFAULT_TOL
from .measures import (
    Z_PRESETS,
    closed_form_pi_tangle,
    closed_form_sum_pi,
    closed_form_sum_two_tangles,
    measure_report,
    pi_tangle,
    resolve_z,
    sum_pi_tangles,
    sum_two_tangles,
    sum_two_tangles_stacked,
)
from .sampling import dephase
from .separability import audit_theorem, certify
from .states import WSubspaceState, build_asymmetric, build_symmetric

EXIT_OK = 0
EXIT_AUDIT_FAILED = 1
EXIT_USAGE = 2
EXIT_VALIDATION = 3
EXIT_HYPOTHESIS = 4

SEED_ENV = "WTANGLE_SEED"


class UsageError(Exception):
    """Malformed input that is not a state-validation problem."""


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def _parse_complex(text: str) -> complex:
    try:
        return complex(text.strip().replace(" ", "").replace("i", "j"))
    except ValueError:
        raise UsageError(f"cannot parse {text!r} as a complex number") from None


def _read_text(path: str) -> str:
    try:
        return sys.stdin.read() if path == "-" else Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None


def _load_state(path: str) -> WSubspaceState:
    try:
        data = json.loads(_read_text(path))
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path}: invalid JSON ({exc})") from None
    if not isinstance(data, dict) or not {"n", "A", "X", "B"} <= set(data):
        raise UsageError(f"{path}: expected an object with keys n, A, X, B")
    return WSubspaceState.from_dict(data)


def _state_from_args(args) -> WSubspaceState:
    if args.state:
        return _load_state(args.state)
    if args.n is None:
        raise UsageError("give --state FILE or --n with --symmetric-a / --asymmetric-k")
    if args.asymmetric_k is not None:
        k = [_parse_complex(t) for t in args.asymmetric_k.split(",")]
        return build_asymmetric(args.n, k)
    a = _parse_complex(args.symmetric_a) if args.symmetric_a is not None else 0j
    return build_symmetric(args.n, a)


def _seed(args) -> int:
    if args.seed is not None:
        return args.seed
    env = os.environ.get(SEED_ENV)
    if env:
        try:
            return int(env)
        except ValueError:
            raise UsageError(f"{SEED_ENV}={env!r} is not an integer") from None
    return 0


def _z(args, prefix: str = "z") -> float:
    return resolve_z(getattr(args, f"{prefix}_preset"), getattr(args, prefix))


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text + "\n")
    else:
        print(text)


# --- commands --------------------------------------------------------------


def cmd_measure(args) -> int:
    state = _state_from_args(args)
    z_two = _z(args)
    z_pi = resolve_z(args.z_pi_preset, args.z_pi) if (args.z_pi is not None or args.z_pi_preset) else z_two
    report = measure_report(state, z_two, z_pi, tol=args.tol, cap=args.cap)
    if args.format == "json":
        _emit(json.dumps(report.to_dict(), indent=2), args.out)
        return EXIT_OK
    lines = [f"n = {report.n}   Z_two = {report.Z_two:g}   Z_pi = {report.Z_pi:g}", "pair   concurrence   negativity"]
    for (s, r), c in report.pair_concurrence.items():
        lines.append(f"{s},{r:<4} {c:<13.10f} {report.pair_negativity[(s, r)]:.10f}")
    if report.pi_tangle is not None:
        lines.append("pivot  pi-tangle" + ("     one-tangle" if report.one_tangle else ""))
        for i, p in report.pi_tangle.items():
            extra = f"  {report.one_tangle[i]:.10f}" if report.one_tangle else ""
            lines.append(f"{i:<6} {p:.10f}{extra}")
    lines.append(f"sum_two_tangles = {report.sum_two_tangles:.15g}")
    if report.sum_pi_tangles is not None:
        lines.append(f"sum_pi_tangles  = {report.sum_pi_tangles:.15g}")
    lines.extend(f"note: {m}" for m in report.notes)
    _emit("\n".join(lines), args.out)
    return EXIT_OK


def cmd_certify(args) -> int:
    state = _load_state(args.state)
    try:
        cert = certify(state, args.coherence_tol)
    except CoherencesNotZero as exc:
        detail = {"error": "CoherencesNotZero", "s": exc.s, "r": exc.r, "magnitude": exc.magnitude, "tol": exc.tol}
        print(json.dumps(detail), file=sys.stderr)
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_HYPOTHESIS
    _emit(json.dumps(cert.to_dict(), indent=2), args.out)
    return EXIT_OK


def cmd_audit(args) -> int:
    if args.samples < 0:
        raise UsageError("--samples must be >= 0")
    if args.n < 3:
        raise UsageError("--n must be >= 3")
    report = audit_theorem(args.samples, args.n, _seed(args), workers=args.workers, cap=args.cap)
    summary = report.to_dict()
    if report.failures and args.dump:
        Path(args.dump).write_text(json.dumps([f.__dict__ for f in report.failures], indent=2))
        summary["dump"] = args.dump
    _emit(json.dumps(summary, indent=2), args.out)
    print(report.summary_line(), file=sys.stderr if not args.out else sys.stdout)
    return EXIT_AUDIT_FAILED if report.failures else EXIT_OK


def _write_csv(path: str, header: list[str], rows) -> None:
    """Write atomically: rows go to a temporary file that replaces ``path`` on success."""
    target = Path(path)
    fd, tmp = tempfile.mkstemp(dir=target.parent or ".", prefix=f".{target.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(header)
            for row in rows:
                w.writerow([v if isinstance(v, (int, np.integer)) else _fmt(v) for v in row])
        os.replace(tmp, target)
    except BaseException:
        Path(tmp).unlink(missing_ok=True)
        raise


def fig1_rows(resolution: int, lo: float, hi: float, Z: float):
    """Rows ``(k1, k2, sum of two-tangles)`` over the real disk k1^2 + k2^2 <= 1."""
    grid = np.linspace(lo, hi, resolution)
    k1, k2 = (g.ravel() for g in np.meshgrid(grid, grid, indexing="ij"))
    rest = 1.0 - k1 * k1 - k2 * k2
    ok = rest >= 0
    k = np.stack([k1[ok], k2[ok], np.sqrt(rest[ok])], axis=1).astype(complex)
    B = k[:, :, None] * k[:, None, :].conj()
    values = sum_two_tangles_stacked(np.zeros(len(k)), np.zeros((len(k), 3)), B, Z)
    return zip(k1[ok].tolist(), k2[ok].tolist(), values.tolist())


def fig2_rows(n_lo: int, n_hi: int):
    z_two, z_pi = Z_PRESETS["large-n-two-tangle"], Z_PRESETS["large-n-pi"]
    for n in range(n_lo, n_hi + 1):
        w = build_symmetric(n, 0)
        yield n, pi_tangle(w, 0), sum_two_tangles(w, z_two), sum_pi_tangles(w, z_pi)


def dephase_rows(state: WSubspaceState, resolution: int, lo: float, hi: float, Z: float, cap: int):
    for s in np.linspace(lo, hi, resolution):
        d = dephase(state, s)
        yield float(s), sum_two_tangles(d, Z), sum_pi_tangles(d, Z, cap=cap)


_SWEEP_DEFAULTS = {
    "fig1-grid": (201, (-1.0, 1.0)),
    "fig2-n-scan": (None, (3, 100)),
    "dephase-scan": (11, (0.0, 1.0)),
}

_GNUPLOT = {
    "fig1-grid": "set datafile separator ','\nset xlabel 'k1'\nset ylabel 'k2'\nsplot '{csv}' every ::1 using 1:2:3 with points palette title 'sum of two-tangles'\n",
    "fig2-n-scan": "set datafile separator ','\nset xlabel 'n'\nplot '{csv}' every ::1 using 1:2 with lines title 'pi-tangle', '' every ::1 using 1:3 with lines title 'sum of two-tangles', '' every ::1 using 1:4 with lines title 'sum of pi-tangles'\n",
    "dephase-scan": "set datafile separator ','\nset xlabel 'dephasing strength'\nplot '{csv}' every ::1 using 1:2 with lines title 'sum of two-tangles', '' every ::1 using 1:3 with lines title 'sum of pi-tangles'\n",
}


def cmd_sweep(args) -> int:
    default_res, default_range = _SWEEP_DEFAULTS[args.kind]
    resolution = args.resolution if args.resolution is not None else default_res
    lo, hi = args.range if args.range is not None else default_range
    if resolution is not None and resolution < 2:
        raise UsageError("--resolution must be >= 2")
    if lo > hi:
        raise UsageError(f"--range lower bound {lo} exceeds upper bound {hi}")

    if args.kind == "fig1-grid":
        Z = resolve_z(args.z_preset or "three-qubit", args.z)
        header, rows = ["k1", "k2", "sum_two_tangles"], fig1_rows(resolution, lo, hi, Z)
    elif args.kind == "fig2-n-scan":
        if int(lo) != lo or int(hi) != hi or lo < 3:
            raise UsageError("fig2-n-scan --range needs integers with lower bound >= 3")
        header = ["n", "pi_tangle", "sum_two_tangles_normalized", "sum_pi_normalized"]
        rows = fig2_rows(int(lo), int(hi))
    else:
        if not (0 <= lo and hi <= 1):
            raise UsageError("dephase-scan --range must lie within [0, 1]")
        state = _load_state(args.state) if args.state else build_symmetric(args.n or 3, 0)
        Z = _z(args)
        header, rows = ["strength", "sum_two_tangles", "sum_pi"], dephase_rows(state, resolution, lo, hi, Z, args.cap)

    _write_csv(args.out, header, rows)
    if args.script:
        Path(args.script).write_text(_GNUPLOT[args.kind].format(csv=args.out))
    print(f"wrote {args.out}", file=sys.stderr)
    return EXIT_OK


def cmd_closed_form(args) -> int:
    z_two = _z(args)
    z_pi = resolve_z(args.z_pi_preset, args.z_pi) if (args.z_pi is not None or args.z_pi_preset) else z_two
    rows = []
    for n in args.n:
        if n < 3:
            raise UsageError("--n values must be >= 3")
        rows.append(
            {
                "n": n,
                "sum_two_tangles": closed_form_sum_two_tangles(n, z_two),
                "pi_tangle": closed_form_pi_tangle(n),
                "sum_pi_tangles": closed_form_sum_pi(n, z_pi),
                "Z_two": z_two,
                "Z_pi": z_pi,
            }
        )
    _emit(json.dumps(rows, indent=2), args.out)
    return EXIT_OK


# --- parser ----------------------------------------------------------------


def _add_z(p: argparse.ArgumentParser, pi: bool = False) -> None:
    g = p.add_mutually_exclusive_group()
    g.add_argument("--z-preset", choices=sorted(Z_PRESETS), help="named normalisation constant")
    g.add_argument("--z", type=float, help="explicit normalisation constant (> 0)")
    if pi:
        h = p.add_mutually_exclusive_group()
        h.add_argument("--z-pi-preset", choices=sorted(Z_PRESETS), help="normalisation for the pi-tangle sum (defaults to --z)")
        h.add_argument("--z-pi", type=float, help="explicit normalisation for the pi-tangle sum")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol", type=float, default=DEFAULT_TOL, help="numerical tolerance (default 1e-9)")
    common.add_argument("--cap", type=int, default=DEFAULT_CAP, help="largest n handled in the full 2^n space (default 12)")
    common.add_argument("--seed", type=int, default=None, help=f"RNG seed (falls back to ${SEED_ENV}, then 0)")
    common.add_argument("--out", default=None, help="output path (stdout if omitted; required for sweep)")

    parser = argparse.ArgumentParser(prog="wtangle", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("measure", parents=[common], help="pairwise measures, tangles and their sums")
    p.add_argument("--state", help="state JSON file ('-' for stdin)")
    p.add_argument("--n", type=int)
    g = p.add_mutually_exclusive_group()
    g.add_argument("--symmetric-a", help="amplitude a of the vacuum term, e.g. 0 or 1+0.5j")
    g.add_argument("--asymmetric-k", help="comma-separated coefficients k1,...,kn")
    p.add_argument("--format", choices=("json", "table"), default="json")
    _add_z(p, pi=True)
    p.set_defaults(func=cmd_measure)

    p = sub.add_parser("certify", parents=[common], help="separability certificate of a zero-coherence state")
    p.add_argument("--state", required=True, help="state JSON file ('-' for stdin)")
    p.add_argument("--coherence-tol", type=float, default=1e-9)
    p.set_defaults(func=cmd_certify)

    p = sub.add_parser("audit", parents=[common], help="randomised check of the separability theorem")
    p.add_argument("--samples", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--dump", help="write failing states to this JSON file")
    p.set_defaults(func=cmd_audit)

    p = sub.add_parser("sweep", parents=[common], help="CSV data: two-tangle grid, n scan, dephasing scan")
    p.add_argument("--kind", choices=tuple(_SWEEP_DEFAULTS), required=True)
    p.add_argument("--resolution", type=int)
    p.add_argument("--range", type=float, nargs=2, metavar=("LO", "HI"))
    p.add_argument("--n", type=int, help="qubit count for dephase-scan (default 3)")
    p.add_argument("--state", help="state JSON for dephase-scan")
    p.add_argument("--script", help="also write a gnuplot script stub here")
    _add_z(p)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("closed-form", parents=[common], help="analytic values for the maximally entangled W state")
    p.add_argument("--n", type=int, nargs="+", required=True)
    _add_z(p, pi=True)
    p.set_defaults(func=cmd_closed_form)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "sweep" and not args.out:
        parser.error("sweep requires --out")
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except CoherencesNotZero as exc:
        print(f"hypothesis failure: {exc}", file=sys.stderr)
        return EXIT_HYPOTHESIS
    except ValidationError as exc:
        print(f"validation failure ({type(exc).__name__}): {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except WTangleError as exc:
        print(f"error ({type(exc).__name__}): {exc}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
