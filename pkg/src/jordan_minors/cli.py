"""Command line harness: ``jordan-minors <command> [options]``.

Exit codes: 0 when every check passes, 1 on a mathematical violation,
2 on usage or I/O errors.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys

import numpy as np

from . import linalg, suites
from .errors import ContractViolation, JordanError
from .extremal import AscentConfig, Signature, ascend, growth_check, nearest_critical_value
from .pairs import Kind, PairDescriptor, PairElement, Side
from .spectral import singular_values
from .tripotents import classical_minor, generalized_minor, make_minor_tripotent

EXIT_OK, EXIT_VIOLATION, EXIT_USAGE = 0, 1, 2

TIGHTNESS_TOL = 1e-6


class UsageError(Exception):
    pass


def _descriptor(args) -> PairDescriptor:
    kind = Kind(args.pair)
    if kind is Kind.SYM_COMPLEX:
        return PairDescriptor.sym_complex(args.n)
    return PairDescriptor(kind, args.r, args.s)


def _read_z(path, pair=None) -> PairElement:
    """Load an element file: full element JSON, bare matrix JSON, or a nested list."""
    try:
        with open(path) as fh:
            obj = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read {path}: {exc}") from exc
    if isinstance(obj, dict) and "descriptor" in obj:
        return PairElement.from_json(obj)
    m = linalg.from_json(obj) if isinstance(obj, dict) else np.array(obj)
    if m.ndim != 2:
        raise UsageError(f"{path}: expected a matrix")
    if pair is None:
        pair = "rect-complex" if np.iscomplexobj(m) else "rect-real"
    kind = Kind(pair)
    if kind is Kind.SYM_COMPLEX:
        if m.shape[0] != m.shape[1]:
            raise UsageError(f"{path}: symmetric pair needs a square matrix")
        d = PairDescriptor.sym_complex(m.shape[0])
    else:
        d = PairDescriptor(kind, m.shape[0], m.shape[1])
    return PairElement(d, Side.PLUS, m.astype(d.dtype))


def _indices(text, bound, label):
    if text is None or text.strip() == "":
        return ()
    try:
        idx = tuple(int(v) for v in text.split(",") if v.strip())
    except ValueError as exc:
        raise UsageError(f"{label}: expected comma separated integers, got {text!r}") from exc
    if any(not 1 <= i <= bound for i in idx):
        raise UsageError(f"{label}: indices must lie in 1..{bound}")
    if len(set(idx)) != len(idx):
        raise UsageError(f"{label}: repeated index")
    return tuple(i - 1 for i in idx)


def _tolerances(items):
    out = {}
    for item in items or ():
        name, _, value = item.partition("=")
        if name not in suites.SUITES_BY_NAME or not value:
            raise UsageError(f"--tol expects SUITE=VALUE with a known suite, got {item!r}")
        out[name] = float(value)
    return out


def _config(args, d):
    cfg = {"descriptor": d.to_json(), "seed": args.seed, "samples": args.samples}
    if args.inject_fault:
        cfg["inject_fault"] = args.inject_fault
    return cfg


def _suite_csv(report):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["suite", "kind", "samples", "tolerance", "max_residual", "passed"])
    for r in report.results:
        w.writerow([r.name, r.descriptor["kind"], r.samples, repr(r.tolerance), repr(r.max_residual), r.passed])
    return buf.getvalue()


def _rows_csv(header, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([repr(v) if isinstance(v, float) else v for v in row])
    return buf.getvalue()


def _emit(args, text):
    if args.out:
        try:
            with open(args.out, "w") as fh:
                fh.write(text)
        except OSError as exc:
            raise UsageError(f"cannot write {args.out}: {exc}") from exc
    else:
        sys.stdout.write(text)


def _emit_report(args, report, csv_text=None):
    if args.format == "csv":
        _emit(args, csv_text if csv_text is not None else _suite_csv(report))
    else:
        _emit(args, report.dumps())
    return EXIT_OK if report.passed else EXIT_VIOLATION


def _run_groups(args, groups, params=None):
    d = _descriptor(args)
    report = suites.Report(args.command, _config(args, d))
    tol = _tolerances(args.tol)
    with suites.injected_fault(args.inject_fault):
        for g in groups:
            report.results += suites.run_group(g, d, args.seed, args.samples, tol, params)
    return _emit_report(args, report)


def cmd_identities(args):
    return _run_groups(args, ["identities"])


def cmd_verify(args):
    return _run_groups(args, ["bound"], {"tripotents": args.tripotents})


def cmd_derivative(args):
    return _run_groups(args, ["derivative"], {"step": args.step})


def cmd_minor(args):
    z = _read_z(args.z, args.pair_override)
    d = z.descriptor
    rows = _indices(args.rows, d.r, "--rows")
    cols = _indices(args.cols, d.s, "--cols")
    if len(rows) != len(cols):
        raise UsageError("--rows and --cols must have the same length")
    try:
        e = make_minor_tripotent(d, rows, cols)
    except ContractViolation as exc:
        raise UsageError(str(exc)) from exc
    gen = complex(generalized_minor(e, z))
    cls = complex(classical_minor(z.payload, rows, cols))
    diff = abs(gen - cls)

    def fmt(v):
        return f"{v.real:.12g}" if v.imag == 0 else f"{v.real:.12g}{v.imag:+.12g}j"

    if args.format == "csv":
        text = _rows_csv(["generalized", "classical", "difference"], [[fmt(gen), fmt(cls), repr(diff)]])
    elif args.format == "json":
        text = json.dumps(
            {
                "rows": [i + 1 for i in rows],
                "cols": [j + 1 for j in cols],
                "generalized": suites.serialize(gen),
                "classical": suites.serialize(cls),
                "difference": diff,
            },
            sort_keys=True,
            indent=2,
        ) + "\n"
    else:
        text = f"generalized {fmt(gen)}\nclassical   {fmt(cls)}\ndifference  {diff:.3e}\n"
    _emit(args, text)
    return EXIT_OK if diff <= 1e-9 * max(1.0, abs(cls)) else EXIT_VIOLATION


def cmd_maximize(args):
    z = _read_z(args.z, args.pair_override)
    cfg = AscentConfig(args.step0, args.backtrack, args.grad_tol, args.max_iters, args.restarts, args.seed)
    rep = ascend(z, args.k, cfg)
    zn = max(z.norm(), 1e-300)
    crit = rep.critical_residual / zn
    _, crit_match = nearest_critical_value(rep.best_value, singular_values(z), args.k)
    ok = rep.ratio >= 1 - TIGHTNESS_TOL and crit <= TIGHTNESS_TOL and rep.bound_violations == 0
    if args.format == "csv":
        text = _rows_csv(["restart", "iter", "f", "grad_norm", "p1_residual"], rep.trace_rows())
    elif args.format == "text":
        text = (
            f"value {rep.best_value:.6f}\nbound {rep.bound:.6f}\nratio {rep.ratio:.6f}\n"
            f"critical residual {crit:.3e}\n"
        )
    else:
        out = rep.to_json(include_trace=args.trace)
        out.update({"k": args.k, "seed": args.seed, "relative_critical_residual": crit,
                    "critical_value_mismatch": crit_match, "passed": ok})
        text = json.dumps(out, sort_keys=True, indent=2) + "\n"
    _emit(args, text)
    return EXIT_OK if ok else EXIT_VIOLATION


def cmd_growth(args):
    z = _read_z(args.z, args.pair_override)
    try:
        m = Signature.parse(args.m)
    except ValueError as exc:
        raise UsageError(f"--m: {exc}") from exc
    rep = growth_check(z, m, args.samples, args.seed)
    if args.format == "csv":
        row = rep.to_json()
        text = _rows_csv(list(row), [list(row.values())])
    elif args.format == "text":
        text = f"bound {rep.bound:.6f}\nvalue {max(rep.max_value, rep.aligned_value):.6f}\n" + (
            "pass\n" if rep.ok else "FAIL\n"
        )
    else:
        out = rep.to_json()
        out.update({"m": list(m.m), "seed": args.seed})
        text = json.dumps(out, sort_keys=True, indent=2) + "\n"
    _emit(args, text)
    return EXIT_OK if rep.ok else EXIT_VIOLATION


def _common(p, suite_flags=True):
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", help="write the report here instead of stdout")
    if suite_flags:
        p.add_argument("--pair", choices=[k.value for k in Kind], default="rect-complex")
        p.add_argument("--r", type=int, default=2)
        p.add_argument("--s", type=int, default=3)
        p.add_argument("--n", type=int, default=3)
        p.add_argument("--format", choices=["json", "csv"], default="json")
        p.add_argument("--tol", action="append", metavar="SUITE=VALUE", help="override one suite tolerance")
        p.add_argument("--inject-fault", choices=suites.FAULTS, help="test mode: corrupt a primitive")
    else:
        p.add_argument("--z", required=True, metavar="FILE.json")
        p.add_argument("--pair", dest="pair_override", choices=[k.value for k in Kind],
                       help="pair type for bare matrix files (default inferred)")
        p.add_argument("--format", choices=["text", "json", "csv"], default="text")


def build_parser():
    parser = argparse.ArgumentParser(prog="jordan-minors", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("identities", help="algebraic identity suites")
    _common(p)
    p.add_argument("--samples", type=int, default=50)
    p.set_defaults(func=cmd_identities)

    p = sub.add_parser("verify", help="singular value bound sweep over random tripotents")
    _common(p)
    p.add_argument("--samples", type=int, default=100)
    p.add_argument("--tripotents", type=int, default=50, help="tripotents per rank per sample")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("derivative", help="pair determinant derivative against finite differences")
    _common(p)
    p.add_argument("--samples", type=int, default=200)
    p.add_argument("--step", type=float, default=1e-5)
    p.set_defaults(func=cmd_derivative)

    p = sub.add_parser("minor", help="generalized minor next to the classical minor")
    _common(p, suite_flags=False)
    p.add_argument("--rows", default="", help="1-based row indices, e.g. 1,2")
    p.add_argument("--cols", default="", help="1-based column indices")
    p.set_defaults(func=cmd_minor)

    p = sub.add_parser("maximize", help="maximize the minor modulus over rank-k tripotents")
    _common(p, suite_flags=False)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--restarts", type=int, default=8)
    p.add_argument("--max-iters", type=int, default=500)
    p.add_argument("--step0", type=float, default=0.5)
    p.add_argument("--backtrack", type=float, default=0.5)
    p.add_argument("--grad-tol", type=float, default=1e-8)
    p.add_argument("--trace", action="store_true", help="include iterates in the JSON report")
    p.set_defaults(func=cmd_maximize)

    p = sub.add_parser("growth", help="highest-weight polynomial bound")
    _common(p, suite_flags=False)
    p.add_argument("--m", required=True, help='signature, e.g. "2,1,0"')
    p.add_argument("--samples", type=int, default=200, help="random frames")
    p.set_defaults(func=cmd_growth)
    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING)
    if getattr(args, "samples", 1) < 1:
        print("error: --samples must be at least 1", file=sys.stderr)
        return EXIT_USAGE
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ContractViolation, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except JordanError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_VIOLATION


if __name__ == "__main__":
    sys.exit(main())
