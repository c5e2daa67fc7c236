"""Command-line front end: evaluate functions, run verification suites, print tables."""
from __future__ import annotations

import argparse
import csv
import json
import os
import sys
import time

import numpy as np

from . import bessel, harness, jordan, laguerre, models, spherical
from .bessel import SeriesTruncation
from .cone import ConeParams, as_partition, dim_km, enumerate_partitions, pochhammer
from .errors import DomainError, SymConeError
from .jordan import JordanElement
from .models import Model

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_DOMAIN = 0, 1, 2, 3
CACHE_ENV = "SYMCONE_CACHE_DIR"


class UsageError(Exception):
    pass


# -- literals ------------------------------------------------------------------

def parse_number(text: str) -> complex:
    try:
        v = complex(text.replace(" ", "").replace("i", "j"))
    except ValueError as exc:
        raise UsageError(f"bad number {text!r}") from exc
    return v


def _plain(v: complex):
    return v.real if v.imag == 0 else v


def parse_element(cone: ConeParams, text: str) -> JordanElement:
    """Element literals: ``diag:a,b,...``, ``lorentz:x0,x1,...``, ``te:t``, or a bare number at rank 1."""
    kind, sep, body = text.partition(":")
    if not sep:
        if cone.rank != 1:
            raise UsageError(f"bare number {text!r} needs a rank-1 cone")
        return jordan.scalar_element(cone, _plain(parse_number(text)))
    values = [_plain(parse_number(v)) for v in body.split(",") if v]
    if kind == "te":
        if len(values) != 1:
            raise UsageError("te: takes one number")
        return jordan.scalar_element(cone, values[0])
    if kind == "diag":
        if len(values) != cone.rank:
            raise UsageError(f"diag: needs {cone.rank} entries")
        return jordan.frame_element(cone, values)
    if kind == "lorentz":
        if cone.family.value != "lorentz" or len(values) != cone.dim_n:
            raise UsageError(f"lorentz: literal needs a Lorentz cone and {cone.dim_n} coordinates")
        return JordanElement(cone, np.array(values))
    raise UsageError(f"unknown element literal {text!r}")


def parse_partition(cone: ConeParams, text: str):
    try:
        parts = [int(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise UsageError(f"bad partition {text!r}") from exc
    if len(parts) > cone.rank:
        raise UsageError(f"partition {text!r} has more than {cone.rank} parts")
    try:
        return as_partition(tuple(parts) + (0,) * (cone.rank - len(parts)), cone.rank)
    except (TypeError, ValueError) as exc:
        raise UsageError(str(exc)) from exc


def parse_cone(text: str) -> ConeParams:
    try:
        return ConeParams.parse(text)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def fmt(v) -> str:
    """17 significant digits; complex as a+bj."""
    if isinstance(v, (bool, np.bool_)):
        return str(bool(v)).lower()
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return f"{float(v):.17g}"
    if isinstance(v, (complex, np.complexfloating)):
        v = complex(v)
        if v.imag == 0:
            return f"{v.real:.17g}"
        return f"{v.real:.17g}{v.imag:+.17g}j"
    return "" if v is None else str(v)


def _json_value(v):
    if isinstance(v, (complex, np.complexfloating)):
        v = complex(v)
        return v.real if v.imag == 0 else {"re": v.real, "im": v.imag}
    if isinstance(v, np.generic):
        return v.item()
    if isinstance(v, float) and not np.isfinite(v):
        return str(v)
    return v


def emit(rows: list[dict], columns, args) -> None:
    out = open(args.output, "w", newline="", encoding="utf-8") if args.output else sys.stdout
    try:
        if args.format == "json":
            json.dump([{c: _json_value(r.get(c)) for c in columns} for r in rows], out, indent=1)
            out.write("\n")
        else:
            writer = csv.writer(out, lineterminator="\n")
            writer.writerow(columns)
            for r in rows:
                writer.writerow([fmt(r.get(c)) for c in columns])
    finally:
        if out is not sys.stdout:
            out.close()


# -- eval ----------------------------------------------------------------------

def _trunc(args) -> SeriesTruncation:
    return SeriesTruncation(args.max_weight if args.max_weight is not None else 40, args.tol or 1e-10)


def cmd_eval(args) -> int:
    cone = parse_cone(args.cone)
    what = args.function
    if what == "phi":
        m = parse_partition(cone, args.m)
        if sum(m) == 0:
            value = 1.0
        else:
            value = spherical.phi_eval(cone, m, parse_element(cone, args.x))
    elif what == "laguerre":
        m = parse_partition(cone, args.m)
        x = parse_element(cone, args.x)
        value = laguerre.laguerre_poly(cone, args.nu, m, x) if args.poly else laguerre.laguerre_fn(cone, args.nu, m, x)
    elif what == "ibessel":
        z = parse_element(cone, args.x)
        if args.y:
            value = bessel.ibessel2(cone, args.nu, z, parse_element(cone, args.y), _trunc(args))
        else:
            value = bessel.ibessel(cone, args.nu, z, _trunc(args))
    elif what == "whittaker":
        model = Model(args.model)
        z = parse_element(cone, args.z)
        if args.expansion:
            value = models.expansion_partial(model, cone, args.nu, args.t, z, _trunc(args))
        else:
            value = models.whittaker_closed_form(model, cone, args.nu, args.t, z, _trunc(args))
    elif what == "psi":
        value = models.psi_basis(cone, args.nu, parse_partition(cone, args.m), parse_element(cone, args.z))
    else:  # pragma: no cover - argparse restricts the choices
        raise UsageError(what)
    if args.format == "json":
        print(json.dumps({"function": what, "value": _json_value(complex(value))}))
    else:
        print(fmt(complex(value)))
    return EXIT_OK


# -- verify --------------------------------------------------------------------

def suite_options(args) -> harness.SuiteOptions:
    return harness.SuiteOptions(
        seed=args.seed,
        max_weight=args.max_weight,
        tol=args.tol,
        haar_samples=args.haar_samples,
        nodes=args.nodes,
        quick=args.quick,
        cone=parse_cone(args.cone) if args.cone else None,
        nu=args.nu,
        t=args.t,
    )


def cmd_verify(args) -> int:
    opts = suite_options(args)
    start = time.perf_counter()
    reports = harness.run_suite(args.suite, opts)
    emit([r.as_row() for r in reports], harness.COLUMNS, args)
    failed = sum(not r.passed for r in reports)
    print(
        f"{len(reports)} checks, {failed} failed, {time.perf_counter() - start:.1f}s",
        file=sys.stderr,
    )
    return EXIT_FAIL if failed else EXIT_OK


# -- table ---------------------------------------------------------------------

def cmd_table(args) -> int:
    cone = parse_cone(args.cone)
    M = args.max_weight if args.max_weight is not None else 6
    parts = enumerate_partitions(cone.rank, M)
    label = lambda m: ",".join(map(str, m))  # noqa: E731
    if args.table == "dims":
        cols = ["m", "weight", "d_m", "pochhammer_n_over_r"] + (["pochhammer_nu"] if args.nu is not None else [])
        rows = []
        for m in parts:
            row = {"m": label(m), "weight": sum(m), "d_m": dim_km(cone, m),
                   "pochhammer_n_over_r": pochhammer(cone, cone.n_over_r, m)}
            if args.nu is not None:
                row["pochhammer_nu"] = pochhammer(cone, args.nu, m)
            rows.append(row)
    elif args.table == "laguerre":
        if args.nu is None:
            raise UsageError("--nu is required")
        ts = [float(v) for v in args.t_grid.split(",")]
        cols = ["m"] + [f"t={fmt(t)}" for t in ts]
        vals = [laguerre.laguerre_fn_many(cone, args.nu, parts, jordan.scalar_element(cone, t)).real for t in ts]
        rows = [dict({"m": label(m)}, **{c: v[i] for c, v in zip(cols[1:], vals)}) for i, m in enumerate(parts)]
    elif args.table == "coefficients":
        if args.nu is None or args.t is None:
            raise UsageError("--nu and --t are required")
        cols = ["model", "m", "coefficient"]
        rows = []
        for model in (Model.L2, Model.TUBE, Model.DISC, Model.FOCK):
            for row in models.expansion_coefficients(model, cone, args.nu, args.t, M):
                rows.append({"model": model.value, "m": label(row.partition), "coefficient": row.coefficient})
    else:  # pragma: no cover
        raise UsageError(args.table)
    emit(rows, cols, args)
    return EXIT_OK


# -- cache ---------------------------------------------------------------------

def cmd_cache(args) -> int:
    cache = spherical.get_cache()
    if args.action == "info":
        count = sum(1 for _ in cache.entries())
        print(f"directory: {cache.directory or '(memory only)'}")
        print(f"entries: {count}")
    elif args.action == "clear":
        cache.clear()
        print("cleared")
    elif args.action == "warm":
        cone = parse_cone(args.cone)
        M = args.max_weight if args.max_weight is not None else 20
        with spherical.raised_weight_limit(M):
            for m in enumerate_partitions(cone.rank, M):
                spherical.jack_coeffs(cone, m)
        print(f"warmed {cone} up to weight {M}")
    return EXIT_OK


# -- parser --------------------------------------------------------------------

def _global_flags() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    g = p.add_argument_group("global options")
    g.add_argument("--seed", type=int, default=0, help="master seed for Monte-Carlo checks")
    g.add_argument("--max-weight", type=int, default=None, help="truncation weight M")
    g.add_argument("--tol", type=float, default=None, help="override tolerances")
    g.add_argument("--haar-samples", type=int, default=harness.DEFAULT_HAAR_SAMPLES)
    g.add_argument("--nodes", type=int, default=200, help="quadrature nodes")
    g.add_argument("--format", choices=("csv", "json"), default="csv")
    g.add_argument("--output", default=None, help="write to a file instead of stdout")
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _global_flags()
    parser = argparse.ArgumentParser(
        prog="symcone", description="Special functions on symmetric cones and checks of their identities.",
        parents=[common],
    )
    sub = parser.add_subparsers(dest="command", required=True)

    ev = sub.add_parser("eval", help="evaluate a function", parents=[common])
    evs = ev.add_subparsers(dest="function", required=True)
    for name, needs in (
        ("phi", ("m", "x")), ("laguerre", ("nu", "m", "x")), ("ibessel", ("nu", "x")),
        ("whittaker", ("nu", "t", "z")), ("psi", ("nu", "m", "z")),
    ):
        sp = evs.add_parser(name, parents=[common])
        sp.add_argument("--cone", default="line")
        if "nu" in needs:
            sp.add_argument("--nu", type=float, required=True)
        if "m" in needs:
            sp.add_argument("--m", required=True, help="partition, e.g. 2,1")
        if "x" in needs:
            sp.add_argument("--x", required=True, help="element literal")
        if "z" in needs:
            sp.add_argument("--z", required=True, help="element literal")
        if "t" in needs:
            sp.add_argument("--t", type=float, required=True)
        if name == "laguerre":
            sp.add_argument("--poly", action="store_true", help="L_m instead of l_m")
        if name == "ibessel":
            sp.add_argument("--y", default=None, help="second argument of I_nu(x, y)")
        if name == "whittaker":
            sp.add_argument("--model", choices=("tube", "disc", "fock"), required=True)
            sp.add_argument("--expansion", action="store_true", help="K-type partial sum instead of closed form")

    ve = sub.add_parser("verify", help="run verification suites", parents=[common])
    ve.add_argument("suite", choices=sorted(harness.SUITES) + ["all"])
    ve.add_argument("--quick", action="store_true")
    ve.add_argument("--cone", default=None)
    ve.add_argument("--nu", type=float, default=None)
    ve.add_argument("--t", type=float, default=None)
    ve.add_argument("--grid", choices=("default",), default="default")

    ta = sub.add_parser("table", help="print tables", parents=[common])
    ta.add_argument("table", choices=("dims", "laguerre", "coefficients"))
    ta.add_argument("--cone", default="line")
    ta.add_argument("--nu", type=float, default=None)
    ta.add_argument("--t", type=float, default=None)
    ta.add_argument("--t-grid", default="0.25,0.5,1,2")

    ca = sub.add_parser("cache", help="manage the Jack coefficient cache", parents=[common])
    ca.add_argument("action", choices=("info", "clear", "warm"))
    ca.add_argument("--cone", default="realsym:2")
    return parser


COMMANDS = {"eval": cmd_eval, "verify": cmd_verify, "table": cmd_table, "cache": cmd_cache}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    if os.environ.get(CACHE_ENV):
        spherical.configure_cache(os.environ[CACHE_ENV])
    limit = args.max_weight if args.max_weight is not None else 0
    try:
        with spherical.raised_weight_limit(limit):
            return COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DomainError as exc:
        print(f"domain error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except SymConeError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_DOMAIN


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
