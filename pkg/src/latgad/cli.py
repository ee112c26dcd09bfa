"""Command-line entry point.

Data goes to stdout or --out; logs go to stderr.  Exit codes: 0 success or
verification pass, 1 verification failure, 2 usage error, 3 resource limit.
"""

from __future__ import annotations

import argparse
import json
import os
import random
import sys
from dataclasses import dataclass

import numpy as np

from . import cubes as cubes_mod
from . import gadgets, identities, oracle, reductions, serialize
from .errors import (
    InvalidInputError,
    LatgadError,
    NumericDegeneracyError,
    ResourceLimitError,
    VerificationError,
)
from .formulas import parse_dimacs, parse_xor
from .numeric import Tolerance

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_USAGE = 2
EXIT_RESOURCE = 3


@dataclass(frozen=True)
class RunConfig:
    """Validated global run options shared by every subcommand."""

    seed: int
    threads: int
    tol: Tolerance

    def __post_init__(self):
        if self.threads < 1:
            raise InvalidInputError("--threads must be positive")


def _log(msg: str) -> None:
    print(msg, file=sys.stderr)


def _emit(payload: dict, out: str | None) -> None:
    text = serialize.dumps(payload)
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _load_json(path: str) -> dict:
    with open(path) as fh:
        return json.load(fh)


def _read(path: str) -> str:
    with open(path) as fh:
        return fh.read()


def _parse_box(text: str) -> tuple[int, int]:
    try:
        lo, hi = text.split("..")
        return int(lo), int(hi)
    except ValueError as exc:
        raise InvalidInputError(f"box must look like 'lo..hi', got {text!r}") from exc


def _read_points(path: str):
    """Hex bitstrings, one per line; all lines must have equal width."""
    lines = [ln.strip() for ln in _read(path).splitlines() if ln.strip()]
    if not lines:
        raise InvalidInputError(f"no points in {path}")
    width = len(lines[0])
    if any(len(ln) != width for ln in lines):
        raise InvalidInputError("all hex bitstrings must have the same width")
    return [int(ln, 16) for ln in lines], 4 * width


def _report_exit(report) -> int:
    _emit(report.to_json(), None)
    if not report.passed:
        for cond in report.failures():
            _log(f"FAIL {cond.name}: residual {cond.residual:.3g} witness {cond.witness}")
    return EXIT_OK if report.passed else EXIT_FAIL


# ---------------------------------------------------------------------------
# subcommand handlers


def _cmd_gadget(args, config: RunConfig) -> int:
    if args.action == "find":
        g = gadgets.find_isolating_parallelepiped(args.k, args.p)
        _emit(serialize.gadget_to_json(g), args.out)
        _log(f"gadget k={g.k} p={g.p} eps={g.eps:.6g}")
        return EXIT_OK
    if args.action == "parity":
        g = gadgets.parity_gadget(args.k, args.p, args.bit)
        _emit(serialize.gadget_to_json(g), args.out)
        _log(f"parity gadget k={g.k} p={g.p} bit={args.bit} eps={g.eps:.6g}")
        return EXIT_OK
    if args.action == "lattice":
        g = serialize.gadget_from_json(_load_json(args.infile))
        _emit(serialize.gadget_to_json(gadgets.to_isolating_lattice(g)), args.out)
        return EXIT_OK
    if args.action == "onoff":
        g = serialize.gadget_from_json(_load_json(args.infile))
        _emit(serialize.onoff_to_json(gadgets.to_on_off(g)), args.out)
        return EXIT_OK
    if args.action == "verify":
        g = serialize.gadget_from_json(_load_json(args.infile))
        tol = config.tol
        report = gadgets.verify_parallelepiped(g, tol)
        if g.kind == gadgets.KIND_LATTICE:
            lattice = gadgets.verify_lattice_condition(g, args.box_radius, tol)
            report = gadgets.VerificationReport(
                passed=report.passed and lattice.passed,
                conditions=report.conditions + lattice.conditions,
                tol=tol,
            )
        return _report_exit(report)
    raise InvalidInputError(f"unknown gadget action {args.action!r}")


def _cmd_reduce(args, config: RunConfig) -> int:
    if args.action == "sat":
        formula = parse_dimacs(_read(args.cnf))
        gadget = serialize.gadget_from_json(_load_json(args.gadget))
        if args.mode == "padded":
            inst = reductions.sat_to_cvp(formula, gadget)
            gamma = None
        else:
            if args.s is None or args.c is None:
                raise InvalidInputError("gap mode needs --s and --c")
            lattice = gadgets.to_isolating_lattice(gadget)
            inst, gamma = reductions.csp_to_cvp_gap(formula, [lattice] * formula.m, args.s, args.c)
        _emit(serialize.instance_to_json(inst), args.out)
        _log(f"instance d={inst.d} n={inst.n} r={inst.radius:.6g}" + (f" gamma={gamma:.6g}" if gamma else ""))
        return EXIT_OK
    if args.action == "parity":
        formula = parse_xor(_read(args.xor))
        if args.s is None or args.c is None:
            raise InvalidInputError("parity reduction is a gap reduction: needs --s and --c")
        lattice_for = {}
        lattices = []
        for constraint in formula.constraints:
            key = (constraint.arity, constraint.bit)
            if key not in lattice_for:
                lattice_for[key] = gadgets.to_isolating_lattice(
                    gadgets.parity_gadget(constraint.arity, args.p, constraint.bit)
                )
            lattices.append(lattice_for[key])
        inst, gamma = reductions.csp_to_cvp_gap(formula, lattices, args.s, args.c)
        _emit(serialize.instance_to_json(inst), args.out)
        _log(f"instance d={inst.d} n={inst.n} r={inst.radius:.6g} gamma={gamma:.6g}")
        return EXIT_OK
    raise InvalidInputError(f"unknown reduce action {args.action!r}")


def _cmd_params(args, config: RunConfig) -> int:
    result = reductions.sat_gap_params(args.p, args.k, args.s, args.c, args.eps)
    payload = {
        "s_prime": serialize.fmt_real(result.s_prime),
        "c_prime": serialize.fmt_real(result.c_prime),
        "gamma_bound": serialize.fmt_real(result.params.gamma_bound),
        "degenerate": result.params.degenerate,
    }
    if result.params.gamma is not None:
        payload["gamma"] = serialize.fmt_real(result.params.gamma)
    _emit(payload, args.out)
    return EXIT_OK


def _cmd_cvpp(args, config: RunConfig) -> int:
    if args.action == "prep":
        gadget = serialize.gadget_from_json(_load_json(args.gadget))
        onoff = gadgets.to_on_off(gadget)
        art = reductions.cvpp_preprocess(args.n, args.k, onoff)
        _emit(serialize.cvpp_to_json(art), args.out)
        _log(f"prep basis {art.d}x{art.n}, {art.M} clause blocks")
        return EXIT_OK
    if args.action == "inf-prep":
        art = reductions.cvpp_inf_preprocess(args.n, args.k)
        _emit(serialize.cvpp_to_json(art), args.out)
        return EXIT_OK
    if args.action in ("query", "inf-query"):
        art = serialize.cvpp_from_json(_load_json(args.prep))
        formula = parse_dimacs(_read(args.cnf))
        if args.w is not None:
            formula.threshold = args.w
        if args.action == "query":
            target, radius = reductions.cvpp_query(art, formula)
            p = serialize.fmt_pnorm(art.gadget.p)
            mode = "cvpp-lp"
        else:
            target, radius = reductions.cvpp_inf_query(art, formula)
            p = "inf"
            mode = "cvpp-inf"
        threshold = formula.threshold if formula.threshold is not None else formula.m
        payload = {
            "schema": serialize.CVP_SCHEMA,
            "p": p,
            "basis": serialize.fmt_columns(art.basis),
            "target": serialize.fmt_vector(target),
            "radius": serialize.fmt_real(radius),
            "meta": {
                "mode": mode,
                "n": art.n,
                "k": art.k,
                "m": formula.m,
                "threshold": threshold,
                "eps": serialize.fmt_real(art.gadget.eps) if art.gadget is not None else None,
            },
        }
        _emit(payload, args.out)
        return EXIT_OK
    raise InvalidInputError(f"unknown cvpp action {args.action!r}")


def _cmd_oracle(args, config: RunConfig) -> int:
    if args.action == "solve":
        inst = serialize.instance_from_json(_load_json(args.instance))
        box = _parse_box(args.box) if args.box else (0, 1)
        sol = oracle.cvp_enumerate(inst.basis, inst.target, inst.p, box)
        _emit(
            {
                "distance": serialize.fmt_real(sol.distance),
                "radius": serialize.fmt_real(inst.radius),
                "within_radius": sol.distance <= inst.radius * (1 + 1e-9),
                "closest": [list(z) for z in sol.closest],
            },
            args.out,
        )
        return EXIT_OK
    if args.action == "validate":
        inst = serialize.instance_from_json(_load_json(args.instance))
        text = _read(args.cnf)
        formula = parse_xor(text) if "p xor" in text else parse_dimacs(text)
        box = _parse_box(args.box) if args.box else None
        report = oracle.validate_reduction(formula, inst, box)
        return _report_exit(report)
    raise InvalidInputError(f"unknown oracle action {args.action!r}")


def _cmd_identities(args, config: RunConfig) -> int:
    if args.action == "skp":
        res = identities.s_kp(args.k, args.p)
        _emit(
            {
                "value": serialize.fmt_real(res.value),
                "sign": res.sign,
                "lower_bound": serialize.fmt_real(res.lower_bound),
            },
            args.out,
        )
        return EXIT_OK
    if args.action == "integral":
        direct = identities.direct_alt_sum(args.n, args.m, args.p)
        via_integral = identities.alt_sum_integral(args.n, args.m, args.p)
        _emit(
            {
                "direct": serialize.fmt_real(direct),
                "integral": serialize.fmt_real(via_integral),
                "abs_diff": serialize.fmt_real(abs(direct - via_integral)),
            },
            args.out,
        )
        return EXIT_OK
    if args.action == "bounds":
        rep = identities.non_alt_bound_check(args.k, args.p, args.c)
        payload = {
            "lhs": serialize.fmt_real(rep.lhs),
            "rhs": serialize.fmt_real(rep.rhs),
            "passed": rep.passed,
        }
        if rep.rhs_c1 is not None:
            payload["rhs_c1"] = serialize.fmt_real(rep.rhs_c1)
            payload["passed_c1"] = rep.passed_c1
        _emit(payload, args.out)
        return EXIT_OK if rep.passed else EXIT_FAIL
    if args.action == "ramanujan":
        residual = identities.ramanujan_check(args.k, args.x)
        _emit({"residual": serialize.fmt_real(residual)}, args.out)
        return EXIT_OK
    if args.action == "cp-svp":
        if args.find_p0:
            _emit({"p0": serialize.fmt_real(identities.find_p0())}, args.out)
            return EXIT_OK
        if args.grid:
            lo, hi, count = args.grid.split(":")
            ps = np.linspace(float(lo), float(hi), int(count))
            rows = ["p,W,C"]
            for p in ps:
                const = identities.svp_constants(float(p))
                c_str = serialize.fmt_real(const.C) if const.C is not None else ""
                rows.append(f"{serialize.fmt_real(const.p)},{serialize.fmt_real(const.W)},{c_str}")
            text = "\n".join(rows) + "\n"
            if args.out:
                with open(args.out, "w") as fh:
                    fh.write(text)
            else:
                sys.stdout.write(text)
            return EXIT_OK
        if args.p is None:
            raise InvalidInputError("cp-svp needs --p, --grid, or --find-p0")
        const = identities.svp_constants(args.p)
        _emit(
            {
                "W": serialize.fmt_real(const.W),
                "C": serialize.fmt_real(const.C) if const.C is not None else None,
                "defined": const.C is not None,
            },
            args.out,
        )
        return EXIT_OK
    raise InvalidInputError(f"unknown identities action {args.action!r}")


def _cmd_cubes(args, config: RunConfig) -> int:
    points, n = _read_points(args.infile)
    cube = cubes_mod.find_affine_cube(points, args.dim, n)
    if cube is None:
        _emit({"found": False}, args.out)
        return EXIT_FAIL
    width = (n + 3) // 4
    _emit(
        {
            "found": True,
            "base": format(cube.base, f"0{width}x"),
            "directions": [format(d, f"0{width}x") for d in cube.directions],
        },
        args.out,
    )
    return EXIT_OK


def _cmd_clauses(args, config: RunConfig) -> int:
    if args.action == "isolate":
        points, n = _read_points(args.infile)
        clause = cubes_mod.clause_isolating_one(points, args.k, n)
        _emit({"literals": list(clause.literals)}, args.out)
        return EXIT_OK
    if args.action == "separate":
        close, n1 = _read_points(args.close)
        away, n2 = _read_points(args.away)
        if n1 != n2:
            raise InvalidInputError("point files must use the same width")
        clause = cubes_mod.separating_3cnf(close, away, n1)
        _emit({"literals": list(clause.literals)}, args.out)
        return EXIT_OK
    raise InvalidInputError(f"unknown clauses action {args.action!r}")


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(prog="latgad")
    top.add_argument("--seed", type=int, default=0, help="seed for any randomized step")
    top.add_argument(
        "--threads",
        type=int,
        default=int(os.environ.get("LATGAD_THREADS", "1")),
        help="worker bound for internal parallelism",
    )
    top.add_argument("--tol-rel", type=float, default=1e-9)
    top.add_argument("--tol-abs", type=float, default=1e-12)
    sub = top.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gadget")
    ga = g.add_subparsers(dest="action", required=True)
    find = ga.add_parser("find")
    find.add_argument("--k", type=int, required=True)
    find.add_argument("--p", type=float, required=True)
    find.add_argument("--out")
    par = ga.add_parser("parity")
    par.add_argument("--k", type=int, required=True)
    par.add_argument("--p", type=float, required=True)
    par.add_argument("--bit", type=int, default=0)
    par.add_argument("--out")
    lat = ga.add_parser("lattice")
    lat.add_argument("--in", dest="infile", required=True)
    lat.add_argument("--out")
    oo = ga.add_parser("onoff")
    oo.add_argument("--in", dest="infile", required=True)
    oo.add_argument("--out")
    ver = ga.add_parser("verify")
    ver.add_argument("--in", dest="infile", required=True)
    ver.add_argument("--box-radius", type=int, default=3)

    r = sub.add_parser("reduce")
    ra = r.add_subparsers(dest="action", required=True)
    rs = ra.add_parser("sat")
    rs.add_argument("--cnf", required=True)
    rs.add_argument("--gadget", required=True)
    rs.add_argument("--mode", choices=("padded", "gap"), default="padded")
    rs.add_argument("--s", type=float)
    rs.add_argument("--c", type=float)
    rs.add_argument("--out")
    rp = ra.add_parser("parity")
    rp.add_argument("--xor", required=True)
    rp.add_argument("--p", type=float, required=True)
    rp.add_argument("--s", type=float)
    rp.add_argument("--c", type=float)
    rp.add_argument("--out")

    pg = sub.add_parser("params")
    pga = pg.add_subparsers(dest="action", required=True)
    gap = pga.add_parser("gap")
    gap.add_argument("--p", type=float, required=True)
    gap.add_argument("--k", type=int, required=True)
    gap.add_argument("--s", type=float, required=True)
    gap.add_argument("--c", type=float, required=True)
    gap.add_argument("--eps", type=float)
    gap.add_argument("--out")

    cv = sub.add_parser("cvpp")
    cva = cv.add_subparsers(dest="action", required=True)
    prep = cva.add_parser("prep")
    prep.add_argument("--n", type=int, required=True)
    prep.add_argument("--k", type=int, required=True)
    prep.add_argument("--gadget", required=True, help="(k+1)-ary isolating gadget JSON")
    prep.add_argument("--out")
    iprep = cva.add_parser("inf-prep")
    iprep.add_argument("--n", type=int, required=True)
    iprep.add_argument("--k", type=int, required=True)
    iprep.add_argument("--out")
    for name in ("query", "inf-query"):
        q = cva.add_parser(name)
        q.add_argument("--prep", required=True)
        q.add_argument("--cnf", required=True)
        q.add_argument("--w", type=int)
        q.add_argument("--out")

    o = sub.add_parser("oracle")
    oa = o.add_subparsers(dest="action", required=True)
    solve = oa.add_parser("solve")
    solve.add_argument("instance")
    solve.add_argument("--box", help="per-coordinate integer range, e.g. '-1..2'")
    solve.add_argument("--out")
    val = oa.add_parser("validate")
    val.add_argument("--cnf", required=True)
    val.add_argument("--instance", required=True)
    val.add_argument("--box")

    ident = sub.add_parser("identities")
    ia = ident.add_subparsers(dest="action", required=True)
    skp = ia.add_parser("skp")
    skp.add_argument("--k", type=int, required=True)
    skp.add_argument("--p", type=float, required=True)
    skp.add_argument("--out")
    integral = ia.add_parser("integral")
    integral.add_argument("--n", type=int, required=True)
    integral.add_argument("--m", type=int, required=True)
    integral.add_argument("--p", type=float, required=True)
    integral.add_argument("--out")
    bounds = ia.add_parser("bounds")
    bounds.add_argument("--k", type=int, required=True)
    bounds.add_argument("--p", type=float, required=True)
    bounds.add_argument("--c", type=int, default=0)
    bounds.add_argument("--out")
    ram = ia.add_parser("ramanujan")
    ram.add_argument("--k", type=int, required=True)
    ram.add_argument("--x", type=float, required=True)
    ram.add_argument("--out")
    cp = ia.add_parser("cp-svp")
    cp.add_argument("--p", type=float)
    cp.add_argument("--find-p0", action="store_true")
    cp.add_argument("--grid", help="CSV sweep lo:hi:count")
    cp.add_argument("--out")

    cb = sub.add_parser("cubes")
    cba = cb.add_subparsers(dest="action", required=True)
    cf = cba.add_parser("find")
    cf.add_argument("--in", dest="infile", required=True, help="hex bitstrings, one per line")
    cf.add_argument("--dim", type=int, required=True)
    cf.add_argument("--out")

    cl = sub.add_parser("clauses")
    cla = cl.add_subparsers(dest="action", required=True)
    iso = cla.add_parser("isolate")
    iso.add_argument("--in", dest="infile", required=True)
    iso.add_argument("--k", type=int, required=True)
    iso.add_argument("--out")
    sep = cla.add_parser("separate")
    sep.add_argument("--s-in", dest="close", required=True)
    sep.add_argument("--t-in", dest="away", required=True)
    sep.add_argument("--out")

    return top


_HANDLERS = {
    "gadget": _cmd_gadget,
    "reduce": _cmd_reduce,
    "params": _cmd_params,
    "cvpp": _cmd_cvpp,
    "oracle": _cmd_oracle,
    "identities": _cmd_identities,
    "cubes": _cmd_cubes,
    "clauses": _cmd_clauses,
}


def dispatch(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    try:
        config = RunConfig(
            seed=args.seed,
            threads=args.threads,
            tol=Tolerance(rel=args.tol_rel, abs=args.tol_abs),
        )
    except InvalidInputError as exc:
        _log(f"usage error: {exc}")
        return EXIT_USAGE
    random.seed(config.seed)
    np.random.seed(config.seed % 2**32)
    try:
        return _HANDLERS[args.command](args, config)
    except ResourceLimitError as exc:
        _log(f"resource limit: {exc}")
        return EXIT_RESOURCE
    except (VerificationError, NumericDegeneracyError) as exc:
        _log(f"failure: {exc}")
        return EXIT_FAIL
    except InvalidInputError as exc:
        _log(f"usage error: {exc}")
        return EXIT_USAGE
    except LatgadError as exc:
        _log(f"error: {exc}")
        return EXIT_FAIL
    except OSError as exc:
        _log(f"io error: {exc}")
        return EXIT_USAGE


def main() -> None:
    sys.exit(dispatch())


if __name__ == "__main__":
    main()
