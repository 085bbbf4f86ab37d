"""Command-line front door.

Structured objects travel as JSON, sampled curves and tables as CSV.  All
numeric output is printed with full round-trip precision, and every
randomized report is a pure function of its seed, so repeated runs are byte
identical.

Exit codes: 0 on success (including an all-pass verify), 1 on domain errors
or any identity defect above tolerance, 2 on usage errors.
"""

from __future__ import annotations

import argparse
import os
import sys

import numpy as np

from . import basis as bss
from . import calculus as calc
from . import serialize as ser
from .distributions import DistributionSpec, embed, pair as pair_distribution
from .errors import UltracalcError
from .expr import parse_expression
from .grid import Grid
from .projection import DEFAULT_TOL, FunctionHandle, project
from .refinement import Ladder, Stage
from .space import Space


def _fmt(x: float) -> str:
    return repr(float(x))


def _write_text(text: str, path: str | None) -> None:
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


def _load_space(args) -> Space:
    if getattr(args, "space", None) is not None:
        return ser.space_from_dict(ser.load_json(args.space))
    return Space(Grid.uniform(1.0, 16), 2)


def _make_handle(expr: str, singular: str | None) -> FunctionHandle:
    fn = parse_expression(expr)
    points: tuple[float, ...] = ()
    if singular:
        points = tuple(float(s) for s in singular.split(","))
    return FunctionHandle(fn, points)


def _build_grid(args) -> Grid:
    if args.tags:
        tags = [float(t) for t in args.tags.split(",")]
        h_max = args.hmax if args.hmax is not None else 2.0 * args.beta / args.cells
        return Grid.with_tags(args.beta, tags, h_max)
    if args.hmax is not None:
        return Grid.with_tags(args.beta, [], args.hmax)
    return Grid.uniform(args.beta, args.cells)


# ----------------------------------------------------------------------
# subcommand handlers
# ----------------------------------------------------------------------


def _cmd_grid(args) -> int:
    grid = _build_grid(args)
    _write_text(ser.dump_json(ser.grid_to_dict(grid), None), args.out)
    return 0


def _cmd_space(args) -> int:
    if args.grid is not None:
        grid = ser.grid_from_dict(ser.load_json(args.grid))
    else:
        grid = _build_grid(args)
    space = Space(grid, args.degree)
    _write_text(ser.dump_json(ser.space_to_dict(space), None), args.out)
    return 0


def _cmd_project(args) -> int:
    space = _load_space(args)
    handle = _make_handle(args.fn, args.singular)
    u = project(space, handle, tol=args.tol)
    _write_text(ser.dump_json(ser.member_to_dict(u), None), args.out)
    return 0


def _cmd_delta(args) -> int:
    space = _load_space(args)
    if args.side is not None:
        j = space.grid.node_index(args.at, "center")
        u = bss.delta_sided(space, j, args.side)
    else:
        u = bss.delta(space, args.at)
    _write_text(ser.dump_json(ser.member_to_dict(u), None), args.out)
    return 0


def _cmd_basis(args) -> int:
    space = _load_space(args)
    points = None
    if args.points is not None:
        with open(args.points, encoding="utf-8") as fh:
            points = [float(tok) for tok in fh.read().split()]
    pair = bss.basis_pair(space, points)
    _write_text(ser.dump_json(ser.basis_pair_to_dict(pair), None), args.out)
    return 0


def _cmd_derive(args) -> int:
    space = _load_space(args)
    u = ser.member_from_dict(ser.load_json(args.infile), space)
    op = calc.derivative_operator(space, args.kind)
    _write_text(ser.dump_json(ser.member_to_dict(op.apply(u)), None), args.out)
    return 0


def _cmd_integrate(args) -> int:
    space = _load_space(args)
    u = ser.member_from_dict(ser.load_json(args.infile), space)
    value = calc.integrate(u, args.lower, args.upper)
    _write_text(_fmt(value) + "\n", args.out)
    return 0


def _cmd_verify(args) -> int:
    from .verify import format_report, run_suites

    space = _load_space(args)
    results = run_suites(space, args.suite, args.trials, args.seed, args.tol_factor)
    _write_text(format_report(results), args.out)
    return 0 if all(r.passed for r in results) else 1


def _cmd_embed(args) -> int:
    space = _load_space(args)
    handle = _make_handle(args.fn, args.singular)
    spec = DistributionSpec(args.k, handle)
    u = embed(space, spec, tol=args.tol)
    data = ser.member_to_dict(u)
    data["distribution"] = {
        "k": args.k,
        "fn": args.fn,
        "singular": [float(s) for s in handle.singular],
    }
    _write_text(ser.dump_json(data, None), args.out)
    return 0


def _cmd_pair(args) -> int:
    space = _load_space(args)
    data = ser.load_json(args.dist)
    phi = _make_handle(args.test, None)
    if args.refine is None:
        t = ser.member_from_dict(data, space)
        value = pair_distribution(space, t, phi, tol=args.tol)
        _write_text(_fmt(value) + "\n", args.out)
        return 0
    if "distribution" not in data:
        raise UltracalcError(
            "refinement needs the distribution presentation; use a file "
            "written by 'ultracalc embed'"
        )
    meta = data["distribution"]
    spec = DistributionSpec(
        int(meta["k"]),
        FunctionHandle(
            parse_expression(meta["fn"]), tuple(float(s) for s in meta["singular"])
        ),
    )
    values = []
    stage = Stage(space.grid, space.degree)
    for _ in range(args.refine):
        st_space = stage.space()
        t = embed(st_space, spec, tol=args.tol)
        values.append(pair_distribution(st_space, t, phi, tol=args.tol))
        from .refinement import refine

        stage = refine(stage, "dyadic-split")
    lines = ["level,value,error,order"]
    ref = values[-1]
    errors = [abs(v - ref) for v in values[:-1]]
    for i, v in enumerate(values):
        err = _fmt(errors[i]) if i < len(errors) else ""
        order = ""
        if 0 < i < len(errors) and errors[i] > 0.0 and errors[i - 1] > 0.0:
            order = _fmt(float(np.log2(errors[i - 1] / errors[i])))
        lines.append(f"{i},{_fmt(v)},{err},{order}")
    _write_text("\n".join(lines) + "\n", args.out)
    return 0


def _cmd_refine(args) -> int:
    config = ser.load_json(args.config)
    base_cfg = config["base"]
    base = Stage(
        Grid.uniform(float(base_cfg["beta"]), int(base_cfg["cells"])),
        int(base_cfg["degree"]),
    )
    ladder = Ladder.from_base(
        base,
        int(config["levels"]),
        config.get("policy", "dyadic-split"),
        factor=float(config.get("factor", 2.0)),
    )
    label = args.observe
    ladder.register(label, _builtin_observable(label))
    target = config.get("target")
    rows = ladder.observe(label, None if target is None else float(target))
    lines = ["level,value,error,order"]
    for row in rows:
        err = "" if row.error is None else _fmt(row.error)
        order = "" if row.order is None else _fmt(row.order)
        lines.append(f"{row.stage},{_fmt(row.value)},{err},{order}")
    _write_text("\n".join(lines) + "\n", args.out)
    return 0


def _builtin_observable(label: str):
    from .projection import l2_error

    if label.startswith("proj-error:"):
        fn = parse_expression(label.split(":", 1)[1])

        def observable(stage: Stage) -> float:
            space = stage.space()
            return l2_error(fn, project(space, fn))

        return observable
    if label.startswith("proj-value:"):
        body = label.split(":", 1)[1]
        expr, _, at = body.rpartition("@")
        fn = parse_expression(expr)
        x0 = float(at)

        def observable(stage: Stage) -> float:
            return project(stage.space(), fn)(x0)

        return observable
    raise UltracalcError(
        f"unknown observable {label!r}; use proj-error:<expr> or proj-value:<expr>@<x>"
    )


def _cmd_export_op(args) -> int:
    space = _load_space(args)
    op = calc.derivative_operator(space, args.kind)
    if args.format == "json":
        data = {
            "kind": op.kind,
            "space": ser.space_hash(space),
            "matrix": [[float(c) for c in row] for row in op.matrix],
        }
        _write_text(ser.dump_json(data, None), args.out)
        return 0
    lines = [",".join(_fmt(c) for c in row) for row in op.matrix]
    _write_text("\n".join(lines) + "\n", args.out)
    return 0


def _cmd_sample(args) -> int:
    space = None
    if args.space is not None:
        space = ser.space_from_dict(ser.load_json(args.space))
    u = ser.member_from_dict(ser.load_json(args.member), space)
    beta = u.space.grid.beta
    xs = np.linspace(-beta, beta, args.points)
    lines = ["x,value"]
    for x in xs:
        lines.append(f"{_fmt(x)},{_fmt(u(float(x)))}")
    _write_text("\n".join(lines) + "\n", args.out)
    return 0


# ----------------------------------------------------------------------
# parser
# ----------------------------------------------------------------------


def _add_space_arg(p: argparse.ArgumentParser, required: bool = False):
    help_text = "space JSON file" + ("" if required else " (default: beta=1, 16 cells, degree 2)")
    p.add_argument("--space", required=required, help=help_text)


def _add_out_arg(p: argparse.ArgumentParser):
    p.add_argument("--out", help="output path (default: stdout)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ultracalc",
        description="Piecewise-polynomial generalized-function calculus on a bounded grid.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("grid", help="build a grid and emit its JSON")
    p.add_argument("--beta", type=float, required=True)
    p.add_argument("--cells", type=int, default=1)
    p.add_argument("--tags", help="comma-separated interior nodes")
    p.add_argument("--hmax", type=float, help="upper bound on the cell width")
    _add_out_arg(p)
    p.set_defaults(handler=_cmd_grid)

    p = sub.add_parser("space", help="build a space and emit its JSON")
    p.add_argument("--grid", help="grid JSON file")
    p.add_argument("--beta", type=float, default=1.0)
    p.add_argument("--cells", type=int, default=16)
    p.add_argument("--tags", help="comma-separated interior nodes")
    p.add_argument("--hmax", type=float)
    p.add_argument("--degree", type=int, required=True)
    _add_out_arg(p)
    p.set_defaults(handler=_cmd_space)

    p = sub.add_parser("project", help="project a function onto the space")
    _add_space_arg(p)
    p.add_argument("--fn", required=True, help="expression in x")
    p.add_argument("--singular", help="comma-separated singular points")
    p.add_argument("--tol", type=float, default=DEFAULT_TOL)
    _add_out_arg(p)
    p.set_defaults(handler=_cmd_project)

    p = sub.add_parser("delta", help="emit a delta member")
    _add_space_arg(p)
    p.add_argument("--at", type=float, required=True, help="center point")
    p.add_argument("--side", choices=["plus", "minus"], help="one-sided node delta")
    _add_out_arg(p)
    p.set_defaults(handler=_cmd_delta)

    p = sub.add_parser("basis", help="emit a delta/cardinal basis pair")
    _add_space_arg(p)
    p.add_argument("--points", help="file of whitespace-separated points")
    _add_out_arg(p)
    p.set_defaults(handler=_cmd_basis)

    p = sub.add_parser("derive", help="apply a derivative operator to a member")
    _add_space_arg(p)
    p.add_argument("--in", dest="infile", required=True, help="member JSON file")
    p.add_argument("--kind", choices=["D", "D2"], default="D")
    _add_out_arg(p)
    p.set_defaults(handler=_cmd_derive)

    p = sub.add_parser("integrate", help="definite integral between grid nodes")
    _add_space_arg(p)
    p.add_argument("--in", dest="infile", required=True, help="member JSON file")
    p.add_argument("--from", dest="lower", type=float, required=True)
    p.add_argument("--to", dest="upper", type=float, required=True)
    _add_out_arg(p)
    p.set_defaults(handler=_cmd_integrate)

    p = sub.add_parser("verify", help="run randomized identity suites")
    _add_space_arg(p)
    p.add_argument(
        "--suite",
        default="all",
        choices=["all", "delta", "sigma", "projection", "ibp", "ftc", "d2"],
    )
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--tol-factor", type=float, default=1.0, help="tolerance override factor")
    _add_out_arg(p)
    p.set_defaults(handler=_cmd_verify)

    p = sub.add_parser("embed", help="embed a distribution given as a k-th derivative")
    _add_space_arg(p)
    p.add_argument("--k", type=int, required=True, help="derivative order")
    p.add_argument("--fn", required=True, help="expression for the C1 antiderivative")
    p.add_argument("--singular", help="comma-separated singular points")
    p.add_argument("--tol", type=float, default=DEFAULT_TOL)
    _add_out_arg(p)
    p.set_defaults(handler=_cmd_embed)

    p = sub.add_parser("pair", help="pair an embedded distribution with a test function")
    _add_space_arg(p)
    p.add_argument("--dist", required=True, help="member JSON written by embed")
    p.add_argument("--test", required=True, help="test function expression")
    p.add_argument("--refine", type=int, help="emit a convergence table over this many dyadic levels")
    p.add_argument("--tol", type=float, default=DEFAULT_TOL)
    _add_out_arg(p)
    p.set_defaults(handler=_cmd_pair)

    p = sub.add_parser("refine", help="evaluate an observable along a refinement ladder")
    p.add_argument("--config", required=True, help="ladder JSON config")
    p.add_argument("--observe", required=True, help="observable label")
    _add_out_arg(p)
    p.set_defaults(handler=_cmd_refine)

    p = sub.add_parser("export-op", help="export a derivative operator matrix")
    _add_space_arg(p)
    p.add_argument("--kind", choices=["D", "D2"], default="D")
    p.add_argument("--format", choices=["csv", "json"], default="csv")
    _add_out_arg(p)
    p.set_defaults(handler=_cmd_export_op)

    p = sub.add_parser("sample", help="sample a member on an even x grid as CSV")
    p.add_argument("member", help="member JSON file")
    p.add_argument("--points", type=int, default=201)
    p.add_argument("--space", help="space JSON file (defaults to the embedded description)")
    _add_out_arg(p)
    p.set_defaults(handler=_cmd_sample)

    return parser


def main(argv=None) -> int:
    threads = os.environ.get("ULTRACALC_THREADS")
    if threads is not None:
        try:
            if int(threads) < 1:
                raise ValueError
        except ValueError:
            sys.stderr.write("ultracalc: ULTRACALC_THREADS must be a positive integer\n")
            return 2
        # computation is single-threaded; any positive cap is honored trivially
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.handler(args)
    except UltracalcError as exc:
        sys.stderr.write(f"ultracalc: error: {exc}\n")
        return 1
    except (ValueError, KeyError, ZeroDivisionError, OverflowError) as exc:
        sys.stderr.write(f"ultracalc: error: {exc!r}\n")
        return 1
    except OSError as exc:
        sys.stderr.write(f"ultracalc: i/o error: {exc}\n")
        return 1


if __name__ == "__main__":
    sys.exit(main())
