"""Command line interface.

Subcommands:

* ``femasm bench``    - time (kind, strategy) pairs over square meshes,
  write a CSV of medians and speedups.
* ``femasm assemble`` - assemble one matrix from a mesh file and export
  it in MatrixMarket coordinate format.
* ``femasm slopes``   - fit log-log complexity slopes from a bench CSV.
"""

from __future__ import annotations

import argparse
import sys
from collections import defaultdict

from .assembly import MatrixKind, Strategy, WeightField, assemble
from .bench import fit_loglog_slope, read_records_csv, run_bench
from .elements import ElasticParams
from .mesh import read_mesh
from .sparse import write_matrix_market

_KINDS = {k.value: k for k in MatrixKind}
_STRATEGIES = {s.value: s for s in Strategy}


def _parse_kinds(text: str) -> list[MatrixKind]:
    return [_lookup(_KINDS, name, "kind") for name in text.split(",")]


def _parse_strategies(text: str) -> list[Strategy]:
    return [_lookup(_STRATEGIES, name, "strategy") for name in text.split(",")]


def _lookup(table: dict, name: str, what: str):
    name = name.strip().lower()
    if name not in table:
        raise argparse.ArgumentTypeError(
            f"unknown {what} {name!r}; choose from {', '.join(sorted(table))}"
        )
    return table[name]


def _parse_sizes(text: str) -> list[int]:
    try:
        sizes = [int(s) for s in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid size list {text!r}") from None
    if not sizes or any(s < 1 for s in sizes):
        raise argparse.ArgumentTypeError("sizes must be positive integers")
    return sizes


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="femasm")
    sub = parser.add_subparsers(dest="command", required=True)

    b = sub.add_parser("bench", help="time assembly strategies over square meshes")
    b.add_argument("--kinds", type=_parse_kinds, default=list(MatrixKind))
    b.add_argument("--strategies", type=_parse_strategies, default=list(Strategy))
    b.add_argument(
        "--square-sizes",
        type=_parse_sizes,
        required=True,
        help="comma separated cells-per-side of the unit-square meshes, ascending",
    )
    b.add_argument("--reps", type=int, default=5)
    b.add_argument("--out", required=True)
    b.add_argument("--budget", type=float, default=60.0, help="seconds per cell")
    b.add_argument("--quiet", action="store_true")

    a = sub.add_parser("assemble", help="assemble one matrix and export it")
    a.add_argument("--mesh", required=True)
    a.add_argument("--kind", type=lambda s: _lookup(_KINDS, s, "kind"), required=True)
    a.add_argument(
        "--strategy",
        type=lambda s: _lookup(_STRATEGIES, s, "strategy"),
        default=Strategy.OPTV2,
    )
    a.add_argument("--out", required=True)
    a.add_argument("--weight", default="quadratic", help="one | linear | quadratic")
    a.add_argument("--lam", type=float, default=1.0)
    a.add_argument("--mu", type=float, default=1.0)

    s = sub.add_parser("slopes", help="fit log-log slopes from a bench CSV")
    s.add_argument("--in", dest="input", required=True)
    return parser


def _cmd_bench(args) -> int:
    run_bench(
        args.kinds,
        args.strategies,
        args.square_sizes,
        args.reps,
        args.out,
        time_budget_s=args.budget,
        verbose=not args.quiet,
    )
    print(f"wrote {args.out}")
    return 0


def _cmd_assemble(args) -> int:
    mesh = read_mesh(args.mesh)
    kwargs = {}
    if args.kind is MatrixKind.WEIGHTED_MASS:
        kwargs["weight"] = WeightField.by_name(args.weight)
    elif args.kind is MatrixKind.ELASTIC:
        kwargs["params"] = ElasticParams(args.lam, args.mu)
    matrix = assemble(mesh, args.kind, args.strategy, **kwargs)
    write_matrix_market(matrix, args.out)
    print(f"wrote {args.out}: {matrix.shape[0]}x{matrix.shape[1]}, nnz={matrix.nnz}")
    return 0


def _cmd_slopes(args) -> int:
    records = read_records_csv(args.input)
    groups = defaultdict(list)
    for r in records:
        groups[(r.kind, r.strategy)].append(r)
    for (kind, strategy), recs in sorted(groups.items()):
        try:
            slope = fit_loglog_slope(recs)
        except ValueError as exc:
            print(f"{kind:8s} {strategy:10s} slope: n/a ({exc})")
        else:
            print(f"{kind:8s} {strategy:10s} slope: {slope:.3f}")
    return 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    handlers = {"bench": _cmd_bench, "assemble": _cmd_assemble, "slopes": _cmd_slopes}
    return handlers[args.command](args)


if __name__ == "__main__":
    sys.exit(main())
