"""Command-line front end.

Subcommands: ``analyze`` (constant estimates), ``verify`` (inequality
checks), ``trace`` (greedy residual traces), ``growth`` (constants along
a dimension family) and ``catalog`` (available space kinds).

Exit codes: 0 success, 1 verification failure, 2 usage error, 3 instance
cap exceeded.  Reports are JSON (sorted keys, no timestamps) or CSV with
the fixed headers ``dim,value`` and ``m,residual_norm``; output is
identical for identical flags, seed included, whatever ``--workers``
says.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import os
import sys
from typing import Sequence

from .catalog import SpaceSpec, direct_sum_spec, load_weights_file, make_space, catalog_entries
from .constants import coerce_kind, estimate_constants
from .core import Space
from .greedy import tga_run
from .instances import CapExceededError, SearchConfig
from .theorems import THEOREM_IDS, GROWTH_FAMILIES, growth_curve, verify

WORKERS_ENV = "GREEDYKIT_WORKERS"

_SPACE_KINDS = {
    "lp": "lp",
    "weighted-l1": "weighted_l1",
    "weighted-lp": "weighted_lp",
    "direct-sum": "direct_sum",
    "lindenstrauss-l1": "lindenstrauss_l1",
    "custom-weights-file": "custom_weights_file",
}


@dataclasses.dataclass(frozen=True)
class RunConfig:
    """Everything one command invocation resolved from its flags."""

    space: Space | None
    search: SearchConfig
    workers: int
    out: str | None
    fmt: str

    def __post_init__(self) -> None:
        if self.workers < 1:
            raise ValueError("--workers must be >= 1")


def _default_workers() -> int:
    raw = os.environ.get(WORKERS_ENV, "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


# ---------------------------------------------------------------------------
# flag groups

def _add_space_flags(sp: argparse.ArgumentParser) -> None:
    g = sp.add_argument_group("space")
    g.add_argument("--space", choices=sorted(_SPACE_KINDS), help="inline space kind")
    g.add_argument("--space-file", help="JSON file with a full space spec")
    g.add_argument("--dim", type=int, help="ambient dimension")
    g.add_argument("--p", help="exponent for lp kinds (number or 'inf')")
    g.add_argument("--weights", help="comma-separated positive weights")
    g.add_argument("--weights-file", help="text file, one positive weight per line")
    g.add_argument("--summands", help="direct-sum parts as kind:p list, e.g. lp:1,lp:2")


def _add_search_flags(sp: argparse.ArgumentParser) -> None:
    g = sp.add_argument_group("search")
    g.add_argument("--levels", type=int, default=2, help="grid levels per unit")
    g.add_argument("--max-support", type=int, default=None,
                   help="largest enumerated support/index-set size")
    g.add_argument("--mode", choices=("exhaustive", "sampled"), default="exhaustive")
    g.add_argument("--samples", type=int, default=256, help="draws in sampled mode")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--cap", type=int, default=20_000_000,
                   help="exhaustive instance-count cap")
    g.add_argument("--workers", type=int, default=_default_workers(),
                   help=f"search parallelism (default ${WORKERS_ENV} or 1)")


def _add_output_flags(sp: argparse.ArgumentParser, default_fmt: str) -> None:
    g = sp.add_argument_group("output")
    g.add_argument("--out", help="write the report here instead of stdout")
    g.add_argument("--format", choices=("json", "csv"), default=default_fmt)


def _parse_floats(text: str, what: str) -> tuple[float, ...]:
    try:
        values = tuple(float(tok) for tok in text.split(","))
    except ValueError:
        raise ValueError(f"{what}: expected comma-separated decimals, got {text!r}")
    if not values:
        raise ValueError(f"{what}: empty list")
    return values


def _parse_summands(text: str) -> tuple[tuple[str, str], ...]:
    parts = []
    for item in text.split(","):
        kind, sep, p = item.partition(":")
        if not sep or kind.replace("-", "_") != "lp":
            raise ValueError(f"--summands items must look like lp:p, got {item!r}")
        parts.append(("lp", p))
    return tuple(parts)


def _space_spec_from_flags(args: argparse.Namespace) -> SpaceSpec:
    kind = _SPACE_KINDS[args.space]
    if kind == "lp":
        if args.dim is None or args.p is None:
            raise ValueError("--space lp needs --dim and --p")
        return SpaceSpec(kind="lp", dim=args.dim, p=args.p)
    if kind in ("weighted_l1", "weighted_lp"):
        if args.weights is not None:
            weights = _parse_floats(args.weights, "--weights")
        elif args.weights_file is not None:
            weights = load_weights_file(args.weights_file)
        else:
            raise ValueError(f"--space {args.space} needs --weights or --weights-file")
        if args.dim is not None and args.dim != len(weights):
            raise ValueError(f"--dim {args.dim} does not match {len(weights)} weights")
        if kind == "weighted_lp":
            if args.p is None:
                raise ValueError("--space weighted-lp needs --p")
            return SpaceSpec(kind=kind, dim=len(weights), p=args.p, weights=weights)
        return SpaceSpec(kind=kind, dim=len(weights), weights=weights)
    if kind == "direct_sum":
        if args.dim is None or args.summands is None:
            raise ValueError("--space direct-sum needs --dim and --summands")
        return direct_sum_spec(args.dim, _parse_summands(args.summands))
    if kind == "lindenstrauss_l1":
        if args.dim is None:
            raise ValueError("--space lindenstrauss-l1 needs --dim")
        return SpaceSpec(kind=kind, dim=args.dim)
    # custom_weights_file: dimension comes from the file unless given.
    if args.weights_file is None:
        raise ValueError("--space custom-weights-file needs --weights-file")
    dim = args.dim if args.dim is not None else len(load_weights_file(args.weights_file))
    return SpaceSpec(kind=kind, dim=dim, path=args.weights_file)


def _space_from_args(args: argparse.Namespace, default_dim: int | None = None) -> Space:
    sources = [args.space is not None, args.space_file is not None]
    if sum(sources) > 1:
        raise ValueError("give exactly one of --space / --space-file")
    if not any(sources):
        if default_dim is None:
            raise ValueError("a space is required: --space or --space-file")
        return make_space(SpaceSpec(kind="lp", dim=default_dim, p=2))
    if args.space_file is not None:
        with open(args.space_file, "r", encoding="utf-8") as fh:
            return make_space(SpaceSpec.from_json(fh.read()))
    return make_space(_space_spec_from_flags(args))


def _search_from_args(args: argparse.Namespace) -> SearchConfig:
    return SearchConfig(levels=args.levels, max_support=args.max_support,
                        mode=args.mode, samples=args.samples, seed=args.seed,
                        cap=args.cap)


def _parse_dims(text: str) -> list[int]:
    lo, sep, hi = text.partition(":")
    try:
        a = int(lo)
        b = int(hi) if sep else a
    except ValueError:
        raise ValueError(f"--dims: expected N or LO:HI, got {text!r}")
    if a < 1 or b < a:
        raise ValueError(f"--dims: need 1 <= LO <= HI, got {text!r}")
    return list(range(a, b + 1))


# ---------------------------------------------------------------------------
# output

def _json_text(payload) -> str:
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


def _csv_text(header: str, rows) -> str:
    lines = [header]
    lines.extend(",".join(str(c) for c in row) for row in rows)
    return "\n".join(lines) + "\n"


def _emit(args: argparse.Namespace, text: str) -> None:
    if getattr(args, "out", None):
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------------------
# subcommands

def cmd_analyze(args: argparse.Namespace) -> int:
    space = _space_from_args(args)
    cfg = _search_from_args(args)
    tokens = [coerce_kind(tok) for tok in args.constants.split(",") if tok]
    if not tokens:
        raise ValueError("--constants: empty list")
    estimates = estimate_constants(space, tokens, cfg, workers=args.workers,
                                   prefer_analytic=not args.no_analytic)
    if args.format == "csv":
        rows = [(t, float(estimates[t].value)) for t in tokens]
        _emit(args, _csv_text("kind,value", rows))
    else:
        _emit(args, _json_text([estimates[t].to_dict() for t in tokens]))
    return 0


def cmd_verify(args: argparse.Namespace) -> int:
    if args.theorem is None and not args.all:
        raise ValueError("give --theorem ID or --all")
    if args.theorem is not None and args.all:
        raise ValueError("--theorem and --all are mutually exclusive")
    ids = list(THEOREM_IDS) if args.all else [args.theorem]
    for tid in ids:
        if tid not in THEOREM_IDS:
            raise ValueError(f"unknown theorem id: {tid!r} "
                             f"(known: {', '.join(THEOREM_IDS)})")
    space = _space_from_args(args)
    cfg = _search_from_args(args)
    reports = [verify(space, tid, cfg, workers=args.workers) for tid in ids]
    payload = [r.to_dict() for r in reports] if args.all else reports[0].to_dict()
    _emit(args, _json_text(payload))
    return 0 if all(r.passed for r in reports) else 1


def cmd_trace(args: argparse.Namespace) -> int:
    sources = [args.vector is not None, args.vector_file is not None]
    if sum(sources) != 1:
        raise ValueError("give exactly one of --vector / --vector-file")
    if args.vector is not None:
        v = _parse_floats(args.vector, "--vector")
    else:
        with open(args.vector_file, "r", encoding="utf-8") as fh:
            lines = [ln.strip() for ln in fh if ln.strip()]
        try:
            v = tuple(float(ln) for ln in lines)
        except ValueError:
            raise ValueError(f"--vector-file: non-decimal line in {args.vector_file}")
        if not v:
            raise ValueError("--vector-file: no values")
    # With no space given the trace runs in plain euclidean coordinates.
    space = _space_from_args(args, default_dim=len(v))
    if space.dim != len(v):
        raise ValueError(f"vector has {len(v)} entries but space dim is {space.dim}")
    trace = tga_run(space, v, M=args.steps)
    if args.format == "json":
        _emit(args, _json_text(trace.to_dict()))
    else:
        _emit(args, _csv_text("m,residual_norm",
                              [(m, float(r)) for m, r in trace.csv_rows()]))
    return 0


def cmd_growth(args: argparse.Namespace) -> int:
    dims = _parse_dims(args.dims)
    kind = coerce_kind(args.constant)
    cfg = _search_from_args(args)
    rows = growth_curve(args.family, dims, kind, cfg, p=args.p,
                        workers=args.workers,
                        prefer_analytic=not args.no_analytic)
    if args.format == "json":
        _emit(args, _json_text(rows))
    else:
        _emit(args, _csv_text("dim,value",
                              [(r["dim"], float(r["value"])) for r in rows]))
    return 0


def cmd_catalog(args: argparse.Namespace) -> int:
    _emit(args, _json_text(catalog_entries()))
    return 0


# ---------------------------------------------------------------------------
# parser

def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="greedykit",
        description="Thresholding-greedy constants, traces and inequality checks "
                    "on finite-dimensional sequence spaces.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("analyze", help="estimate greedy-type constants")
    _add_space_flags(sp)
    _add_search_flags(sp)
    _add_output_flags(sp, default_fmt="json")
    sp.add_argument("--constants", required=True,
                    help="comma-separated kind tokens, e.g. cq,dd")
    sp.add_argument("--no-analytic", action="store_true",
                    help="always search, even when an analytic value exists")
    sp.set_defaults(func=cmd_analyze)

    sp = sub.add_parser("verify", help="run inequality check suites")
    _add_space_flags(sp)
    _add_search_flags(sp)
    _add_output_flags(sp, default_fmt="json")
    sp.add_argument("--theorem", help="one check id, e.g. thm_main")
    sp.add_argument("--all", action="store_true", help="run every check id")
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("trace", help="run the thresholding greedy algorithm")
    _add_space_flags(sp)
    _add_output_flags(sp, default_fmt="csv")
    sp.add_argument("--vector", help="comma-separated coefficients")
    sp.add_argument("--vector-file", help="text file, one coefficient per line")
    sp.add_argument("--steps", type=int, default=None, help="stop after this many terms")
    sp.set_defaults(func=cmd_trace)

    sp = sub.add_parser("growth", help="one constant along a dimension family")
    _add_search_flags(sp)
    _add_output_flags(sp, default_fmt="csv")
    sp.add_argument("--family", required=True, choices=GROWTH_FAMILIES)
    sp.add_argument("--constant", required=True, help="kind token, e.g. dd")
    sp.add_argument("--dims", required=True, help="inclusive range LO:HI")
    sp.add_argument("--p", help="exponent when --family lp")
    sp.add_argument("--no-analytic", action="store_true",
                    help="always search, even when an analytic value exists")
    sp.set_defaults(func=cmd_growth)

    sp = sub.add_parser("catalog", help="list available space kinds")
    _add_output_flags(sp, default_fmt="json")
    sp.set_defaults(func=cmd_catalog)

    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CapExceededError as exc:
        print(f"greedykit: {exc}", file=sys.stderr)
        return 3
    except (ValueError, OSError) as exc:
        print(f"greedykit: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
