"""Command-line front door: build embeddings, audit them, manage labelings.

Exit codes: 0 when every applicable assertion passed, 1 when a check failed,
2 for usage errors (bad arguments, malformed files, infeasible or oversized
instances).
"""
from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from .caterpillars import (
    SearchExhausted,
    caterpillar_for,
    gray_label,
    label_from_caterpillar,
    verify_window,
)
from .checks import (
    assemble_Hk,
    audit_file,
    audit_grid,
    dilation,
    dump_embedding,
    failed,
    render_report,
)
from .grids import GridSpec, level_budget
from .rounding import parse_matrices
from .stages import build_fk, dump_stage

PASS, CHECK_FAILED, USAGE = 0, 1, 2


def _default_threads() -> int:
    return max(1, os.cpu_count() or 1)


def _spec_from(dims: list[int], cap: int | None) -> GridSpec:
    if cap is None:
        return GridSpec(tuple(dims))
    return GridSpec(tuple(dims), vertex_cap=cap)


def _load_seeds(path: str | None):
    if path is None:
        return None
    return parse_matrices(Path(path).read_text())


def _labelings_from_windows(spec: GridSpec, windows: list[int]):
    if len(windows) != spec.k:
        raise ValueError(
            f"need {spec.k} window values (one per dimension), got {len(windows)}"
        )
    labelings = []
    for jdim, w in enumerate(windows, start=1):
        width = spec.block_width(jdim)
        if w == 0:
            labelings.append(gray_label(width))
        elif w in (3, 5):
            cat = caterpillar_for(width, w - 2)
            labelings.append(label_from_caterpillar(cat))
        else:
            raise ValueError(
                f"window {w} not available; use 0 (plain reflected labels), "
                f"3, or 5"
            )
    return labelings


def cmd_embed(args) -> int:
    spec = _spec_from(args.dims, args.cap)
    fk = build_fk(spec, seed_matrices=_load_seeds(args.seed))
    if args.dump_stage is not None:
        stages = {st.stage: st for st in fk.stage_chain()}
        if args.dump_stage not in stages:
            raise ValueError(
                f"stage {args.dump_stage} not in 2..{spec.k} for this grid"
            )
        text = dump_stage(stages[args.dump_stage])
        if args.out:
            Path(args.out).write_text(text)
        else:
            sys.stdout.write(text)
        return PASS
    labelings = None
    if args.windows is not None:
        labelings = _labelings_from_windows(spec, args.windows)
    emb = assemble_Hk(fk, labelings)
    report = dilation(emb, threads=args.threads)
    text = dump_embedding(emb)
    if args.out:
        Path(args.out).write_text(text)
        sink = sys.stdout
    else:
        sys.stdout.write(text)
        sink = sys.stderr
    levels = " ".join(str(level_budget(spec, i)) for i in range(2, spec.k + 1))
    print(f"n: {spec.n}", file=sink)
    print(f"levels: {levels}", file=sink)
    print(f"windows: {' '.join(str(w) for w in emb.windows())}", file=sink)
    print(f"dilation: {report.dilation}", file=sink)
    return PASS


def cmd_audit(args) -> int:
    tokens = args.target
    if len(tokens) == 1 and not tokens[0].lstrip("-").isdigit():
        path = Path(tokens[0])
        if not path.is_file():
            raise ValueError(f"no such file: {path}")
        checks = audit_file(path.read_text())
    else:
        try:
            dims = [int(t) for t in tokens]
        except ValueError:
            raise ValueError(
                "audit takes either grid side lengths or one file path"
            ) from None
        spec = _spec_from(dims, args.cap)
        checks, _, _ = audit_grid(
            spec, seed_matrices=_load_seeds(args.seed), threads=args.threads
        )
    sys.stdout.write(render_report(checks))
    return PASS if not failed(checks) else CHECK_FAILED


def cmd_cat(args) -> int:
    try:
        if args.start is not None:
            if not args.start < args.t:
                raise ValueError("--from must name a smaller dimension")
            caterpillar_for(args.start, args.leaf_degree, args.cache)
        cat = caterpillar_for(args.t, args.leaf_degree, args.cache)
    except SearchExhausted as exc:
        raise ValueError(str(exc)) from None
    labeling = label_from_caterpillar(cat)
    breach = verify_window(labeling, labeling.window, 3, threads=args.threads)
    if breach is not None:
        a, b, dist = breach
        print(
            f"cat.window: FAIL labels {a},{b} at distance {dist}",
            file=sys.stdout,
        )
        return CHECK_FAILED
    note = f"; cached in {args.cache}" if args.cache else ""
    print(
        f"Cat({cat.spine_length},{cat.leaf_degree}) at Q_{cat.t}: "
        f"window {labeling.window} verified{note}"
    )
    return PASS


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gridcube",
        description=(
            "Embed a multidimensional grid into its optimal hypercube, "
            "audit the construction, and manage cube labelings."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    pe = sub.add_parser("embed", help="build an embedding and write it out")
    pe.add_argument("dims", nargs="+", type=int, help="grid side lengths")
    pe.add_argument("--seed", help="file of designation matrices to use")
    pe.add_argument("--out", help="output path (default: stdout)")
    pe.add_argument(
        "--dump-stage",
        type=int,
        dest="dump_stage",
        help="dump one intermediate stage instead of the final embedding",
    )
    pe.add_argument("--threads", type=int, default=_default_threads())
    pe.add_argument("--cap", type=int, help="vertex-count cap override")
    pe.add_argument(
        "--windows",
        type=int,
        nargs="+",
        help="per-dimension labeling windows (0 for plain reflected labels)",
    )

    pa = sub.add_parser("audit", help="run the invariant battery")
    pa.add_argument(
        "target", nargs="+", help="grid side lengths, or one embedding file"
    )
    pa.add_argument("--seed", help="file of designation matrices to use")
    pa.add_argument("--threads", type=int, default=_default_threads())
    pa.add_argument("--cap", type=int, help="vertex-count cap override")

    pc = sub.add_parser("cat", help="search or load a cube caterpillar")
    pc.add_argument("t", type=int, help="cube dimension")
    pc.add_argument("leaf_degree", type=int, help="leaves per spine vertex")
    pc.add_argument(
        "--from",
        dest="start",
        type=int,
        help="first make sure this smaller dimension is cached",
    )
    pc.add_argument("--cache", help="cache directory")
    pc.add_argument("--threads", type=int, default=_default_threads())
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    handler = {"embed": cmd_embed, "audit": cmd_audit, "cat": cmd_cat}[
        args.command
    ]
    try:
        return handler(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE


if __name__ == "__main__":
    sys.exit(main())
