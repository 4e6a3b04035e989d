"""Command-line entry point: ``csirec {ingest,run,curve,verify}``.

Exit codes: 0 success, 1 usage/config error, 2 data error, 3 verification failure.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from . import __version__
from .datasets import resolve
from .experiment import ConfigError, ExperimentConfig, format_table, parse_beta_grid, run_experiment, write_outputs
from .graph import GraphError
from .ingest import IngestError, RatingFormat, load_like_graph, write_links
from .metrics import ProtocolError

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_VERIFY = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _experiment_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", type=Path, help="JSON file with ExperimentConfig fields")
    p.add_argument("--dataset", help="ratings file, canonical link file, or builtin:ml-100k")
    p.add_argument("--format", help="rating format preset or spec; 'links' for canonical link files")
    p.add_argument("--threshold", type=float, help="like threshold (rating >= R is a link)")
    p.add_argument("--methods", help="comma list from GRM,CF,NBI,IC-NBI,CSI")
    p.add_argument("--runs", type=int)
    p.add_argument("--seed", type=int, help="base seed; run r uses seed + r")
    p.add_argument("--test-fraction", type=float)
    p.add_argument("--list-length", type=int, help="L")
    p.add_argument("--auc-samples", type=int)
    p.add_argument("--beta-grid", help="start:stop:step or comma list")
    p.add_argument("--pr-lengths", help="comma list of list lengths for PR curves (default 1..|E^P|)")
    p.add_argument("--out", type=Path, help="output directory")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="csirec", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"csirec {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("ingest", help="ratings -> canonical like-link file + summary")
    p.add_argument("--ratings", required=True, help="ratings file or builtin:ml-100k")
    p.add_argument("--format", default=None)
    p.add_argument("--threshold", type=float, default=3.0)
    p.add_argument("--out", type=Path, required=True, help="canonical link file to write")

    p = sub.add_parser("run", help="full experiment: metric table, PR curves, manifest")
    _experiment_flags(p)
    p = sub.add_parser("curve", help="precision-recall curves only")
    _experiment_flags(p)

    p = sub.add_parser("verify", help="run the invariant and oracle suite")
    p.add_argument("--config", type=Path, help="accepted for symmetry; unused")
    p.add_argument("--graphs", type=int, default=100, help="random graphs to check")
    p.add_argument("--seed", type=int, default=0)
    return parser


def _config_from_args(args) -> ExperimentConfig:
    base: dict = {}
    if args.config:
        base = ExperimentConfig.load(args.config).to_dict()
    overrides = {
        "dataset": args.dataset,
        "format": args.format,
        "threshold": args.threshold,
        "methods": args.methods,
        "runs": args.runs,
        "seed": args.seed,
        "test_fraction": args.test_fraction,
        "list_length": args.list_length,
        "auc_samples": args.auc_samples,
        "beta_grid": args.beta_grid,
        "pr_lengths": args.pr_lengths,
        "out": str(args.out) if args.out else None,
    }
    base.update({k: v for k, v in overrides.items() if v is not None})
    if "beta_grid" in base:
        base["beta_grid"] = parse_beta_grid(base["beta_grid"])
    return ExperimentConfig.from_dict(base)


def cmd_ingest(args) -> int:
    path, preset = resolve(args.ratings)
    fmt = RatingFormat.parse(args.format or preset or "ml-100k")
    graph, summary, ids = load_like_graph(path, fmt, args.threshold)
    args.out.parent.mkdir(parents=True, exist_ok=True)
    write_links(args.out, graph, ids)
    summary_path = args.out.with_name(args.out.name + ".summary")
    summary_path.write_text(summary.to_text(), encoding="utf-8")
    sys.stdout.write(summary.to_text())
    return EXIT_OK


def cmd_run(args, curves_only: bool = False) -> int:
    config = _config_from_args(args)
    result = run_experiment(config, want_auc=not curves_only, progress=lambda m: print(m, file=sys.stderr))
    if config.out:
        write_outputs(result, config.out, curves_only=curves_only)
    if curves_only:
        for method, curve in result.mean_curves().items():
            for length, p, r in curve.rows():
                if length in (1, 10, 20, 50, 100):
                    print(f"{method}\tL={length}\tprecision={p:.4f}\trecall={r:.4f}")
    else:
        sys.stdout.write(format_table(result))
    timing = ", ".join(f"{k}={v:.1f}s" for k, v in result.timings.items())
    print(f"timings: {timing}", file=sys.stderr)
    return EXIT_OK


def cmd_verify(args) -> int:
    from .verify import run_checks

    checks = run_checks(graphs=args.graphs, seed=args.seed)
    for c in checks:
        print(f"[{'PASS' if c.passed else 'FAIL'}] {c.name}" + (f"  ({c.detail})" if c.detail else ""))
    failed = sum(not c.passed for c in checks)
    print(f"{len(checks) - failed}/{len(checks)} checks passed")
    return EXIT_OK if not failed else EXIT_VERIFY


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        if args.command == "ingest":
            return cmd_ingest(args)
        if args.command == "run":
            return cmd_run(args)
        if args.command == "curve":
            return cmd_run(args, curves_only=True)
        return cmd_verify(args)
    except ConfigError as exc:
        print(f"csirec: config error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (IngestError, GraphError, ProtocolError, OSError) as exc:
        print(f"csirec: data error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
