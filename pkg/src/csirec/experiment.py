"""End-to-end experiments: ingest, split, fit, evaluate, average over runs.

Output directory layout::

    manifest.json            config with every default, seeds, dataset hash, versions
    table.txt / table.csv    mean (std) per method and metric
    pr_curves.csv            method,L,precision,recall averaged over runs
    runs/run_NN.csv          per-run metrics (IC-NBI rows carry the selected beta)
    runs/run_NN_icnbi.csv    per-run IC-NBI scan over the beta grid
    runs/run_NN_pr.csv       per-run precision-recall points

Wall-clock timings are returned and logged but never written, so identical
configs produce byte-identical directories.
"""

from __future__ import annotations

import hashlib
import json
import logging
import time
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path
from typing import Callable

import numpy as np
import scipy

from . import __version__
from .datasets import resolve
from .graph import BipartiteGraph, SplitDataset, split
from .ingest import DatasetSummary, RatingFormat, load_like_graph, read_links, summarize
from .metrics import METRIC_NAMES, Evaluation, MetricReport, PRCurve, draw_auc_pairs, evaluate, mean_std
from .recommend import METHODS, ModelCache

log = logging.getLogger(__name__)

DEFAULT_BETA_GRID = "-2:1:0.1"
LOWER_IS_BETTER = {"ranking_score", "intra_similarity", "popularity"}
# IC-NBI: these three are tuned individually, the rest follow the ranking-score optimum
TUNED_METRICS = ("ranking_score", "precision", "auc")


class ConfigError(ValueError):
    pass


def parse_beta_grid(spec: str | list | tuple) -> tuple[float, ...]:
    """``"start:stop:step"`` (inclusive) or a comma list, e.g. ``"-1,-0.5,0"``."""
    if isinstance(spec, (list, tuple)):
        values = [float(v) for v in spec]
    elif ":" in spec:
        try:
            start, stop, step = (float(x) for x in spec.split(":"))
        except ValueError:
            raise ConfigError(f"bad beta grid {spec!r}; expected start:stop:step") from None
        if step <= 0 or stop < start:
            raise ConfigError(f"bad beta grid {spec!r}")
        count = int(np.floor((stop - start) / step + 1e-9)) + 1
        values = [start + i * step for i in range(count)]
    else:
        try:
            values = [float(v) for v in spec.split(",") if v.strip()]
        except ValueError:
            raise ConfigError(f"bad beta grid {spec!r}") from None
    if not values:
        raise ConfigError("empty beta grid")
    return tuple(round(v, 10) + 0.0 for v in values)


@dataclass(frozen=True)
class ExperimentConfig:
    dataset: str
    format: str = "ml-100k"
    threshold: float = 3.0
    methods: tuple[str, ...] = METHODS
    test_fraction: float = 0.1
    runs: int = 10
    seed: int = 0
    list_length: int = 50
    auc_samples: int = 1_000_000
    beta_grid: tuple[float, ...] = field(default_factory=lambda: parse_beta_grid(DEFAULT_BETA_GRID))
    pr_lengths: tuple[int, ...] | None = None
    out: str | None = None

    def __post_init__(self):
        if self.runs < 1:
            raise ConfigError("runs must be >= 1")
        if not 0.0 < self.test_fraction < 1.0:
            raise ConfigError("test_fraction must lie in (0, 1)")
        if self.list_length < 1:
            raise ConfigError("list_length must be >= 1")
        if self.auc_samples < 0:
            raise ConfigError("auc_samples must be >= 0")
        unknown = [m for m in self.methods if m not in METHODS]
        if unknown or not self.methods:
            raise ConfigError(f"unknown methods {unknown}; choose from {', '.join(METHODS)}")
        if self.pr_lengths is not None and (
            not self.pr_lengths or min(self.pr_lengths) < 1 or list(self.pr_lengths) != sorted(set(self.pr_lengths))
        ):
            raise ConfigError("pr_lengths must be ascending positive integers")

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        names = {f.name for f in fields(cls)}
        unknown = set(data) - names
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        data = dict(data)
        if "methods" in data:
            data["methods"] = tuple(_split_list(data["methods"]))
        if "beta_grid" in data:
            data["beta_grid"] = parse_beta_grid(data["beta_grid"])
        if data.get("pr_lengths") is not None:
            data["pr_lengths"] = tuple(int(x) for x in _split_list(data["pr_lengths"]))
        if "dataset" not in data:
            raise ConfigError("config needs a dataset")
        return cls(**data)

    @classmethod
    def load(cls, path: str | Path) -> "ExperimentConfig":
        with open(path, encoding="utf-8") as fh:
            return cls.from_dict(json.load(fh))

    def with_overrides(self, **kw) -> "ExperimentConfig":
        return replace(self, **{k: v for k, v in kw.items() if v is not None})

    def to_dict(self) -> dict:
        d = asdict(self)
        d["methods"] = list(self.methods)
        d["beta_grid"] = list(self.beta_grid)
        d["pr_lengths"] = None if self.pr_lengths is None else list(self.pr_lengths)
        return d

    def run_seeds(self) -> list[int]:
        return [self.seed + r for r in range(1, self.runs + 1)]


def _split_list(value) -> list:
    if isinstance(value, str):
        return [v.strip() for v in value.split(",") if v.strip()]
    return list(value)


@dataclass
class RunResult:
    config: ExperimentConfig
    summary: DatasetSummary
    dataset_sha256: str
    reports: list[dict[str, MetricReport]] = field(default_factory=list)
    betas: list[dict[str, float]] = field(default_factory=list)
    beta_scans: list[dict[float, MetricReport]] = field(default_factory=list)
    curves: list[dict[str, PRCurve]] = field(default_factory=list)
    timings: dict[str, float] = field(default_factory=dict)

    def aggregate(self) -> dict[str, dict[str, tuple[float, float]]]:
        out = {}
        for method in self.config.methods:
            out[method] = {
                name: mean_std([getattr(run[method], name) for run in self.reports]) for name in METRIC_NAMES
            }
        return out

    def mean_curves(self) -> dict[str, PRCurve]:
        out = {}
        for method in self.config.methods:
            curves = [run[method] for run in self.curves]
            if not curves:
                continue
            out[method] = PRCurve(
                curves[0].lengths,
                np.mean([c.precision for c in curves], axis=0),
                np.mean([c.recall for c in curves], axis=0),
            )
        return out


def load_dataset(config: ExperimentConfig) -> tuple[BipartiteGraph, DatasetSummary, str]:
    path, preset = resolve(config.dataset)
    if not path.exists():
        raise FileNotFoundError(f"dataset {path} not found")
    digest = hashlib.sha256(path.read_bytes()).hexdigest()
    fmt_name = preset or config.format
    if fmt_name == "links":
        graph, _ = read_links(path)
        return graph, summarize(graph), digest
    graph, summary, _ = load_like_graph(path, RatingFormat.parse(fmt_name), config.threshold)
    return graph, summary, digest


def _better(metric: str, a: float, b: float) -> bool:
    return a < b if metric in LOWER_IS_BETTER else a > b


def select_betas(scan: dict[float, MetricReport]) -> dict[str, float]:
    """Optimal beta per tuned metric; first grid value wins ties."""
    chosen = {}
    for metric in TUNED_METRICS:
        best = None
        for beta, report in scan.items():
            value = getattr(report, metric)
            if best is None or _better(metric, value, getattr(scan[best], metric)):
                best = beta
        chosen[metric] = best
    return chosen


def _combine_icnbi(scan: dict[float, MetricReport], chosen: dict[str, float]) -> MetricReport:
    base = scan[chosen["ranking_score"]].as_dict()
    for metric in TUNED_METRICS:
        base[metric] = getattr(scan[chosen[metric]], metric)
    return MetricReport(**base)


def evaluate_split(
    data: SplitDataset,
    config: ExperimentConfig,
    pr_lengths: np.ndarray,
    auc_seed: int,
    want_auc: bool = True,
) -> tuple[dict[str, MetricReport], dict[str, PRCurve], dict[str, float], dict[float, MetricReport]]:
    cache = ModelCache(data.training)
    pairs = draw_auc_pairs(data, config.auc_samples, auc_seed) if want_auc and config.auc_samples else None
    reports: dict[str, MetricReport] = {}
    curves: dict[str, PRCurve] = {}
    chosen: dict[str, float] = {}
    scan: dict[float, MetricReport] = {}
    for method in config.methods:
        if method == "IC-NBI":
            evals: dict[float, Evaluation] = {}
            for beta in config.beta_grid:
                ev = evaluate(cache.recommender(method, beta), data, config.list_length, pairs, pr_lengths)
                evals[beta] = ev
                scan[beta] = ev.report
            chosen = select_betas(scan)
            reports[method] = _combine_icnbi(scan, chosen)
            curves[method] = evals[chosen["precision"]].curve
        else:
            ev = evaluate(cache.recommender(method), data, config.list_length, pairs, pr_lengths)
            reports[method] = ev.report
            curves[method] = ev.curve
    return reports, curves, chosen, scan


def run_experiment(
    config: ExperimentConfig,
    want_auc: bool = True,
    progress: Callable[[str], None] | None = None,
) -> RunResult:
    """Evaluate every configured method on ``config.runs`` seeded splits.

    Run ``r`` (1-based) splits with seed ``config.seed + r`` and draws its
    AUC samples from the same seed on a separate stream. IC-NBI is scanned
    over ``config.beta_grid`` on each run's test links; ranking score,
    precision and AUC are reported at their own optimum, the remaining
    metrics at the ranking-score optimum.
    """
    note = progress or (lambda msg: log.info(msg))
    t0 = time.perf_counter()
    graph, summary, digest = load_dataset(config)
    result = RunResult(config, summary, digest)
    result.timings["ingest"] = time.perf_counter() - t0
    note(f"dataset: {summary.users} users, {summary.objects} objects, {summary.links} links")
    if config.pr_lengths is None:
        top = min(graph.num_objects, max(1, int(round(config.test_fraction * graph.num_links))))
        pr_lengths = np.arange(1, top + 1)
    else:
        pr_lengths = np.asarray(config.pr_lengths, dtype=np.int64)
    for r, seed in enumerate(config.run_seeds(), start=1):
        t = time.perf_counter()
        data = split(graph, config.test_fraction, seed)
        reports, curves, chosen, scan = evaluate_split(data, config, pr_lengths, seed, want_auc)
        result.reports.append(reports)
        result.curves.append(curves)
        result.betas.append(chosen)
        result.beta_scans.append(scan)
        elapsed = time.perf_counter() - t
        result.timings[f"run_{r:02d}"] = elapsed
        note(f"run {r}/{config.runs} (seed {seed}) done in {elapsed:.1f}s")
    result.timings["total"] = time.perf_counter() - t0
    return result


def _fmt(x: float) -> str:
    return repr(float(x))


def _cell(metric: str, mean: float, std: float) -> str:
    if np.isnan(mean):
        return "-"
    if metric == "popularity":
        return f"{mean:.0f}({std:.4f})"
    return f"{mean:.4f}({std:.4f})"


def format_table(result: RunResult) -> str:
    agg = result.aggregate()
    header = ["method", "<r>", "P", "AUC", "I", "H", "<k>"]
    rows = [header]
    for method, stats in agg.items():
        rows.append([method] + [_cell(m, *stats[m]) for m in METRIC_NAMES])
    widths = [max(len(row[i]) for row in rows) for i in range(len(header))]
    lines = ["  ".join(cell.ljust(w) for cell, w in zip(row, widths)).rstrip() for row in rows]
    cfg = result.config
    lines.append("")
    lines.append(
        f"L={cfg.list_length}, runs={cfg.runs}, test_fraction={cfg.test_fraction}, "
        f"auc_samples={cfg.auc_samples}; mean(std) over runs"
    )
    if "IC-NBI" in cfg.methods:
        lines.append(
            "IC-NBI: <r>, P, AUC at their own optimal beta, I/H/<k> at the <r>-optimal beta; "
            "beta chosen per run on that run's test links (no validation split)"
        )
    return "\n".join(lines) + "\n"


def write_outputs(result: RunResult, out_dir: str | Path, curves_only: bool = False) -> Path:
    out = Path(out_dir)
    (out / "runs").mkdir(parents=True, exist_ok=True)
    cfg = result.config
    manifest = {
        "package": "csirec",
        "version": __version__,
        "numpy": np.__version__,
        "scipy": scipy.__version__,
        "config": {k: v for k, v in cfg.to_dict().items() if k != "out"},
        "dataset_sha256": result.dataset_sha256,
        "dataset_summary": {
            "users": result.summary.users,
            "objects": result.summary.objects,
            "links": result.summary.links,
            "sparsity": result.summary.sparsity,
        },
        "run_seeds": cfg.run_seeds(),
        "seeding": "split: PCG64(SeedSequence([seed, 0])); AUC: PCG64(SeedSequence([seed, 1]))",
        "icnbi_selected_beta": result.betas,
        "icnbi_selection": "per run and metric on that run's test links (oracle selection)",
        "curves_only": curves_only,
    }
    with open(out / "manifest.json", "w", encoding="utf-8", newline="\n") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")

    for r, curves in enumerate(result.curves, start=1):
        with open(out / "runs" / f"run_{r:02d}_pr.csv", "w", encoding="utf-8", newline="\n") as fh:
            fh.write("method,L,precision,recall\n")
            for method, curve in curves.items():
                for length, p, rc in curve.rows():
                    fh.write(f"{method},{length},{_fmt(p)},{_fmt(rc)}\n")
    with open(out / "pr_curves.csv", "w", encoding="utf-8", newline="\n") as fh:
        fh.write("method,L,precision,recall\n")
        for method, curve in result.mean_curves().items():
            for length, p, rc in curve.rows():
                fh.write(f"{method},{length},{_fmt(p)},{_fmt(rc)}\n")
    if curves_only:
        return out

    cols = ",".join(METRIC_NAMES)
    for r, (reports, chosen, scan) in enumerate(zip(result.reports, result.betas, result.beta_scans), start=1):
        with open(out / "runs" / f"run_{r:02d}.csv", "w", encoding="utf-8", newline="\n") as fh:
            fh.write(f"method,beta,{cols}\n")
            for method, rep in reports.items():
                beta = "" if method != "IC-NBI" else _fmt(chosen["ranking_score"])
                fh.write(f"{method},{beta}," + ",".join(_fmt(v) for v in rep.as_dict().values()) + "\n")
        if scan:
            with open(out / "runs" / f"run_{r:02d}_icnbi.csv", "w", encoding="utf-8", newline="\n") as fh:
                fh.write(f"beta,{cols}\n")
                for beta, rep in scan.items():
                    fh.write(_fmt(beta) + "," + ",".join(_fmt(v) for v in rep.as_dict().values()) + "\n")
    agg = result.aggregate()
    with open(out / "table.csv", "w", encoding="utf-8", newline="\n") as fh:
        fh.write("method," + ",".join(f"{m}_mean,{m}_std" for m in METRIC_NAMES) + "\n")
        for method, stats in agg.items():
            fh.write(method + "," + ",".join(f"{_fmt(a)},{_fmt(b)}" for a, b in stats.values()) + "\n")
    with open(out / "table.txt", "w", encoding="utf-8", newline="\n") as fh:
        fh.write(format_table(result))
    return out


def read_run_csv(path: str | Path) -> dict[str, dict[str, float]]:
    rows = {}
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().strip().split(",")
        for line in fh:
            parts = line.strip().split(",")
            rows[parts[0]] = {k: float(v) for k, v in zip(header[2:], parts[2:])}
    return rows
