"""Monte-Carlo sweeps over (n, p) cells.

Every trial is keyed by ``(base_seed, n, p_index, trial)``; graph attempts add
the attempt number and the marked vertex uses :data:`rng.MARK_TAG`, so results
do not depend on execution order or thread count.
"""

from __future__ import annotations

import csv
import json
import logging
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence, Union

import numpy as np

from . import rng
from .evolution import (
    DEFAULT_GRID,
    EvolutionSeries,
    SearchSetup,
    optimal_time,
    probability_series,
    search_hamiltonian,
)
from .graph import Graph, is_connected, sample_er
from .spectral import (
    DEFAULT_C,
    BoundsReport,
    bound_report,
    compute_rates,
    eig_sym,
    resonant_rate,
)

log = logging.getLogger(__name__)

MAX_REJECTIONS = 50
CLOSENESS_THRESHOLD = 0.1
BOUND_FLAGS = ("lambda1_bound_ok", "opnorm_ok", "second_ok", "overlap_ok")
SWEEP_RATE_KINDS = ("exact", "simplified", "resonant")
SUMMARY_FIELDS = ("n", "p", "rate_kind", "trials", "mean_pmax", "std_pmax", "mean_tstar", "rejections")


@dataclass(frozen=True)
class PRule:
    """Edge probabilities per n: explicit ``list``, ``exp`` (p = n**-a) or ``logfactor`` (p = c ln n / n)."""

    kind: str
    values: tuple

    def __post_init__(self):
        if self.kind not in ("list", "exp", "logfactor"):
            raise ValueError(f"unknown p rule {self.kind!r}")
        if not self.values:
            raise ValueError("p rule needs at least one value")
        object.__setattr__(self, "values", tuple(float(v) for v in self.values))

    def probabilities(self, n: int) -> list[float]:
        if self.kind == "list":
            ps = list(self.values)
        elif self.kind == "exp":
            ps = [n ** (-a) for a in self.values]
        else:
            ps = [c * math.log(n) / n for c in self.values]
        for p in ps:
            if not 0.0 < p <= 1.0:
                raise ValueError(f"p rule {self.kind}{self.values} gives p={p} outside (0, 1] at n={n}")
        return ps


@dataclass(frozen=True)
class SweepConfig:
    n_list: tuple
    p_rule: PRule
    trials_per_cell: int = 10
    base_seed: int = 0
    rate_kinds: tuple = ("exact", "simplified")
    marked_policy: Union[str, int] = "random"
    C: float = DEFAULT_C
    time_grid_size: int = DEFAULT_GRID
    threads: Optional[int] = None
    max_rejections: int = MAX_REJECTIONS

    def __post_init__(self):
        if self.trials_per_cell < 1:
            raise ValueError("trials_per_cell must be >= 1")
        if not self.rate_kinds or any(k not in SWEEP_RATE_KINDS for k in self.rate_kinds):
            raise ValueError(f"rate kinds must be a non-empty subset of {SWEEP_RATE_KINDS}")
        if self.marked_policy != "random" and not isinstance(self.marked_policy, int):
            raise ValueError("marked_policy must be 'random' or a vertex index")
        if self.time_grid_size < 3:
            raise ValueError("time_grid_size must be >= 3")
        if self.max_rejections < 1:
            raise ValueError("max_rejections must be >= 1")
        for n in self.n_list:
            self.p_rule.probabilities(n)


@dataclass
class TrialRecord:
    n: int
    p: float
    p_index: int
    trial: int
    seed: int
    marked: int
    rate_kind: str
    gamma: float
    T: float
    t_star: float
    p_max: float
    series: EvolutionSeries = field(repr=False)

    @property
    def series_name(self) -> str:
        return f"series_n{self.n}_p{self.p_index}_trial{self.trial}_{self.rate_kind}.csv"


@dataclass
class CellStats:
    n: int
    p: float
    p_index: int
    trials: int
    rejections: int = 0
    failed: bool = False
    bound_passes: dict = field(default_factory=dict)
    w_inequality_passes: int = 0
    w_fraction_mean: float = float("nan")
    w_fraction_min: float = float("nan")
    summaries: dict = field(default_factory=dict)


@dataclass
class TrialGraph:
    graph: Optional[Graph]
    seed: Optional[int]
    rejections: int


@dataclass
class SweepReport:
    config: SweepConfig
    records: list
    cells: list
    closeness_threshold: float = CLOSENESS_THRESHOLD

    def summary_rows(self) -> list[dict]:
        rows = []
        for cell in self.cells:
            for kind in self.config.rate_kinds:
                if kind in cell.summaries:
                    rows.append(cell.summaries[kind])
        return rows

    def comparisons(self) -> list[dict]:
        """Exact-vs-simplified mean p_max per cell, plus the worst cell per n."""
        out = []
        for cell in self.cells:
            s = cell.summaries
            if "exact" not in s or "simplified" not in s:
                continue
            diff = s["exact"]["mean_pmax"] - s["simplified"]["mean_pmax"]
            out.append({
                "n": cell.n,
                "p": cell.p,
                "mean_pmax_exact": s["exact"]["mean_pmax"],
                "mean_pmax_simplified": s["simplified"]["mean_pmax"],
                "difference": diff,
                "close": abs(diff) <= self.closeness_threshold,
                "larger_discrepancy": False,
            })
        for n in {c["n"] for c in out}:
            group = [c for c in out if c["n"] == n]
            if len(group) > 1:
                max(group, key=lambda c: abs(c["difference"]))["larger_discrepancy"] = True
        return out

    def metadata(self) -> dict:
        cfg = self.config
        return {
            "n_list": list(cfg.n_list),
            "p_rule": {"kind": cfg.p_rule.kind, "values": list(cfg.p_rule.values)},
            "trials_per_cell": cfg.trials_per_cell,
            "base_seed": cfg.base_seed,
            "rate_kinds": list(cfg.rate_kinds),
            "marked_policy": cfg.marked_policy,
            "C": cfg.C,
            "time_grid_size": cfg.time_grid_size,
            "max_rejections": cfg.max_rejections,
            "closeness_threshold": self.closeness_threshold,
            "failed_cells": [{"n": c.n, "p": c.p} for c in self.cells if c.failed],
            "comparisons": self.comparisons(),
            "bounds": [
                {
                    "n": c.n,
                    "p": c.p,
                    "trials": c.trials,
                    "rejections": c.rejections,
                    "passes": c.bound_passes,
                    "w_inequality_passes": c.w_inequality_passes,
                    "w_fraction_mean": c.w_fraction_mean,
                    "w_fraction_min": c.w_fraction_min,
                }
                for c in self.cells
            ],
        }


def trial_seed(base_seed: int, n: int, p_index: int, trial: int, attempt: int) -> int:
    return rng.derive_seed(base_seed, n, p_index, trial, attempt)


def marked_vertex(base_seed: int, n: int, p_index: int, trial: int) -> int:
    return rng.randbelow(rng.derive_seed(base_seed, n, p_index, trial, rng.MARK_TAG), n)


def sample_connected(n: int, p: float, base_seed: int, p_index: int, trial: int,
                     max_rejections: int = MAX_REJECTIONS) -> TrialGraph:
    """First connected sample in the attempt sequence; ``graph`` is None after ``max_rejections`` failures."""
    for attempt in range(max_rejections):
        seed = trial_seed(base_seed, n, p_index, trial, attempt)
        g = sample_er(n, p, seed)
        if g.num_edges > 0 and is_connected(g):
            return TrialGraph(g, seed, attempt)
    return TrialGraph(None, None, max_rejections)


def _resolve_marked(policy, base_seed, n, p_index, trial) -> int:
    if policy == "random":
        return marked_vertex(base_seed, n, p_index, trial)
    if not 0 <= policy < n:
        raise ValueError(f"fixed marked vertex {policy} out of range for n={n}")
    return int(policy)


def _run_trial(cfg: SweepConfig, n: int, p: float, p_index: int, trial: int):
    tg = sample_connected(n, p, cfg.base_seed, p_index, trial, cfg.max_rejections)
    if tg.graph is None:
        return tg, None, []
    g = tg.graph
    decomp_a = eig_sym(g.as_float())
    bounds = bound_report(g, cfg.C, decomp=decomp_a)
    rates = compute_rates(g, decomp=decomp_a)
    w = _resolve_marked(cfg.marked_policy, cfg.base_seed, n, p_index, trial)

    gammas = {"exact": rates.gamma_exact, "simplified": rates.gamma_simple}
    if "resonant" in cfg.rate_kinds:
        gammas["resonant"] = resonant_rate(decomp_a, w)[0]

    exact_setup = SearchSetup(g, rates.gamma_exact, w, "exact")
    exact_decomp = eig_sym(search_hamiltonian(g, rates.gamma_exact, w))
    T, _ = optimal_time(exact_setup, exact_decomp, cfg.time_grid_size)
    grid = np.linspace(0.0, 2.0 * T, cfg.time_grid_size)

    records = []
    for kind in cfg.rate_kinds:
        setup = SearchSetup(g, gammas[kind], w, kind)
        decomp = exact_decomp if kind == "exact" else None
        series = probability_series(setup, grid, decomp)
        records.append(TrialRecord(n, p, p_index, trial, tg.seed, w, kind, setup.gamma, T,
                                   series.t_star, series.p_max, series))
    return tg, bounds, records


def _cell_keys(cfg: SweepConfig):
    for n in cfg.n_list:
        for p_index, p in enumerate(cfg.p_rule.probabilities(n)):
            yield n, p, p_index


def _parallel_map(fn, tasks, threads):
    workers = threads or os.cpu_count() or 1
    if workers <= 1 or len(tasks) <= 1:
        return [fn(*t) for t in tasks]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda t: fn(*t), tasks))


def _aggregate_bounds(cell: CellStats, reports: Sequence[BoundsReport]) -> None:
    cell.bound_passes = {flag: sum(bool(getattr(r, flag)) for r in reports) for flag in BOUND_FLAGS}
    cell.w_inequality_passes = sum(r.w_set_size >= r.n * (1.0 - r.beta) for r in reports)
    if reports:
        fr = [r.w_set_size / r.n for r in reports]
        cell.w_fraction_mean = float(np.mean(fr))
        cell.w_fraction_min = float(np.min(fr))


def _summary(n, p, kind, recs, rejections) -> dict:
    pm = np.array([r.p_max for r in recs])
    ts = np.array([r.t_star for r in recs])
    return {
        "n": n,
        "p": p,
        "rate_kind": kind,
        "trials": len(recs),
        "mean_pmax": float(pm.mean()),
        "std_pmax": float(pm.std(ddof=1)) if pm.size > 1 else 0.0,
        "mean_tstar": float(ts.mean()),
        "rejections": rejections,
    }


def run_sweep(cfg: SweepConfig) -> SweepReport:
    """Run every (n, p, trial) and aggregate per cell."""
    tasks = [(cfg, n, p, pi, t) for n, p, pi in _cell_keys(cfg) for t in range(cfg.trials_per_cell)]
    results = _parallel_map(_run_trial, tasks, cfg.threads)
    by_task = {(t[1], t[3], t[4]): r for t, r in zip(tasks, results)}

    records, cells = [], []
    for n, p, pi in _cell_keys(cfg):
        cell = CellStats(n, p, pi, trials=0)
        reports, cell_records = [], []
        for trial in range(cfg.trials_per_cell):
            tg, bounds, recs = by_task[(n, pi, trial)]
            cell.rejections += tg.rejections
            if tg.graph is None:
                cell.failed = True
                break
            reports.append(bounds)
            cell_records.extend(recs)
        if cell.failed:
            log.warning("cell n=%d p=%g failed: %d consecutive disconnected samples", n, p, cfg.max_rejections)
            cells.append(cell)
            continue
        cell.trials = len(reports)
        _aggregate_bounds(cell, reports)
        for kind in cfg.rate_kinds:
            recs = [r for r in cell_records if r.rate_kind == kind]
            cell.summaries[kind] = _summary(n, p, kind, recs, cell.rejections)
        records.extend(cell_records)
        cells.append(cell)
        log.info("cell n=%d p=%.5g done (%d rejections)", n, p, cell.rejections)
    return SweepReport(cfg, records, cells)


@dataclass
class AasCell:
    n: int
    p: float
    epsilon: float
    trials: int
    rejections: int
    failed: bool
    pass_rates: dict
    w_inequality_rate: float
    reports: list = field(repr=False)


def _bounds_trial(n, p, p_index, trial, base_seed, C, max_rejections):
    tg = sample_connected(n, p, base_seed, p_index, trial, max_rejections)
    if tg.graph is None:
        return tg, None
    return tg, bound_report(tg.graph, C)


def aas_statistics(n_list, p_rule: PRule, trials: int, C: float = DEFAULT_C,
                   base_seed: int = 0, threads: Optional[int] = None,
                   max_rejections: int = MAX_REJECTIONS) -> list[AasCell]:
    """Per-cell pass fractions of the four concentration inequalities and the W(G) bound."""
    keys = [(n, p, pi) for n in n_list for pi, p in enumerate(p_rule.probabilities(n))]
    tasks = [(n, p, pi, t, base_seed, C, max_rejections) for n, p, pi in keys for t in range(trials)]
    results = _parallel_map(_bounds_trial, tasks, threads)
    by_task = {(t[0], t[2], t[3]): r for t, r in zip(tasks, results)}
    out = []
    for n, p, pi in keys:
        reports, rejections, failed = [], 0, False
        for t in range(trials):
            tg, rep = by_task[(n, pi, t)]
            rejections += tg.rejections
            if rep is None:
                failed = True
                break
            reports.append(rep)
        k = max(len(reports), 1)
        rates = {flag: sum(bool(getattr(r, flag)) for r in reports) / k for flag in BOUND_FLAGS}
        w_rate = sum(r.w_set_size >= r.n * (1.0 - r.beta) for r in reports) / k
        eps = math.sqrt(math.log(n) / (n * p))
        out.append(AasCell(n, p, eps, len(reports), rejections, failed, rates, w_rate, reports))
    return out


def emit_figure1_data(report: SweepReport, destination) -> list[Path]:
    """Write per-series CSVs, ``summary.csv`` and ``metadata.json`` under ``destination``."""
    dest = Path(destination)
    try:
        dest.mkdir(parents=True, exist_ok=True)
        written = []
        for rec in report.records:
            path = dest / rec.series_name
            rec.series.write_csv(path, scale=2.0 * rec.T, comments={
                "n": rec.n,
                "p": repr(rec.p),
                "seed": rec.seed,
                "rate_kind": rec.rate_kind,
                "T": repr(rec.T),
                "marked": rec.marked,
                "gamma": repr(rec.gamma),
            })
            written.append(path)
        summary = dest / "summary.csv"
        with open(summary, "w", encoding="utf-8", newline="") as fh:
            writer = csv.DictWriter(fh, fieldnames=SUMMARY_FIELDS, lineterminator="\n")
            writer.writeheader()
            for row in report.summary_rows():
                writer.writerow({k: repr(v) if isinstance(v, float) else v for k, v in row.items()})
        written.append(summary)
        meta = dest / "metadata.json"
        meta.write_text(json.dumps(report.metadata(), indent=2, sort_keys=True) + "\n", encoding="utf-8")
        written.append(meta)
    except OSError as exc:
        raise OSError(f"cannot write figure data under {dest}: {exc}") from exc
    return written
