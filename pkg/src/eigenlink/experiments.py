"""Evaluation pipeline: split -> score from the training graph -> rank -> metrics.

Work units are ``(network, index config(s), seed)`` and run independently,
optionally in a process pool. Results are folded back in input order, so
the worker count never changes any metric value.
"""

from __future__ import annotations

import csv
import json
import logging
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import EigenlinkError
from .evaluation import RankAccumulator, split_edges, winning_rate
from .graph import Graph
from .similarity import (
    DEFAULT_DENSE_CAP,
    SPECTRAL,
    IndexConfig,
    IndexId,
    iter_candidate_blocks,
    make_scorer,
)
from .spectral import top_eigenpairs

log = logging.getLogger(__name__)

RUN_COLUMNS = ["network", "index", "params", "test_fraction", "seed", "auc", "aupr", "seconds"]


@dataclass
class RunResult:
    network: str
    config: IndexConfig
    seed: int
    test_fraction: float
    auc: float = math.nan
    aupr: float = math.nan
    seconds: float = math.nan
    delta: float = math.nan
    error: str | None = None


@dataclass
class EvalReport:
    """All runs of one index configuration on one network."""

    network: str
    config: IndexConfig
    test_fraction: float
    seeds: list[int] = field(default_factory=list)
    auc: list[float] = field(default_factory=list)
    aupr: list[float] = field(default_factory=list)
    seconds: list[float] = field(default_factory=list)
    deltas: list[float] = field(default_factory=list)
    failures: list[tuple[int, str]] = field(default_factory=list)

    def add(self, r: RunResult) -> None:
        if r.error is not None:
            self.failures.append((r.seed, r.error))
            return
        self.seeds.append(r.seed)
        self.auc.append(r.auc)
        self.aupr.append(r.aupr)
        self.seconds.append(r.seconds)
        self.deltas.append(r.delta)

    @property
    def n_ok(self) -> int:
        return len(self.seeds)

    @staticmethod
    def _mean(xs):
        return float(np.mean(xs)) if xs else math.nan

    @staticmethod
    def _std(xs):
        return float(np.std(xs)) if xs else math.nan

    @property
    def mean_auc(self) -> float:
        return self._mean(self.auc)

    @property
    def mean_aupr(self) -> float:
        return self._mean(self.aupr)

    def aggregate(self) -> dict:
        return {
            "network": self.network,
            "index": self.config.index_id.value,
            "params": self.config.params_str,
            "test_fraction": self.test_fraction,
            "runs": self.n_ok,
            "failed": len(self.failures),
            "mean_auc": self.mean_auc,
            "std_auc": self._std(self.auc),
            "mean_aupr": self.mean_aupr,
            "std_aupr": self._std(self.aupr),
        }

    def rows(self) -> list[dict]:
        return [
            {"network": self.network, "index": self.config.index_id.value,
             "params": self.config.params_str, "test_fraction": self.test_fraction,
             "seed": s, "auc": a, "aupr": p, "seconds": t}
            for s, a, p, t in zip(self.seeds, self.auc, self.aupr, self.seconds)
        ]


# single runs

def _sample_non_links(g: Graph, n: int, rng: np.random.Generator) -> np.ndarray:
    total = g.n * (g.n - 1) // 2
    if total - g.m <= 0:
        raise EigenlinkError("graph is complete; no non-links to sample")
    out = np.empty((0, 2), dtype=np.int64)
    while len(out) < n:
        a = rng.integers(0, g.n, size=2 * (n - len(out)) + 16)
        b = rng.integers(0, g.n, size=len(a))
        keep = a != b
        x, y = np.minimum(a[keep], b[keep]), np.maximum(a[keep], b[keep])
        keys = x * g.n + y
        ok = ~np.isin(keys, g.edge_keys)
        out = np.vstack([out, np.column_stack([x[ok], y[ok]])])
    return out[:n]


def _metrics(g: Graph, split, train: Graph, scorer, auc_mode: str, auc_n: int, seed: int):
    test = split.test
    pos_scores = scorer.score_pairs(test)
    acc = RankAccumulator(test[:, 0] * g.n + test[:, 1], pos_scores)
    for keys, scores in iter_candidate_blocks(scorer, train):
        acc.add(keys, scores)
    aupr = acc.aupr()
    if auc_mode == "exact":
        auc = acc.auc()
    else:
        rng = np.random.default_rng(seed)
        a = rng.choice(pos_scores, size=auc_n)
        b = scorer.score_pairs(_sample_non_links(g, auc_n, rng))
        auc = float(((a > b).sum() + 0.5 * (a == b).sum()) / auc_n)
    return auc, aupr


def run_grid(g: Graph, network: str, configs: Sequence[IndexConfig], seed: int,
             test_fraction: float = 0.1, auc_mode: str = "exact", auc_n: int = 100_000,
             dense_cap: int = DEFAULT_DENSE_CAP) -> list[RunResult]:
    """One random split, scored under each of ``configs``.

    The split and the training-graph spectrum are shared by all configs;
    ``seconds`` covers only each config's own scoring and ranking (plus the
    spectrum for spectral indices).
    """
    split = split_edges(g, test_fraction, seed)
    train = split.train_graph(g)
    spectrum = None
    spectrum_time = 0.0
    out = []
    for config in configs:
        r = RunResult(network, config, seed, test_fraction)
        try:
            t0 = time.perf_counter()
            if config.index_id in SPECTRAL or config.index_id is IndexId.KATZ:
                if spectrum is None:
                    ts = time.perf_counter()
                    spectrum = top_eigenpairs(train, 2, seed=seed)
                    spectrum_time = time.perf_counter() - ts
                    t0 = time.perf_counter()
                r.delta = spectrum.delta
            scorer = make_scorer(train, config, spectrum, dense_cap, seed)
            r.auc, r.aupr = _metrics(g, split, train, scorer, auc_mode, auc_n, seed)
            r.seconds = time.perf_counter() - t0
            if config.index_id in SPECTRAL:
                r.seconds += spectrum_time
        except (EigenlinkError, ValueError, np.linalg.LinAlgError) as exc:
            r.error = f"{type(exc).__name__}: {exc}"
        out.append(r)
    return out


def _unit(args):
    return run_grid(*args)


def _map(fn, units: list, workers: int) -> list:
    if workers <= 1 or len(units) <= 1:
        return [fn(u) for u in units]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, units))


def evaluate(graphs: dict[str, Graph], configs: Sequence[IndexConfig], seeds: Sequence[int],
             test_fraction: float = 0.1, auc_mode: str = "exact", auc_n: int = 100_000,
             dense_cap: int = DEFAULT_DENSE_CAP, workers: int = 1) -> list[EvalReport]:
    """Evaluate every config on every network over the given seeds.

    All configs share each seed's split. Reports come back ordered by
    network, then config.
    """
    units = [(g, name, list(configs), seed, test_fraction, auc_mode, auc_n, dense_cap)
             for name, g in graphs.items() for seed in seeds]
    results = _map(_unit, units, workers)
    reports: dict[tuple[str, int], EvalReport] = {}
    for name in graphs:
        for i, c in enumerate(configs):
            reports[(name, i)] = EvalReport(name, c, test_fraction)
    for unit, runs in zip(units, results):
        for i, r in enumerate(runs):
            reports[(unit[1], i)].add(r)
    for rep in reports.values():
        for seed, msg in rep.failures:
            log.warning("%s %s seed %d failed: %s", rep.network, rep.config.label, seed, msg)
    return list(reports.values())


# summaries and serialization

def winning_rates(reports: Iterable[EvalReport], metric: str = "auc", tie_tol: float = 1e-4) -> dict[str, float]:
    table: dict[str, dict[str, float]] = {}
    for rep in reports:
        value = rep.mean_auc if metric == "auc" else rep.mean_aupr
        table.setdefault(rep.config.label, {})[rep.network] = value
    complete = {k: v for k, v in table.items() if all(not math.isnan(x) for x in v.values())}
    if not complete:
        return {}
    nets = set.intersection(*(set(v) for v in complete.values()))
    return winning_rate({k: {n: v[n] for n in nets} for k, v in complete.items()}, tie_tol)


def summary(reports: Sequence[EvalReport]) -> dict:
    fractions = sorted({r.test_fraction for r in reports})
    out = {"aggregates": [r.aggregate() for r in reports], "winning_rate": {}}
    for f in fractions:
        reps = [r for r in reports if r.test_fraction == f]
        out["winning_rate"][repr(f)] = {m: winning_rates(reps, m) for m in ("auc", "aupr")}
    return out


def _fmt(x) -> str:
    if isinstance(x, float):
        return repr(x)
    return str(x)


def write_runs_csv(reports: Sequence[EvalReport], fh, timings: bool = True) -> None:
    cols = RUN_COLUMNS if timings else RUN_COLUMNS[:-1]
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(cols)
    for rep in reports:
        for row in rep.rows():
            w.writerow([_fmt(row[c]) for c in cols])


def read_runs_csv(fh) -> list[EvalReport]:
    reports: dict[tuple, EvalReport] = {}
    for row in csv.DictReader(fh):
        label = row["index"] + (":" + row["params"] if row["params"] else "")
        config = IndexConfig.parse(label)
        frac = float(row["test_fraction"])
        key = (row["network"], config.label, frac)
        rep = reports.setdefault(key, EvalReport(row["network"], config, frac))
        rep.seeds.append(int(row["seed"]))
        rep.auc.append(float(row["auc"]))
        rep.aupr.append(float(row["aupr"]))
        rep.seconds.append(float(row["seconds"]) if "seconds" in row else math.nan)
    return list(reports.values())


def write_json(obj, fh) -> None:
    json.dump(obj, fh, indent=2, sort_keys=False, allow_nan=True)
    fh.write("\n")


# parameter sweeps

def sweep(graphs: dict[str, Graph], base: IndexConfig, grid: Sequence[float], seeds: Sequence[int],
          test_fraction: float = 0.1, auc_mode: str = "exact", auc_n: int = 100_000,
          dense_cap: int = DEFAULT_DENSE_CAP, workers: int = 1,
          references: Sequence[IndexConfig] = ()) -> tuple[list[EvalReport], list[dict], dict]:
    """Evaluate ``base`` at every grid value (plus reference indices) on
    shared splits; returns reports, curve rows and the best value per metric."""
    configs = [base.with_param(v) for v in grid] + list(references)
    reports = evaluate(graphs, configs, seeds, test_fraction, auc_mode, auc_n, dense_cap, workers)
    curve, best = [], {}
    for rep in reports:
        agg = rep.aggregate()
        is_ref = rep.config.index_id is not base.index_id
        agg["param"] = base.param_name
        agg["value"] = math.nan if is_ref else rep.config.param
        agg["reference"] = is_ref
        agg["mean_delta"] = float(np.nanmean(rep.deltas)) if rep.deltas and not \
            all(math.isnan(d) for d in rep.deltas) else math.nan
        curve.append(agg)
    for name in graphs:
        rows = [c for c in curve if c["network"] == name and not c["reference"] and c["runs"]]
        best[name] = {}
        for metric in ("auc", "aupr"):
            if rows:
                top = max(rows, key=lambda c: c[f"mean_{metric}"])
                best[name][metric] = {"value": top["value"], f"mean_{metric}": top[f"mean_{metric}"]}
    return reports, curve, best


def cle_star_alpha_for_cle(g: Graph) -> float:
    """The CLE* parameter that reproduces CLE on ``g``: ``lambda_2^2 / lambda_1^2``."""
    return top_eigenpairs(g, 2).delta


# timing

def time_scoring(g: Graph, config: IndexConfig, dense_cap: int = DEFAULT_DENSE_CAP,
                 repeats: int = 1) -> float:
    """Best-of-``repeats`` seconds to build the scorer and score every non-linked pair."""
    best = math.inf
    for _ in range(repeats):
        t0 = time.perf_counter()
        spectrum = top_eigenpairs(g, 2) if config.index_id in SPECTRAL else None
        scorer = make_scorer(g, config, spectrum, dense_cap)
        checksum = 0.0
        for _, scores in iter_candidate_blocks(scorer, g):
            checksum += float(scores.sum())
        best = min(best, time.perf_counter() - t0)
    return best


def loglog_slope(ns: Sequence[float], seconds: Sequence[float]) -> float:
    x = np.log(np.asarray(ns, dtype=float))
    y = np.log(np.asarray(seconds, dtype=float))
    return float(np.polyfit(x, y, 1)[0])
