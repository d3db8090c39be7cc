"""Train/test splits and ranking metrics (AUC, AUPR, winning rate, Mann-Whitney U)."""

from __future__ import annotations

import math
from dataclasses import dataclass
from decimal import ROUND_HALF_UP, Decimal
from typing import Mapping, Sequence

import numpy as np
from scipy import stats

from .errors import DataError
from .graph import Graph
from .similarity import ScoreTable

__all__ = [
    "EdgeSplit",
    "split_edges",
    "n_test_links",
    "auc_exact",
    "auc_sampled",
    "aupr",
    "RankAccumulator",
    "winning_rate",
    "mann_whitney_u",
]


def n_test_links(m: int, test_fraction: float) -> int:
    """Round-half-up of ``test_fraction * m``."""
    value = Decimal(repr(float(test_fraction))) * m
    return int(value.quantize(Decimal(1), rounding=ROUND_HALF_UP))


@dataclass(frozen=True, eq=False)
class EdgeSplit:
    train: np.ndarray
    test: np.ndarray
    seed: int
    test_fraction: float
    n: int

    def train_graph(self, g: Graph) -> Graph:
        return g.with_edges(self.train)

    @property
    def test_keys(self) -> np.ndarray:
        return np.sort(self.test[:, 0] * self.n + self.test[:, 1])


def split_edges(g: Graph, test_fraction: float, seed: int) -> EdgeSplit:
    """Uniform random division of the links into training and test parts."""
    if not 0.0 < test_fraction < 1.0:
        raise ValueError("test_fraction must lie strictly between 0 and 1")
    n_test = n_test_links(g.m, test_fraction)
    if g.m - n_test < 1:
        raise DataError("split leaves the training set empty")
    if n_test < 1:
        raise DataError("split leaves the test set empty")
    rng = np.random.default_rng(seed)
    perm = rng.permutation(g.m)
    test_idx = np.sort(perm[:n_test])
    mask = np.ones(g.m, dtype=bool)
    mask[test_idx] = False
    return EdgeSplit(train=g.edges[mask], test=g.edges[test_idx], seed=seed,
                     test_fraction=float(test_fraction), n=g.n)


def _labels(scores: ScoreTable, test) -> np.ndarray:
    test = np.asarray(test, dtype=np.int64).reshape(-1, 2)
    if len(test) == 0:
        raise DataError("empty test set")
    n = int(max(scores.pairs.max(initial=0), test.max())) + 1
    keys = scores.pairs[:, 0] * n + scores.pairs[:, 1]
    tk = np.minimum(test[:, 0], test[:, 1]) * n + np.maximum(test[:, 0], test[:, 1])
    pos = np.isin(keys, tk)
    if pos.sum() != len(np.unique(tk)):
        raise DataError("some test links are missing from the score table")
    if pos.all():
        raise DataError("no non-links among the candidates")
    return pos


def auc_exact(scores: ScoreTable, test) -> float:
    """Rank-based AUC with midranks for ties.

    This is the exact expectation of the sampling estimator: the fraction
    of (missing link, non-link) comparisons won, ties counting one half.
    """
    pos = _labels(scores, test)
    ranks = stats.rankdata(scores.scores)
    p = int(pos.sum())
    q = len(pos) - p
    return float((ranks[pos].sum() - p * (p + 1) / 2) / (p * q))


def auc_sampled(scores: ScoreTable, test, n: int = 100_000, seed: int = 0) -> float:
    """The sampling estimator: draw ``n`` (missing link, non-link) pairs
    with replacement, score 1 for a win and 0.5 for a tie."""
    if n < 1:
        raise ValueError("n must be >= 1")
    pos = _labels(scores, test)
    rng = np.random.default_rng(seed)
    a = rng.choice(scores.scores[pos], size=n)
    b = rng.choice(scores.scores[~pos], size=n)
    return float(((a > b).sum() + 0.5 * (a == b).sum()) / n)


def _average_precision(pos_ranks: np.ndarray) -> float:
    r = np.sort(pos_ranks)
    hits = np.arange(1, len(r) + 1)
    return float(np.sum(hits / r) / len(r))


def aupr(scores: ScoreTable, test) -> float:
    """Non-interpolated area under the precision-recall curve.

    Candidates are ranked by descending score, ties broken by lexicographic
    pair; each recovered missing link adds ``precision * (1 / |E^P|)``.
    """
    pos = _labels(scores, test)
    order = scores.ranking()
    rank_of = np.empty(len(order), dtype=np.int64)
    rank_of[order] = np.arange(1, len(order) + 1)
    return _average_precision(rank_of[pos])


class RankAccumulator:
    """Streaming AUC/AUPR over a candidate ranking.

    The scores of the positives are given up front; candidate blocks (all
    pairs, positives included) are then fed in any order. Memory is
    ``O(positives + block)``.
    """

    def __init__(self, pos_keys: np.ndarray, pos_scores: np.ndarray):
        order = np.argsort(pos_keys)
        self.pos_keys = np.asarray(pos_keys, dtype=np.int64)[order]
        self.pos_scores = np.asarray(pos_scores, dtype=np.float64)[order]
        if len(self.pos_keys) == 0:
            raise DataError("empty test set")
        self.greater = np.zeros(len(self.pos_keys), dtype=np.int64)
        self.equal = np.zeros(len(self.pos_keys), dtype=np.int64)
        self.equal_before = np.zeros(len(self.pos_keys), dtype=np.int64)
        self.total = 0
        self.seen_pos = 0
        self._uniq, self._uinv = np.unique(self.pos_scores, return_inverse=True)

    def add(self, keys: np.ndarray, scores: np.ndarray) -> None:
        if len(keys) == 0:
            return
        self.total += len(keys)
        idx = np.searchsorted(self.pos_keys, keys)
        idx[idx == len(self.pos_keys)] = 0
        hit = self.pos_keys[idx] == keys
        if hit.any():
            self.seen_pos += int(hit.sum())
            if not np.array_equal(self.pos_scores[idx[hit]], scores[hit]):
                raise RuntimeError("streamed positive scores disagree with the pair scores")
        order = np.lexsort((keys, scores))
        s_sorted = scores[order]
        k_sorted = keys[order]
        left = np.searchsorted(s_sorted, self._uniq, side="left")
        right = np.searchsorted(s_sorted, self._uniq, side="right")
        self.greater += (len(scores) - right)[self._uinv]
        eq = right - left
        self.equal += eq[self._uinv]
        tied = np.flatnonzero(eq)
        if len(tied):
            members = np.isin(self._uinv, tied)
            u = self._uinv[members]
            # keys are sorted inside each run of equal scores
            before = np.array([np.searchsorted(k_sorted[left[j]:right[j]], key)
                               for j, key in zip(u, self.pos_keys[members])], dtype=np.int64)
            self.equal_before[members] += before

    def _check(self) -> tuple[int, int]:
        p = len(self.pos_keys)
        if self.seen_pos != p:
            raise DataError(f"{p - self.seen_pos} test links never appeared among the candidates")
        q = self.total - p
        if q <= 0:
            raise DataError("no non-links among the candidates")
        return p, q

    def auc(self) -> float:
        p, q = self._check()
        ps = self.pos_scores
        pos_sorted = np.sort(ps)
        pos_less = np.searchsorted(pos_sorted, ps, side="left")
        pos_eq = np.searchsorted(pos_sorted, ps, side="right") - pos_less
        all_less = self.total - self.greater - self.equal
        neg_less = all_less - pos_less
        neg_eq = self.equal - pos_eq
        return float((neg_less.sum() + 0.5 * neg_eq.sum()) / (p * q))

    def aupr(self) -> float:
        self._check()
        return _average_precision(self.greater + self.equal_before + 1)


def winning_rate(results: Mapping[str, Mapping[str, float]], tie_tol: float = 1e-4) -> dict[str, float]:
    """Share of networks on which each index is best.

    ``results[index][network]`` holds the metric. Indices within ``tie_tol``
    of the best value on a network split that network's point equally.
    """
    indices = list(results)
    if not indices:
        raise DataError("empty results table")
    networks = list(results[indices[0]])
    if not networks:
        raise DataError("no networks in results table")
    for idx in indices:
        if set(results[idx]) != set(networks):
            raise DataError(f"incomplete results for index {idx!r}")
    points = dict.fromkeys(indices, 0.0)
    for net in networks:
        values = {idx: float(results[idx][net]) for idx in indices}
        best = max(values.values())
        winners = [idx for idx, v in values.items() if best - v <= tie_tol]
        for idx in winners:
            points[idx] += 1.0 / len(winners)
    return {idx: pts / len(networks) for idx, pts in points.items()}


def mann_whitney_u(a: Sequence[float], b: Sequence[float]) -> tuple[float, float]:
    """``U = #{a_i > b_j} + 0.5 #{a_i == b_j}`` and the two-sided p-value
    from the normal approximation with tie-corrected variance and
    continuity correction."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    na, nb = len(a), len(b)
    if na == 0 or nb == 0:
        raise ValueError("both samples must be non-empty")
    ranks = stats.rankdata(np.concatenate([a, b]))
    u = float(ranks[:na].sum() - na * (na + 1) / 2)
    n = na + nb
    _, counts = np.unique(np.concatenate([a, b]), return_counts=True)
    tie = float((counts ** 3 - counts).sum())
    var = na * nb / 12.0 * ((n + 1) - tie / (n * (n - 1))) if n > 1 else 0.0
    if var <= 0:
        return u, 1.0
    mean = na * nb / 2.0
    z = max(abs(u - mean) - 0.5, 0.0) / math.sqrt(var)
    return u, float(min(1.0, 2.0 * stats.norm.sf(z)))
