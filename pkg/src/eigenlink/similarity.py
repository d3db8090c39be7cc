"""Similarity indices for link prediction.

Each index is a *scorer*: an object that yields dense row blocks of its
(symmetric) score matrix on demand. Pair scores are gathered from those
rows, and full rankings are streamed block by block, so no N x N matrix
is formed except for the two global indices (Katz, LO), which are dense
by nature and gated by ``dense_cap``.

Local indices and the eigenvector-controlled family are written as sums
of sparse matrix chains plus rank-one terms, e.g.

    tilde(S) = A @ A + (lambda_2^2 - lambda_1^2) v_1 v_1^T

so that a block of rows costs a few sparse products, and the SCF
enhancement ``(A + I) S + S (A + I)`` reuses the same representation.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from enum import Enum
from typing import Iterator, Sequence

import numpy as np
from scipy import linalg, sparse

from .errors import DataError, DegenerateError, DivergenceError, ResourceError
from .graph import Graph
from .spectral import SpectralSummary, top_eigenpairs

__all__ = [
    "IndexId",
    "IndexConfig",
    "ScoreTable",
    "Scorer",
    "DenseScorer",
    "make_scorer",
    "score",
    "score_local",
    "scf_enhance",
    "tilde_scores",
    "tilde_star_scores",
    "cle_scores",
    "cle_star_scores",
    "katz_scores",
    "lp_scores",
    "lo_scores",
    "iter_candidate_blocks",
    "DEFAULT_DENSE_CAP",
]

DEFAULT_DENSE_CAP = 5000
_BLOCK_ENTRIES = 1 << 21


class IndexId(str, Enum):
    CN = "CN"
    AA = "AA"
    RA = "RA"
    CRA = "CRA"
    PA = "PA"
    SCF_CN = "SCF_CN"
    SCF_AA = "SCF_AA"
    SCF_RA = "SCF_RA"
    SCF_CRA = "SCF_CRA"
    TILDE = "TILDE"
    TILDE_STAR = "TILDE_STAR"
    CLE = "CLE"
    CLE_STAR = "CLE_STAR"
    KATZ = "KATZ"
    LP = "LP"
    LO = "LO"


PARAMS: dict[IndexId, str] = {
    IndexId.TILDE_STAR: "alpha",
    IndexId.CLE_STAR: "alpha",
    IndexId.LO: "alpha",
    IndexId.KATZ: "beta",
    IndexId.LP: "epsilon",
}
LOCAL = (IndexId.CN, IndexId.AA, IndexId.RA, IndexId.CRA, IndexId.PA)
SPECTRAL = (IndexId.TILDE, IndexId.TILDE_STAR, IndexId.CLE, IndexId.CLE_STAR)
DENSE = (IndexId.KATZ, IndexId.LO)


@dataclass(frozen=True)
class IndexConfig:
    """An index and its single tunable parameter, if it has one."""

    index_id: IndexId
    alpha: float | None = None
    beta: float | None = None
    epsilon: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "index_id", IndexId(self.index_id))
        wanted = PARAMS.get(self.index_id)
        for name in ("alpha", "beta", "epsilon"):
            value = getattr(self, name)
            if name == wanted and value is None:
                raise ValueError(f"{self.index_id.value} requires {name}")
            if name != wanted and value is not None:
                raise ValueError(f"{self.index_id.value} takes no {name}")
            if value is not None:
                value = float(value)
                if not math.isfinite(value):
                    raise ValueError(f"{name} must be finite")
                object.__setattr__(self, name, value)

    @property
    def param_name(self) -> str | None:
        return PARAMS.get(self.index_id)

    @property
    def param(self) -> float | None:
        name = self.param_name
        return None if name is None else getattr(self, name)

    @property
    def params_str(self) -> str:
        name = self.param_name
        return "" if name is None else f"{name}={self.param!r}"

    @property
    def label(self) -> str:
        p = self.params_str
        return self.index_id.value if not p else f"{self.index_id.value}:{p}"

    @classmethod
    def parse(cls, text: str) -> "IndexConfig":
        """Parse ``"CN"`` or ``"CLE_STAR:alpha=0.4"`` (``"CLE_STAR:0.4"`` also works)."""
        name, _, rest = text.strip().partition(":")
        try:
            index_id = IndexId(name.strip().upper().replace("*", "_STAR").replace("-", "_"))
        except ValueError:
            raise ValueError(f"unknown index {name!r}") from None
        kwargs = {}
        if rest:
            key, eq, value = rest.partition("=")
            if not eq:
                key, value = PARAMS.get(index_id, "alpha"), key
            kwargs[key.strip()] = float(value)
        return cls(index_id, **kwargs)

    def with_param(self, value: float) -> "IndexConfig":
        return IndexConfig(self.index_id, **{self.param_name: value})


@dataclass(frozen=True, eq=False)
class ScoreTable:
    """Scores of node pairs ``(x, y)``, ``x < y``, under one index."""

    config: IndexConfig | None
    pairs: np.ndarray
    scores: np.ndarray

    def __post_init__(self):
        if len(self.pairs) != len(self.scores):
            raise ValueError("pairs and scores differ in length")
        if len(self.pairs) and np.any(self.pairs[:, 0] >= self.pairs[:, 1]):
            raise ValueError("pairs must satisfy x < y")
        if not np.all(np.isfinite(self.scores)):
            raise DegenerateError("non-finite score")

    def __len__(self) -> int:
        return len(self.scores)

    def ranking(self) -> np.ndarray:
        """Order by descending score, then lexicographic pair."""
        return np.lexsort((self.pairs[:, 1], self.pairs[:, 0], -self.scores))

    def as_dict(self) -> dict[tuple[int, int], float]:
        return {(int(x), int(y)): float(s) for (x, y), s in zip(self.pairs, self.scores)}

    def to_csv(self, fh, labels: Sequence[str] | None = None) -> None:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["x_label", "y_label", "score"])
        for i in self.ranking():
            x, y = self.pairs[i]
            lx = labels[x] if labels is not None else str(x)
            ly = labels[y] if labels is not None else str(y)
            w.writerow([lx, ly, repr(float(self.scores[i]))])

    @classmethod
    def from_csv(cls, fh, labels: Sequence[str] | None = None,
                 config: IndexConfig | None = None) -> "ScoreTable":
        index = {lab: i for i, lab in enumerate(labels)} if labels is not None else None
        reader = csv.DictReader(fh)
        pairs, scores = [], []
        for row in reader:
            if index is None:
                x, y = int(row["x_label"]), int(row["y_label"])
            else:
                x, y = index[row["x_label"]], index[row["y_label"]]
            pairs.append((min(x, y), max(x, y)))
            scores.append(float(row["score"]))
        p = np.asarray(pairs, dtype=np.int64).reshape(-1, 2)
        s = np.asarray(scores, dtype=np.float64)
        order = np.lexsort((p[:, 1], p[:, 0]))
        return cls(config, p[order], s[order])


# scorers

def _selector(rows: np.ndarray, n: int) -> sparse.csr_matrix:
    data = np.ones(len(rows))
    return sparse.csr_matrix((data, (np.arange(len(rows)), rows)), shape=(len(rows), n))


def _dense(x) -> np.ndarray:
    return x.toarray() if sparse.issparse(x) else np.asarray(x)


class Scorer:
    """Row access to a symmetric N x N score matrix."""

    n: int

    def rows(self, rows: np.ndarray) -> np.ndarray:
        return self.product(_selector(np.asarray(rows, dtype=np.int64), self.n))

    def product(self, left: sparse.csr_matrix, right: sparse.csr_matrix | None = None) -> np.ndarray:
        """Dense ``left @ S`` (then ``@ right``) for sparse ``left`` / ``right``.

        The default goes row by row through ``rows``; subclasses override
        whichever of ``rows``/``product`` is natural.
        """
        left = sparse.csr_matrix(left)
        out = np.zeros((left.shape[0], self.n))
        for i in range(left.shape[0]):
            lo, hi = left.indptr[i], left.indptr[i + 1]
            cols = left.indices[lo:hi]
            if len(cols):
                out[i] = left.data[lo:hi] @ self.rows(cols)
        if right is not None:
            out = np.asarray((right.T @ out.T).T)
        return out

    def score_pairs(self, pairs) -> np.ndarray:
        """Scores of ``pairs`` (any orientation). Rows are evaluated one
        distinct first endpoint at a time in blocks, so a pair's value does
        not depend on which other pairs are requested."""
        p = np.asarray(pairs, dtype=np.int64).reshape(-1, 2)
        if len(p) == 0:
            return np.empty(0)
        if p.min() < 0 or p.max() >= self.n:
            raise IndexError("node id out of range")
        xs = np.minimum(p[:, 0], p[:, 1])
        ys = np.maximum(p[:, 0], p[:, 1])
        out = np.empty(len(p))
        uniq, inv = np.unique(xs, return_inverse=True)
        block = max(1, _BLOCK_ENTRIES // max(self.n, 1))
        for start in range(0, len(uniq), block):
            chunk = uniq[start:start + block]
            R = self.rows(chunk)
            sel = (inv >= start) & (inv < start + len(chunk))
            out[sel] = R[inv[sel] - start, ys[sel]]
        return out


class DenseScorer(Scorer):
    """Scorer backed by an explicit symmetric matrix (small graphs, tests)."""

    def __init__(self, matrix):
        self.matrix = np.asarray(_dense(matrix), dtype=np.float64)
        self.n = self.matrix.shape[0]

    def rows(self, rows):
        return self.matrix[np.asarray(rows, dtype=np.int64)]

    def product(self, left, right=None):
        out = np.asarray(left @ self.matrix)
        if right is not None:
            out = np.asarray((right.T @ out.T).T)
        return out


class ChainScorer(Scorer):
    """``S = sum_i c_i F_i1 @ F_i2 @ ... + sum_j d_j u_j w_j^T`` with sparse factors."""

    def __init__(self, n: int, chains, rank_one=()):
        self.n = n
        self.chains = [(float(c), list(fs)) for c, fs in chains]
        self.rank_one = [(float(d), np.asarray(u, float), np.asarray(w, float)) for d, u, w in rank_one]

    def product(self, left, right=None):
        left = sparse.csr_matrix(left)
        total = None
        for coef, factors in self.chains:
            X = left
            for F in factors:
                X = X @ F
            if right is not None:
                X = X @ right
            X = X * coef if coef != 1.0 else X
            total = X if total is None else total + X
        out = np.zeros((left.shape[0], self.n)) if total is None else _dense(total)
        for d, u, w in self.rank_one:
            lu = left @ u
            wr = w if right is None else right.T @ w
            out = out + d * np.outer(lu, wr)
        return out


class CRAScorer(Scorer):
    """CRA: sum over common neighbours z of |G_z & G_x & G_y| / k_z."""

    def __init__(self, g: Graph):
        self.g = g
        self.n = g.n
        self.A = g.adjacency
        k = g.degrees.astype(np.float64)
        self.inv_k = np.divide(1.0, k, out=np.zeros_like(k), where=k > 0)

    def _row(self, x: int) -> np.ndarray:
        nb = self.g.neighbors(x)
        if len(nb) < 2:
            return np.zeros(self.n)
        P = self.A[nb]
        W = P[:, nb]
        P_scaled = sparse.diags(self.inv_k[nb]) @ P
        return np.asarray(P_scaled.multiply(W @ P).sum(axis=0)).ravel()

    def rows(self, rows):
        rows = np.asarray(rows, dtype=np.int64)
        out = np.empty((len(rows), self.n))
        for i, x in enumerate(rows):
            out[i] = self._row(int(x))
        return out


class SCFScorer(Scorer):
    """``(A + I) S + [(A + I) S]^T`` for a symmetric base ``S``."""

    def __init__(self, g: Graph, base: Scorer):
        self.n = g.n
        self.base = base
        self.AI = (g.adjacency + sparse.identity(g.n, format="csr")).tocsr()

    def rows(self, rows):
        rows = np.asarray(rows, dtype=np.int64)
        if isinstance(self.base, ChainScorer):
            sel = _selector(rows, self.n)
            return self.base.product(self.AI[rows]) + self.base.product(sel, self.AI)
        out = np.empty((len(rows), self.n))
        for i, x in enumerate(rows):
            xi = np.array([x])
            out[i] = (self.base.product(self.AI[xi]) + self.base.product(_selector(xi, self.n), self.AI))[0]
        return out


# construction

def _spectrum(g: Graph, spectrum: SpectralSummary | None, k: int = 2, seed: int = 0) -> SpectralSummary:
    s = spectrum if spectrum is not None else top_eigenpairs(g, k, seed=seed)
    if s.k < k:
        raise ValueError(f"need at least {k} eigenpairs, got {s.k}")
    if s.eigenvalues[0] == 0.0 or g.m == 0:
        raise DegenerateError("leading eigenvalue is zero (no links)")
    return s


def _local_chain(g: Graph, index_id: IndexId) -> ChainScorer:
    A = g.adjacency
    k = g.degrees.astype(np.float64)
    if index_id is IndexId.CN:
        return ChainScorer(g.n, [(1.0, [A, A])])
    if index_id is IndexId.AA:
        w = np.zeros_like(k)
        m = k > 1
        w[m] = 1.0 / np.log(k[m])
    elif index_id is IndexId.RA:
        w = np.divide(1.0, k, out=np.zeros_like(k), where=k > 0)
    else:
        raise ValueError(index_id)
    return ChainScorer(g.n, [(1.0, [(A @ sparse.diags(w)).tocsr(), A])])


def _tilde_chain(g: Graph, s: SpectralSummary, coef: float) -> ChainScorer:
    A = g.adjacency
    v = s.eigenvectors[0]
    return ChainScorer(g.n, [(1.0, [A, A])], [(coef, v, v)])


def make_scorer(g: Graph, config: IndexConfig | IndexId | str,
                spectrum: SpectralSummary | None = None,
                dense_cap: int = DEFAULT_DENSE_CAP, seed: int = 0) -> Scorer:
    """Build the scorer for ``config`` on graph ``g`` (the training graph)."""
    if not isinstance(config, IndexConfig):
        config = IndexConfig.parse(config.value if isinstance(config, IndexId) else config)
    i = config.index_id
    if i in (IndexId.CN, IndexId.AA, IndexId.RA):
        return _local_chain(g, i)
    if i is IndexId.CRA:
        return CRAScorer(g)
    if i is IndexId.PA:
        k = g.degrees.astype(np.float64)
        return ChainScorer(g.n, [], [(1.0, k, k)])
    if i.value.startswith("SCF_"):
        base = IndexId(i.value[4:])
        return SCFScorer(g, make_scorer(g, IndexConfig(base)))
    if i is IndexId.LP:
        A = g.adjacency
        return ChainScorer(g.n, [(1.0, [A, A]), (config.epsilon, [A, A, A])])
    if i in SPECTRAL:
        s = _spectrum(g, spectrum, seed=seed)
        l1sq, l2sq = s.eigenvalues[0] ** 2, s.eigenvalues[1] ** 2
        if i in (IndexId.TILDE, IndexId.CLE):
            coef = l2sq - l1sq
        else:
            coef = (config.alpha - 1.0) * l1sq
        tilde = _tilde_chain(g, s, coef)
        return tilde if i in (IndexId.TILDE, IndexId.TILDE_STAR) else SCFScorer(g, tilde)
    if i is IndexId.KATZ:
        return DenseScorer(_katz_matrix(g, config.beta, spectrum, dense_cap, seed))
    if i is IndexId.LO:
        return DenseScorer(_lo_matrix(g, config.alpha, dense_cap))
    raise ValueError(f"unsupported index {i}")


def _check_cap(g: Graph, dense_cap: int) -> None:
    if g.n > dense_cap:
        raise ResourceError(f"N={g.n} exceeds the dense evaluation cap {dense_cap}")


def _katz_matrix(g: Graph, beta: float, spectrum, dense_cap: int, seed: int) -> np.ndarray:
    if beta <= 0:
        raise ValueError("beta must be positive")
    _check_cap(g, dense_cap)
    lam1 = 0.0
    if g.m:
        s = spectrum if spectrum is not None else top_eigenpairs(g, 1, seed=seed)
        lam1 = abs(float(s.eigenvalues[0]))
    if beta * lam1 >= 1.0:
        raise DivergenceError(f"Katz series diverges: beta*lambda_1 = {beta * lam1:.6g} >= 1")
    A = g.adjacency.toarray()
    eye = np.eye(g.n)
    S = linalg.solve(eye - beta * A, eye, assume_a="sym") - eye
    return (S + S.T) / 2


def _lo_matrix(g: Graph, alpha: float, dense_cap: int) -> np.ndarray:
    if alpha <= 0:
        raise ValueError("alpha must be positive")
    _check_cap(g, dense_cap)
    A = g.adjacency.toarray()
    A2 = A @ A
    X = linalg.solve(alpha * A2 + np.eye(g.n), A2, assume_a="pos")
    S = alpha * (A @ X)
    return (S + S.T) / 2


# public per-index functions

def _pairs_or_all(g: Graph, pairs) -> np.ndarray:
    if pairs is None:
        iu = np.triu_indices(g.n, 1)
        return np.column_stack(iu).astype(np.int64)
    p = np.asarray(pairs, dtype=np.int64).reshape(-1, 2)
    if len(p) and (p.min() < 0 or p.max() >= g.n):
        raise IndexError("node id out of range")
    if np.any(p[:, 0] == p[:, 1]):
        raise ValueError("pairs must join distinct nodes")
    return np.column_stack([np.minimum(p[:, 0], p[:, 1]), np.maximum(p[:, 0], p[:, 1])])


def _table(scorer: Scorer, config, g: Graph, pairs) -> ScoreTable:
    p = _pairs_or_all(g, pairs)
    return ScoreTable(config, p, scorer.score_pairs(p))


def score(g: Graph, config: IndexConfig | str, pairs=None, spectrum: SpectralSummary | None = None,
          dense_cap: int = DEFAULT_DENSE_CAP) -> ScoreTable:
    """Score ``pairs`` (default: all pairs) under any index."""
    if not isinstance(config, IndexConfig):
        config = IndexConfig.parse(config)
    return _table(make_scorer(g, config, spectrum, dense_cap), config, g, pairs)


def score_local(g: Graph, index_id: IndexId | str, pairs=None) -> ScoreTable:
    config = IndexConfig(IndexId(index_id))
    if config.index_id not in LOCAL:
        raise ValueError(f"{config.index_id.value} is not a local index")
    return score(g, config, pairs)


def scf_enhance(g: Graph, base: IndexId | str | Scorer, pairs=None) -> ScoreTable:
    """SCF enhancement of CN/AA/RA/CRA, or of any symmetric ``Scorer``."""
    if isinstance(base, Scorer):
        return _table(SCFScorer(g, base), None, g, pairs)
    base_id = IndexId(base)
    if base_id not in (IndexId.CN, IndexId.AA, IndexId.RA, IndexId.CRA):
        raise ValueError(f"no SCF variant of {base_id.value}")
    return score(g, IndexConfig(IndexId("SCF_" + base_id.value)), pairs)


def tilde_scores(g: Graph, s: SpectralSummary, pairs=None) -> ScoreTable:
    return score(g, IndexConfig(IndexId.TILDE), pairs, s)


def tilde_star_scores(g: Graph, s: SpectralSummary, alpha: float, pairs=None) -> ScoreTable:
    return score(g, IndexConfig(IndexId.TILDE_STAR, alpha=alpha), pairs, s)


def cle_scores(g: Graph, s: SpectralSummary, pairs=None) -> ScoreTable:
    return score(g, IndexConfig(IndexId.CLE), pairs, s)


def cle_star_scores(g: Graph, s: SpectralSummary, alpha: float, pairs=None) -> ScoreTable:
    return score(g, IndexConfig(IndexId.CLE_STAR, alpha=alpha), pairs, s)


def katz_scores(g: Graph, beta: float, pairs=None, dense_cap: int = DEFAULT_DENSE_CAP) -> ScoreTable:
    return score(g, IndexConfig(IndexId.KATZ, beta=beta), pairs, dense_cap=dense_cap)


def lp_scores(g: Graph, epsilon: float, pairs=None) -> ScoreTable:
    return score(g, IndexConfig(IndexId.LP, epsilon=epsilon), pairs)


def lo_scores(g: Graph, alpha: float, pairs=None, dense_cap: int = DEFAULT_DENSE_CAP) -> ScoreTable:
    return score(g, IndexConfig(IndexId.LO, alpha=alpha), pairs, dense_cap=dense_cap)


def iter_candidate_blocks(scorer: Scorer, exclude: Graph,
                          block_entries: int = _BLOCK_ENTRIES) -> Iterator[tuple[np.ndarray, np.ndarray]]:
    """Stream ``(keys, scores)`` for every pair ``x < y`` that is not a link
    of ``exclude``, in lexicographic pair order; ``key = x * N + y``."""
    n = exclude.n
    if scorer.n != n:
        raise DataError("scorer and graph disagree on N")
    block = max(1, block_entries // max(n, 1))
    cols = np.arange(n)
    for start in range(0, n - 1, block):
        rows = np.arange(start, min(start + block, n - 1))
        R = scorer.rows(rows)
        mask = cols[None, :] > rows[:, None]
        mask &= exclude.adjacency[rows].toarray() == 0
        rr, cc = np.nonzero(mask)
        keys = rows[rr] * n + cc
        yield keys, R[rr, cc]
